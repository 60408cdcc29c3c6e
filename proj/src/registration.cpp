#include "hazemeter/registration.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace haze {

AffineTransform compose(const AffineTransform& a, const AffineTransform& b) {
    AffineTransform r;
    r.m[0] = a.m[0] * b.m[0] + a.m[1] * b.m[3];
    r.m[1] = a.m[0] * b.m[1] + a.m[1] * b.m[4];
    r.m[2] = a.m[0] * b.m[2] + a.m[1] * b.m[5] + a.m[2];
    r.m[3] = a.m[3] * b.m[0] + a.m[4] * b.m[3];
    r.m[4] = a.m[3] * b.m[1] + a.m[4] * b.m[4];
    r.m[5] = a.m[3] * b.m[2] + a.m[4] * b.m[5] + a.m[5];
    return r;
}

AffineTransform inverse(const AffineTransform& t) {
    double det = t.m[0] * t.m[4] - t.m[1] * t.m[3];
    if (std::abs(det) < 1e-300) throw DegenerateConfiguration("singular linear part");
    AffineTransform r;
    r.m[0] = t.m[4] / det;
    r.m[1] = -t.m[1] / det;
    r.m[3] = -t.m[3] / det;
    r.m[4] = t.m[0] / det;
    r.m[2] = -(r.m[0] * t.m[2] + r.m[1] * t.m[5]);
    r.m[5] = -(r.m[3] * t.m[2] + r.m[4] * t.m[5]);
    return r;
}

AffineTransform estimate_affine(const ControlPoints& cp) {
    const auto& pairs = cp.pairs;
    size_t n = pairs.size();
    if (n < 3) throw DegenerateConfiguration("need at least 3 control-point pairs");

    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs_x(n), rhs_y(n);
    for (size_t i = 0; i < n; ++i) {
        const Point2& base = pairs[i].second;
        const Point2& moving = pairs[i].first;
        design(i, 0) = base.x;
        design(i, 1) = base.y;
        design(i, 2) = 1.0;
        rhs_x(i) = moving.x;
        rhs_y(i) = moving.y;
    }
    // Collinear base points make the design matrix rank-deficient.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-9);
    if (qr.rank() < 3) throw DegenerateConfiguration("base points are collinear");

    Eigen::Vector3d row_x = qr.solve(rhs_x);
    Eigen::Vector3d row_y = qr.solve(rhs_y);
    AffineTransform t;
    t.m = {row_x(0), row_x(1), row_x(2), row_y(0), row_y(1), row_y(2)};
    if (std::abs(t.m[0] * t.m[4] - t.m[1] * t.m[3]) < 1e-12)
        throw DegenerateConfiguration("estimated linear part is singular");
    return t;
}

namespace {

double bilinear(const LinearImage& img, double x, double y, int ch) {
    // zero padding outside [0, w-1] x [0, h-1]
    if (x < -1 || y < -1 || x > img.width() || y > img.height()) return 0.0;
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double fx = x - x0;
    double fy = y - y0;
    auto sample = [&](int yy, int xx) {
        if (xx < 0 || yy < 0 || xx >= img.width() || yy >= img.height()) return 0.0;
        return img.at(yy, xx, ch);
    };
    return (1 - fy) * ((1 - fx) * sample(y0, x0) + fx * sample(y0, x0 + 1)) +
           fy * ((1 - fx) * sample(y0 + 1, x0) + fx * sample(y0 + 1, x0 + 1));
}

}  // namespace

LinearImage warp(const LinearImage& img, const AffineTransform& t) {
    LinearImage out(img.height(), img.width());
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            Point2 src = t.apply({static_cast<double>(c), static_cast<double>(r)});
            for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = bilinear(img, src.x, src.y, ch);
        }
    }
    return out;
}

ControlPoints load_control_points(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open control points: " + path.string());
    nlohmann::json j;
    in >> j;
    ControlPoints cp;
    for (const auto& pair : j.at("pairs")) {
        Point2 moving{pair.at("moving").at(0).get<double>(), pair.at("moving").at(1).get<double>()};
        Point2 base{pair.at("base").at(0).get<double>(), pair.at("base").at(1).get<double>()};
        cp.pairs.emplace_back(moving, base);
    }
    return cp;
}

}  // namespace haze
