#include "hazemeter/dichromatic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace haze {

namespace {

inline Eigen::Vector3d to_eigen(const Rgb& v) { return {v[0], v[1], v[2]}; }

}  // namespace

Rgb airlight_direction(const LinearImage& e1, const LinearImage& e2) {
    if (!e1.same_shape(e2)) throw ShapeMismatch("pair must share dimensions");
    Eigen::Matrix3d normal_matrix = Eigen::Matrix3d::Zero();
    double max_cross = 0.0;
    double max_mag = 0.0;
    for (int r = 0; r < e1.height(); ++r) {
        for (int c = 0; c < e1.width(); ++c) {
            Eigen::Vector3d a = to_eigen(e1.pixel(r, c));
            Eigen::Vector3d b = to_eigen(e2.pixel(r, c));
            Eigen::Vector3d n = a.cross(b);
            normal_matrix += n * n.transpose();
            max_cross = std::max(max_cross, n.norm());
            max_mag = std::max(max_mag, a.norm() * b.norm());
        }
    }
    if (max_cross <= 1e-12 * std::max(max_mag, 1e-300))
        throw DegenerateScene("color pairs are parallel everywhere: no airlight change");

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(normal_matrix);
    Eigen::Vector3d v = eig.eigenvectors().col(0);  // smallest eigenvalue
    if (v.sum() < 0) v = -v;
    return {v(0), v(1), v(2)};
}

DtSample dt_ratio_and_ta(const Rgb& e1_in, const Rgb& e2_in, const Rgb& a_hat_in) {
    Eigen::Vector3d e1 = to_eigen(e1_in);
    Eigen::Vector3d e2 = to_eigen(e2_in);
    Eigen::Vector3d a_hat = to_eigen(a_hat_in);
    double e1_norm = e1.norm();
    if (e1_norm <= 0) throw DegeneratePoint("e1 must be nonzero");

    Eigen::Vector3d axe1 = a_hat.cross(e1);
    double denom = axe1.dot(axe1);
    if (denom <= 1e-24 * e1.squaredNorm())
        throw DegeneratePoint("airlight direction parallel to e1");

    double t = axe1.dot(e2.cross(e1)) / denom;
    DtSample s;
    s.ratio = (e2 - t * a_hat).norm() / e1_norm;
    s.t_mag = std::abs(t);
    s.t_signed = t;
    return s;
}

HorizonRadiances fit_horizon_radiances(const std::vector<DtSample>& samples) {
    if (samples.size() < 2) throw CollinearSamples("need at least two samples");
    double n = static_cast<double>(samples.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const DtSample& s : samples) {
        sx += s.ratio;
        sy += s.t_mag;
        sxx += s.ratio * s.ratio;
        sxy += s.ratio * s.t_mag;
    }
    double denom = n * sxx - sx * sx;
    double scale = std::max(sxx, 1e-300);
    if (std::abs(denom) <= 1e-12 * n * scale)
        throw CollinearSamples("direct-transmission ratios do not vary");
    double slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n;
    // c = A_inf2 - ratio * A_inf1: the slope is negated.
    return {-slope, intercept};
}

DichromaticResult dichromatic_dehaze(const LinearImage& e1, const LinearImage& e2,
                                     const Rgb& a_hat_in, const HorizonRadiances& horizon,
                                     double cube_dim) {
    if (!e1.same_shape(e2)) throw ShapeMismatch("pair must share dimensions");
    if (!(horizon.a1 > 0) || !(horizon.a2 > 0))
        throw InvalidAirlight("horizon radiances must be positive");

    int h = e1.height(), w = e1.width();
    Eigen::Vector3d a_hat = to_eigen(a_hat_in);

    double max_mag = 0.0;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int ch = 0; ch < 3; ++ch) max_mag = std::max(max_mag, e1.at(r, c, ch));
    if (cube_dim <= 0) cube_dim = 1.1 * std::max(max_mag, 1e-12);
    if (cube_dim < max_mag) throw OutOfBounds("cube dimension below max pixel magnitude");

    DichromaticResult out;
    out.a_hat = a_hat_in;
    out.horizon = horizon;
    out.dot_depth = ScalarMap(h, w);
    out.alpha = ScalarMap(h, w);
    out.optical_thickness = ScalarMap(h, w);
    out.dehazed = LinearImage(h, w);

    double log_a_ratio = std::log(horizon.a2 / horizon.a1);
    ScalarMap q_estimate(h, w);
    double min_alpha = std::numeric_limits<double>::infinity();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            DtSample s = dt_ratio_and_ta(e1.pixel(r, c), e2.pixel(r, c), a_hat_in);
            // noise can push individual ratios to zero; bound them instead of
            // rejecting the whole image
            double dot_z = log_a_ratio - std::log(std::max(s.ratio, 1e-12));
            out.dot_depth.at(r, c) = dot_z;

            // Distance along -A from E1 to the cube surface. With A >= 0 the
            // ray can only exit through the three zero-faces.
            double q = std::numeric_limits<double>::infinity();
            for (int ch = 0; ch < 3; ++ch)
                if (a_hat(ch) > 0) q = std::min(q, e1.at(r, c, ch) / a_hat(ch));
            q_estimate.at(r, c) = q;

            // A point can only anchor if both its cube distance and its full
            // magnitude stay below the horizon radiance (otherwise its
            // optical thickness has no real value).
            double alpha = std::numeric_limits<double>::infinity();
            if (q / horizon.a1 < 1.0 && dot_z > 0 &&
                to_eigen(e1.pixel(r, c)).norm() / horizon.a1 < 1.0)
                alpha = -std::log(1.0 - q / horizon.a1) / dot_z;
            out.alpha.at(r, c) = alpha;
            min_alpha = std::min(min_alpha, alpha);
        }
    }
    if (!std::isfinite(min_alpha))
        throw NoAnchorFound("estimated airlight exceeds the horizon radiance everywhere");

    // Anchors: every point within relative tolerance of the minimal alpha.
    double cutoff = min_alpha + std::abs(min_alpha) * 1e-6;
    std::vector<std::pair<int, int>> anchors;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (out.alpha.at(r, c) <= cutoff) anchors.emplace_back(r, c);
    out.anchor_count = static_cast<int>(anchors.size());

    // Each anchor's real airlight magnitude is |E1|; its optical thickness is
    // propagated to the rest of the scene by the DOT depth ratio.
    for (const auto& [ar, ac] : anchors) {
        double real_q = to_eigen(e1.pixel(ar, ac)).norm();
        double bz_anchor = -std::log(1.0 - real_q / horizon.a1);
        double dot_anchor = out.dot_depth.at(ar, ac);
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double bz = bz_anchor * (out.dot_depth.at(r, c) / dot_anchor);
                out.optical_thickness.at(r, c) += bz;
                double q = horizon.a1 * (1.0 - std::exp(-bz));
                for (int ch = 0; ch < 3; ++ch)
                    out.dehazed.at(r, c, ch) += e1.at(r, c, ch) - q * a_hat(ch);
            }
        }
    }
    double k = static_cast<double>(anchors.size());
    for (double& v : out.dehazed.data()) v /= k;
    for (double& v : out.optical_thickness.v) v /= k;
    return out;
}

}  // namespace haze
