#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hazemeter/registration.hpp"
#include "hazemeter/rng.hpp"

using namespace haze;

namespace {

ControlPoints pairs_from_transform(const AffineTransform& t, int n, double noise,
                                   std::uint64_t seed) {
    // base points spread across the frame, moving = t(base) + noise
    ControlPoints cp;
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        Point2 base{rng.uniform(0, 200), rng.uniform(0, 150)};
        Point2 moving = t.apply(base);
        moving.x += noise * rng.normal();
        moving.y += noise * rng.normal();
        cp.pairs.emplace_back(moving, base);
    }
    return cp;
}

// band-limited smooth image for interpolation-loss measurements
LinearImage smooth_image(int h, int w) {
    LinearImage img(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int ch = 0; ch < 3; ++ch)
                img.at(r, c, ch) =
                    0.5 + 0.4 * std::sin(0.05 * r + 0.3 * ch) * std::cos(0.07 * c);
    return img;
}

double rms_diff(const LinearImage& a, const LinearImage& b, int margin) {
    double sum = 0;
    long long n = 0;
    for (int r = margin; r < a.height() - margin; ++r)
        for (int c = margin; c < a.width() - margin; ++c)
            for (int ch = 0; ch < 3; ++ch) {
                double d = a.at(r, c, ch) - b.at(r, c, ch);
                sum += d * d;
                ++n;
            }
    return std::sqrt(sum / n);
}

}  // namespace

TEST_CASE("identity pairs give the identity transform") {
    ControlPoints cp = pairs_from_transform(AffineTransform::identity(), 3, 0.0, 1);
    AffineTransform t = estimate_affine(cp);
    for (int i = 0; i < 6; ++i)
        CHECK(t.m[i] == doctest::Approx(AffineTransform::identity().m[i]).epsilon(1e-9));
}

TEST_CASE("pure translation is recovered") {
    ControlPoints cp = pairs_from_transform(AffineTransform::translation(5, -3), 3, 0.0, 2);
    AffineTransform t = estimate_affine(cp);
    CHECK(t.m[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(t.m[1] == doctest::Approx(0.0).scale(1).epsilon(1e-9));
    CHECK(std::abs(t.m[2] - 5.0) < 1e-9);
    CHECK(std::abs(t.m[5] + 3.0) < 1e-9);
}

TEST_CASE("exact affine points recover the transform to 1e-9 for any 3-pair set") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        AffineTransform truth;
        double angle = rng.uniform(-0.5, 0.5);
        truth.m = {std::cos(angle), -std::sin(angle), rng.uniform(-20, 20),
                   std::sin(angle), std::cos(angle), rng.uniform(-20, 20)};
        ControlPoints cp = pairs_from_transform(truth, 3, 0.0, 1000 + trial);
        // skip nearly collinear draws: the contract requires non-degenerate triples
        const auto& p = cp.pairs;
        double area = std::abs((p[1].second.x - p[0].second.x) * (p[2].second.y - p[0].second.y) -
                               (p[2].second.x - p[0].second.x) * (p[1].second.y - p[0].second.y));
        if (area < 1.0) continue;
        AffineTransform t = estimate_affine(cp);
        for (int i = 0; i < 6; ++i) CHECK(std::abs(t.m[i] - truth.m[i]) < 1e-9);
    }
}

TEST_CASE("noisy rotation+translation: residuals at the noise level") {
    AffineTransform truth;
    double angle = 0.1;
    truth.m = {std::cos(angle), -std::sin(angle), 4.0, std::sin(angle), std::cos(angle), -2.0};
    ControlPoints cp = pairs_from_transform(truth, 10, 0.1, 5);
    AffineTransform t = estimate_affine(cp);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(t.m[i] - truth.m[i]) < 1e-2 * 10);
    double rss = 0;
    for (const auto& [moving, base] : cp.pairs) {
        Point2 pred = t.apply(base);
        rss += (pred.x - moving.x) * (pred.x - moving.x) +
               (pred.y - moving.y) * (pred.y - moving.y);
    }
    CHECK(std::sqrt(rss / (2.0 * cp.pairs.size())) <= 0.1 * 1.5);
}

TEST_CASE("collinear base points are rejected") {
    ControlPoints cp;
    cp.pairs.emplace_back(Point2{0, 0}, Point2{0, 0});
    cp.pairs.emplace_back(Point2{1, 1}, Point2{1, 1});
    cp.pairs.emplace_back(Point2{2, 2}, Point2{2, 2});
    CHECK_THROWS_AS(estimate_affine(cp), DegenerateConfiguration);
    ControlPoints two;
    two.pairs.emplace_back(Point2{0, 0}, Point2{0, 0});
    two.pairs.emplace_back(Point2{1, 0}, Point2{1, 0});
    CHECK_THROWS_AS(estimate_affine(two), DegenerateConfiguration);
}

TEST_CASE("warp by the identity is bit-identical") {
    LinearImage img = smooth_image(20, 30);
    LinearImage out = warp(img, AffineTransform::identity());
    for (size_t i = 0; i < img.data().size(); ++i) CHECK(out.data()[i] == img.data()[i]);
}

TEST_CASE("integer translation shifts by one column, last column zero") {
    LinearImage img = smooth_image(8, 8);
    LinearImage out = warp(img, AffineTransform::translation(1, 0));
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 7; ++c)
            CHECK(out.at(r, c, 0) == doctest::Approx(img.at(r, c + 1, 0)).epsilon(1e-12));
        CHECK(out.at(r, 7, 0) == 0.0);
    }
}

TEST_CASE("warp round trip loses at most interpolation error") {
    LinearImage img = smooth_image(60, 60);
    AffineTransform t;
    double angle = 0.05;
    t.m = {std::cos(angle), -std::sin(angle), 1.3, std::sin(angle), std::cos(angle), -0.7};
    LinearImage round = warp(warp(img, t), inverse(t));
    CHECK(rms_diff(round, img, 6) <= 2e-2);
}

TEST_CASE("warp composition matches composed transform") {
    LinearImage img = smooth_image(50, 50);
    AffineTransform a = AffineTransform::translation(0.4, -1.2);
    AffineTransform b;
    b.m = {1.01, 0.02, 0.3, -0.015, 0.99, 0.8};
    LinearImage two_step = warp(warp(img, a), b);
    LinearImage one_step = warp(img, compose(a, b));
    CHECK(rms_diff(two_step, one_step, 5) <= 2e-2);
}
