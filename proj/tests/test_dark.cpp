#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hazemeter/dark.hpp"
#include "hazemeter/hazesim.hpp"
#include "hazemeter/rng.hpp"

using namespace haze;

namespace {

LinearImage random_img(int h, int w, std::uint64_t seed) {
    LinearImage img(h, w);
    Rng rng(seed);
    for (double& v : img.data()) v = rng.uniform();
    return img;
}

// brute-force triple-loop oracle for the sliding window minimum
double sliding_min_oracle(const LinearImage& img, int r, int c, int wh, int ww) {
    int up = (wh - 1) / 2, down = wh - 1 - up;
    int left = (ww - 1) / 2, right = ww - 1 - left;
    double m = std::numeric_limits<double>::infinity();
    for (int rr = r - up; rr <= r + down; ++rr)
        for (int cc = c - left; cc <= c + right; ++cc) {
            if (rr < 0 || cc < 0 || rr >= img.height() || cc >= img.width()) continue;
            for (int ch = 0; ch < 3; ++ch) m = std::min(m, img.at(rr, cc, ch));
        }
    return m;
}

}  // namespace

TEST_CASE("dark channel of a constant gray image is the constant") {
    LinearImage img(20, 20);
    for (double& v : img.data()) v = 0.7;
    ScalarMap dark = dark_channel(img, WindowSpec::tiled(10, 10));
    for (double v : dark.v) CHECK(v == 0.7);
}

TEST_CASE("a zero channel in every window zeroes the dark channel") {
    LinearImage img = random_img(20, 20, 1);
    for (int pr = 0; pr < 2; ++pr)
        for (int pc = 0; pc < 2; ++pc) img.at(pr * 10 + 3, pc * 10 + 4, 1) = 0.0;
    ScalarMap dark = dark_channel(img, WindowSpec::tiled(10, 10));
    for (double v : dark.v) CHECK(v == 0.0);
}

TEST_CASE("sliding 13x9 window equals the brute-force oracle exactly") {
    LinearImage img = random_img(31, 27, 2);
    ScalarMap dark = dark_channel(img, WindowSpec::sliding(13, 9));
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
            CHECK(dark.at(r, c) == sliding_min_oracle(img, r, c, 13, 9));
}

TEST_CASE("dark channel is pointwise below every channel in its window") {
    LinearImage img = random_img(40, 40, 3);
    for (const WindowSpec& win : {WindowSpec::tiled(10, 10), WindowSpec::sliding(5, 7)}) {
        ScalarMap dark = dark_channel(img, win);
        for (int r = 0; r < img.height(); ++r)
            for (int c = 0; c < img.width(); ++c)
                for (int ch = 0; ch < 3; ++ch) CHECK(dark.at(r, c) <= img.at(r, c, ch));
    }
}

TEST_CASE("tiled mode requires divisibility") {
    LinearImage img = random_img(30, 30, 4);
    CHECK_THROWS_AS(dark_channel(img, WindowSpec::tiled(7, 7)), NonDivisiblePatch);
}

TEST_CASE("airlight is picked from the hazy sky, not the brightest object") {
    // a white car pixel (1.0) is brighter, but the dark channel peaks in the
    // hazy sky region (0.85 across channels)
    LinearImage img(20, 20);
    for (double& v : img.data()) v = 0.2;
    for (int r = 0; r < 10; ++r)
        for (int c = 0; c < 20; ++c) img.set_pixel(r, c, {0.85, 0.85, 0.85});  // sky
    img.set_pixel(15, 5, {1.0, 1.0, 1.0});  // white car
    ScalarMap dark = dark_channel(img, WindowSpec::sliding(3, 3));
    Rgb a = estimate_airlight_dc(img, dark);
    CHECK(a[0] == doctest::Approx(0.85).epsilon(1e-12));
}

TEST_CASE("unique maximum selects that pixel") {
    LinearImage img(10, 10);
    for (double& v : img.data()) v = 0.3;
    img.set_pixel(4, 6, {0.9, 0.9, 0.9});
    ScalarMap dark = dark_channel(img, WindowSpec::sliding(1, 1));
    Rgb a = estimate_airlight_dc(img, dark);
    CHECK(a[1] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("dark-channel maximum ties resolve in row-major scan order") {
    LinearImage img(6, 6);
    for (double& v : img.data()) v = 0.4;
    // two pixels tie on the dark channel and the irradiance, different colors
    img.set_pixel(1, 2, {0.8, 0.9, 1.0});
    img.set_pixel(4, 4, {1.0, 0.9, 0.8});
    ScalarMap dark = dark_channel(img, WindowSpec::sliding(1, 1));
    Rgb a = estimate_airlight_dc(img, dark);
    CHECK(a[0] == doctest::Approx(0.8).epsilon(1e-12));  // first in scan order
    CHECK(a[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("top-percentile averaging matches a sort-based oracle") {
    LinearImage img = random_img(20, 20, 5);
    ScalarMap dark = dark_channel(img, WindowSpec::sliding(1, 1));
    double percentile = 0.05;
    Rgb a = estimate_airlight_dc(img, dark, percentile);
    // oracle: sort pixels by dark channel, average the top 5% image values
    std::vector<std::pair<double, size_t>> order;
    for (size_t i = 0; i < dark.v.size(); ++i) order.emplace_back(dark.v[i], i);
    std::sort(order.begin(), order.end(), [](auto& x, auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
    });
    size_t keep = static_cast<size_t>(percentile * order.size());
    Rgb oracle{0, 0, 0};
    for (size_t k = 0; k < keep; ++k) {
        int r = static_cast<int>(order[k].second) / 20;
        int c = static_cast<int>(order[k].second) % 20;
        for (int ch = 0; ch < 3; ++ch) oracle[ch] += img.at(r, c, ch);
    }
    for (int ch = 0; ch < 3; ++ch)
        CHECK(a[ch] == doctest::Approx(oracle[ch] / keep).epsilon(1e-12));
}

TEST_CASE("pure airlight saturates the transmission at t_min") {
    LinearImage img(10, 10);
    for (double& v : img.data()) v = 0.8;  // I == A everywhere
    DcResult res = dehaze_dc(img, WindowSpec::tiled(10, 10), {0.8, 0.8, 0.8});
    CHECK(res.transmission.at(0, 0) == 1e-20);
    CHECK(res.scaled_depth.at(0, 0) == doctest::Approx(-std::log(1e-20)).epsilon(1e-12));
}

TEST_CASE("a black pixel in the window gives full transmission") {
    LinearImage img = random_img(10, 10, 6);
    img.set_pixel(5, 5, {0, 0, 0});
    DcResult res = dehaze_dc(img, WindowSpec::tiled(10, 10), {0.9, 0.9, 0.9});
    CHECK(res.transmission.at(0, 0) == 1.0);
    CHECK(res.scaled_depth.at(0, 0) == 0.0);
    for (int ch = 0; ch < 3; ++ch)
        CHECK(res.dehazed.at(3, 3, ch) == doctest::Approx(img.at(3, 3, ch)).epsilon(1e-12));
}

TEST_CASE("invalid airlight is rejected") {
    LinearImage img = random_img(10, 10, 7);
    CHECK_THROWS_AS(dehaze_dc(img, WindowSpec::tiled(10, 10), {0.5, 0.0, 0.5}), InvalidAirlight);
}

TEST_CASE("exact inversion when every window holds a zero-channel pixel") {
    SceneTruth t = random_scene(40, 40, 10, DepthSpec::range(1, 8), 8);
    for (int p = 0; p < t.grid.patch_count(); ++p) {
        const Rect& rect = t.grid.coordinates[p];
        t.radiance.at(rect.row_begin() + 2, rect.col_begin() + 2, p % 3) = 0.0;
    }
    ImageSequence seq = simulate_haze(t, {{0.2}, {0.8}, 0.0}, 8);
    DcResult res = dehaze_dc(seq.images[0], WindowSpec::tiled(10, 10), {0.8, 0.8, 0.8});
    for (int r = 0; r < 40; ++r)
        for (int c = 0; c < 40; ++c) {
            double expected_t = std::exp(-0.2 * t.depth_at_pixel(r, c));
            CHECK(std::abs(res.transmission.at(r, c) - expected_t) < 1e-9);
            for (int ch = 0; ch < 3; ++ch)
                CHECK(std::abs(res.dehazed.at(r, c, ch) - t.radiance.at(r, c, ch)) < 1e-9);
        }
}

TEST_CASE("adding uniform airlight never increases the transmission") {
    LinearImage img = random_img(20, 20, 9);
    Rgb a{0.85, 0.85, 0.85};
    DcResult before = dehaze_dc(img, WindowSpec::tiled(10, 10), a);
    double s = 0.6;
    LinearImage hazier(20, 20);
    for (int r = 0; r < 20; ++r)
        for (int c = 0; c < 20; ++c)
            for (int ch = 0; ch < 3; ++ch)
                hazier.at(r, c, ch) = img.at(r, c, ch) * s + a[ch] * (1 - s);
    DcResult after = dehaze_dc(hazier, WindowSpec::tiled(10, 10), a);
    for (size_t i = 0; i < before.transmission.v.size(); ++i)
        CHECK(after.transmission.v[i] <= before.transmission.v[i] + 1e-12);
}

TEST_CASE("surfaces colored like the airlight read as dense haze") {
    // known failure mode, preserved: a patch matching A gets low transmission
    LinearImage img = random_img(20, 20, 10);
    Rgb a{0.75, 0.75, 0.75};
    for (int r = 0; r < 10; ++r)
        for (int c = 0; c < 10; ++c) img.set_pixel(r, c, a);
    DcResult res = dehaze_dc(img, WindowSpec::tiled(10, 10), a);
    CHECK(res.transmission.at(0, 0) == 1e-20);  // clamped at t_min
}

TEST_CASE("zero-noise recovery overestimates optical thickness on generic scenes") {
    // windows without a true zero channel make the prior overshoot: the
    // estimated beta*z exceeds the truth everywhere
    SceneTruth t = random_scene(40, 40, 10, DepthSpec::range(1, 8), 11);
    ImageSequence seq = simulate_haze(t, {{0.25}, {0.8}, 0.0}, 11);
    DcResult res = dehaze_dc(seq.images[0], WindowSpec::tiled(10, 10), {0.8, 0.8, 0.8});
    for (int r = 0; r < 40; ++r)
        for (int c = 0; c < 40; ++c) {
            double truth_bz = 0.25 * t.depth_at_pixel(r, c);
            CHECK(res.scaled_depth.at(r, c) >= truth_bz - 1e-12);
        }
    CHECK(res.scaled_depth.at(0, 0) > 0.25 * t.depth_at_pixel(0, 0));
}

TEST_CASE("random image dark channel equals oracle across 50 images") {
    for (int k = 0; k < 50; ++k) {
        LinearImage img = random_img(15, 18, 100 + k);
        ScalarMap dark = dark_channel(img, WindowSpec::sliding(13, 9));
        for (int r = 0; r < img.height(); r += 3)
            for (int c = 0; c < img.width(); c += 3)
                CHECK(dark.at(r, c) == sliding_min_oracle(img, r, c, 13, 9));
    }
}
