#include "hazemeter/dark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hazemeter/patch_grid.hpp"

namespace haze {

namespace {

// Minimum over channels of img/airlight over the window; airlight (1,1,1)
// gives the plain dark channel.
ScalarMap windowed_min(const LinearImage& img, const WindowSpec& win, const Rgb& airlight) {
    int h = img.height(), w = img.width();
    ScalarMap out(h, w);
    if (win.mode == WindowMode::tiled) {
        PatchGrid grid = make_patch_grid(h, w, win.height, win.width);
        for (const Rect& rect : grid.coordinates) {
            double m = std::numeric_limits<double>::infinity();
            for (int r = rect.row_begin(); r < rect.row_end(); ++r)
                for (int c = rect.col_begin(); c < rect.col_end(); ++c)
                    for (int ch = 0; ch < 3; ++ch)
                        m = std::min(m, img.at(r, c, ch) / airlight[ch]);
            for (int r = rect.row_begin(); r < rect.row_end(); ++r)
                for (int c = rect.col_begin(); c < rect.col_end(); ++c) out.at(r, c) = m;
        }
    } else {
        // Sliding window centered at the pixel, clipped at the borders.
        int up = (win.height - 1) / 2, down = win.height - 1 - up;
        int left = (win.width - 1) / 2, right = win.width - 1 - left;
        for (int r = 0; r < h; ++r) {
            int r0 = std::max(0, r - up), r1 = std::min(h - 1, r + down);
            for (int c = 0; c < w; ++c) {
                int c0 = std::max(0, c - left), c1 = std::min(w - 1, c + right);
                double m = std::numeric_limits<double>::infinity();
                for (int rr = r0; rr <= r1; ++rr)
                    for (int cc = c0; cc <= c1; ++cc)
                        for (int ch = 0; ch < 3; ++ch)
                            m = std::min(m, img.at(rr, cc, ch) / airlight[ch]);
                out.at(r, c) = m;
            }
        }
    }
    return out;
}

}  // namespace

ScalarMap dark_channel(const LinearImage& img, const WindowSpec& win) {
    return windowed_min(img, win, {1.0, 1.0, 1.0});
}

Rgb estimate_airlight_dc(const LinearImage& img, const ScalarMap& dark, double percentile) {
    if (img.height() != dark.rows || img.width() != dark.cols)
        throw ShapeMismatch("dark channel does not match image");

    if (percentile > 0) {
        // Average the image value of the top-percentile dark-channel pixels.
        std::vector<std::pair<double, size_t>> order;
        order.reserve(dark.v.size());
        for (size_t i = 0; i < dark.v.size(); ++i) order.emplace_back(dark.v[i], i);
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;  // scan-order tie break
        });
        size_t keep = std::max<size_t>(1, static_cast<size_t>(percentile * order.size()));
        Rgb sum{0, 0, 0};
        for (size_t k = 0; k < keep; ++k) {
            int r = static_cast<int>(order[k].second) / dark.cols;
            int c = static_cast<int>(order[k].second) % dark.cols;
            for (int ch = 0; ch < 3; ++ch) sum[ch] += img.at(r, c, ch);
        }
        return {sum[0] / keep, sum[1] / keep, sum[2] / keep};
    }

    double dark_max = *std::max_element(dark.v.begin(), dark.v.end());
    double best_lum = -std::numeric_limits<double>::infinity();
    int best_r = 0, best_c = 0;
    for (int r = 0; r < dark.rows; ++r) {
        for (int c = 0; c < dark.cols; ++c) {
            if (dark.at(r, c) != dark_max) continue;
            double lum = (img.at(r, c, 0) + img.at(r, c, 1) + img.at(r, c, 2)) / 3.0;
            if (lum > best_lum) {  // ties keep the first in row-major order
                best_lum = lum;
                best_r = r;
                best_c = c;
            }
        }
    }
    return img.pixel(best_r, best_c);
}

DcResult dehaze_dc(const LinearImage& img, const WindowSpec& win, const Rgb& airlight,
                   double t_min) {
    for (double a : airlight)
        if (!(a > 0)) throw InvalidAirlight("airlight must be positive per channel");

    ScalarMap normalized_min = windowed_min(img, win, airlight);
    int h = img.height(), w = img.width();
    DcResult out{ScalarMap(h, w), LinearImage(h, w), ScalarMap(h, w)};
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double t = std::clamp(1.0 - normalized_min.at(r, c), t_min, 1.0);
            out.transmission.at(r, c) = t;
            out.scaled_depth.at(r, c) = -std::log(t);
            for (int ch = 0; ch < 3; ++ch)
                out.dehazed.at(r, c, ch) = (img.at(r, c, ch) - airlight[ch] * (1.0 - t)) / t;
        }
    }
    return out;
}

}  // namespace haze
