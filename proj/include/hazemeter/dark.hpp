#pragma once

#include "hazemeter/image.hpp"

namespace haze {

enum class WindowMode { tiled, sliding };

// Local window for the channel-minimum: tiled windows partition the image
// (divisibility required); sliding windows are centered per pixel and clipped
// at the borders.
struct WindowSpec {
    WindowMode mode = WindowMode::tiled;
    int height = 10;
    int width = 10;

    static WindowSpec tiled(int h, int w) { return {WindowMode::tiled, h, w}; }
    static WindowSpec sliding(int h, int w) { return {WindowMode::sliding, h, w}; }
};

// Per location, min over the 3 channels of the min over the window.
ScalarMap dark_channel(const LinearImage& img, const WindowSpec& win);

// Among pixels attaining the dark channel's maximum, the per-channel value of
// the one with the largest irradiance (ties broken by row-major scan order).
// percentile > 0 instead averages the pixels whose dark channel lies in the
// top fraction.
Rgb estimate_airlight_dc(const LinearImage& img, const ScalarMap& dark, double percentile = 0.0);

struct DcResult {
    ScalarMap transmission;  // t~ = 1 - min_c min_window (I/A), in [t_min, 1]
    LinearImage dehazed;     // R = (I - A(1 - t~)) / t~
    ScalarMap scaled_depth;  // beta*z = -ln t~
};

// Throws InvalidAirlight if any channel of A is <= 0.
DcResult dehaze_dc(const LinearImage& img, const WindowSpec& win, const Rgb& airlight,
                   double t_min = 1e-20);

}  // namespace haze
