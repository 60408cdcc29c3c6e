#include "hazemeter/pol.hpp"

#include <algorithm>
#include <cmath>

namespace haze {

PolEstimate estimate_sky_params(const LinearImage& best, const LinearImage& worst,
                                const Rect& sky, double bias) {
    if (!best.same_shape(worst)) throw ShapeMismatch("polarized pair must share dimensions");
    if (!sky.inside(best.height(), best.width())) throw OutOfBounds("sky patch outside image");

    Rgb p_sum{0, 0, 0};
    Rgb total_sum{0, 0, 0};
    for (int r = sky.row_begin(); r < sky.row_end(); ++r) {
        for (int c = sky.col_begin(); c < sky.col_end(); ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                double b = best.at(r, c, ch);
                double w = worst.at(r, c, ch);
                double total = b + w;
                if (total == 0) throw ZeroSkyIrradiance("zero total irradiance inside sky patch");
                p_sum[ch] += (w - b) / total;
                total_sum[ch] += total;
            }
        }
    }
    double area = static_cast<double>(sky.area());
    PolEstimate est;
    est.bias = bias;
    for (int ch = 0; ch < 3; ++ch) {
        est.p[ch] = std::min(1.0, p_sum[ch] / area * bias);
        est.a_inf[ch] = total_sum[ch] / area;
    }
    return est;
}

PolResult dehaze_pol(const LinearImage& best, const LinearImage& worst, const PolEstimate& est,
                     double t_min) {
    if (!best.same_shape(worst)) throw ShapeMismatch("polarized pair must share dimensions");
    for (int ch = 0; ch < 3; ++ch)
        if (!(est.p[ch] > 0)) throw DegenerateDOP("degree of polarization must be positive");

    int h = best.height(), w = best.width();
    PolResult out{LinearImage(h, w), LinearImage(h, w), LinearImage(h, w),
                  {ScalarMap(h, w), DepthScale::scaled_by_beta}};
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double depth_sum = 0;
            for (int ch = 0; ch < 3; ++ch) {
                double b = best.at(r, c, ch);
                double ww = worst.at(r, c, ch);
                double airlight = (ww - b) / est.p[ch];
                double direct = (b + ww) - airlight;
                double t = std::clamp(1.0 - airlight / est.a_inf[ch], t_min, 1.0);
                out.airlight_map.at(r, c, ch) = airlight;
                out.transmission.at(r, c, ch) = t;
                out.dehazed.at(r, c, ch) = direct / t;
                depth_sum += -std::log(t);
            }
            out.scaled_depth.map.at(r, c) = depth_sum / 3.0;  // mean of the three channels
        }
    }
    return out;
}

}  // namespace haze
