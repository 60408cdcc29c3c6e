#pragma once

#include "hazemeter/image.hpp"

namespace haze {

// Global parameters of the polarization dehazer, estimated from a sky patch
// low on the horizon (pure airlight).
struct PolEstimate {
    Rgb p{1, 1, 1};      // degree of polarization per channel, (0, 1]
    Rgb a_inf{1, 1, 1};  // airlight at infinity per channel, > 0
    double bias = 1.09;  // multiplicative DOP bias applied before clamping
};

// Per channel: p = mean over sky of (worst-best)/(worst+best), times bias,
// clamped to <= 1; A_inf = mean over sky of (worst+best). Throws
// ZeroSkyIrradiance when worst+best vanishes inside the patch.
PolEstimate estimate_sky_params(const LinearImage& best, const LinearImage& worst,
                                const Rect& sky, double bias = 1.09);

struct PolResult {
    LinearImage dehazed;       // R = D / t per channel
    LinearImage airlight_map;  // A = (worst - best) / p per channel
    LinearImage transmission;  // t = 1 - A/A_inf per channel, in [t_min, 1]
    DepthMap scaled_depth;     // beta*z = mean over channels of -ln t, per pixel
};

// Eqs of the polarization inversion; exact inverse of the simulated pair when
// fed the true sky parameters. Throws DegenerateDOP if any channel p <= 0.
PolResult dehaze_pol(const LinearImage& best, const LinearImage& worst, const PolEstimate& est,
                     double t_min = 1e-20);

}  // namespace haze
