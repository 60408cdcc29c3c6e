#pragma once

#include <vector>

#include "hazemeter/co.hpp"
#include "hazemeter/image.hpp"

namespace haze {

// Per-time scattering coefficients after the scale convention (values in
// [0,1], the brightest image's beta clamped to 1).
struct ScatterSeries {
    std::vector<double> betas;
    int clamp_index = 0;
};

struct CdcConfig {
    double tol = 1e-5;  // on max |delta beta|
    int max_iters = 500;
    double t_min = 1e-20;
};

struct CdcResult {
    ScatterSeries scatter;
    DepthMap depth;  // unscaled (beta factored out), grid-shaped
    std::vector<double> objective_trace;
    bool converged = true;
};

// Factors L_i(x) = -ln T_i(x) into beta_i * z(x) by alternating the exact
// least-squares minimizers, beta clamped to [0,1] with the brightest image
// pinned to 1. The brightest image is the one with maximal total pixel sum of
// the originating sequence (pass image_sums), or maximal mean L when no
// sequence is supplied. Throws AllOpaque when every T <= t_min.
CdcResult cdc_solve(const TransmissionSeries& t, const CdcConfig& cfg = {},
                    const std::vector<double>* image_sums = nullptr);

// Both series are rescaled so their max is 1, then
// sqrt(sum_i (B_gt,i - B_est,i)^2). Scale-invariant; throws LengthMismatch.
double scattering_error(const std::vector<double>& est, const std::vector<double>& truth);

// beta*z = -ln max(T, t_min) per location.
DepthMap scaled_depth_from_t(const std::vector<double>& t_one_time, const PatchGrid& grid,
                             double t_min = 1e-20);
ScalarMap scaled_depth_from_t(const ScalarMap& t, double t_min = 1e-20);

// Objective: sum over time/patch of (beta_i z(x) - L_i(x))^2 with L = -ln T.
double cdc_objective(const TransmissionSeries& t, const std::vector<double>& betas,
                     const std::vector<double>& z, double t_min = 1e-20);

struct CdcGradients {
    std::vector<double> d_beta;
    std::vector<double> d_z;
};

// Analytic partials of the objective; finite-difference checked.
CdcGradients cdc_gradients(const TransmissionSeries& t, const std::vector<double>& betas,
                           const std::vector<double>& z, double t_min = 1e-20);

}  // namespace haze
