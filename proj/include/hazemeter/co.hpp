#pragma once

#include <vector>

#include "hazemeter/image.hpp"
#include "hazemeter/patch_grid.hpp"

namespace haze {

// Per-time, per-patch transmittance maps T_i(x) in [0,1]. clamp_index is the
// time whose T (or beta) was pinned to 1 to fix the scale.
struct TransmissionSeries {
    PatchGrid grid;
    std::vector<std::vector<double>> values;  // [time][patch]
    int clamp_index = -1;

    int times() const { return static_cast<int>(values.size()); }
};

enum class AirlightMode { brightest_pixel, top_percentile, explicit_values };

struct CoConfig {
    int patch_size = 10;     // 4 for real sequences
    double tol = 1e-5;       // on max |delta T|
    int max_iters = 500;
    double init_t = 0.0;     // 0, 0.5 or 1
    AirlightMode airlight_mode = AirlightMode::brightest_pixel;
    double percentile = 0.0;               // for top_percentile
    std::vector<double> airlights;         // for explicit_values, per time
    // Pin the darkest image's T to 1 inside the iteration (the reference
    // pseudocode) or leave the scale free and reconcile only when comparing
    // (the behavior of the reference experiments, where the in-loop pin is
    // disabled).
    bool clamp_in_loop = true;
    int jobs = 1;
};

// Max irradiance over the whole sequence (percentile = 0), or the mean of the
// top-percentile pixel values. per_time gives one value per image instead.
double estimate_airlight_brightest(const ImageSequence& seq, double percentile = 0.0);
std::vector<double> estimate_airlight_brightest_per_time(const ImageSequence& seq,
                                                         double percentile = 0.0);

// Divides each image by its foreground-patch mean luminance, factoring out
// illumination drift. Throws ZeroForeground when a patch mean is <= 0.
ImageSequence normalize_illumination(const ImageSequence& seq, const Rect& foreground);

struct CoResult {
    TransmissionSeries transmission;
    LinearImage radiance;
    std::vector<double> objective_trace;  // whole-image objective per iteration
    bool converged = true;
    int darkest_index = 0;
};

// Alternating least squares on I_i(x) = R(x) T_i(x) + A_i (1 - T_i(x)) per
// patch: T and R updates are the exact coordinate minimizers projected onto
// [0,1], with the darkest image's T pinned to 1 each iteration. airlights has
// one scalar per time (resolved from cfg by co_solve_auto). Patches are
// independent problems; jobs > 1 changes nothing but wall time.
CoResult co_solve(const ImageSequence& seq, const std::vector<double>& airlights,
                  const CoConfig& cfg);

// Resolves the airlight per cfg.airlight_mode, then runs co_solve.
CoResult co_solve_auto(const ImageSequence& seq, const CoConfig& cfg);

// Objective: sum over time/pixel/channel of
// [I_i^c(x) - A_i - (R^c(x) - A_i) T_i(x)]^2.
double co_objective(const ImageSequence& seq, const std::vector<double>& airlights,
                    const TransmissionSeries& t, const LinearImage& radiance);

struct CoGradients {
    std::vector<std::vector<double>> d_t;  // [time][patch]
    LinearImage d_r;
};

// Analytic partials of the objective at (t, radiance); checked against
// central finite differences in the tests.
CoGradients co_gradients(const ImageSequence& seq, const std::vector<double>& airlights,
                         const TransmissionSeries& t, const LinearImage& radiance);

}  // namespace haze
