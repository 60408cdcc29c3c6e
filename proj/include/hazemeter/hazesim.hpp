#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hazemeter/image.hpp"
#include "hazemeter/patch_grid.hpp"

namespace haze {

// Haze-free ground truth: per-pixel radiance plus one depth per patch.
struct SceneTruth {
    LinearImage radiance;
    std::vector<double> depths;  // grid row-major order, strictly positive
    PatchGrid grid;

    double depth_at_pixel(int row, int col) const;
};

// Per-time scattering coefficients and airlights plus a Gaussian noise level.
struct HazeParams {
    std::vector<double> betas;      // >= 0, per unit depth
    std::vector<double> airlights;  // in (0, 1]
    double noise_sigma = 0.0;

    int times() const { return static_cast<int>(betas.size()); }
    void validate() const;
};

struct PolarizationTruth {
    double dop = 1.0;  // degree of polarization of the airlight, in [0, 1]
};

// Depth assignment: an explicit per-patch list (grid row-major) overrides the
// range. A range is laid out in the raster order of the simulated scenes:
// increasing right-to-left, bottom-up, in equal consecutive bands when the
// bounds are integral (depths 1..20 over 100 patches -> 20 bands of 5).
struct DepthSpec {
    std::vector<double> explicit_depths;
    double lo = 1.0;
    double hi = 20.0;

    static DepthSpec range(double lo, double hi) { return {{}, lo, hi}; }
    static DepthSpec list(std::vector<double> d) { return {std::move(d), 0, 0}; }
};

std::vector<double> assign_depths(const DepthSpec& spec, const PatchGrid& grid);

// Radiance i.i.d. uniform in [0,1] per pixel per channel; depths per patch.
SceneTruth random_scene(int h, int w, int ps, const DepthSpec& depth_spec, std::uint64_t seed);

// I = R e^{-beta z} + A_inf (1 - e^{-beta z}) + eps per time, per patch;
// eps ~ N(0, sigma^2) i.i.d. per pixel/channel/time, NOT clamped. Per-time
// noise streams use derived sub-seeds so output is independent of evaluation
// order.
ImageSequence simulate_haze(const SceneTruth& truth, const HazeParams& params, std::uint64_t seed);

// Ground-truth transmission maps T_i(patch) = e^{-beta_i z}.
std::vector<std::vector<double>> true_transmissions(const SceneTruth& truth,
                                                    const HazeParams& params);

// Polarizer pair for one time: with D = R e^{-bz} and A = A_inf (1 - e^{-bz}),
// best (parallel) = D/2 + A(1-p)/2 and worst (perpendicular) = D/2 + A(1+p)/2,
// so best + worst = D + A exactly pre-noise. Noise is added independently to
// each image.
std::pair<LinearImage, LinearImage> simulate_polarized_pair(const SceneTruth& truth, double beta,
                                                            double airlight, double noise_sigma,
                                                            const PolarizationTruth& pol,
                                                            std::uint64_t seed);

// Two-weather dichromatic scene: E_k = radiance * s_k + q_k * airlight_dir
// with s_k = A_k e^{-beta_k z} (divided by z^2 when use_inverse_square) and
// q_k = A_k (1 - e^{-beta_k z}). airlight_dir must be a unit vector with
// positive components (InvalidUnitVector otherwise).
std::pair<LinearImage, LinearImage> simulate_two_weather(const SceneTruth& truth, double beta1,
                                                         double a_inf1, double beta2, double a_inf2,
                                                         const Rgb& airlight_dir,
                                                         bool use_inverse_square = false,
                                                         double noise_sigma = 0.0,
                                                         std::uint64_t seed = 0);

// The thesis-6.1 reference-scene constants.
struct Thesis61Preset {
    static constexpr int height = 100;
    static constexpr int width = 100;
    static constexpr int patch_size = 10;
    static HazeParams params(double noise_sigma = 0.0) {
        return {{0.1, 0.15, 0.2, 0.25, 0.3}, {0.5, 0.6, 0.7, 0.8, 0.9}, noise_sigma};
    }
    static DepthSpec depths() { return DepthSpec::range(1.0, 20.0); }
};

}  // namespace haze
