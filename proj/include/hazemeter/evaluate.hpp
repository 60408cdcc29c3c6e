#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hazemeter/cdc.hpp"
#include "hazemeter/image.hpp"
#include "hazemeter/stats.hpp"

namespace haze {

// Root *sum* of squared differences (the thesis writes an unnormalized sum
// and calls it RMS; this is the verbatim form used for paper comparisons).
double depth_error(const DepthMap& est, const DepthMap& truth);
// Per-element-normalized companion, reported as a secondary column.
double depth_error_rms(const DepthMap& est, const DepthMap& truth);
// Variant that rescales each map by its own maximum first (for comparing
// unscaled depths that carry different clamp scales).
double depth_error_rescaled(const DepthMap& est, const DepthMap& truth);

// Mean depth over the far region divided by mean depth over the near region.
// Throws ZeroNearDepth.
double distance_ratio(const DepthMap& depth, const Rect& region_far, const Rect& region_near);

enum class Algorithm { co_cdc, pol_cdc, dich_cdc, dc_cdc };

std::string algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);

enum class SweepVariable { image_noise, dop_error, airlight_error };

std::string sweep_variable_name(SweepVariable v);
std::optional<SweepVariable> sweep_variable_from_name(const std::string& name);

struct SweepSpec {
    SweepVariable variable = SweepVariable::image_noise;
    std::vector<double> grid;
    int trials = 20;
    std::uint64_t seed = 0;
    std::vector<Algorithm> algorithms{Algorithm::co_cdc, Algorithm::pol_cdc,
                                      Algorithm::dich_cdc, Algorithm::dc_cdc};
    // Fixed image-noise level for the dop and airlight sweeps (the swept
    // variable supplies it for image_noise).
    double noise_sigma = 0.05;
    int jobs = 1;

    static std::vector<double> default_grid(SweepVariable v);
};

struct TrialRecord {
    int grid_index = 0;
    double value = 0;
    Algorithm algorithm = Algorithm::co_cdc;
    int trial = 0;
    double error = 0;
    bool failed = false;
    std::string failure;
};

struct SweepCell {
    double value = 0;
    Algorithm algorithm = Algorithm::co_cdc;
    double mean_error = 0;
    double std_error = 0;
    int ok_trials = 0;
    int failed_trials = 0;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<TrialRecord> records;
    std::vector<SweepCell> cells;  // per (grid value, algorithm)

    const SweepCell& cell(int grid_index, Algorithm a) const;
    void write_csv(const std::filesystem::path& path) const;        // per-trial rows
    void write_mean_csv(const std::filesystem::path& path) const;   // mean +- std per cell
};

// Monte Carlo accuracy harness. Every trial simulates a fresh random scene
// (seed derived from (spec.seed, grid index, trial index)), runs each
// algorithm plus CDC and scores the recovered betas against ground truth.
// Per-trial failures are recorded, excluded from means, and never fatal.
SweepResult run_sweep(const SweepSpec& spec);

// One trial of one algorithm at one grid value; exposed for tests.
double sweep_trial_error(SweepVariable variable, double value, double noise_sigma, Algorithm algo,
                         std::uint64_t scene_seed);

// Transmittance-accuracy harness: a 40x40 scene of 10x10 patches with all
// depths set so the clearest image's transmittance equals actual_t, per-time
// airlights of 1.0 supplied exactly, betas {0.1,...,0.3}. Returns the
// verbatim error between the max-rescaled estimated and true per-pixel
// transmission maps, summed over all five times.
double co_transmittance_error(double actual_t, double noise_sigma, std::uint64_t seed);
double co_transmittance_error_mean(double actual_t, double noise_sigma, int trials,
                                   std::uint64_t seed, int jobs = 1);

}  // namespace haze
