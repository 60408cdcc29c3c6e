#include "hazemeter/hazesim.hpp"

#include <algorithm>
#include <cmath>

#include "hazemeter/rng.hpp"

namespace haze {

double SceneTruth::depth_at_pixel(int row, int col) const {
    int pr = row / grid.patch_height;
    int pc = col / grid.patch_width;
    return depths[static_cast<size_t>(pr) * grid.cols + pc];
}

void HazeParams::validate() const {
    if (betas.empty()) throw LengthMismatch("at least one time required");
    if (betas.size() != airlights.size())
        throw LengthMismatch("betas and airlights must have the same length");
    for (double b : betas)
        if (!(b >= 0)) throw OutOfBounds("beta must be >= 0");
    for (double a : airlights)
        if (!(a > 0 && a <= 1)) throw OutOfBounds("airlight must lie in (0, 1]");
    if (!(noise_sigma >= 0)) throw OutOfBounds("noise sigma must be >= 0");
}

std::vector<double> assign_depths(const DepthSpec& spec, const PatchGrid& grid) {
    int count = grid.patch_count();
    std::vector<double> depths(count);
    if (!spec.explicit_depths.empty()) {
        if (static_cast<int>(spec.explicit_depths.size()) != count)
            throw LengthMismatch("explicit depth list must have one value per patch");
        depths = spec.explicit_depths;
    } else {
        if (!(spec.lo > 0) || spec.hi < spec.lo)
            throw OutOfBounds("depth range must be positive and ordered");
        // Raster order of the simulated scenes: increasing right-to-left,
        // bottom-up. k enumerates patches in that order.
        double span = spec.hi - spec.lo;
        bool integral_band = std::floor(spec.lo) == spec.lo && std::floor(spec.hi) == spec.hi &&
                             static_cast<int>(span) + 1 <= count;
        int n_values = static_cast<int>(span) + 1;
        for (int r = 0; r < grid.rows; ++r) {
            for (int c = 0; c < grid.cols; ++c) {
                int k = (grid.rows - 1 - r) * grid.cols + (grid.cols - 1 - c);
                double d;
                if (count == 1)
                    d = spec.lo;
                else if (integral_band)
                    d = spec.lo + static_cast<double>(k * n_values / count);
                else
                    d = spec.lo + span * k / (count - 1);
                depths[static_cast<size_t>(r) * grid.cols + c] = d;
            }
        }
    }
    for (double d : depths)
        if (!(d > 0)) throw OutOfBounds("depths must be strictly positive");
    return depths;
}

SceneTruth random_scene(int h, int w, int ps, const DepthSpec& depth_spec, std::uint64_t seed) {
    SceneTruth truth;
    truth.grid = make_patch_grid(h, w, ps);
    truth.radiance = LinearImage(h, w);
    Rng rng(Rng::derive(seed, 0x5ce4e));
    for (double& v : truth.radiance.data()) v = rng.uniform();
    truth.depths = assign_depths(depth_spec, truth.grid);
    return truth;
}

ImageSequence simulate_haze(const SceneTruth& truth, const HazeParams& params,
                            std::uint64_t seed) {
    params.validate();
    ImageSequence seq;
    seq.airlights = params.airlights;
    const LinearImage& radiance = truth.radiance;
    for (int i = 0; i < params.times(); ++i) {
        LinearImage img(radiance.height(), radiance.width());
        Rng noise(Rng::derive(seed, 0x4015e, static_cast<std::uint64_t>(i)));
        for (int r = 0; r < img.height(); ++r) {
            for (int c = 0; c < img.width(); ++c) {
                double att = std::exp(-params.betas[i] * truth.depth_at_pixel(r, c));
                double air = params.airlights[i] * (1.0 - att);
                for (int ch = 0; ch < 3; ++ch) {
                    double v = radiance.at(r, c, ch) * att + air;
                    if (params.noise_sigma > 0) v += params.noise_sigma * noise.normal();
                    img.at(r, c, ch) = v;
                }
            }
        }
        seq.images.push_back(std::move(img));
    }
    return seq;
}

std::vector<std::vector<double>> true_transmissions(const SceneTruth& truth,
                                                    const HazeParams& params) {
    std::vector<std::vector<double>> t(params.times());
    for (int i = 0; i < params.times(); ++i) {
        t[i].reserve(truth.depths.size());
        for (double z : truth.depths) t[i].push_back(std::exp(-params.betas[i] * z));
    }
    return t;
}

std::pair<LinearImage, LinearImage> simulate_polarized_pair(const SceneTruth& truth, double beta,
                                                            double airlight, double noise_sigma,
                                                            const PolarizationTruth& pol,
                                                            std::uint64_t seed) {
    if (!(pol.dop >= 0 && pol.dop <= 1)) throw OutOfBounds("degree of polarization must be in [0,1]");
    const LinearImage& radiance = truth.radiance;
    LinearImage best(radiance.height(), radiance.width());
    LinearImage worst(radiance.height(), radiance.width());
    Rng noise_best(Rng::derive(seed, 0xb057, 0));
    Rng noise_worst(Rng::derive(seed, 0xb057, 1));
    for (int r = 0; r < radiance.height(); ++r) {
        for (int c = 0; c < radiance.width(); ++c) {
            double att = std::exp(-beta * truth.depth_at_pixel(r, c));
            double air = airlight * (1.0 - att);
            for (int ch = 0; ch < 3; ++ch) {
                double direct = radiance.at(r, c, ch) * att;
                double b = direct / 2 + air * (1.0 - pol.dop) / 2;
                double w = direct / 2 + air * (1.0 + pol.dop) / 2;
                if (noise_sigma > 0) {
                    b += noise_sigma * noise_best.normal();
                    w += noise_sigma * noise_worst.normal();
                }
                best.at(r, c, ch) = b;
                worst.at(r, c, ch) = w;
            }
        }
    }
    return {std::move(best), std::move(worst)};
}

std::pair<LinearImage, LinearImage> simulate_two_weather(const SceneTruth& truth, double beta1,
                                                         double a_inf1, double beta2,
                                                         double a_inf2, const Rgb& airlight_dir,
                                                         bool use_inverse_square,
                                                         double noise_sigma, std::uint64_t seed) {
    double norm = std::sqrt(airlight_dir[0] * airlight_dir[0] + airlight_dir[1] * airlight_dir[1] +
                            airlight_dir[2] * airlight_dir[2]);
    if (std::abs(norm - 1.0) > 1e-9 || airlight_dir[0] <= 0 || airlight_dir[1] <= 0 ||
        airlight_dir[2] <= 0)
        throw InvalidUnitVector("airlight direction must be a unit vector with positive components");

    const LinearImage& radiance = truth.radiance;
    LinearImage e1(radiance.height(), radiance.width());
    LinearImage e2(radiance.height(), radiance.width());
    Rng noise1(Rng::derive(seed, 0xd1c4, 0));
    Rng noise2(Rng::derive(seed, 0xd1c4, 1));
    for (int r = 0; r < radiance.height(); ++r) {
        for (int c = 0; c < radiance.width(); ++c) {
            double z = truth.depth_at_pixel(r, c);
            double zz = use_inverse_square ? z * z : 1.0;
            double s1 = a_inf1 * std::exp(-beta1 * z) / zz;
            double s2 = a_inf2 * std::exp(-beta2 * z) / zz;
            double q1 = a_inf1 * (1.0 - std::exp(-beta1 * z));
            double q2 = a_inf2 * (1.0 - std::exp(-beta2 * z));
            for (int ch = 0; ch < 3; ++ch) {
                double d = radiance.at(r, c, ch);
                double v1 = d * s1 + q1 * airlight_dir[ch];
                double v2 = d * s2 + q2 * airlight_dir[ch];
                if (noise_sigma > 0) {
                    v1 += noise_sigma * noise1.normal();
                    v2 += noise_sigma * noise2.normal();
                }
                e1.at(r, c, ch) = v1;
                e2.at(r, c, ch) = v2;
            }
        }
    }
    return {std::move(e1), std::move(e2)};
}

}  // namespace haze
