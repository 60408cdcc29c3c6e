#include "hazemeter/co.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hazemeter/parallel.hpp"

namespace haze {

double estimate_airlight_brightest(const ImageSequence& seq, double percentile) {
    seq.validate();
    if (percentile <= 0) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& img : seq.images)
            for (double v : img.data()) best = std::max(best, v);
        return best;
    }
    std::vector<double> all;
    for (const auto& img : seq.images) all.insert(all.end(), img.data().begin(), img.data().end());
    std::sort(all.begin(), all.end(), std::greater<>());
    size_t keep = std::max<size_t>(1, static_cast<size_t>(percentile * all.size()));
    double sum = 0;
    for (size_t i = 0; i < keep; ++i) sum += all[i];
    return sum / static_cast<double>(keep);
}

std::vector<double> estimate_airlight_brightest_per_time(const ImageSequence& seq,
                                                         double percentile) {
    seq.validate();
    std::vector<double> out;
    out.reserve(seq.images.size());
    for (const auto& img : seq.images) {
        ImageSequence one;
        one.images.push_back(img);
        out.push_back(estimate_airlight_brightest(one, percentile));
    }
    return out;
}

ImageSequence normalize_illumination(const ImageSequence& seq, const Rect& foreground) {
    seq.validate();
    ImageSequence out = seq;
    for (auto& img : out.images) {
        Rgb mean = patch_mean(img, foreground);
        double lum = (mean[0] + mean[1] + mean[2]) / 3.0;
        if (!(lum > 0)) throw ZeroForeground("foreground patch mean is not positive");
        for (double& v : img.data()) v /= lum;
    }
    return out;
}

namespace {

int darkest_image_index(const ImageSequence& seq) {
    std::vector<double> sums = image_sums(seq);
    int idx = 0;
    for (int i = 1; i < static_cast<int>(sums.size()); ++i)
        if (sums[i] < sums[idx]) idx = i;  // ties keep the lowest index
    return idx;
}

struct PatchSolve {
    std::vector<double> t;          // per time
    std::vector<double> radiance;   // pixel-major rgb within the patch
    std::vector<double> objective;  // per iteration
    bool converged = true;
};

// Alternating exact coordinate minimizers on one patch. Each T_i and each
// R^c(u) is a 1-D convex quadratic given the rest, so the projected update
// can only lower the objective; with the darkest image's T pinned from the
// first iteration on, the recorded trace is non-increasing.
PatchSolve solve_patch(const ImageSequence& seq, const std::vector<double>& airlights,
                       const Rect& rect, int darkest, const CoConfig& cfg) {
    int times = seq.size();
    int npix = static_cast<int>(rect.area());
    int nval = npix * 3;

    // Patch-local copy of the data, [time][pixel*3].
    std::vector<std::vector<double>> data(times, std::vector<double>(nval));
    for (int i = 0; i < times; ++i) {
        int k = 0;
        for (int r = rect.row_begin(); r < rect.row_end(); ++r)
            for (int c = rect.col_begin(); c < rect.col_end(); ++c)
                for (int ch = 0; ch < 3; ++ch) data[i][k++] = seq.images[i].at(r, c, ch);
    }

    PatchSolve st;
    st.t.assign(times, cfg.init_t);
    st.radiance.assign(nval, 0.0);

    auto objective = [&] {
        double err = 0;
        for (int i = 0; i < times; ++i) {
            double a = airlights[i];
            for (int k = 0; k < nval; ++k) {
                double resid = data[i][k] - a - (st.radiance[k] - a) * st.t[i];
                err += resid * resid;
            }
        }
        return err;
    };

    st.converged = false;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        double delta = 0;
        for (int i = 0; i < times; ++i) {
            double num = 0, denom = 0;
            double a = airlights[i];
            for (int k = 0; k < nval; ++k) {
                double lever = st.radiance[k] - a;
                num += (data[i][k] - a) * lever;
                denom += lever * lever;
            }
            double updated = denom > 0 ? std::clamp(num / denom, 0.0, 1.0) : st.t[i];
            if (cfg.clamp_in_loop && i == darkest) updated = 1.0;
            delta = std::max(delta, std::abs(updated - st.t[i]));
            st.t[i] = updated;
        }
        for (int k = 0; k < nval; ++k) {
            double num = 0, denom = 0;
            for (int i = 0; i < times; ++i) {
                double a = airlights[i];
                num += st.t[i] * (data[i][k] - a + a * st.t[i]);
                denom += st.t[i] * st.t[i];
            }
            if (denom > 0) st.radiance[k] = std::clamp(num / denom, 0.0, 1.0);
        }
        st.objective.push_back(objective());
        if (delta < cfg.tol) {
            st.converged = true;
            break;
        }
    }
    return st;
}

}  // namespace

CoResult co_solve(const ImageSequence& seq, const std::vector<double>& airlights,
                  const CoConfig& cfg) {
    seq.validate();
    if (seq.size() < 2) throw LengthMismatch("temporal optimization needs at least 2 images");
    if (airlights.size() != static_cast<size_t>(seq.size()))
        throw LengthMismatch("one airlight per time required");
    if (!(cfg.tol > 0) || cfg.max_iters < 1) throw OutOfBounds("invalid tolerance or iteration cap");

    const LinearImage& first = seq.images.front();
    PatchGrid grid = make_patch_grid(first.height(), first.width(), cfg.patch_size);
    int darkest = darkest_image_index(seq);
    int patches = grid.patch_count();

    std::vector<PatchSolve> solves(patches);
    parallel_for(patches, cfg.jobs, [&](int p) {
        solves[p] = solve_patch(seq, airlights, grid.coordinates[p], darkest, cfg);
    });

    CoResult out;
    out.darkest_index = darkest;
    out.transmission.grid = grid;
    out.transmission.clamp_index = darkest;
    out.transmission.values.assign(seq.size(), std::vector<double>(patches, 0.0));
    out.radiance = LinearImage(first.height(), first.width());
    out.converged = true;

    size_t trace_len = 0;
    for (const auto& s : solves) trace_len = std::max(trace_len, s.objective.size());
    out.objective_trace.assign(trace_len, 0.0);
    for (int p = 0; p < patches; ++p) {
        const PatchSolve& s = solves[p];
        out.converged = out.converged && s.converged;
        for (int i = 0; i < seq.size(); ++i) out.transmission.values[i][p] = s.t[i];
        const Rect& rect = grid.coordinates[p];
        int k = 0;
        for (int r = rect.row_begin(); r < rect.row_end(); ++r)
            for (int c = rect.col_begin(); c < rect.col_end(); ++c)
                for (int ch = 0; ch < 3; ++ch) out.radiance.at(r, c, ch) = s.radiance[k++];
        // Converged patches hold their final objective for the remaining
        // iterations so the summed trace stays monotone.
        for (size_t it = 0; it < trace_len; ++it)
            out.objective_trace[it] += s.objective[std::min(it, s.objective.size() - 1)];
    }
    return out;
}

CoResult co_solve_auto(const ImageSequence& seq, const CoConfig& cfg) {
    std::vector<double> airlights;
    switch (cfg.airlight_mode) {
        case AirlightMode::brightest_pixel:
            airlights.assign(seq.images.size(), estimate_airlight_brightest(seq, 0.0));
            break;
        case AirlightMode::top_percentile:
            airlights.assign(seq.images.size(),
                             estimate_airlight_brightest(seq, cfg.percentile));
            break;
        case AirlightMode::explicit_values:
            airlights = cfg.airlights;
            break;
    }
    return co_solve(seq, airlights, cfg);
}

double co_objective(const ImageSequence& seq, const std::vector<double>& airlights,
                    const TransmissionSeries& t, const LinearImage& radiance) {
    double err = 0;
    for (int i = 0; i < seq.size(); ++i) {
        double a = airlights[i];
        for (size_t p = 0; p < t.grid.coordinates.size(); ++p) {
            const Rect& rect = t.grid.coordinates[p];
            double ti = t.values[i][p];
            for (int r = rect.row_begin(); r < rect.row_end(); ++r)
                for (int c = rect.col_begin(); c < rect.col_end(); ++c)
                    for (int ch = 0; ch < 3; ++ch) {
                        double resid =
                            seq.images[i].at(r, c, ch) - a - (radiance.at(r, c, ch) - a) * ti;
                        err += resid * resid;
                    }
        }
    }
    return err;
}

CoGradients co_gradients(const ImageSequence& seq, const std::vector<double>& airlights,
                         const TransmissionSeries& t, const LinearImage& radiance) {
    CoGradients g;
    g.d_t.assign(t.times(), std::vector<double>(t.grid.patch_count(), 0.0));
    g.d_r = LinearImage(radiance.height(), radiance.width());
    for (int i = 0; i < t.times(); ++i) {
        double a = airlights[i];
        for (size_t p = 0; p < t.grid.coordinates.size(); ++p) {
            const Rect& rect = t.grid.coordinates[p];
            double ti = t.values[i][p];
            double dt = 0;
            for (int r = rect.row_begin(); r < rect.row_end(); ++r)
                for (int c = rect.col_begin(); c < rect.col_end(); ++c)
                    for (int ch = 0; ch < 3; ++ch) {
                        double lever = radiance.at(r, c, ch) - a;
                        double resid = seq.images[i].at(r, c, ch) - a - lever * ti;
                        dt += -2.0 * resid * lever;
                        g.d_r.at(r, c, ch) += -2.0 * resid * ti;
                    }
            g.d_t[i][p] = dt;
        }
    }
    return g;
}

}  // namespace haze
