#include "hazemeter/cdc.hpp"

#include <algorithm>
#include <cmath>

namespace haze {

namespace {

// L_i(x) = -ln clamp(T, t_min, 1); T <= t_min counts as opaque.
std::vector<std::vector<double>> log_maps(const TransmissionSeries& t, double t_min,
                                          bool* all_opaque) {
    std::vector<std::vector<double>> logs(t.times());
    bool opaque = true;
    for (int i = 0; i < t.times(); ++i) {
        logs[i].reserve(t.values[i].size());
        for (double v : t.values[i]) {
            if (v > t_min) opaque = false;
            logs[i].push_back(-std::log(std::clamp(v, t_min, 1.0)));
        }
    }
    *all_opaque = opaque;
    return logs;
}

}  // namespace

CdcResult cdc_solve(const TransmissionSeries& t, const CdcConfig& cfg,
                    const std::vector<double>* image_sums) {
    int times = t.times();
    if (times < 1) throw LengthMismatch("empty transmission series");
    int patches = static_cast<int>(t.values.front().size());
    for (const auto& row : t.values)
        if (static_cast<int>(row.size()) != patches)
            throw ShapeMismatch("ragged transmission series");
    if (image_sums && static_cast<int>(image_sums->size()) != times)
        throw LengthMismatch("one image sum per time required");

    bool all_opaque = false;
    std::vector<std::vector<double>> logs = log_maps(t, cfg.t_min, &all_opaque);
    if (all_opaque) throw AllOpaque("every transmittance is at or below t_min");

    // Brightest image: maximal total pixel sum when the originating sequence
    // is known, otherwise maximal mean optical thickness (most haze).
    int brightest = 0;
    if (image_sums) {
        for (int i = 1; i < times; ++i)
            if ((*image_sums)[i] > (*image_sums)[brightest]) brightest = i;
    } else {
        double best = -1;
        for (int i = 0; i < times; ++i) {
            double mean = 0;
            for (double v : logs[i]) mean += v;
            mean /= patches;
            if (mean > best) {  // ties keep the lowest index
                best = mean;
                brightest = i;
            }
        }
    }

    std::vector<double> beta(times, 1e-4);
    std::vector<double> z(patches, 1e-4);
    beta[brightest] = 1.0;

    CdcResult out;
    out.converged = false;
    double zz = 0;
    for (double v : z) zz += v * v;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        double delta = 0;
        for (int i = 0; i < times; ++i) {
            double num = 0;
            for (int p = 0; p < patches; ++p) num += logs[i][p] * z[p];
            double updated = zz > 0 ? std::clamp(num / zz, 0.0, 1.0) : beta[i];
            if (i == brightest) updated = 1.0;
            delta = std::max(delta, std::abs(updated - beta[i]));
            beta[i] = updated;
        }
        double bb = 0;
        for (double b : beta) bb += b * b;  // >= 1: the clamped coefficient
        for (int p = 0; p < patches; ++p) {
            double num = 0;
            for (int i = 0; i < times; ++i) num += logs[i][p] * beta[i];
            z[p] = std::max(0.0, num / bb);
        }
        zz = 0;
        for (double v : z) zz += v * v;

        double err = 0;
        for (int i = 0; i < times; ++i)
            for (int p = 0; p < patches; ++p) {
                double resid = beta[i] * z[p] - logs[i][p];
                err += resid * resid;
            }
        out.objective_trace.push_back(err);
        if (delta < cfg.tol) {
            out.converged = true;
            break;
        }
    }

    out.scatter.betas = std::move(beta);
    out.scatter.clamp_index = brightest;
    out.depth.kind = DepthScale::unscaled;
    bool grid_matches = t.grid.patch_count() == patches;
    out.depth.map = ScalarMap(grid_matches ? t.grid.rows : 1, grid_matches ? t.grid.cols : patches);
    std::copy(z.begin(), z.end(), out.depth.map.v.begin());
    return out;
}

double scattering_error(const std::vector<double>& est, const std::vector<double>& truth) {
    if (est.size() != truth.size()) throw LengthMismatch("series lengths differ");
    if (est.empty()) throw LengthMismatch("empty series");
    double est_max = *std::max_element(est.begin(), est.end());
    double truth_max = *std::max_element(truth.begin(), truth.end());
    if (!(est_max > 0) || !(truth_max > 0))
        throw OutOfBounds("series must contain a positive value");
    double sum = 0;
    for (size_t i = 0; i < est.size(); ++i) {
        double d = truth[i] / truth_max - est[i] / est_max;
        sum += d * d;
    }
    return std::sqrt(sum);
}

DepthMap scaled_depth_from_t(const std::vector<double>& t_one_time, const PatchGrid& grid,
                             double t_min) {
    if (t_one_time.size() != grid.coordinates.size())
        throw LengthMismatch("one value per grid patch required");
    DepthMap out{ScalarMap(grid.rows, grid.cols), DepthScale::scaled_by_beta};
    for (size_t p = 0; p < t_one_time.size(); ++p)
        out.map.v[p] = -std::log(std::clamp(t_one_time[p], t_min, 1.0));
    return out;
}

ScalarMap scaled_depth_from_t(const ScalarMap& t, double t_min) {
    ScalarMap out(t.rows, t.cols);
    for (size_t i = 0; i < t.v.size(); ++i)
        out.v[i] = -std::log(std::clamp(t.v[i], t_min, 1.0));
    return out;
}

double cdc_objective(const TransmissionSeries& t, const std::vector<double>& betas,
                     const std::vector<double>& z, double t_min) {
    bool all_opaque = false;
    auto logs = log_maps(t, t_min, &all_opaque);
    double err = 0;
    for (size_t i = 0; i < logs.size(); ++i)
        for (size_t p = 0; p < logs[i].size(); ++p) {
            double resid = betas[i] * z[p] - logs[i][p];
            err += resid * resid;
        }
    return err;
}

CdcGradients cdc_gradients(const TransmissionSeries& t, const std::vector<double>& betas,
                           const std::vector<double>& z, double t_min) {
    bool all_opaque = false;
    auto logs = log_maps(t, t_min, &all_opaque);
    CdcGradients g;
    g.d_beta.assign(betas.size(), 0.0);
    g.d_z.assign(z.size(), 0.0);
    for (size_t i = 0; i < logs.size(); ++i)
        for (size_t p = 0; p < logs[i].size(); ++p) {
            double resid = betas[i] * z[p] - logs[i][p];
            g.d_beta[i] += 2.0 * resid * z[p];
            g.d_z[p] += 2.0 * resid * betas[i];
        }
    return g;
}

}  // namespace haze
