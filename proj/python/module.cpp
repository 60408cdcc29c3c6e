// Python bindings for the main operations. Images cross the boundary as
// numpy arrays: HxWx3 float64 for color, HxW for maps.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hazemeter/cdc.hpp"
#include "hazemeter/co.hpp"
#include "hazemeter/dark.hpp"
#include "hazemeter/dichromatic.hpp"
#include "hazemeter/evaluate.hpp"
#include "hazemeter/hazesim.hpp"
#include "hazemeter/patch_grid.hpp"
#include "hazemeter/phase.hpp"
#include "hazemeter/pol.hpp"
#include "hazemeter/stats.hpp"

namespace py = pybind11;
using namespace haze;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

LinearImage image_from_array(const Array& arr) {
    if (arr.ndim() != 3 || arr.shape(2) != 3)
        throw ShapeMismatch("expected an HxWx3 float array");
    LinearImage img(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + arr.size(), img.data().begin());
    img.validate();
    return img;
}

py::array image_to_array(const LinearImage& img) {
    py::array_t<double> out({img.height(), img.width(), 3});
    std::copy(img.data().begin(), img.data().end(), out.mutable_data());
    return out;
}

ScalarMap map_from_array(const Array& arr) {
    if (arr.ndim() != 2) throw ShapeMismatch("expected an HxW float array");
    ScalarMap map(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + arr.size(), map.v.begin());
    return map;
}

py::array map_to_array(const ScalarMap& map) {
    py::array_t<double> out({map.rows, map.cols});
    std::copy(map.v.begin(), map.v.end(), out.mutable_data());
    return out;
}

Rect rect_from_tuple(const std::tuple<int, int, int, int>& t) {
    return {std::get<0>(t), std::get<1>(t), std::get<2>(t), std::get<3>(t)};
}

TransmissionSeries series_from_list(const std::vector<Array>& maps, int patch_size) {
    TransmissionSeries series;
    bool first = true;
    for (const Array& arr : maps) {
        ScalarMap map = map_from_array(arr);
        if (first) {
            series.grid = make_patch_grid(map.rows, map.cols, patch_size);
            first = false;
        }
        if (patch_size == 1)
            series.values.push_back(map.v);
        else
            series.values.push_back(reduce_to_grid(map, series.grid));
    }
    return series;
}

}  // namespace

PYBIND11_MODULE(hazemeter, m) {
    m.doc() = "atmospheric scattering measurement from hazy image sequences";

    py::register_exception<Error>(m, "HazeError");

    // scattering theory
    m.def("rayleigh_phase", &rayleigh_phase, py::arg("theta"));
    m.def("rayleigh_dop", &rayleigh_dop, py::arg("theta"));
    m.def("henyey_greenstein", &henyey_greenstein, py::arg("theta"), py::arg("g"));

    // simulator
    m.def(
        "random_scene",
        [](int h, int w, int ps, std::pair<double, double> depth_range, std::uint64_t seed) {
            SceneTruth t =
                random_scene(h, w, ps, DepthSpec::range(depth_range.first, depth_range.second),
                             seed);
            return py::make_tuple(image_to_array(t.radiance), t.depths);
        },
        py::arg("height"), py::arg("width"), py::arg("patch_size"),
        py::arg("depth_range") = std::pair<double, double>{1.0, 20.0}, py::arg("seed") = 0,
        "returns (radiance HxWx3, per-patch depths in grid row-major order)");

    m.def(
        "simulate_haze",
        [](const Array& radiance, const std::vector<double>& depths, int patch_size,
           const std::vector<double>& betas, const std::vector<double>& airlights,
           double noise_sigma, std::uint64_t seed) {
            SceneTruth truth;
            truth.radiance = image_from_array(radiance);
            truth.grid = make_patch_grid(truth.radiance.height(), truth.radiance.width(),
                                         patch_size);
            truth.depths = depths;
            ImageSequence seq = simulate_haze(truth, {betas, airlights, noise_sigma}, seed);
            py::list out;
            for (const auto& img : seq.images) out.append(image_to_array(img));
            return out;
        },
        py::arg("radiance"), py::arg("depths"), py::arg("patch_size"), py::arg("betas"),
        py::arg("airlights"), py::arg("noise_sigma") = 0.0, py::arg("seed") = 0);

    m.def(
        "simulate_polarized_pair",
        [](const Array& radiance, const std::vector<double>& depths, int patch_size, double beta,
           double airlight, double dop, double noise_sigma, std::uint64_t seed) {
            SceneTruth truth;
            truth.radiance = image_from_array(radiance);
            truth.grid = make_patch_grid(truth.radiance.height(), truth.radiance.width(),
                                         patch_size);
            truth.depths = depths;
            auto [best, worst] =
                simulate_polarized_pair(truth, beta, airlight, noise_sigma, {dop}, seed);
            return py::make_tuple(image_to_array(best), image_to_array(worst));
        },
        py::arg("radiance"), py::arg("depths"), py::arg("patch_size"), py::arg("beta"),
        py::arg("airlight"), py::arg("dop") = 1.0, py::arg("noise_sigma") = 0.0,
        py::arg("seed") = 0);

    // polarization dehazing
    m.def(
        "estimate_sky_params",
        [](const Array& best, const Array& worst, std::tuple<int, int, int, int> sky,
           double bias) {
            PolEstimate est = estimate_sky_params(image_from_array(best), image_from_array(worst),
                                                  rect_from_tuple(sky), bias);
            return py::make_tuple(est.p, est.a_inf);
        },
        py::arg("best"), py::arg("worst"), py::arg("sky"), py::arg("bias") = 1.09,
        "sky rectangle is (r0, r1, c0, c1), 1-based inclusive");

    m.def(
        "dehaze_pol",
        [](const Array& best, const Array& worst, const Rgb& p, const Rgb& a_inf) {
            PolEstimate est;
            est.p = p;
            est.a_inf = a_inf;
            PolResult res = dehaze_pol(image_from_array(best), image_from_array(worst), est);
            py::dict out;
            out["dehazed"] = image_to_array(res.dehazed);
            out["airlight"] = image_to_array(res.airlight_map);
            out["transmission"] = image_to_array(res.transmission);
            out["scaled_depth"] = map_to_array(res.scaled_depth.map);
            return out;
        },
        py::arg("best"), py::arg("worst"), py::arg("p"), py::arg("a_inf"));

    // dark channel
    m.def(
        "dark_channel",
        [](const Array& img, int win_h, int win_w, const std::string& mode) {
            WindowSpec win{mode == "sliding" ? WindowMode::sliding : WindowMode::tiled, win_h,
                           win_w};
            return map_to_array(dark_channel(image_from_array(img), win));
        },
        py::arg("image"), py::arg("window_height") = 10, py::arg("window_width") = 10,
        py::arg("mode") = "tiled");

    m.def(
        "estimate_airlight_dc",
        [](const Array& img, const Array& dark, double percentile) {
            return estimate_airlight_dc(image_from_array(img), map_from_array(dark), percentile);
        },
        py::arg("image"), py::arg("dark"), py::arg("percentile") = 0.0);

    m.def(
        "dehaze_dc",
        [](const Array& img, int win_h, int win_w, const std::string& mode, const Rgb& airlight) {
            WindowSpec win{mode == "sliding" ? WindowMode::sliding : WindowMode::tiled, win_h,
                           win_w};
            DcResult res = dehaze_dc(image_from_array(img), win, airlight);
            py::dict out;
            out["transmission"] = map_to_array(res.transmission);
            out["dehazed"] = image_to_array(res.dehazed);
            out["scaled_depth"] = map_to_array(res.scaled_depth);
            return out;
        },
        py::arg("image"), py::arg("window_height"), py::arg("window_width"), py::arg("mode"),
        py::arg("airlight"));

    // dichromatic
    m.def(
        "airlight_direction",
        [](const Array& e1, const Array& e2) {
            return airlight_direction(image_from_array(e1), image_from_array(e2));
        },
        py::arg("e1"), py::arg("e2"));

    m.def(
        "dichromatic_dehaze",
        [](const Array& e1, const Array& e2) {
            LinearImage i1 = image_from_array(e1);
            LinearImage i2 = image_from_array(e2);
            Rgb a_hat = airlight_direction(i1, i2);
            std::vector<DtSample> samples;
            for (int r = 0; r < i1.height(); ++r)
                for (int c = 0; c < i1.width(); ++c) {
                    DtSample s = dt_ratio_and_ta(i1.pixel(r, c), i2.pixel(r, c), a_hat);
                    if (s.t_signed > 0 && s.ratio > 0 && s.ratio < 1) samples.push_back(s);
                }
            HorizonRadiances horizon = fit_horizon_radiances(samples);
            DichromaticResult res = dichromatic_dehaze(i1, i2, a_hat, horizon);
            py::dict out;
            out["dehazed"] = image_to_array(res.dehazed);
            out["dot_depth"] = map_to_array(res.dot_depth);
            out["alpha"] = map_to_array(res.alpha);
            out["optical_thickness"] = map_to_array(res.optical_thickness);
            out["a_hat"] = res.a_hat;
            out["a_inf1"] = res.horizon.a1;
            out["a_inf2"] = res.horizon.a2;
            return out;
        },
        py::arg("e1"), py::arg("e2"));

    // color optimization
    m.def(
        "co_solve",
        [](const std::vector<Array>& images, const std::vector<double>& airlights, int patch_size,
           double tol, int max_iters, bool clamp_in_loop, int jobs) {
            ImageSequence seq;
            for (const Array& arr : images) seq.images.push_back(image_from_array(arr));
            CoConfig cfg;
            cfg.patch_size = patch_size;
            cfg.tol = tol;
            cfg.max_iters = max_iters;
            cfg.clamp_in_loop = clamp_in_loop;
            cfg.jobs = jobs;
            CoResult res = co_solve(seq, airlights, cfg);
            py::dict out;
            py::list tmaps;
            for (int i = 0; i < res.transmission.times(); ++i)
                tmaps.append(map_to_array(
                    expand_from_grid(res.transmission.values[i], res.transmission.grid)));
            out["transmission"] = tmaps;
            out["radiance"] = image_to_array(res.radiance);
            out["objective_trace"] = res.objective_trace;
            out["converged"] = res.converged;
            out["darkest_index"] = res.darkest_index;
            return out;
        },
        py::arg("images"), py::arg("airlights"), py::arg("patch_size") = 10,
        py::arg("tol") = 1e-5, py::arg("max_iters") = 500, py::arg("clamp_in_loop") = true,
        py::arg("jobs") = 1);

    m.def(
        "estimate_airlight_brightest",
        [](const std::vector<Array>& images, double percentile) {
            ImageSequence seq;
            for (const Array& arr : images) seq.images.push_back(image_from_array(arr));
            return estimate_airlight_brightest(seq, percentile);
        },
        py::arg("images"), py::arg("percentile") = 0.0);

    m.def(
        "normalize_illumination",
        [](const std::vector<Array>& images, std::tuple<int, int, int, int> foreground) {
            ImageSequence seq;
            for (const Array& arr : images) seq.images.push_back(image_from_array(arr));
            ImageSequence out = normalize_illumination(seq, rect_from_tuple(foreground));
            py::list result;
            for (const auto& img : out.images) result.append(image_to_array(img));
            return result;
        },
        py::arg("images"), py::arg("foreground"));

    // constant depth constraint
    m.def(
        "cdc_solve",
        [](const std::vector<Array>& tmaps, int patch_size, double tol, int max_iters) {
            TransmissionSeries series = series_from_list(tmaps, patch_size);
            CdcConfig cfg;
            cfg.tol = tol;
            cfg.max_iters = max_iters;
            CdcResult res = cdc_solve(series, cfg);
            py::dict out;
            out["betas"] = res.scatter.betas;
            out["clamp_index"] = res.scatter.clamp_index;
            out["depth"] = map_to_array(res.depth.map);
            out["objective_trace"] = res.objective_trace;
            out["converged"] = res.converged;
            return out;
        },
        py::arg("tmaps"), py::arg("patch_size") = 1, py::arg("tol") = 1e-5,
        py::arg("max_iters") = 500,
        "tmaps are per-pixel arrays; patch_size > 1 averages them onto a grid first");

    m.def("scattering_error", &scattering_error, py::arg("estimated"), py::arg("truth"));

    // evaluation metrics
    m.def(
        "depth_error",
        [](const Array& est, const Array& truth) {
            return depth_error({map_from_array(est), DepthScale::unscaled},
                               {map_from_array(truth), DepthScale::unscaled});
        },
        py::arg("estimated"), py::arg("truth"));

    m.def(
        "distance_ratio",
        [](const Array& depth, std::tuple<int, int, int, int> far,
           std::tuple<int, int, int, int> near) {
            return distance_ratio({map_from_array(depth), DepthScale::unscaled},
                                  rect_from_tuple(far), rect_from_tuple(near));
        },
        py::arg("depth"), py::arg("far"), py::arg("near"));

    m.def(
        "welch_t_test",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            WelchResult r = welch_t_test(a, b);
            return py::make_tuple(r.t, r.dof, r.p_two_tail);
        },
        py::arg("a"), py::arg("b"), "returns (t, dof, p_two_tail)");

    m.def("sweep_trial_error",
          [](const std::string& variable, double value, double noise_sigma,
             const std::string& algorithm, std::uint64_t seed) {
              auto var = sweep_variable_from_name(variable);
              auto algo = algorithm_from_name(algorithm);
              if (!var || !algo) throw OutOfBounds("unknown variable or algorithm");
              return sweep_trial_error(*var, value, noise_sigma, *algo, seed);
          },
          py::arg("variable"), py::arg("value"), py::arg("noise_sigma"), py::arg("algorithm"),
          py::arg("seed"));

    m.def("co_transmittance_error", &co_transmittance_error, py::arg("actual_t"),
          py::arg("noise_sigma"), py::arg("seed"));
}
