// hazemeter: measure atmospheric scattering from image sequences of hazy
// scenes. Every subcommand writes its artifacts plus a run.json provenance
// record; outputs are staged and moved into place so failures leave no
// partial files.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hazemeter/cdc.hpp"
#include "hazemeter/co.hpp"
#include "hazemeter/dark.hpp"
#include "hazemeter/dichromatic.hpp"
#include "hazemeter/evaluate.hpp"
#include "hazemeter/hazesim.hpp"
#include "hazemeter/image_io.hpp"
#include "hazemeter/phase.hpp"
#include "hazemeter/pol.hpp"
#include "hazemeter/radiometry.hpp"
#include "hazemeter/registration.hpp"
#include "hazemeter/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace haze;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out;
};

// Artifacts are written into a staging directory next to the target and
// moved into place only after the subcommand succeeds.
class OutputStage {
public:
    explicit OutputStage(const fs::path& target) : target_(target) {
        if (target_.empty()) throw IoError("an output directory is required (-o)");
        fs::path parent = target_.parent_path().empty() ? "." : target_.parent_path();
        fs::create_directories(parent);
        stage_ = parent / (".stage-" + target_.filename().string() + "-" +
                           std::to_string(::getpid()));
        fs::create_directories(stage_);
    }
    ~OutputStage() {
        std::error_code ec;
        if (!committed_) fs::remove_all(stage_, ec);
    }
    fs::path path(const std::string& name) {
        fs::path p = stage_ / name;
        fs::create_directories(p.parent_path());
        return p;
    }
    void commit() {
        fs::create_directories(target_);
        for (const auto& entry : fs::recursive_directory_iterator(stage_)) {
            if (!entry.is_regular_file()) continue;
            fs::path rel = fs::relative(entry.path(), stage_);
            fs::path dest = target_ / rel;
            fs::create_directories(dest.parent_path());
            fs::rename(entry.path(), dest);
        }
        fs::remove_all(stage_);
        committed_ = true;
    }

private:
    fs::path target_;
    fs::path stage_;
    bool committed_ = false;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void write_run_record(OutputStage& stage, const std::string& subcommand, const GlobalOpts& g,
                      const json& options) {
    json j;
    j["tool"] = "hazemeter";
    j["version"] = "0.1.0";
    j["subcommand"] = subcommand;
    j["seed"] = g.seed;
    j["jobs"] = g.jobs;
    j["options"] = options;
    j["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    write_json(stage.path("run.json"), j);
}

Rect parse_rect(const std::string& text) {
    Rect r;
    if (std::sscanf(text.c_str(), "%d,%d,%d,%d", &r.start_row, &r.end_row, &r.start_col,
                    &r.end_col) != 4)
        throw OutOfBounds("rectangle must be r0,r1,c0,c1 (1-based inclusive): " + text);
    return r;
}

LinearImage load_any_image(const fs::path& path) {
    if (path.extension() == ".hzb") return io::load_hzb(path);
    return io::load_image(path);
}

ScalarMap load_any_map(const fs::path& path) {
    if (path.extension() == ".hzb") return io::load_hzb_map(path);
    return io::load_map(path);
}

// Collects a sorted sequence from a directory, preferring the lossless dumps.
std::vector<fs::path> sequence_files(const fs::path& dir, const std::string& stem_hint = "") {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    auto collect = [&](const std::string& ext) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (!e.is_regular_file() || e.path().extension() != ext) continue;
            if (!stem_hint.empty() &&
                e.path().stem().string().find(stem_hint) == std::string::npos)
                continue;
            files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        return files;
    };
    for (const char* ext : {".hzb", ".png", ".tif", ".tiff"}) {
        std::vector<fs::path> files = collect(ext);
        if (!files.empty()) return files;
    }
    if (!stem_hint.empty()) return sequence_files(dir);  // hint is a preference
    throw IoError("no images found in " + dir.string());
}

void save_image_pair(OutputStage& stage, const std::string& name, const LinearImage& img) {
    io::save_image(stage.path(name + ".png"), img, 16);
    io::save_hzb(stage.path(name + ".hzb"), img);
}

void save_map_pair(OutputStage& stage, const std::string& name, const ScalarMap& map) {
    io::save_map(stage.path(name + ".png"), map, 16);
    io::save_hzb(stage.path(name + ".hzb"), map);
}

ResponseCurve resolve_curve(const std::string& spec) {
    if (spec == "identity" || spec == "identity-log") return ResponseCurve::identity_log();
    if (spec == "gamma22" || spec == "gamma-2.2") return ResponseCurve::gamma22();
    return ResponseCurve::load_csv(spec);
}

json rgb_json(const Rgb& v) { return json::array({v[0], v[1], v[2]}); }

void write_trace_csv(const fs::path& path, const std::vector<double>& trace) {
    std::ofstream out(path);
    out.precision(17);
    out << "iteration,objective\n";
    for (size_t i = 0; i < trace.size(); ++i) out << i << ',' << trace[i] << '\n';
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const GlobalOpts& g, const std::string& preset, int height, int width, int ps,
                 std::vector<double> betas, std::vector<double> airlights, double noise,
                 const std::string& depths_spec, double dop) {
    int h = height, w = width, patch = ps;
    HazeParams params{std::move(betas), std::move(airlights), noise};
    DepthSpec depths = DepthSpec::range(1, 20);
    if (preset == "thesis-6.1") {
        h = Thesis61Preset::height;
        w = Thesis61Preset::width;
        patch = Thesis61Preset::patch_size;
        params = Thesis61Preset::params(noise);
        depths = Thesis61Preset::depths();
    } else if (!preset.empty()) {
        throw OutOfBounds("unknown preset: " + preset);
    } else if (!depths_spec.empty()) {
        if (depths_spec.find(':') != std::string::npos) {
            double lo, hi;
            if (std::sscanf(depths_spec.c_str(), "%lf:%lf", &lo, &hi) != 2)
                throw OutOfBounds("depth range must be lo:hi");
            depths = DepthSpec::range(lo, hi);
        } else {
            std::vector<double> list;
            std::istringstream ss(depths_spec);
            std::string item;
            while (std::getline(ss, item, ',')) list.push_back(std::stod(item));
            depths = DepthSpec::list(std::move(list));
        }
    }

    SceneTruth truth = random_scene(h, w, patch, depths, g.seed);
    ImageSequence seq = simulate_haze(truth, params, g.seed);
    auto truth_t = true_transmissions(truth, params);

    OutputStage stage(g.out);
    char name[64];
    for (int i = 0; i < seq.size(); ++i) {
        std::snprintf(name, sizeof(name), "img_%03d", i);
        save_image_pair(stage, name, seq.images[i]);
        std::snprintf(name, sizeof(name), "tmaps_truth/tmap_%03d", i);
        save_map_pair(stage, name, expand_from_grid(truth_t[i], truth.grid));
    }
    save_image_pair(stage, "radiance_truth", truth.radiance);
    if (dop >= 0) {
        for (int i = 0; i < seq.size(); ++i) {
            auto [best, worst] =
                simulate_polarized_pair(truth, params.betas[i], params.airlights[i],
                                        params.noise_sigma, {dop}, Rng::derive(g.seed, 0xb057, i));
            std::snprintf(name, sizeof(name), "pol/best_%03d", i);
            save_image_pair(stage, name, best);
            std::snprintf(name, sizeof(name), "pol/worst_%03d", i);
            save_image_pair(stage, name, worst);
        }
    }

    json truth_json;
    truth_json["betas"] = params.betas;
    truth_json["airlights"] = params.airlights;
    truth_json["noise_sigma"] = params.noise_sigma;
    truth_json["depths"] = truth.depths;
    truth_json["dop"] = dop;
    truth_json["seed"] = g.seed;
    truth_json["grid"] = {{"rows", truth.grid.rows},
                          {"cols", truth.grid.cols},
                          {"patch_height", truth.grid.patch_height},
                          {"patch_width", truth.grid.patch_width}};
    write_json(stage.path("truth.json"), truth_json);
    write_run_record(stage, "simulate", g,
                     {{"preset", preset},
                      {"height", h},
                      {"width", w},
                      {"patch", patch},
                      {"noise", noise},
                      {"dop", dop}});
    stage.commit();
    return 0;
}

// -------------------------------------------------------------- dehaze-pol

int cmd_dehaze_pol(const GlobalOpts& g, const std::string& best_path,
                   const std::string& worst_path, const std::string& sky, double bias) {
    LinearImage best = load_any_image(best_path);
    LinearImage worst = load_any_image(worst_path);
    PolEstimate est = estimate_sky_params(best, worst, parse_rect(sky), bias);
    PolResult res = dehaze_pol(best, worst, est);

    OutputStage stage(g.out);
    save_image_pair(stage, "dehazed", res.dehazed);
    save_image_pair(stage, "airlight", res.airlight_map);
    io::save_hzb(stage.path("transmission.hzb"), res.transmission);
    save_map_pair(stage, "depth", res.scaled_depth.map);
    ScalarMap t_scalar(res.scaled_depth.map.rows, res.scaled_depth.map.cols);
    for (size_t i = 0; i < t_scalar.v.size(); ++i)
        t_scalar.v[i] = std::exp(-res.scaled_depth.map.v[i]);
    save_map_pair(stage, "tmap", t_scalar);

    json params;
    params["p"] = rgb_json(est.p);
    params["a_inf"] = rgb_json(est.a_inf);
    params["bias"] = est.bias;
    write_json(stage.path("pol.json"), params);
    write_run_record(stage, "dehaze-pol", g,
                     {{"best", best_path}, {"worst", worst_path}, {"sky", sky}, {"bias", bias}});
    stage.commit();
    return 0;
}

// --------------------------------------------------------------- dehaze-dc

int cmd_dehaze_dc(const GlobalOpts& g, const std::string& in_path, const std::string& window,
                  const std::string& mode, double percentile) {
    LinearImage img = load_any_image(in_path);
    int wh = 10, ww = 10;
    if (std::sscanf(window.c_str(), "%dx%d", &wh, &ww) != 2)
        throw OutOfBounds("window must be HxW: " + window);
    if (mode != "tiled" && mode != "sliding") throw OutOfBounds("mode must be tiled or sliding");
    WindowSpec win{mode == "sliding" ? WindowMode::sliding : WindowMode::tiled, wh, ww};

    ScalarMap dark = dark_channel(img, win);
    Rgb airlight = estimate_airlight_dc(img, dark, percentile);
    DcResult res = dehaze_dc(img, win, airlight);

    OutputStage stage(g.out);
    save_map_pair(stage, "dark_channel", dark);
    save_map_pair(stage, "tmap", res.transmission);
    save_image_pair(stage, "dehazed", res.dehazed);
    save_map_pair(stage, "depth", res.scaled_depth);
    write_json(stage.path("dc.json"), {{"airlight", rgb_json(airlight)},
                                       {"percentile", percentile},
                                       {"window", window},
                                       {"mode", mode}});
    write_run_record(
        stage, "dehaze-dc", g,
        {{"in", in_path}, {"window", window}, {"mode", mode}, {"percentile", percentile}});
    stage.commit();
    return 0;
}

// ------------------------------------------------------------- dehaze-dich

int cmd_dehaze_dich(const GlobalOpts& g, const std::string& e1_path, const std::string& e2_path,
                    const std::string& cube, bool inverse_square) {
    LinearImage e1 = load_any_image(e1_path);
    LinearImage e2 = load_any_image(e2_path);
    Rgb a_hat = airlight_direction(e1, e2);
    std::vector<DtSample> samples;
    samples.reserve(static_cast<size_t>(e1.height()) * e1.width());
    for (int r = 0; r < e1.height(); ++r)
        for (int c = 0; c < e1.width(); ++c) {
            DtSample s = dt_ratio_and_ta(e1.pixel(r, c), e2.pixel(r, c), a_hat);
            if (s.t_signed > 0 && s.ratio > 0 && s.ratio < 1) samples.push_back(s);
        }
    HorizonRadiances horizon = fit_horizon_radiances(samples);
    double cube_dim = 0.0;
    if (cube != "auto") cube_dim = std::stod(cube);
    DichromaticResult res = dichromatic_dehaze(e1, e2, a_hat, horizon, cube_dim);

    OutputStage stage(g.out);
    save_image_pair(stage, "dehazed", res.dehazed);
    io::save_hzb(stage.path("dot_depth.hzb"), res.dot_depth);
    io::save_hzb(stage.path("alpha.hzb"), res.alpha);
    io::save_hzb(stage.path("optical_thickness.hzb"), res.optical_thickness);
    ScalarMap tmap(res.dot_depth.rows, res.dot_depth.cols);
    for (size_t i = 0; i < tmap.v.size(); ++i) tmap.v[i] = std::exp(-res.dot_depth.v[i]);
    save_map_pair(stage, "tmap", tmap);
    // inverse_square records how the pair was synthesized; the estimation
    // itself is ratio-based and unaffected
    write_json(stage.path("dich.json"), {{"a_hat", rgb_json(res.a_hat)},
                                         {"a_inf1", res.horizon.a1},
                                         {"a_inf2", res.horizon.a2},
                                         {"anchors", res.anchor_count},
                                         {"inverse_square", inverse_square}});
    write_run_record(stage, "dehaze-dich", g,
                     {{"e1", e1_path},
                      {"e2", e2_path},
                      {"cube", cube},
                      {"inverse_square", inverse_square}});
    stage.commit();
    return 0;
}

// ----------------------------------------------------------------------- co

int cmd_co(const GlobalOpts& g, const std::string& seq_dir, int patch, double tol, int max_iters,
           const std::string& airlight, const std::string& foreground, double init_t,
           bool no_clamp) {
    ImageSequence seq;
    for (const fs::path& f : sequence_files(seq_dir, "img")) seq.images.push_back(load_any_image(f));
    seq.validate();
    if (!foreground.empty()) seq = normalize_illumination(seq, parse_rect(foreground));

    CoConfig cfg;
    cfg.patch_size = patch;
    cfg.tol = tol;
    cfg.max_iters = max_iters;
    cfg.init_t = init_t;
    cfg.jobs = g.jobs;
    cfg.clamp_in_loop = !no_clamp;
    if (airlight == "brightest") {
        cfg.airlight_mode = AirlightMode::brightest_pixel;
    } else if (airlight.rfind("p:", 0) == 0) {
        cfg.airlight_mode = AirlightMode::top_percentile;
        cfg.percentile = std::stod(airlight.substr(2));
    } else if (airlight.rfind("explicit:", 0) == 0) {
        cfg.airlight_mode = AirlightMode::explicit_values;
        std::ifstream in(airlight.substr(9));
        if (!in) throw IoError("cannot open airlight file");
        json j;
        in >> j;
        cfg.airlights = j.at("airlights").get<std::vector<double>>();
    } else {
        throw OutOfBounds("airlight must be brightest, p:<fraction> or explicit:<file>");
    }
    CoResult res = co_solve_auto(seq, cfg);

    OutputStage stage(g.out);
    char name[64];
    for (int i = 0; i < res.transmission.times(); ++i) {
        std::snprintf(name, sizeof(name), "tmaps/tmap_%03d", i);
        save_map_pair(stage, name,
                      expand_from_grid(res.transmission.values[i], res.transmission.grid));
    }
    save_image_pair(stage, "radiance", res.radiance);
    write_trace_csv(stage.path("objective.csv"), res.objective_trace);
    write_json(stage.path("co.json"), {{"converged", res.converged},
                                       {"darkest_index", res.darkest_index},
                                       {"patch", patch},
                                       {"tol", tol},
                                       {"max_iters", max_iters}});
    write_run_record(stage, "co", g,
                     {{"seq", seq_dir},
                      {"patch", patch},
                      {"tol", tol},
                      {"max_iters", max_iters},
                      {"airlight", airlight},
                      {"foreground", foreground},
                      {"init_t", init_t},
                      {"clamp_in_loop", !no_clamp}});
    stage.commit();
    return 0;
}

// ---------------------------------------------------------------------- cdc

int cmd_cdc(const GlobalOpts& g, const std::string& tmaps_dir, double tol, int max_iters) {
    std::vector<fs::path> files = sequence_files(tmaps_dir, "tmap");
    TransmissionSeries series;
    bool first = true;
    for (const fs::path& f : files) {
        ScalarMap map = load_any_map(f);
        if (first) {
            // per-pixel maps become 1x1-patch grids
            series.grid = make_patch_grid(map.rows, map.cols, 1);
            first = false;
        }
        series.values.push_back(map.v);
    }
    CdcConfig cfg;
    cfg.tol = tol;
    cfg.max_iters = max_iters;
    CdcResult res = cdc_solve(series, cfg);

    OutputStage stage(g.out);
    write_json(stage.path("betas.json"), {{"betas", res.scatter.betas},
                                          {"clamp_index", res.scatter.clamp_index},
                                          {"converged", res.converged}});
    save_map_pair(stage, "depth", res.depth.map);
    write_trace_csv(stage.path("objective.csv"), res.objective_trace);
    write_run_record(stage, "cdc", g,
                     {{"tmaps", tmaps_dir}, {"tol", tol}, {"max_iters", max_iters}});
    stage.commit();
    return 0;
}

// -------------------------------------------------------------------- sweep

int cmd_sweep(const GlobalOpts& g, const std::string& variable, const std::string& grid_csv,
              int trials, double noise_sigma, const std::string& algos) {
    SweepSpec spec;
    auto var = sweep_variable_from_name(variable);
    if (!var) throw OutOfBounds("unknown sweep variable: " + variable);
    spec.variable = *var;
    if (grid_csv.empty()) {
        spec.grid = SweepSpec::default_grid(spec.variable);
    } else {
        std::istringstream ss(grid_csv);
        std::string item;
        while (std::getline(ss, item, ',')) spec.grid.push_back(std::stod(item));
    }
    spec.trials = trials;
    spec.seed = g.seed;
    spec.noise_sigma = noise_sigma;
    spec.jobs = g.jobs;
    if (!algos.empty()) {
        spec.algorithms.clear();
        std::istringstream ss(algos);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto a = algorithm_from_name(item);
            if (!a) throw OutOfBounds("unknown algorithm: " + item);
            spec.algorithms.push_back(*a);
        }
    }
    SweepResult res = run_sweep(spec);

    OutputStage stage(g.out);
    res.write_csv(stage.path("results.csv"));
    res.write_mean_csv(stage.path("mean.csv"));
    json summary;
    summary["variable"] = sweep_variable_name(spec.variable);
    summary["grid"] = spec.grid;
    summary["trials"] = spec.trials;
    summary["noise_sigma"] = spec.noise_sigma;
    summary["seed"] = spec.seed;
    json cells = json::array();
    for (const SweepCell& c : res.cells)
        cells.push_back({{"value", c.value},
                         {"algorithm", algorithm_name(c.algorithm)},
                         {"mean_error", c.mean_error},
                         {"std_error", c.std_error},
                         {"ok_trials", c.ok_trials},
                         {"failed_trials", c.failed_trials}});
    summary["cells"] = cells;
    write_json(stage.path("summary.json"), summary);
    write_run_record(stage, "sweep", g,
                     {{"variable", variable},
                      {"trials", trials},
                      {"noise_sigma", noise_sigma},
                      {"grid", spec.grid}});
    stage.commit();
    return 0;
}

// ------------------------------------------------------------------- theory

int cmd_theory(const GlobalOpts& g, double hg_g) {
    OutputStage stage(g.out);
    std::ofstream out(stage.path("theory.csv"));
    out.precision(17);
    out << "theta_deg,rayleigh_phase,rayleigh_dop,henyey_greenstein\n";
    for (int deg = 0; deg <= 180; ++deg) {
        double theta = deg * std::numbers::pi / 180.0;
        out << deg << ',' << rayleigh_phase(theta) << ',' << rayleigh_dop(theta) << ','
            << henyey_greenstein(theta, hg_g) << '\n';
    }
    write_run_record(stage, "theory", g, {{"g", hg_g}});
    stage.commit();
    return 0;
}

// ----------------------------------------------------------------- register

int cmd_register(const GlobalOpts& g, const std::string& moving_path,
                 const std::string& base_path, const std::string& points_path) {
    LinearImage moving = load_any_image(moving_path);
    LinearImage base = load_any_image(base_path);
    (void)base;  // loaded to validate the pair; the warp targets its frame
    ControlPoints cp = load_control_points(points_path);
    AffineTransform t = estimate_affine(cp);
    LinearImage registered = warp(moving, t);

    OutputStage stage(g.out);
    save_image_pair(stage, "registered", registered);
    double rss = 0;
    for (const auto& [mov, base_pt] : cp.pairs) {
        Point2 pred = t.apply(base_pt);
        rss += (pred.x - mov.x) * (pred.x - mov.x) + (pred.y - mov.y) * (pred.y - mov.y);
    }
    write_json(stage.path("transform.json"),
               {{"matrix", t.m},
                {"residual_rms", std::sqrt(rss / (2.0 * cp.pairs.size()))},
                {"pairs", cp.pairs.size()}});
    write_run_record(stage, "register", g,
                     {{"moving", moving_path}, {"base", base_path}, {"points", points_path}});
    stage.commit();
    return 0;
}

// ---------------------------------------------------------------- linearize

int cmd_linearize(const GlobalOpts& g, const std::string& in_path, const std::string& curve_spec,
                  double shutter, bool inverse) {
    ResponseCurve curve = resolve_curve(curve_spec);
    OutputStage stage(g.out);
    if (inverse) {
        LinearImage img = load_any_image(in_path);
        io::CodedImage coded = delinearize(img, curve, shutter);
        io::save_coded8(stage.path("coded.png"), coded);
    } else {
        io::CodedImage coded = io::load_coded8(in_path);
        LinearImage img = linearize(coded, curve, shutter);
        save_image_pair(stage, "linear", img);
    }
    write_run_record(stage, "linearize", g,
                     {{"in", in_path},
                      {"curve", curve_spec},
                      {"shutter", shutter},
                      {"inverse", inverse}});
    stage.commit();
    return 0;
}

// ------------------------------------------------------------------ compare

int cmd_compare(const GlobalOpts& g, const std::string& est_path, const std::string& truth_path,
                const std::string& far, const std::string& near) {
    json result;
    if (est_path.size() > 5 && est_path.substr(est_path.size() - 5) == ".json") {
        // scattering series comparison
        auto load_betas = [](const std::string& p) {
            std::ifstream in(p);
            if (!in) throw IoError("cannot open " + p);
            json j;
            in >> j;
            return j.at("betas").get<std::vector<double>>();
        };
        result["scattering_error"] = scattering_error(load_betas(est_path),
                                                      load_betas(truth_path));
    } else {
        DepthMap est{load_any_map(est_path), DepthScale::unscaled};
        DepthMap truth{load_any_map(truth_path), DepthScale::unscaled};
        result["depth_error"] = depth_error(est, truth);
        result["depth_error_rms"] = depth_error_rms(est, truth);
        result["depth_error_rescaled"] = depth_error_rescaled(est, truth);
        if (!far.empty() && !near.empty()) {
            result["distance_ratio_est"] = distance_ratio(est, parse_rect(far), parse_rect(near));
            result["distance_ratio_truth"] =
                distance_ratio(truth, parse_rect(far), parse_rect(near));
        }
    }
    OutputStage stage(g.out);
    write_json(stage.path("compare.json"), result);
    write_run_record(stage, "compare", g,
                     {{"est", est_path}, {"truth", truth_path}, {"far", far}, {"near", near}});
    stage.commit();
    std::cout << result.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hazemeter: atmospheric scattering measurement from hazy image sequences"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file overriding defaults");

    GlobalOpts g;
    app.add_option("--seed", g.seed, "rng seed recorded in every output")->capture_default_str();
    app.add_option("--jobs", g.jobs, "worker threads for sweeps and per-patch solvers")
        ->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "synthesize a hazy scene with ground truth");
    std::string sim_preset, sim_depths;
    int sim_h = 100, sim_w = 100, sim_ps = 10;
    std::vector<double> sim_betas{0.1, 0.15, 0.2, 0.25, 0.3};
    std::vector<double> sim_airlights{0.5, 0.6, 0.7, 0.8, 0.9};
    double sim_noise = 0.0, sim_dop = -1.0;
    sim->add_option("--preset", sim_preset, "thesis-6.1 bundles the reference-scene constants");
    sim->add_option("--height", sim_h)->capture_default_str();
    sim->add_option("--width", sim_w)->capture_default_str();
    sim->add_option("--patch", sim_ps)->capture_default_str();
    sim->add_option("--betas", sim_betas, "per-time scattering coefficients");
    sim->add_option("--airlights", sim_airlights, "per-time airlight at infinity");
    sim->add_option("--noise", sim_noise, "gaussian noise std")->capture_default_str();
    sim->add_option("--depths", sim_depths, "lo:hi range or comma list per patch");
    sim->add_option("--dop", sim_dop, "also emit polarized pairs at this degree of polarization");
    sim->add_option("-o,--out", g.out, "output directory")->required();

    auto* pol = app.add_subcommand("dehaze-pol", "polarization-based dehazing");
    std::string pol_best, pol_worst, pol_sky;
    double pol_bias = 1.09;
    pol->add_option("--best", pol_best, "best (parallel) polarized image")->required();
    pol->add_option("--worst", pol_worst, "worst (perpendicular) polarized image")->required();
    pol->add_option("--sky", pol_sky, "sky patch r0,r1,c0,c1 (1-based inclusive)")->required();
    pol->add_option("--bias", pol_bias, "multiplicative DOP bias")->capture_default_str();
    pol->add_option("-o,--out", g.out)->required();

    auto* dc = app.add_subcommand("dehaze-dc", "dark-channel-prior dehazing");
    std::string dc_in, dc_window = "10x10", dc_mode = "tiled";
    double dc_percentile = 0.0;
    dc->add_option("--in", dc_in)->required();
    dc->add_option("--window", dc_window, "window HxW")->capture_default_str();
    dc->add_option("--mode", dc_mode, "tiled or sliding")->capture_default_str();
    dc->add_option("--percentile", dc_percentile, "top fraction for airlight averaging")
        ->capture_default_str();
    dc->add_option("-o,--out", g.out)->required();

    auto* dich = app.add_subcommand("dehaze-dich", "two-weather dichromatic dehazing");
    std::string dich_e1, dich_e2, dich_cube = "auto";
    bool dich_inverse_square = false;
    dich->add_option("--e1", dich_e1)->required();
    dich->add_option("--e2", dich_e2)->required();
    dich->add_option("--cube", dich_cube, "color cube dimension or auto")->capture_default_str();
    dich->add_flag("--inverse-square", dich_inverse_square,
                   "record that the pair used the inverse-square direct transmission");
    dich->add_option("-o,--out", g.out)->required();

    auto* co = app.add_subcommand("co", "color optimization over a temporal sequence");
    std::string co_seq, co_airlight = "brightest", co_foreground;
    int co_patch = 10, co_iters = 500;
    double co_tol = 1e-5, co_init = 0.0;
    bool co_no_clamp = false;
    co->add_option("--seq", co_seq, "directory of registered linear images")->required();
    co->add_option("--patch", co_patch)->capture_default_str();
    co->add_option("--tol", co_tol)->capture_default_str();
    co->add_option("--max-iters", co_iters)->capture_default_str();
    co->add_option("--airlight", co_airlight, "brightest | p:<fraction> | explicit:<file.json>")
        ->capture_default_str();
    co->add_option("--foreground", co_foreground,
                   "normalize illumination by this foreground patch r0,r1,c0,c1");
    co->add_option("--init-t", co_init, "initial transmittance (0, 0.5 or 1)")
        ->capture_default_str();
    co->add_flag("--no-clamp", co_no_clamp, "leave the darkest image's T free during iteration");
    co->add_option("-o,--out", g.out)->required();

    auto* cdc = app.add_subcommand("cdc", "constant-depth decomposition of transmission maps");
    std::string cdc_tmaps;
    double cdc_tol = 1e-5;
    int cdc_iters = 500;
    cdc->add_option("--tmaps", cdc_tmaps, "directory of transmission maps")->required();
    cdc->add_option("--tol", cdc_tol)->capture_default_str();
    cdc->add_option("--max-iters", cdc_iters)->capture_default_str();
    cdc->add_option("-o,--out", g.out)->required();

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo accuracy experiments");
    std::string sweep_variable, sweep_grid, sweep_algos;
    int sweep_trials = 20;
    double sweep_noise = 0.05;
    sweep->add_option("--variable", sweep_variable, "noise | dop | airlight")->required();
    sweep->add_option("--grid", sweep_grid, "comma-separated grid values");
    sweep->add_option("--trials", sweep_trials)->capture_default_str();
    sweep->add_option("--noise-sigma", sweep_noise,
                      "fixed image noise for the dop and airlight sweeps")
        ->capture_default_str();
    sweep->add_option("--algos", sweep_algos, "subset of CO-CDC,POL-CDC,DICH-CDC,DC-CDC");
    sweep->add_option("-o,--out", g.out)->required();

    auto* theory = app.add_subcommand("theory", "phase-function reference curves as CSV");
    double theory_g = 0.8;
    theory->add_option("--g", theory_g, "Henyey-Greenstein asymmetry")->capture_default_str();
    theory->add_option("-o,--out", g.out)->required();

    auto* reg = app.add_subcommand("register", "affine registration from control points");
    std::string reg_moving, reg_base, reg_points;
    reg->add_option("--moving", reg_moving)->required();
    reg->add_option("--base", reg_base)->required();
    reg->add_option("--points", reg_points, "control-point JSON")->required();
    reg->add_option("-o,--out", g.out)->required();

    auto* lin = app.add_subcommand("linearize", "apply a radiometric response curve");
    std::string lin_in, lin_curve = "identity";
    double lin_shutter = 1.0;
    bool lin_inverse = false;
    lin->add_option("--in", lin_in)->required();
    lin->add_option("--curve", lin_curve, "identity | gamma22 | curve CSV path")
        ->capture_default_str();
    lin->add_option("--shutter", lin_shutter, "exposure time in seconds")->capture_default_str();
    lin->add_flag("--inverse", lin_inverse, "map linear irradiance back to codes");
    lin->add_option("-o,--out", g.out)->required();

    auto* cmp = app.add_subcommand("compare", "error metrics between maps or beta series");
    std::string cmp_est, cmp_truth, cmp_far, cmp_near;
    cmp->add_option("--est", cmp_est)->required();
    cmp->add_option("--truth", cmp_truth)->required();
    cmp->add_option("--far", cmp_far, "far region r0,r1,c0,c1 for the distance ratio");
    cmp->add_option("--near", cmp_near, "near region r0,r1,c0,c1");
    cmp->add_option("-o,--out", g.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(g, sim_preset, sim_h, sim_w, sim_ps, sim_betas, sim_airlights,
                                sim_noise, sim_depths, sim_dop);
        if (pol->parsed()) return cmd_dehaze_pol(g, pol_best, pol_worst, pol_sky, pol_bias);
        if (dc->parsed()) return cmd_dehaze_dc(g, dc_in, dc_window, dc_mode, dc_percentile);
        if (dich->parsed())
            return cmd_dehaze_dich(g, dich_e1, dich_e2, dich_cube, dich_inverse_square);
        if (co->parsed())
            return cmd_co(g, co_seq, co_patch, co_tol, co_iters, co_airlight, co_foreground,
                          co_init, co_no_clamp);
        if (cdc->parsed()) return cmd_cdc(g, cdc_tmaps, cdc_tol, cdc_iters);
        if (sweep->parsed())
            return cmd_sweep(g, sweep_variable, sweep_grid, sweep_trials, sweep_noise,
                             sweep_algos);
        if (theory->parsed()) return cmd_theory(g, theory_g);
        if (reg->parsed()) return cmd_register(g, reg_moving, reg_base, reg_points);
        if (lin->parsed()) return cmd_linearize(g, lin_in, lin_curve, lin_shutter, lin_inverse);
        if (cmp->parsed()) return cmd_compare(g, cmp_est, cmp_truth, cmp_far, cmp_near);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
