#include "hazemeter/radiometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace haze {

ResponseCurve::ResponseCurve(std::array<std::vector<double>, 3> g) : g_(std::move(g)) {
    for (int ch = 0; ch < 3; ++ch) {
        if (g_[ch].size() != 256) throw InvalidCurve("each channel needs 256 entries");
        for (int i = 0; i < 255; ++i)
            if (g_[ch][i] > g_[ch][i + 1])
                throw InvalidCurve("curve must be monotone non-decreasing");
        for (double v : g_[ch])
            if (!std::isfinite(v)) throw InvalidCurve("curve values must be finite");
    }
}

ResponseCurve ResponseCurve::identity_log() {
    std::vector<double> g(256);
    // code 0 would be -inf; half a code keeps the curve finite and monotone
    g[0] = std::log(0.5 / 255.0);
    for (int z = 1; z < 256; ++z) g[z] = std::log(z / 255.0);
    return ResponseCurve({g, g, g});
}

ResponseCurve ResponseCurve::gamma22() {
    std::vector<double> g(256);
    for (int z = 1; z < 256; ++z) g[z] = 2.2 * std::log(z / 255.0);
    g[0] = 2.2 * std::log(0.5 / 255.0);
    return ResponseCurve({g, g, g});
}

ResponseCurve ResponseCurve::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open curve CSV: " + path.string());
    std::array<std::vector<double>, 3> g;
    std::array<std::vector<bool>, 3> seen;
    for (int ch = 0; ch < 3; ++ch) {
        g[ch].assign(256, 0.0);
        seen[ch].assign(256, false);
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string channel, code_s, value_s;
        if (!std::getline(row, channel, ',') || !std::getline(row, code_s, ',') ||
            !std::getline(row, value_s))
            throw InvalidCurve("malformed CSV row: " + line);
        if (channel == "channel") continue;  // header
        int ch;
        if (channel == "r") ch = 0;
        else if (channel == "g") ch = 1;
        else if (channel == "b") ch = 2;
        else throw InvalidCurve("channel must be r, g or b: " + line);
        int code = std::stoi(code_s);
        if (code < 0 || code > 255) throw InvalidCurve("code out of range: " + line);
        g[ch][code] = std::stod(value_s);
        seen[ch][code] = true;
    }
    for (int ch = 0; ch < 3; ++ch)
        for (int code = 0; code < 256; ++code)
            if (!seen[ch][code])
                throw InvalidCurve("missing code " + std::to_string(code) + " for channel " +
                                   std::to_string(ch));
    return ResponseCurve(std::move(g));
}

void ResponseCurve::save_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write curve CSV: " + path.string());
    out << "channel,code,log_exposure\n";
    const char* names = "rgb";
    out.precision(17);
    for (int ch = 0; ch < 3; ++ch)
        for (int code = 0; code < 256; ++code)
            out << names[ch] << ',' << code << ',' << g_[ch][code] << '\n';
}

int ResponseCurve::inverse_lookup(int channel, double log_exposure) const {
    const std::vector<double>& g = g_[channel];
    if (std::isnan(log_exposure)) return 0;
    auto it = std::lower_bound(g.begin(), g.end(), log_exposure);
    if (it == g.begin()) return 0;
    if (it == g.end()) return 255;
    int hi = static_cast<int>(it - g.begin());
    int lo = hi - 1;
    // lowest matching code on ties
    return (log_exposure - g[lo] <= g[hi] - log_exposure) ? lo : hi;
}

LinearImage linearize(const io::CodedImage& img, const ResponseCurve& curve, double shutter) {
    if (!(shutter > 0)) throw InvalidShutter("shutter must be positive");
    // Precompute per-code irradiance; reciprocity holds exactly by dividing.
    std::array<std::array<double, 256>, 3> lut;
    for (int ch = 0; ch < 3; ++ch)
        for (int code = 0; code < 256; ++code)
            lut[ch][code] = std::exp(curve.g(ch, code)) / shutter;
    LinearImage out(img.height, img.width);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = lut[ch][img.at(r, c, ch)];
    return out;
}

io::CodedImage delinearize(const LinearImage& img, const ResponseCurve& curve, double shutter) {
    if (!(shutter > 0)) throw InvalidShutter("shutter must be positive");
    double ln_shutter = std::log(shutter);
    io::CodedImage out;
    out.height = img.height();
    out.width = img.width();
    out.data.resize(static_cast<size_t>(img.height()) * img.width() * 3);
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
            for (int ch = 0; ch < 3; ++ch) {
                double z = std::log(img.at(r, c, ch)) + ln_shutter;  // -inf for E <= 0
                out.at(r, c, ch) = static_cast<std::uint8_t>(curve.inverse_lookup(ch, z));
            }
    return out;
}

}  // namespace haze
