#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "hazemeter/image.hpp"
#include "hazemeter/image_io.hpp"

namespace haze {

// Per-channel camera response: g maps a pixel code (0..255) to log exposure.
// Each channel is monotone non-decreasing with exactly 256 entries; the curve
// is shutter-independent.
class ResponseCurve {
public:
    // Validates monotonicity and size; throws InvalidCurve.
    explicit ResponseCurve(std::array<std::vector<double>, 3> g);

    // g(z) = ln(max(z, 0.5) / 255): codes are proportional to irradiance.
    static ResponseCurve identity_log();
    // g(z) = 2.2 * ln(max(z, 0.5) / 255): the common display nonlinearity.
    static ResponseCurve gamma22();

    // CSV rows `channel,code,log_exposure`, channels {r,g,b}, codes 0..255
    // complete in any order.
    static ResponseCurve load_csv(const std::filesystem::path& path);
    void save_csv(const std::filesystem::path& path) const;

    double g(int channel, int code) const { return g_[channel][code]; }

    // Nearest monotone index for a log-exposure value; ties and plateaus
    // resolve to the lowest matching code. -inf maps to code 0.
    int inverse_lookup(int channel, double log_exposure) const;

private:
    std::array<std::vector<double>, 3> g_;
};

// E = exp(g(code)) / shutter (reciprocity: halving the shutter doubles the
// irradiance, exactly). Throws InvalidShutter if shutter <= 0.
LinearImage linearize(const io::CodedImage& img, const ResponseCurve& curve, double shutter);

// Inverse: codes via nearest monotone lookup of ln(E) + ln(shutter),
// clamped to [0,255].
io::CodedImage delinearize(const LinearImage& img, const ResponseCurve& curve, double shutter);

}  // namespace haze
