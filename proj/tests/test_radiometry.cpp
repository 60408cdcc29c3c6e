#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "hazemeter/radiometry.hpp"
#include "hazemeter/rng.hpp"

using namespace haze;

namespace {

io::CodedImage single_code(std::uint8_t code) {
    io::CodedImage img;
    img.height = 1;
    img.width = 1;
    img.data = {code, code, code};
    return img;
}

// An arbitrary strictly monotone curve for round-trip checks.
ResponseCurve bumpy_curve() {
    std::array<std::vector<double>, 3> g;
    for (int ch = 0; ch < 3; ++ch) {
        g[ch].resize(256);
        for (int z = 0; z < 256; ++z)
            g[ch][z] = -6.0 + 0.03 * z + 0.4 * std::sin(z * 0.01 + ch) * 0.03;
        for (int z = 1; z < 256; ++z) g[ch][z] = std::max(g[ch][z], g[ch][z - 1]);
    }
    return ResponseCurve(std::move(g));
}

}  // namespace

TEST_CASE("identity-log curve: code 255 at shutter 1 is unit irradiance") {
    ResponseCurve curve = ResponseCurve::identity_log();
    LinearImage out = linearize(single_code(255), curve, 1.0);
    CHECK(out.at(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reciprocity: halving the shutter doubles the irradiance exactly") {
    ResponseCurve curve = ResponseCurve::identity_log();
    LinearImage at_1 = linearize(single_code(255), curve, 1.0);
    LinearImage at_half = linearize(single_code(255), curve, 0.5);
    CHECK(at_half.at(0, 0, 0) == 2.0 * at_1.at(0, 0, 0));

    // exact property over all codes and an awkward shutter
    io::CodedImage all_codes;
    all_codes.height = 1;
    all_codes.width = 256;
    all_codes.data.resize(256 * 3);
    for (int c = 0; c < 256; ++c)
        for (int ch = 0; ch < 3; ++ch) all_codes.data[c * 3 + ch] = static_cast<std::uint8_t>(c);
    double s = 1.0 / 3.0;
    LinearImage ref = linearize(all_codes, bumpy_curve(), 1.0);
    LinearImage scaled = linearize(all_codes, bumpy_curve(), s);
    for (int c = 0; c < 256; ++c)
        CHECK(scaled.at(0, c, 0) == ref.at(0, c, 0) / s);
}

TEST_CASE("linearize preserves code monotonicity") {
    ResponseCurve curve = bumpy_curve();
    io::CodedImage codes;
    codes.height = 1;
    codes.width = 256;
    codes.data.resize(256 * 3);
    for (int c = 0; c < 256; ++c)
        for (int ch = 0; ch < 3; ++ch) codes.data[c * 3 + ch] = static_cast<std::uint8_t>(c);
    LinearImage out = linearize(codes, curve, 0.7);
    for (int c = 1; c < 256; ++c)
        for (int ch = 0; ch < 3; ++ch) CHECK(out.at(0, c, ch) >= out.at(0, c - 1, ch));
}

TEST_CASE("invalid shutter is rejected") {
    ResponseCurve curve = ResponseCurve::identity_log();
    CHECK_THROWS_AS(linearize(single_code(10), curve, 0.0), InvalidShutter);
    CHECK_THROWS_AS(delinearize(LinearImage(1, 1), curve, -1.0), InvalidShutter);
}

TEST_CASE("delinearize boundary: zero irradiance clamps to code 0") {
    ResponseCurve curve = ResponseCurve::identity_log();
    LinearImage img(1, 1);  // zeros
    io::CodedImage out = delinearize(img, curve, 1.0);
    CHECK(out.at(0, 0, 0) == 0);
    LinearImage unit(1, 1, {1, 1, 1});
    CHECK(delinearize(unit, curve, 1.0).at(0, 0, 0) == 255);
}

TEST_CASE("round-trip over all 256 codes is within one code level") {
    for (const ResponseCurve& curve :
         {ResponseCurve::identity_log(), ResponseCurve::gamma22(), bumpy_curve()}) {
        for (double shutter : {1.0, 1.0 / 400.0}) {
            io::CodedImage codes;
            codes.height = 1;
            codes.width = 256;
            codes.data.resize(256 * 3);
            for (int c = 0; c < 256; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    codes.data[c * 3 + ch] = static_cast<std::uint8_t>(c);
            io::CodedImage back = delinearize(linearize(codes, curve, shutter), curve, shutter);
            for (int c = 0; c < 256; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    CHECK(std::abs(static_cast<int>(back.at(0, c, ch)) - c) <= 1);
        }
    }
}

TEST_CASE("random irradiances in curve range round-trip within one code") {
    // exhaustive scan of curve gaps: any exposure between g[k] and g[k+1]
    // must land on k or k+1
    ResponseCurve curve = bumpy_curve();
    for (int k = 0; k < 255; ++k) {
        double z = 0.5 * (curve.g(0, k) + curve.g(0, k + 1));
        int code = curve.inverse_lookup(0, z);
        CHECK(code >= k);
        CHECK(code <= k + 1);
    }
}

TEST_CASE("inverse lookup takes the lowest matching code on plateaus") {
    std::array<std::vector<double>, 3> g;
    for (int ch = 0; ch < 3; ++ch) {
        g[ch].resize(256);
        for (int z = 0; z < 256; ++z) g[ch][z] = z < 100 ? -5.0 : -5.0 + 0.02 * (z - 100);
    }
    ResponseCurve curve(std::move(g));
    CHECK(curve.inverse_lookup(0, -5.0) == 0);  // plateau of 100 equal entries
}

TEST_CASE("curve csv round-trip") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "hazemeter_radiometry_test";
    fs::create_directories(dir);
    ResponseCurve curve = bumpy_curve();
    curve.save_csv(dir / "curve.csv");
    ResponseCurve back = ResponseCurve::load_csv(dir / "curve.csv");
    for (int ch = 0; ch < 3; ++ch)
        for (int code = 0; code < 256; ++code) CHECK(back.g(ch, code) == curve.g(ch, code));
}

TEST_CASE("malformed curves are rejected") {
    std::array<std::vector<double>, 3> g;
    for (int ch = 0; ch < 3; ++ch) g[ch].assign(256, 0.0);
    g[1][10] = -1.0;  // decreasing
    CHECK_THROWS_AS(ResponseCurve(std::move(g)), InvalidCurve);
    std::array<std::vector<double>, 3> short_g;
    for (int ch = 0; ch < 3; ++ch) short_g[ch].assign(255, 0.0);
    CHECK_THROWS_AS(ResponseCurve(std::move(short_g)), InvalidCurve);
}
