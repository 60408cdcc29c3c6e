#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hazemeter/errors.hpp"

namespace haze {

using Rgb = std::array<double, 3>;

// Rectangle in 1-based inclusive coordinates, mirroring the patch coordinate
// convention of the reference scripts. Conversion to 0-based half-open loops
// happens through row_begin()/row_end() at the point of use.
struct Rect {
    int start_row = 1;
    int end_row = 1;
    int start_col = 1;
    int end_col = 1;

    int rows() const { return end_row - start_row + 1; }
    int cols() const { return end_col - start_col + 1; }
    long long area() const { return static_cast<long long>(rows()) * cols(); }

    int row_begin() const { return start_row - 1; }
    int row_end() const { return end_row; }  // past-the-end, 0-based
    int col_begin() const { return start_col - 1; }
    int col_end() const { return end_col; }

    bool inside(int image_height, int image_width) const {
        return start_row >= 1 && start_col >= 1 && start_row <= end_row &&
               start_col <= end_col && end_row <= image_height && end_col <= image_width;
    }
};

// H x W x 3 array of linear irradiance values. Values are not confined to
// [0,1]: the simulator adds unclamped noise and dehazing can overshoot.
// Construction rejects non-finite values; in-place edits are expected to keep
// the invariant (the simulator and solvers only write finite values).
class LinearImage {
public:
    LinearImage() = default;
    LinearImage(int height, int width);
    LinearImage(int height, int width, std::vector<double> data);

    int height() const { return height_; }
    int width() const { return width_; }
    static constexpr int channels() { return 3; }
    long long pixel_count() const { return static_cast<long long>(height_) * width_; }

    double& at(int row, int col, int ch) {
        return data_[(static_cast<size_t>(row) * width_ + col) * 3 + ch];
    }
    double at(int row, int col, int ch) const {
        return data_[(static_cast<size_t>(row) * width_ + col) * 3 + ch];
    }
    Rgb pixel(int row, int col) const {
        size_t base = (static_cast<size_t>(row) * width_ + col) * 3;
        return {data_[base], data_[base + 1], data_[base + 2]};
    }
    void set_pixel(int row, int col, const Rgb& v) {
        size_t base = (static_cast<size_t>(row) * width_ + col) * 3;
        data_[base] = v[0];
        data_[base + 1] = v[1];
        data_[base + 2] = v[2];
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const LinearImage& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    // Throws NonFiniteValue if any element is NaN or infinite.
    void validate() const;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

// Single-channel 2D map (dark channels, transmission maps, depth maps).
struct ScalarMap {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    ScalarMap() = default;
    ScalarMap(int r, int c, double fill = 0.0)
        : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

    double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
    bool same_shape(const ScalarMap& o) const { return rows == o.rows && cols == o.cols; }
};

enum class DepthScale { scaled_by_beta, unscaled };

// Per-patch or per-pixel nonnegative depth values. "scaled_by_beta" carries
// the scattering coefficient (beta*z = -ln T); "unscaled" has beta factored
// out by the constant-depth decomposition.
struct DepthMap {
    ScalarMap map;
    DepthScale kind = DepthScale::scaled_by_beta;
};

// Ordered list of co-registered images with per-time metadata. The time of
// image i is its index; shutters and airlights are optional (empty or
// per-time).
struct ImageSequence {
    std::vector<LinearImage> images;
    std::vector<double> shutters;   // seconds; empty when unknown
    std::vector<double> airlights;  // scalar airlight at infinity per time; empty when unknown

    int size() const { return static_cast<int>(images.size()); }
    void validate() const;  // shapes equal, metadata lengths consistent
};

// Sum of all pixel values across channels, one value per time ("colsum" in
// the reference scripts); used to pick the darkest/brightest image.
std::vector<double> image_sums(const ImageSequence& seq);

}  // namespace haze
