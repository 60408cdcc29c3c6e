#pragma once

#include <vector>

#include "hazemeter/image.hpp"

namespace haze {

// A partition of an image into equal rectangles, enumerated row-major
// (rows outer, columns inner). Rectangles tile the image exactly.
struct PatchGrid {
    int patch_height = 0;
    int patch_width = 0;
    int rows = 0;
    int cols = 0;
    std::vector<Rect> coordinates;

    int patch_count() const { return rows * cols; }
    int image_height() const { return rows * patch_height; }
    int image_width() const { return cols * patch_width; }
};

// Square patches; throws NonDivisiblePatch when ps does not divide h or w.
PatchGrid make_patch_grid(int h, int w, int ps);

// Rectangular variant.
PatchGrid make_patch_grid(int h, int w, int patch_h, int patch_w);

// Arithmetic per-channel mean over a rectangle; throws OutOfBounds.
Rgb patch_mean(const LinearImage& img, const Rect& rect);

// Mean over a rectangle of a single-channel map.
double patch_mean(const ScalarMap& map, const Rect& rect);

// Patch-average a per-pixel map onto a grid (one value per patch,
// grid row-major order).
std::vector<double> reduce_to_grid(const ScalarMap& map, const PatchGrid& grid);

// Expand per-patch values back to a per-pixel map.
ScalarMap expand_from_grid(const std::vector<double>& values, const PatchGrid& grid);

}  // namespace haze
