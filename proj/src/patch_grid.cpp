#include "hazemeter/patch_grid.hpp"

#include <string>

namespace haze {

PatchGrid make_patch_grid(int h, int w, int ps) { return make_patch_grid(h, w, ps, ps); }

PatchGrid make_patch_grid(int h, int w, int patch_h, int patch_w) {
    if (h < 1 || w < 1 || patch_h < 1 || patch_w < 1)
        throw NonDivisiblePatch("dimensions must be positive");
    if (h % patch_h != 0 || w % patch_w != 0)
        throw NonDivisiblePatch("patch " + std::to_string(patch_h) + "x" +
                                std::to_string(patch_w) + " does not divide " +
                                std::to_string(h) + "x" + std::to_string(w));
    PatchGrid grid;
    grid.patch_height = patch_h;
    grid.patch_width = patch_w;
    grid.rows = h / patch_h;
    grid.cols = w / patch_w;
    grid.coordinates.reserve(static_cast<size_t>(grid.rows) * grid.cols);
    for (int i = 1; i <= grid.rows; ++i) {
        for (int j = 1; j <= grid.cols; ++j) {
            Rect r;
            r.start_row = patch_h * (i - 1) + 1;
            r.end_row = patch_h * i;
            r.start_col = patch_w * (j - 1) + 1;
            r.end_col = patch_w * j;
            grid.coordinates.push_back(r);
        }
    }
    return grid;
}

Rgb patch_mean(const LinearImage& img, const Rect& rect) {
    if (!rect.inside(img.height(), img.width()))
        throw OutOfBounds("rectangle outside image bounds");
    Rgb sum{0, 0, 0};
    for (int r = rect.row_begin(); r < rect.row_end(); ++r)
        for (int c = rect.col_begin(); c < rect.col_end(); ++c)
            for (int ch = 0; ch < 3; ++ch) sum[ch] += img.at(r, c, ch);
    double n = static_cast<double>(rect.area());
    return {sum[0] / n, sum[1] / n, sum[2] / n};
}

double patch_mean(const ScalarMap& map, const Rect& rect) {
    if (!rect.inside(map.rows, map.cols)) throw OutOfBounds("rectangle outside map bounds");
    double sum = 0;
    for (int r = rect.row_begin(); r < rect.row_end(); ++r)
        for (int c = rect.col_begin(); c < rect.col_end(); ++c) sum += map.at(r, c);
    return sum / static_cast<double>(rect.area());
}

std::vector<double> reduce_to_grid(const ScalarMap& map, const PatchGrid& grid) {
    if (map.rows != grid.image_height() || map.cols != grid.image_width())
        throw ShapeMismatch("map does not match grid dimensions");
    std::vector<double> out;
    out.reserve(grid.coordinates.size());
    for (const Rect& r : grid.coordinates) out.push_back(patch_mean(map, r));
    return out;
}

ScalarMap expand_from_grid(const std::vector<double>& values, const PatchGrid& grid) {
    if (values.size() != grid.coordinates.size())
        throw LengthMismatch("one value per grid patch required");
    ScalarMap out(grid.image_height(), grid.image_width());
    for (size_t p = 0; p < values.size(); ++p) {
        const Rect& rect = grid.coordinates[p];
        for (int r = rect.row_begin(); r < rect.row_end(); ++r)
            for (int c = rect.col_begin(); c < rect.col_end(); ++c) out.at(r, c) = values[p];
    }
    return out;
}

}  // namespace haze
