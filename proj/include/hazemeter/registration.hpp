#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "hazemeter/image.hpp"

namespace haze {

// Point in image coordinates: x = column, y = row, sub-pixel.
struct Point2 {
    double x = 0;
    double y = 0;
};

// Control-point pairs: a feature's position in the moving image and in the
// base (reference) image.
struct ControlPoints {
    std::vector<std::pair<Point2, Point2>> pairs;  // (moving, base)
};

// 2x3 affine map applied to (x, y). The convention throughout is
// base -> moving: warping the moving image with this transform resamples it
// into the base frame.
struct AffineTransform {
    // [ m00 m01 tx ]
    // [ m10 m11 ty ]
    std::array<double, 6> m{1, 0, 0, 0, 1, 0};

    Point2 apply(const Point2& p) const {
        return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
    }
    static AffineTransform identity() { return {}; }
    static AffineTransform translation(double tx, double ty) {
        return {{1, 0, tx, 0, 1, ty}};
    }
};

// result(p) = a(b(p)): warping by b then a equals warping by compose(a, b).
AffineTransform compose(const AffineTransform& a, const AffineTransform& b);
AffineTransform inverse(const AffineTransform& t);

// Least-squares affine mapping base points to moving points; exact for three
// pairs. Throws DegenerateConfiguration when the base points are collinear.
AffineTransform estimate_affine(const ControlPoints& cp);

// Inverse-mapped bilinear resampling: out(p) = img(t(p)). Out-of-bounds
// samples are zero. Total (never throws).
LinearImage warp(const LinearImage& img, const AffineTransform& t);

// Control-point JSON: {"pairs": [{"moving":[x,y],"base":[x,y]}, ...]}.
ControlPoints load_control_points(const std::filesystem::path& path);

}  // namespace haze
