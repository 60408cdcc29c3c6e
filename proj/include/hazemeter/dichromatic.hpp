#pragma once

#include <vector>

#include "hazemeter/image.hpp"

namespace haze {

// Two registered images of the same scene under different weather.
struct DichromaticPair {
    LinearImage e1;
    LinearImage e2;
};

struct HorizonRadiances {
    double a1 = 0;  // airlight radiance at infinity, first weather
    double a2 = 0;  // second weather
};

// Unit airlight color direction from the intersection of the per-point
// dichromatic planes: accumulates N_i = E1_i x E2_i and takes the smallest
// eigenvector of sum(N N^T), sign fixed to nonnegative components. Throws
// DegenerateScene when E2 is a pure scaling of E1 (all normals vanish).
Rgb airlight_direction(const LinearImage& e1, const LinearImage& e2);

struct DtSample {
    double ratio = 1;     // direct transmission ratio p2/p1
    double t_mag = 0;     // ||tA||, the airlight magnitude offset c
    double t_signed = 0;  // t itself; negative when the airlight decreased
};

// t = ((A x e1) . (e2 x e1)) / ((A x e1) . (A x e1)); ratio = |e2 - tA|/|e1|.
// Throws DegeneratePoint when a_hat is parallel to e1.
DtSample dt_ratio_and_ta(const Rgb& e1, const Rgb& e2, const Rgb& a_hat);

// Least-squares line c = A_inf2 - ratio * A_inf1 over the samples (the slope
// is negated). Throws CollinearSamples when the ratios do not vary.
HorizonRadiances fit_horizon_radiances(const std::vector<DtSample>& samples);

struct DichromaticResult {
    LinearImage dehazed;          // E1 - q A, averaged over the anchor points
    ScalarMap dot_depth;          // (beta2-beta1) z = ln(A2/A1) - ln ratio
    ScalarMap alpha;              // estimated beta1 z / DOT z
    ScalarMap optical_thickness;  // beta1 z propagated from the anchors
    Rgb a_hat{0, 0, 0};
    HorizonRadiances horizon;
    int anchor_count = 0;
};

// Full pipeline for one pair. q~ is the distance along -A from E1 to the
// color-cube surface; points of minimal alpha anchor the real airlight
// magnitude q = |E1| and the optical thickness is propagated by depth ratio.
// cube_dim <= 0 selects 1.1x the max pixel magnitude; a cube smaller than the
// pixel magnitudes is rejected. Throws NoAnchorFound when q~/A1 >= 1
// everywhere.
DichromaticResult dichromatic_dehaze(const LinearImage& e1, const LinearImage& e2,
                                     const Rgb& a_hat, const HorizonRadiances& horizon,
                                     double cube_dim = 0.0);

}  // namespace haze
