#pragma once

namespace haze {

// Scattering phase functions and polarization curves for small particles.
// Informational reference implementations (plots, sanity anchors); no
// estimator consumes them.

// (3/4)(1 + cos^2 theta); unit average over the sphere.
double rayleigh_phase(double theta);

// sin^2 / (1 + cos^2): degree of polarization of singly scattered light,
// 0 forward, 1 at 90 degrees.
double rayleigh_dop(double theta);

// (1-g^2) / (1 + g^2 - 2 g cos theta)^(3/2) for asymmetry |g| < 1;
// throws InvalidAsymmetry otherwise. g = 0 is isotropic.
double henyey_greenstein(double theta, double g);

}  // namespace haze
