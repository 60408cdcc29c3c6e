#include "hazemeter/phase.hpp"

#include <cmath>

#include "hazemeter/errors.hpp"

namespace haze {

double rayleigh_phase(double theta) {
    double c = std::cos(theta);
    return 0.75 * (1.0 + c * c);
}

double rayleigh_dop(double theta) {
    double s = std::sin(theta);
    double c = std::cos(theta);
    return (s * s) / (1.0 + c * c);
}

double henyey_greenstein(double theta, double g) {
    if (!(std::abs(g) < 1.0)) throw InvalidAsymmetry("asymmetry must satisfy |g| < 1");
    double denom = 1.0 + g * g - 2.0 * g * std::cos(theta);
    return (1.0 - g * g) / (denom * std::sqrt(denom));
}

}  // namespace haze
