#pragma once

#include <vector>

namespace haze {

struct WelchResult {
    double t = 0;
    double dof = 0;
    double p_two_tail = 1;
};

// Two-sample t-test assuming unequal variances (Welch statistic,
// Welch-Satterthwaite degrees of freedom, two-tailed p via the Student-t
// CDF). Throws DegenerateSample when a sample has fewer than two values.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// CDF of Student's t distribution with (possibly fractional) dof.
double student_t_cdf(double t, double dof);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

}  // namespace haze
