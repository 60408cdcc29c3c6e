#include "hazemeter/stats.hpp"

#include <cmath>

#include "hazemeter/errors.hpp"

namespace haze {

namespace {

// Continued fraction for the regularized incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double eps = 1e-15;
    double qab = a + b, qap = a + 1, qam = a - 1;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0) return 0;
    if (x >= 1) return 1;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                      b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    double x = dof / (dof + t * t);
    double p = 0.5 * incomplete_beta(dof / 2.0, 0.5, x);
    return t > 0 ? 1.0 - p : p;
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw DegenerateSample("both samples need at least two values");
    auto moments = [](const std::vector<double>& s) {
        double mean = 0;
        for (double v : s) mean += v;
        mean /= static_cast<double>(s.size());
        double var = 0;
        for (double v : s) var += (v - mean) * (v - mean);
        var /= static_cast<double>(s.size() - 1);
        return std::pair{mean, var};
    };
    auto [mean_a, var_a] = moments(a);
    auto [mean_b, var_b] = moments(b);
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    double se_a = var_a / na, se_b = var_b / nb;
    double se = se_a + se_b;

    WelchResult r;
    if (se == 0) {  // identical constant samples
        r.t = 0;
        r.dof = na + nb - 2;
        r.p_two_tail = 1;
        return r;
    }
    r.t = (mean_a - mean_b) / std::sqrt(se);
    r.dof = se * se / (se_a * se_a / (na - 1) + se_b * se_b / (nb - 1));
    r.p_two_tail = 2.0 * (1.0 - student_t_cdf(std::abs(r.t), r.dof));
    return r;
}

}  // namespace haze
