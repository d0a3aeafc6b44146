#include "quakescore/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace quakescore {
namespace stats {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double normal_sf(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) return h;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)
                    + a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("student t: dof must be positive");
    if (t == 0.0) return 0.5;
    double x = nu / (nu + t * t);
    double tail = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_sf(double t, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("student t: dof must be positive");
    if (t == 0.0) return 0.5;
    double x = nu / (nu + t * t);
    double tail = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, x);
    return t > 0.0 ? tail : 1.0 - tail;
}

double ks_uniform_statistic(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("ks statistic: empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double cdf = std::clamp(v[i], 0.0, 1.0);
        double up = (static_cast<double>(i) + 1.0) / n - cdf;
        double down = cdf - static_cast<double>(i) / n;
        d = std::max({d, up, down});
    }
    return d;
}

double ks_uniform_pvalue(double d, std::size_t n) {
    if (n == 0) throw std::invalid_argument("ks p-value: n must be positive");
    double sn = std::sqrt(static_cast<double>(n));
    double lambda = d * (sn + 0.12 + 0.11 / sn);
    if (lambda < 1e-8) return 1.0;
    // Kolmogorov survival function 2 sum_k (-1)^{k-1} exp(-2 k^2 lambda^2)
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace stats
} // namespace quakescore
