#include "quakescore/scoring.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "quakescore/errors.hpp"
#include "quakescore/kahan.hpp"

namespace quakescore {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double poisson_score(double x, double y) {
    if (x == 0.0) return y == 0.0 ? 0.0 : kInf;
    return x - y * std::log(x);
}

double quadratic_score(double x, double y) {
    double d = x - y;
    return d * d;
}

double elementary_score(double theta, double x, double y) {
    if (!(theta > 0.0)) throw ValidationError("elementary score: theta must be positive");
    if ((x <= theta && y <= theta) || (x >= theta && y >= theta)) return 0.0;
    return std::fabs(y - theta);
}

double extended_patton_score(double b, double x, double y) {
    if (!(b > 0.0))
        throw ValidationError("patton score: b must be positive (no consistent extension for b <= 0)");
    if (x == 0.0) {
        if (b <= 1.0) return y == 0.0 ? 0.0 : kInf;
        // b > 1: x^b and x^{b-1} both vanish, so only the y-terms remain.
        if (y == 0.0) return (3.0 - b) / 2.0 - 1.0 / b;
        return y / (b - 1.0) + 0.5 * std::pow(y, b) - 0.5 * b * y - 1.0 / b + (3.0 - b) / 2.0;
    }
    if (b == 1.0) {
        // S_1(x,y) - S_1(1,y) + y/2 - y/2 + 1, with 0 ln 0 read as 0.
        double s_xy = (y == 0.0 ? 0.0 : y * std::log(y / x)) - (y - x);
        double s_1y = (y == 0.0 ? 0.0 : y * std::log(y)) - (y - 1.0);
        return s_xy - s_1y + 1.0;
    }
    double xb = std::pow(x, b);
    double x_term = xb / b - 1.0 / b + (3.0 - b) / 2.0;
    if (y == 0.0) return x_term;
    return x_term - std::pow(x, b - 1.0) * y / (b - 1.0) + y / (b - 1.0)
         + 0.5 * std::pow(y, b) - 0.5 * b * y;
}

double log_score(const CountDistribution& dist, long long y) {
    if (y < 0) throw ValidationError("log score: observed count must be nonnegative");
    const auto& p = dist.pmf();
    if (static_cast<std::size_t>(y) >= p.size()) return kInf;
    double py = p[static_cast<std::size_t>(y)];
    if (py <= 0.0) return kInf;
    return -std::log(py);
}

double ranked_probability_score(const CountDistribution& dist, long long y) {
    if (y < 0) throw ValidationError("ranked probability score: observed count must be nonnegative");
    const auto& p = dist.pmf();
    KahanSum cdf;
    KahanSum total;
    // sum_k (P_k - 1{k >= y})^2; P_k = 1 beyond the support, so terms
    // with k >= max(y, m) vanish and the tail below y contributes
    // (y - m) unit terms when the observation overshoots the support.
    for (std::size_t k = 0; k < p.size(); ++k) {
        cdf.add(p[k]);
        double pk = std::min(cdf.value(), 1.0);
        double d = pk - (static_cast<long long>(k) >= y ? 1.0 : 0.0);
        total.add(d * d);
    }
    // Overshooting observation: P_k = 1 but 1{k >= y} = 0 for k in
    // (m, y), one unit term each.
    for (long long k = static_cast<long long>(p.size()); k < y; ++k) total.add(1.0);
    return total.value();
}

double ScoringFunction::operator()(double x, double y) const {
    switch (kind) {
        case ScoreKind::poisson: return poisson_score(x, y);
        case ScoreKind::quadratic: return quadratic_score(x, y);
        case ScoreKind::elementary: return elementary_score(param, x, y);
        case ScoreKind::patton: return extended_patton_score(param, x, y);
    }
    throw ValidationError("unknown scoring function");
}

std::string ScoringFunction::name() const {
    switch (kind) {
        case ScoreKind::poisson: return "poisson";
        case ScoreKind::quadratic: return "quadratic";
        case ScoreKind::elementary: return "elementary:" + std::to_string(param);
        case ScoreKind::patton: return "patton:" + std::to_string(param);
    }
    return "?";
}

ScoringFunction ScoringFunction::elementary(double theta) {
    if (!(theta > 0.0)) throw ValidationError("elementary score: theta must be positive");
    return {ScoreKind::elementary, theta};
}

ScoringFunction ScoringFunction::patton(double b) {
    if (!(b > 0.0))
        throw ValidationError("patton score: b must be positive (no consistent extension for b <= 0)");
    return {ScoreKind::patton, b};
}

ScoringFunction ScoringFunction::parse(std::string_view text) {
    if (text == "poisson") return poisson();
    if (text == "quadratic") return quadratic();
    auto parse_param = [&](std::string_view rest) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
        if (ec != std::errc{} || ptr != rest.data() + rest.size())
            throw ValidationError("bad scoring function parameter in '" + std::string(text) + "'");
        return v;
    };
    if (text.starts_with("patton:")) return patton(parse_param(text.substr(7)));
    if (text.starts_with("elementary:")) return elementary(parse_param(text.substr(11)));
    throw ValidationError("unknown scoring function '" + std::string(text) +
                          "' (expected poisson, quadratic, patton:B, or elementary:THETA)");
}

} // namespace quakescore
