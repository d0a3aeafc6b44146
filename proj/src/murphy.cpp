#include "quakescore/murphy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "quakescore/errors.hpp"
#include "quakescore/kahan.hpp"

namespace quakescore {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double MurphyCurve::eval(double theta) const {
    if (!(theta > 0.0)) throw ValidationError("murphy curve: theta must be positive");
    if (knots.empty() || theta > knots.back()) return 0.0;
    auto it = std::lower_bound(knots.begin(), knots.end(), theta);
    std::size_t idx = static_cast<std::size_t>(it - knots.begin());
    if (it != knots.end() && *it == theta) return knot_values[idx];
    return (seg_slope[idx] * theta + seg_intercept[idx]) / days;
}

double MurphyCurve::left_limit(std::size_t knot_index) const {
    return (seg_slope[knot_index] * knots[knot_index] + seg_intercept[knot_index]) / days;
}

double MurphyCurve::right_limit(std::size_t knot_index) const {
    if (knot_index + 1 >= knots.size()) return 0.0;
    return (seg_slope[knot_index + 1] * knots[knot_index] + seg_intercept[knot_index + 1]) / days;
}

MurphyCurve murphy_curve(const ForecastPanel& forecast, const ObservationPanel& obs) {
    if (forecast.cells() != obs.cells() || forecast.days() != obs.days())
        throw ValidationError("panel dimensions do not agree");
    const auto& xs = forecast.values();
    const auto& ys = obs.counts();
    const std::size_t n = xs.size();

    MurphyCurve curve;
    curve.model_id = forecast.model_id();
    curve.days = static_cast<double>(forecast.days());

    // Knot set: distinct positive forecast values union distinct
    // positive counts.
    std::vector<double> knots;
    knots.reserve(n / 4 + 8);
    for (double x : xs)
        if (x > 0.0) knots.push_back(x);
    std::set<double> count_values;
    for (double y : ys)
        if (y > 0.0) count_values.insert(y);
    knots.insert(knots.end(), count_values.begin(), count_values.end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    const std::size_t m = knots.size();
    curve.knots = knots;
    curve.knot_values.assign(m, 0.0);
    curve.seg_slope.assign(m, 0.0);
    curve.seg_intercept.assign(m, 0.0);
    if (m == 0) return curve; // all-zero data, identically zero curve

    // Boundary index of a value: 0 for the origin, knot index + 1
    // otherwise. Segment i spans (boundary i, boundary i+1).
    auto boundary = [&](double v) -> std::size_t {
        if (v == 0.0) return 0;
        auto it = std::lower_bound(knots.begin(), knots.end(), v);
        return static_cast<std::size_t>(it - knots.begin()) + 1;
    };

    // Each pair (x, y) with x != y adds an affine piece on the open
    // interval between them: slope -1, intercept +y when x < y
    // (penalty y - θ), slope +1, intercept -y when x > y (penalty
    // θ - y). Slopes are integer counts and intercepts sums of integer
    // counts, so the difference-array accumulation below is exact.
    std::vector<double> d_slope(m + 1, 0.0), d_intercept(m + 1, 0.0);
    // Pairs with y < x leave a jump at θ = x: the affine piece tends
    // to x - y but the score at the threshold itself is zero.
    std::vector<double> jump_count(m, 0.0), jump_sum_y(m, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        double x = xs[i], y = ys[i];
        if (x == y) continue;
        double lo = std::min(x, y), hi = std::max(x, y);
        std::size_t ju = boundary(lo), jv = boundary(hi);
        double a = x < y ? -1.0 : 1.0;
        double b = x < y ? y : -y;
        d_slope[ju] += a;
        d_slope[jv] -= a;
        d_intercept[ju] += b;
        d_intercept[jv] -= b;
        if (y < x) {
            std::size_t k = jv - 1; // x is always a knot here
            jump_count[k] += 1.0;
            jump_sum_y[k] += y;
        }
    }

    double run_a = 0.0, run_b = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        run_a += d_slope[i];
        run_b += d_intercept[i];
        curve.seg_slope[i] = run_a;
        curve.seg_intercept[i] = run_b;
        // Value exactly at the right-end knot: left limit minus the
        // contributions of pairs whose forecast equals this knot.
        double k = knots[i];
        curve.knot_values[i] =
            (run_a * k + run_b - (jump_count[i] * k - jump_sum_y[i])) / curve.days;
    }
    return curve;
}

double log_murphy_integral(const MurphyCurve& curve) {
    if (curve.knots.empty()) return 0.0;
    KahanSum total;
    for (std::size_t i = 0; i < curve.knots.size(); ++i) {
        double lo = i == 0 ? 0.0 : curve.knots[i - 1];
        double hi = curve.knots[i];
        double a = curve.seg_slope[i];
        double b = curve.seg_intercept[i];
        if (lo == 0.0) {
            // A nonzero intercept at the origin comes from zero
            // forecasts paired with events; the weight θ^{-1} then
            // makes the integral diverge, matching the +inf Poisson
            // score of those pairs.
            if (b != 0.0) return kInf;
            total.add(a * hi);
            continue;
        }
        total.add(a * (hi - lo));
        if (b != 0.0) total.add(b * std::log(hi / lo));
    }
    return total.value() / curve.days;
}

double poisson_offset(const ObservationPanel& obs) {
    KahanSum sum;
    for (double y : obs.counts())
        if (y > 0.0) sum.add(y * std::log(y) - y);
    return sum.value() / static_cast<double>(obs.days());
}

MurphyDominance murphy_dominance(const std::vector<MurphyCurve>& curves) {
    if (curves.empty()) throw ValidationError("murphy dominance: no curves");
    std::set<double> union_knots;
    for (const auto& c : curves) union_knots.insert(c.knots.begin(), c.knots.end());

    MurphyDominance out;
    out.thetas.assign(union_knots.begin(), union_knots.end());
    auto argmin = [&](double theta) -> int {
        int best = 0;
        double best_v = curves[0].eval(theta);
        bool tie = false;
        for (std::size_t j = 1; j < curves.size(); ++j) {
            double v = curves[j].eval(theta);
            if (v < best_v) {
                best_v = v;
                best = static_cast<int>(j);
                tie = false;
            } else if (v == best_v) {
                tie = true;
            }
        }
        return tie ? -1 : best;
    };
    out.best_at_knot.reserve(out.thetas.size());
    out.best_in_segment.reserve(out.thetas.size());
    double prev = 0.0;
    for (double theta : out.thetas) {
        out.best_at_knot.push_back(argmin(theta));
        out.best_in_segment.push_back(argmin(0.5 * (prev + theta)));
        prev = theta;
    }
    return out;
}

} // namespace quakescore
