#pragma once

#include <string>
#include <string_view>

#include "quakescore/model.hpp"

namespace quakescore {

// Poisson scoring function: x - y ln x for x > 0, with S(0,0) = 0 and
// S(0, y>=1) = +inf. Strictly consistent for the mean of a count.
double poisson_score(double x, double y);

// Quadratic scoring function (x - y)^2.
double quadratic_score(double x, double y);

// Elementary scoring function with decision threshold theta > 0: zero
// when forecast and outcome lie on the same side of theta, |y - theta|
// otherwise. Consistent (not strictly) for the mean.
double elementary_score(double theta, double x, double y);

// Extended Patton family for count data, index b > 0. Nests the
// Poisson score at b = 1 and half the quadratic score at b = 2.
// b > 1 extends to x = 0 by continuity; 0 < b <= 1 sets S(0,0) = 0 and
// S(0, y>=1) = +inf. b <= 0 has no consistent extension and is
// rejected.
double extended_patton_score(double b, double x, double y);

// Logarithmic score -ln p_y for a full count distribution; +inf when
// the observed count carries no mass.
double log_score(const CountDistribution& dist, long long y);

// Ranked probability score sum_k (P_k - 1{k >= y})^2; the sum
// truncates at the top of the support where P_k = 1.
double ranked_probability_score(const CountDistribution& dist, long long y);

enum class ScoreKind { poisson, quadratic, elementary, patton };

// A selected pointwise scoring function. `param` is theta for
// elementary, b for patton, unused otherwise.
struct ScoringFunction {
    ScoreKind kind = ScoreKind::poisson;
    double param = 0.0;

    double operator()(double x, double y) const;
    // True for scores that are strictly consistent for the mean
    // (poisson, quadratic, patton) and therefore usable in the CORP
    // decomposition.
    bool strictly_consistent() const { return kind != ScoreKind::elementary; }
    std::string name() const;

    static ScoringFunction poisson() { return {ScoreKind::poisson, 0.0}; }
    static ScoringFunction quadratic() { return {ScoreKind::quadratic, 0.0}; }
    static ScoringFunction elementary(double theta);
    static ScoringFunction patton(double b);
    // Accepts "poisson", "quadratic", "patton:B", "elementary:THETA".
    static ScoringFunction parse(std::string_view text);
};

} // namespace quakescore
