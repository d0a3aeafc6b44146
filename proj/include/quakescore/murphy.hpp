#pragma once

#include <string>
#include <vector>

#include "quakescore/model.hpp"

namespace quakescore {

// Exact Murphy curve: the average elementary score S̄_θ as a function
// of the decision threshold θ.
//
// Knots are the distinct positive forecast values and distinct
// positive observed counts. Between adjacent knots the curve is
// affine in θ, so it is represented exactly by per-segment
// coefficients: segment i spans (knots[i-1], knots[i]) with knots[-1]
// read as 0, and carries sum-level slope/intercept (divide by T for
// the curve). Above the last knot the curve is identically zero.
//
// S_θ(x,y) viewed as a function of θ jumps at θ = x whenever x and y
// lie on different sides (the score is zero at the threshold itself),
// so knot values are stored separately from the segment coefficients;
// the one-sided limits at a knot come from the adjacent segments.
struct MurphyCurve {
    std::string model_id;
    double days = 0.0;                 // T
    std::vector<double> knots;         // strictly increasing, positive
    std::vector<double> knot_values;   // S̄_θ exactly at each knot
    std::vector<double> seg_slope;     // per segment, sum over pairs
    std::vector<double> seg_intercept; // per segment, sum over pairs

    // Exact evaluation at any θ > 0.
    double eval(double theta) const;
    // One-sided limits of the affine pieces at segment ends.
    double left_limit(std::size_t knot_index) const;
    double right_limit(std::size_t knot_index) const;
};

MurphyCurve murphy_curve(const ForecastPanel& forecast, const ObservationPanel& obs);

// Integral of the curve against d(log θ) = θ^{-1} dθ, computed in
// closed form per affine segment. Equals the average of
// x - y ln x + y ln y - y over all forecast cases (the h == 0 Bregman
// convention of the Poisson score); +inf when a zero forecast meets a
// positive count. The reported-average-Poisson-score convention
// x - y ln x differs by the data-only constant poisson_offset(obs).
double log_murphy_integral(const MurphyCurve& curve);

// (1/T) sum_{c,t} (y ln y - y), with 0 ln 0 = 0. Subtract from the
// log-Murphy integral to obtain the average Poisson score.
double poisson_offset(const ObservationPanel& obs);

// Best model per threshold across a set of curves, evaluated on the
// union of all knots (and on the open segments in between, at their
// midpoints, for the dominance bar). -1 marks a tie.
struct MurphyDominance {
    std::vector<double> thetas;    // union knots, ascending
    std::vector<int> best_at_knot; // same length as thetas
    std::vector<int> best_in_segment; // segment i = (thetas[i-1] or 0, thetas[i])
};

MurphyDominance murphy_dominance(const std::vector<MurphyCurve>& curves);

} // namespace quakescore
