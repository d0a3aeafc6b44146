#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "quakescore/model.hpp"
#include "quakescore/scoring.hpp"

namespace quakescore {

// Nonparametric isotonic (least-squares) regression of the outcomes on
// the forecast ordering, computed by the pool-adjacent-violators
// sweep: O(n log n) sort plus a linear stack pass.
//
// Tied forecast values are pre-pooled into one group before the sweep,
// so the fit is unique and independent of input order. Bin values are
// always recomputed from raw outcome sums, never from chained means,
// which keeps results exact for integer counts.
struct PavResult {
    struct Bin {
        std::size_t first, last; // inclusive range in sorted order
        double value;
    };
    std::vector<std::size_t> order; // sorted position -> original index
    std::vector<double> sorted_x;
    std::vector<double> fitted;     // x̂ aligned to sorted order, nondecreasing
    std::vector<Bin> bins;          // values strictly increasing across bins
};

PavResult pav_recalibrate(std::span<const double> x, std::span<const double> y);

// Mean-reliability curve: PAV-recalibrated value per distinct forecast
// value, plus (optionally) both coordinates pushed through the
// right-continuous empirical CDF of a pooled forecast sample so very
// small counts become readable.
struct ReliabilityCurve {
    std::vector<double> x;      // distinct forecast values, ascending
    std::vector<double> x_hat;  // recalibrated values, nondecreasing
    std::vector<double> x_ecdf;     // empty when no transform sample given
    std::vector<double> x_hat_ecdf; // empty when no transform sample given
};

ReliabilityCurve reliability_curve(const ForecastPanel& forecast, const ObservationPanel& obs,
                                   std::span<const double> transform_sample = {});

// Fraction of the sample <= v (right-continuous empirical CDF).
// `sorted_sample` must be ascending.
double ecdf_value(std::span<const double> sorted_sample, double v);

// CORP decomposition of the average score: S̄ = MCB - DSC + UNC, with
// MCB = S̄ - S̄_rc (recalibrated), DSC = S̄_mg - S̄_rc, UNC = S̄_mg
// (marginal-mean forecast). Requires a strictly mean-consistent score.
struct ScoreDecomposition {
    double mean_score;
    double mcb;
    double dsc;
    double unc;
};

ScoreDecomposition corp_decompose(std::span<const double> x, std::span<const double> y,
                                  const ScoringFunction& s);
ScoreDecomposition corp_decompose(const ForecastPanel& forecast, const ObservationPanel& obs,
                                  const ScoringFunction& s);

// Pointwise consistency band for the mean-reliability curve, sampled
// under the hypothesis of mean calibration. Counts are resampled from
// predictive distributions F_x obtained by tilting the zero mass of
// the empirical count distribution so that F_x has mean exactly x
// (F_0 is the point mass at zero). Percentiles use the nearest-rank
// rule. Replicates draw from counter-based streams keyed by
// (seed, replicate, case), so results are identical at any thread
// count.
struct ConsistencyBand {
    std::vector<double> abscissae; // distinct forecast values, ascending
    std::vector<double> lower;
    std::vector<double> upper;
    double level;
    int replicates;
};

ConsistencyBand consistency_band(const ForecastPanel& forecast, const ObservationPanel& obs,
                                 double level, int replicates, uint64_t seed);

} // namespace quakescore
