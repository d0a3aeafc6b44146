#pragma once

#include <span>
#include <vector>

#include "quakescore/model.hpp"
#include "quakescore/scoring.hpp"

namespace quakescore {

// Spatially aggregated daily scores: values[t] = sum_c S(x_{c,t}, y_{c,t}).
// Summation, not averaging, so daily values stay comparable across
// grids of different resolution.
struct DailyScoreSeries {
    std::string model_id;
    std::vector<double> values;
};

DailyScoreSeries daily_scores(const ForecastPanel& forecast, const ObservationPanel& obs,
                              const ScoringFunction& s);

// Mean over days of the daily series.
double total_score(const DailyScoreSeries& series);

// Average score of the spatially aggregated expected counts:
// (1/T) sum_t S(sum_c x_{c,t}, sum_c y_{c,t}).
double number_score(const ForecastPanel& forecast, const ObservationPanel& obs,
                    const ScoringFunction& s);

// Per-cell mean scores (length C), the building block of spatial maps.
std::vector<double> per_cell_mean_scores(const ForecastPanel& forecast,
                                         const ObservationPanel& obs, const ScoringFunction& s);

struct ScoreSummary {
    double total_score;
    double number_score;
    std::vector<double> per_cell_mean;
};

ScoreSummary score_summary(const ForecastPanel& forecast, const ObservationPanel& obs,
                           const ScoringFunction& s);

// d_t = series_a[t] - series_b[t]; rejects non-finite entries, a score
// of +inf makes differences meaningless.
std::vector<double> daily_difference(const DailyScoreSeries& a, const DailyScoreSeries& b);

// Running sums of the daily differences and of the observed events.
// normalized[t] = D_t / N_t is NaN while N_t = 0 (undefined, not zero);
// serializers emit such entries as empty fields.
struct CumulativeDifference {
    std::vector<double> cumulative;   // D_t
    std::vector<double> event_counts; // N_t
    std::vector<double> normalized;   // D_t / N_t, NaN while N_t = 0
};

CumulativeDifference cumulative_difference(std::span<const double> d, const ObservationPanel& obs);

// Per-cell average score difference Delta_c between two models. Cells
// where either side produced a non-finite score are flagged undefined
// (delta NaN, defined = 0) rather than erroring.
struct SpatialDifferenceMap {
    std::vector<double> delta;
    std::vector<char> defined;
};

SpatialDifferenceMap spatial_difference_map(const ForecastPanel& fa, const ForecastPanel& fb,
                                            const ObservationPanel& obs, const ScoringFunction& s);

} // namespace quakescore
