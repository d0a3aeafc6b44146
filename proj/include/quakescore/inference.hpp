#pragma once

#include <string>
#include <vector>

#include "quakescore/aggregate.hpp"
#include "quakescore/model.hpp"

namespace quakescore {

enum class TestKind { dm, csep_t };

struct TestResult {
    TestKind kind;
    double statistic;         // z for dm, Theta for csep_t
    double variance_estimate; // sigma^2 (dm) or s^2 (csep_t)
    long long lag_or_dof;     // L for dm, N_T - 1 for csep_t
    double p_one_sided;       // 1 - CDF(statistic)
    std::string orientation;  // which model is j, which is k
};

// Diebold-Mariano test of equal predictive ability on spatially
// aggregated daily scores. z = sqrt(T) (S̄_j - S̄_k) / σ̂ with
// σ̂² = γ̂(0) + 2 Σ_{l=1..L} γ̂(l), where γ̂(l) is the lag-l sample
// autocovariance of the daily differences with 1/T normalization.
// A truncated lag window can push σ̂² below zero; that is a hard error
// (code "nonpositive_variance") rather than a silent floor, and
// identical series fail with code "zero_variance".
TestResult dm_test(const DailyScoreSeries& series_j, const DailyScoreSeries& series_k, int lag);

struct InformationGain {
    double ig;          // T (S̄_j - S̄_k)
    double igpe;        // ig / N_T
    double event_count; // N_T
};

// Information gain and information gain per earthquake of model k over
// model j; both are multiples of the Poisson score difference. The
// series must have been computed under the Poisson score. IGPE is
// undefined (error) when no events were observed.
InformationGain information_gain(const DailyScoreSeries& series_j, const DailyScoreSeries& series_k,
                                 const ObservationPanel& obs);

// CSEP T-test on per-event log-rate differences, implemented exactly
// as specified by its authors: Theta = sqrt(N_T) IGPE / s with the
// count-weighted sample variance s² of Δ = ln x_j - ln x_k, referred
// to a Student-t distribution with N_T - 1 degrees of freedom. The
// variance specification ignores spatio-temporal dependence and the
// no-event terms, which is precisely the miscalibration the synthetic
// null experiments exhibit.
TestResult csep_t_test(const ForecastPanel& fa, const ForecastPanel& fb,
                       const ObservationPanel& obs);

// Day indices of the time axis falling on the given weekday
// (0 = Monday ... 6 = Sunday); errors when the selection is empty.
std::vector<int> weekday_indices(const TimeIndex& time, int weekday);

DailyScoreSeries subsample_weekly(const DailyScoreSeries& series, const TimeIndex& time, int weekday);
ForecastPanel subsample_weekly(const ForecastPanel& panel, const TimeIndex& time, int weekday);
ObservationPanel subsample_weekly(const ObservationPanel& panel, const TimeIndex& time, int weekday);

// Column subsets by explicit day indices (building block of
// subsample_weekly, exposed for callers that precompute indices).
DailyScoreSeries select_days(const DailyScoreSeries& series, const std::vector<int>& idx);
ForecastPanel select_days(const ForecastPanel& panel, const std::vector<int>& idx);
ObservationPanel select_days(const ObservationPanel& panel, const std::vector<int>& idx);

} // namespace quakescore
