#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "quakescore/inference.hpp"
#include "quakescore/model.hpp"

namespace quakescore {

enum class CountFamily { poisson, negative_binomial };

// Synthetic stand-in for a gridded forecasting experiment. cell_rates
// are expected counts per cell per window. With overlapping_windows,
// daily events are drawn and each event is replicated into all
// window_length windows containing its day, so the total window count
// equals window_length times the number of unique events (interior
// events). The optional burst mechanism multiplies a day's rates by
// burst_factor with probability burst_probability; the returned mean
// panel includes the burst pattern, so it is the exact conditional
// mean and thus a calibrated forecast.
struct SyntheticWorldSpec {
    std::size_t cells = 0;
    std::size_t days = 0;
    int window_length = 1;
    std::vector<double> cell_rates;
    CountFamily family = CountFamily::poisson;
    double dispersion = 1.0; // negative binomial size parameter
    double burst_probability = 0.0;
    double burst_factor = 1.0;
    bool overlapping_windows = false;
    uint64_t seed = 0;
};

struct SyntheticWorld {
    ObservationPanel observations;
    ForecastPanel true_means;
};

SyntheticWorld generate_world(const SyntheticWorldSpec& spec);

// The exchangeable-mixture null: per day, a fair coin decides which of
// the two base panels feeds model A and which feeds model B, so A and
// B have equal predictive ability by construction. Coins depend on
// (seed, replicate, day) only.
struct MixtureExperimentSpec {
    ForecastPanel base_a;
    ForecastPanel base_b;
    int replicates = 400;
    uint64_t seed = 0;
    bool weekday_subsample = false;
    int weekday = 0; // 0 = Monday
};

std::pair<ForecastPanel, ForecastPanel> mixture_pair(const MixtureExperimentSpec& spec,
                                                     int replicate);

struct NullExperimentRecord {
    int replicate;
    double p_value;   // NaN when the test errored
    double statistic; // NaN when the test errored
    std::string status; // "ok" or the degeneracy code
};

// Runs the mixture null `replicates` times against fixed observations
// under the Poisson score and collects the one-sided p-values of the
// chosen test. Erroring replicates are reported with their code, never
// dropped. The Mondays-only variant subsamples panels before testing
// (time required for the calendar); DM then uses lag 0.
std::vector<NullExperimentRecord> null_experiment(const MixtureExperimentSpec& spec,
                                                  const ObservationPanel& obs,
                                                  const TimeIndex& time, TestKind kind,
                                                  int dm_lag);

} // namespace quakescore
