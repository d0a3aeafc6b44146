#include "quakescore/synth.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "quakescore/errors.hpp"
#include "quakescore/parallel.hpp"
#include "quakescore/rng.hpp"

namespace quakescore {

namespace {

void validate(const SyntheticWorldSpec& spec) {
    if (spec.cells == 0 || spec.days == 0) throw ValidationError("synthetic world: empty dimensions");
    if (spec.cell_rates.size() != spec.cells)
        throw ValidationError("synthetic world: rate vector length does not match cell count");
    for (double r : spec.cell_rates)
        if (!(r > 0.0) || !std::isfinite(r))
            throw ValidationError("synthetic world: cell rates must be positive and finite");
    if (spec.window_length < 1) throw ValidationError("synthetic world: window length must be >= 1");
    if (spec.family == CountFamily::negative_binomial && !(spec.dispersion > 0.0))
        throw ValidationError("synthetic world: dispersion must be positive");
    if (spec.burst_probability < 0.0 || spec.burst_probability > 1.0)
        throw ValidationError("synthetic world: burst probability must be in [0, 1]");
    if (!(spec.burst_factor > 0.0))
        throw ValidationError("synthetic world: burst factor must be positive");
}

// One count with the requested family and mean. The negative binomial
// is drawn as a gamma-Poisson mixture so non-integer dispersion works.
double draw_count(std::mt19937_64& eng, CountFamily family, double mean, double dispersion) {
    if (family == CountFamily::poisson) {
        std::poisson_distribution<long long> pois(mean);
        return static_cast<double>(pois(eng));
    }
    std::gamma_distribution<double> gamma(dispersion, mean / dispersion);
    double lambda = gamma(eng);
    if (lambda <= 0.0) return 0.0;
    std::poisson_distribution<long long> pois(lambda);
    return static_cast<double>(pois(eng));
}

} // namespace

SyntheticWorld generate_world(const SyntheticWorldSpec& spec) {
    validate(spec);
    const std::size_t C = spec.cells, T = spec.days;
    const int wl = spec.window_length;

    // Day-level burst pattern, part of the forecastable mean.
    std::vector<double> day_factor(T + static_cast<std::size_t>(wl) - 1, 1.0);
    if (spec.burst_probability > 0.0) {
        for (std::size_t d = 0; d < day_factor.size(); ++d)
            if (rng::uniform01(spec.seed, 0xb1u, d) < spec.burst_probability)
                day_factor[d] = spec.burst_factor;
    }

    std::vector<double> counts(C * T, 0.0);
    std::vector<double> means(C * T, 0.0);

    if (!spec.overlapping_windows) {
        for (std::size_t c = 0; c < C; ++c) {
            std::mt19937_64 eng(rng::key(spec.seed, 0x0bu, c));
            for (std::size_t t = 0; t < T; ++t) {
                double mean = spec.cell_rates[c] * day_factor[t];
                means[c + C * t] = mean;
                counts[c + C * t] = draw_count(eng, spec.family, mean, spec.dispersion);
            }
        }
    } else {
        // Daily events over the T + wl - 1 days spanned by the windows;
        // window t collects days [t, t + wl).
        for (std::size_t c = 0; c < C; ++c) {
            std::mt19937_64 eng(rng::key(spec.seed, 0x0eu, c));
            std::vector<double> daily(day_factor.size(), 0.0);
            for (std::size_t d = 0; d < daily.size(); ++d) {
                double mean = spec.cell_rates[c] / static_cast<double>(wl) * day_factor[d];
                daily[d] = draw_count(eng, spec.family, mean, spec.dispersion);
            }
            for (std::size_t t = 0; t < T; ++t) {
                double sum = 0.0, mean_sum = 0.0;
                for (int u = 0; u < wl; ++u) {
                    sum += daily[t + static_cast<std::size_t>(u)];
                    mean_sum += spec.cell_rates[c] / static_cast<double>(wl) *
                                day_factor[t + static_cast<std::size_t>(u)];
                }
                counts[c + C * t] = sum;
                means[c + C * t] = mean_sum;
            }
        }
    }

    return {ObservationPanel(C, T, std::move(counts)),
            ForecastPanel("true-mean", C, T, std::move(means))};
}

std::pair<ForecastPanel, ForecastPanel> mixture_pair(const MixtureExperimentSpec& spec,
                                                     int replicate) {
    const ForecastPanel& p1 = spec.base_a;
    const ForecastPanel& p2 = spec.base_b;
    if (p1.cells() != p2.cells() || p1.days() != p2.days())
        throw ValidationError("mixture pair: base panels have different dimensions");
    const std::size_t C = p1.cells(), T = p1.days();
    std::vector<double> a(C * T), b(C * T);
    for (std::size_t t = 0; t < T; ++t) {
        bool swap = (rng::key(spec.seed, static_cast<uint64_t>(replicate), t) & 1u) != 0;
        const double* src_a = (swap ? p2.day(t) : p1.day(t)).data();
        const double* src_b = (swap ? p1.day(t) : p2.day(t)).data();
        std::copy(src_a, src_a + C, a.data() + C * t);
        std::copy(src_b, src_b + C, b.data() + C * t);
    }
    return {ForecastPanel("mix-a", C, T, std::move(a)),
            ForecastPanel("mix-b", C, T, std::move(b))};
}

std::vector<NullExperimentRecord> null_experiment(const MixtureExperimentSpec& spec,
                                                  const ObservationPanel& obs,
                                                  const TimeIndex& time, TestKind kind,
                                                  int dm_lag) {
    if (spec.replicates < 1) throw ValidationError("null experiment: need at least one replicate");
    if (obs.days() != spec.base_a.days() || obs.cells() != spec.base_a.cells())
        throw ValidationError("null experiment: observation dimensions do not match base panels");

    std::vector<int> keep;
    if (spec.weekday_subsample) keep = weekday_indices(time, spec.weekday);

    const ScoringFunction pois = ScoringFunction::poisson();
    std::vector<NullExperimentRecord> records(static_cast<std::size_t>(spec.replicates));
    parallel_for(static_cast<std::size_t>(spec.replicates), [&](std::size_t r) {
        NullExperimentRecord rec;
        rec.replicate = static_cast<int>(r);
        auto [mix_a, mix_b] = mixture_pair(spec, static_cast<int>(r));
        try {
            TestResult res;
            if (spec.weekday_subsample) {
                ForecastPanel sa = select_days(mix_a, keep);
                ForecastPanel sb = select_days(mix_b, keep);
                ObservationPanel so = select_days(obs, keep);
                res = kind == TestKind::dm
                          ? dm_test(daily_scores(sa, so, pois), daily_scores(sb, so, pois), dm_lag)
                          : csep_t_test(sa, sb, so);
            } else {
                res = kind == TestKind::dm
                          ? dm_test(daily_scores(mix_a, obs, pois), daily_scores(mix_b, obs, pois),
                                    dm_lag)
                          : csep_t_test(mix_a, mix_b, obs);
            }
            rec.p_value = res.p_one_sided;
            rec.statistic = res.statistic;
            rec.status = "ok";
        } catch (const DegenerateError& e) {
            rec.p_value = std::numeric_limits<double>::quiet_NaN();
            rec.statistic = std::numeric_limits<double>::quiet_NaN();
            rec.status = e.code;
        }
        records[r] = std::move(rec);
    });
    return records;
}

} // namespace quakescore
