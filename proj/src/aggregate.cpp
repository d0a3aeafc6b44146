#include "quakescore/aggregate.hpp"

#include <cmath>
#include <limits>

#include "quakescore/errors.hpp"
#include "quakescore/kahan.hpp"

namespace quakescore {

namespace {

void check_dims(const ForecastPanel& f, const ObservationPanel& o) {
    if (f.cells() != o.cells() || f.days() != o.days())
        throw ValidationError("panel dimensions do not agree");
}

} // namespace

DailyScoreSeries daily_scores(const ForecastPanel& forecast, const ObservationPanel& obs,
                              const ScoringFunction& s) {
    check_dims(forecast, obs);
    DailyScoreSeries out{forecast.model_id(), {}};
    out.values.resize(forecast.days());
    for (std::size_t t = 0; t < forecast.days(); ++t) {
        auto x = forecast.day(t);
        auto y = obs.day(t);
        KahanSum sum;
        for (std::size_t c = 0; c < x.size(); ++c) sum.add(s(x[c], y[c]));
        out.values[t] = sum.value();
    }
    return out;
}

double total_score(const DailyScoreSeries& series) {
    if (series.values.empty()) throw ValidationError("empty daily score series");
    KahanSum sum;
    for (double v : series.values) sum.add(v);
    return sum.value() / static_cast<double>(series.values.size());
}

double number_score(const ForecastPanel& forecast, const ObservationPanel& obs,
                    const ScoringFunction& s) {
    check_dims(forecast, obs);
    KahanSum total;
    for (std::size_t t = 0; t < forecast.days(); ++t) {
        auto x = forecast.day(t);
        auto y = obs.day(t);
        KahanSum sx, sy;
        for (double v : x) sx.add(v);
        for (double v : y) sy.add(v);
        total.add(s(sx.value(), sy.value()));
    }
    return total.value() / static_cast<double>(forecast.days());
}

std::vector<double> per_cell_mean_scores(const ForecastPanel& forecast,
                                         const ObservationPanel& obs, const ScoringFunction& s) {
    check_dims(forecast, obs);
    const std::size_t cells = forecast.cells();
    std::vector<KahanSum> sums(cells);
    for (std::size_t t = 0; t < forecast.days(); ++t) {
        auto x = forecast.day(t);
        auto y = obs.day(t);
        for (std::size_t c = 0; c < cells; ++c) sums[c].add(s(x[c], y[c]));
    }
    std::vector<double> out(cells);
    for (std::size_t c = 0; c < cells; ++c)
        out[c] = sums[c].value() / static_cast<double>(forecast.days());
    return out;
}

ScoreSummary score_summary(const ForecastPanel& forecast, const ObservationPanel& obs,
                           const ScoringFunction& s) {
    return {total_score(daily_scores(forecast, obs, s)), number_score(forecast, obs, s),
            per_cell_mean_scores(forecast, obs, s)};
}

std::vector<double> daily_difference(const DailyScoreSeries& a, const DailyScoreSeries& b) {
    if (a.values.size() != b.values.size())
        throw ValidationError("daily score series have different lengths");
    std::vector<double> d(a.values.size());
    for (std::size_t t = 0; t < d.size(); ++t) {
        if (!std::isfinite(a.values[t]) || !std::isfinite(b.values[t]))
            throw ValidationError("daily score difference undefined: non-finite daily score");
        d[t] = a.values[t] - b.values[t];
    }
    return d;
}

CumulativeDifference cumulative_difference(std::span<const double> d, const ObservationPanel& obs) {
    if (d.size() != obs.days())
        throw ValidationError("difference series length does not match observation days");
    CumulativeDifference out;
    out.cumulative.resize(d.size());
    out.event_counts.resize(d.size());
    out.normalized.resize(d.size());
    KahanSum run_d;
    double run_n = 0.0; // integer-valued, exact
    for (std::size_t t = 0; t < d.size(); ++t) {
        run_d.add(d[t]);
        KahanSum day_n;
        for (double y : obs.day(t)) day_n.add(y);
        run_n += day_n.value();
        out.cumulative[t] = run_d.value();
        out.event_counts[t] = run_n;
        out.normalized[t] = run_n > 0.0 ? run_d.value() / run_n
                                        : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

SpatialDifferenceMap spatial_difference_map(const ForecastPanel& fa, const ForecastPanel& fb,
                                            const ObservationPanel& obs, const ScoringFunction& s) {
    check_dims(fa, obs);
    check_dims(fb, obs);
    const std::size_t cells = fa.cells();
    const double days = static_cast<double>(fa.days());
    std::vector<KahanSum> sums(cells);
    std::vector<char> defined(cells, 1);
    for (std::size_t t = 0; t < fa.days(); ++t) {
        auto xa = fa.day(t);
        auto xb = fb.day(t);
        auto y = obs.day(t);
        for (std::size_t c = 0; c < cells; ++c) {
            double sa = s(xa[c], y[c]);
            double sb = s(xb[c], y[c]);
            if (!std::isfinite(sa) || !std::isfinite(sb)) {
                defined[c] = 0;
                continue;
            }
            sums[c].add(sa - sb);
        }
    }
    SpatialDifferenceMap out;
    out.delta.resize(cells);
    out.defined = std::move(defined);
    for (std::size_t c = 0; c < cells; ++c)
        out.delta[c] = out.defined[c] ? sums[c].value() / days
                                      : std::numeric_limits<double>::quiet_NaN();
    return out;
}

} // namespace quakescore
