#include "quakescore/inference.hpp"

#include <cmath>

#include "quakescore/errors.hpp"
#include "quakescore/kahan.hpp"
#include "quakescore/stats.hpp"

namespace quakescore {

TestResult dm_test(const DailyScoreSeries& series_j, const DailyScoreSeries& series_k, int lag) {
    std::vector<double> d = daily_difference(series_j, series_k);
    const std::size_t T = d.size();
    if (lag < 0) throw ValidationError("dm test: lag must be nonnegative");
    if (static_cast<std::size_t>(lag) >= T) throw ValidationError("dm test: lag must be smaller than T");

    KahanSum mean_sum;
    for (double v : d) mean_sum.add(v);
    const double d_bar = mean_sum.value() / static_cast<double>(T);

    auto gamma_hat = [&](int l) {
        KahanSum acc;
        for (std::size_t t = static_cast<std::size_t>(l); t < T; ++t)
            acc.add((d[t] - d_bar) * (d[t - static_cast<std::size_t>(l)] - d_bar));
        return acc.value() / static_cast<double>(T);
    };

    const double gamma0 = gamma_hat(0);
    double sigma2 = gamma0;
    for (int l = 1; l <= lag; ++l) sigma2 += 2.0 * gamma_hat(l);

    if (gamma0 == 0.0)
        throw DegenerateError("zero_variance",
                              "dm test: daily score differences are constant, variance is zero");
    if (!(sigma2 > 0.0))
        throw DegenerateError("nonpositive_variance",
                              "dm test: lag-window variance estimate is nonpositive; reduce the lag L");

    const double sigma = std::sqrt(sigma2);
    const double z = std::sqrt(static_cast<double>(T)) * d_bar / sigma;
    TestResult r;
    r.kind = TestKind::dm;
    r.statistic = z;
    r.variance_estimate = sigma2;
    r.lag_or_dof = lag;
    r.p_one_sided = stats::normal_sf(z);
    r.orientation = "j=" + series_j.model_id + ", k=" + series_k.model_id +
                    "; positive statistic favors k";
    return r;
}

InformationGain information_gain(const DailyScoreSeries& series_j, const DailyScoreSeries& series_k,
                                 const ObservationPanel& obs) {
    if (series_j.values.size() != series_k.values.size() || series_j.values.size() != obs.days())
        throw ValidationError("information gain: series/observation lengths do not agree");
    for (std::size_t t = 0; t < series_j.values.size(); ++t)
        if (!std::isfinite(series_j.values[t]) || !std::isfinite(series_k.values[t]))
            throw ValidationError("information gain: non-finite daily score");
    const double T = static_cast<double>(series_j.values.size());
    InformationGain out;
    out.ig = T * (total_score(series_j) - total_score(series_k));
    out.event_count = obs.total_events();
    if (out.ig == 0.0) {
        out.igpe = 0.0;
        return out;
    }
    if (out.event_count <= 0.0)
        throw DegenerateError("no_events", "information gain per earthquake undefined: N_T = 0");
    out.igpe = out.ig / out.event_count;
    return out;
}

TestResult csep_t_test(const ForecastPanel& fa, const ForecastPanel& fb,
                       const ObservationPanel& obs) {
    if (fa.cells() != obs.cells() || fa.days() != obs.days() || fb.cells() != obs.cells() ||
        fb.days() != obs.days())
        throw ValidationError("csep t-test: panel dimensions do not agree");

    KahanSum sum_y_delta, sum_y_delta2, sum_rate_diff, sum_events;
    for (std::size_t t = 0; t < obs.days(); ++t) {
        auto xa = fa.day(t);
        auto xb = fb.day(t);
        auto y = obs.day(t);
        for (std::size_t c = 0; c < y.size(); ++c) {
            sum_rate_diff.add(xa[c] - xb[c]);
            if (y[c] <= 0.0) continue;
            if (xa[c] <= 0.0 || xb[c] <= 0.0)
                throw ValidationError("csep t-test: zero forecast at a cell-day with events");
            double delta = std::log(xa[c]) - std::log(xb[c]);
            sum_events.add(y[c]);
            sum_y_delta.add(y[c] * delta);
            sum_y_delta2.add(y[c] * delta * delta);
        }
    }
    const double n_t = sum_events.value();
    if (n_t < 2.0) throw DegenerateError("too_few_events", "csep t-test needs N_T >= 2");

    // IG of model b over model a from the event/rate double sums; the
    // T-test is framed directly in these quantities.
    const double ig = sum_rate_diff.value() - sum_y_delta.value();
    const double igpe = ig / n_t;
    const double s2 = sum_y_delta2.value() / (n_t - 1.0) -
                      (sum_y_delta.value() * sum_y_delta.value()) / (n_t * (n_t - 1.0));
    if (!(s2 > 0.0))
        throw DegenerateError("zero_variance", "csep t-test: event-level variance is zero");

    const double theta = std::sqrt(n_t) * igpe / std::sqrt(s2);
    TestResult r;
    r.kind = TestKind::csep_t;
    r.statistic = theta;
    r.variance_estimate = s2;
    r.lag_or_dof = static_cast<long long>(n_t) - 1;
    r.p_one_sided = stats::student_t_sf(theta, n_t - 1.0);
    r.orientation = "j=" + fa.model_id() + ", k=" + fb.model_id() +
                    "; positive statistic favors k";
    return r;
}

std::vector<int> weekday_indices(const TimeIndex& time, int weekday) {
    if (weekday < 0 || weekday > 6)
        throw ValidationError("weekday must be in 0..6 (0 = Monday)");
    std::vector<int> idx;
    for (int t = 0; t < time.days; ++t)
        if (time.weekday(t) == weekday) idx.push_back(t);
    if (idx.empty()) throw ValidationError("weekday subsample is empty");
    return idx;
}

DailyScoreSeries select_days(const DailyScoreSeries& series, const std::vector<int>& idx) {
    DailyScoreSeries out{series.model_id, {}};
    out.values.reserve(idx.size());
    for (int t : idx) out.values.push_back(series.values.at(static_cast<std::size_t>(t)));
    return out;
}

ForecastPanel select_days(const ForecastPanel& panel, const std::vector<int>& idx) {
    std::vector<double> v;
    v.reserve(panel.cells() * idx.size());
    for (int t : idx) {
        auto day = panel.day(static_cast<std::size_t>(t));
        v.insert(v.end(), day.begin(), day.end());
    }
    return {panel.model_id(), panel.cells(), idx.size(), std::move(v)};
}

ObservationPanel select_days(const ObservationPanel& panel, const std::vector<int>& idx) {
    std::vector<double> v;
    v.reserve(panel.cells() * idx.size());
    for (int t : idx) {
        auto day = panel.day(static_cast<std::size_t>(t));
        v.insert(v.end(), day.begin(), day.end());
    }
    return {panel.cells(), idx.size(), std::move(v)};
}

DailyScoreSeries subsample_weekly(const DailyScoreSeries& series, const TimeIndex& time, int weekday) {
    if (series.values.size() != static_cast<std::size_t>(time.days))
        throw ValidationError("series length does not match time index");
    return select_days(series, weekday_indices(time, weekday));
}

ForecastPanel subsample_weekly(const ForecastPanel& panel, const TimeIndex& time, int weekday) {
    if (panel.days() != static_cast<std::size_t>(time.days))
        throw ValidationError("panel days do not match time index");
    return select_days(panel, weekday_indices(time, weekday));
}

ObservationPanel subsample_weekly(const ObservationPanel& panel, const TimeIndex& time, int weekday) {
    if (panel.days() != static_cast<std::size_t>(time.days))
        throw ValidationError("panel days do not match time index");
    return select_days(panel, weekday_indices(time, weekday));
}

} // namespace quakescore
