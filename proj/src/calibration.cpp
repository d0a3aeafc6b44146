#include "quakescore/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "quakescore/errors.hpp"
#include "quakescore/kahan.hpp"
#include "quakescore/parallel.hpp"
#include "quakescore/rng.hpp"

namespace quakescore {

namespace {

struct Group {
    std::size_t first, last; // inclusive range in sorted point order
    double x;
    double sum_y;
    double count;
};

struct SweepBin {
    std::size_t first_group, last_group;
    double sum_y;
    double count;
    double value;
};

// The violator sweep on pre-pooled groups. Values are recomputed from
// raw sums at every merge.
std::vector<SweepBin> pav_sweep(std::span<const Group> groups) {
    std::vector<SweepBin> stack;
    stack.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        SweepBin bin{g, g, groups[g].sum_y, groups[g].count, groups[g].sum_y / groups[g].count};
        while (!stack.empty() && stack.back().value >= bin.value) {
            bin.first_group = stack.back().first_group;
            bin.sum_y += stack.back().sum_y;
            bin.count += stack.back().count;
            bin.value = bin.sum_y / bin.count;
            stack.pop_back();
        }
        stack.push_back(bin);
    }
    return stack;
}

std::vector<Group> pool_ties(std::span<const double> x, std::span<const double> y,
                             std::vector<std::size_t>& order) {
    const std::size_t n = x.size();
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<Group> groups;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < n && x[order[j]] == x[order[i]]) {
            sum += y[order[j]];
            ++j;
        }
        groups.push_back({i, j - 1, x[order[i]], sum, static_cast<double>(j - i)});
        i = j;
    }
    return groups;
}

} // namespace

PavResult pav_recalibrate(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || x.size() != y.size())
        throw ValidationError("pav: need equally many forecasts and outcomes, at least one pair");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw ValidationError("pav: non-finite input");

    PavResult res;
    std::vector<Group> groups = pool_ties(x, y, res.order);
    std::vector<SweepBin> bins = pav_sweep(groups);

    res.sorted_x.resize(x.size());
    res.fitted.resize(x.size());
    for (std::size_t p = 0; p < x.size(); ++p) res.sorted_x[p] = x[res.order[p]];
    res.bins.reserve(bins.size());
    for (const SweepBin& b : bins) {
        std::size_t first = groups[b.first_group].first;
        std::size_t last = groups[b.last_group].last;
        for (std::size_t p = first; p <= last; ++p) res.fitted[p] = b.value;
        res.bins.push_back({first, last, b.value});
    }
    return res;
}

double ecdf_value(std::span<const double> sorted_sample, double v) {
    if (sorted_sample.empty()) throw ValidationError("ecdf: empty sample");
    auto it = std::upper_bound(sorted_sample.begin(), sorted_sample.end(), v);
    return static_cast<double>(it - sorted_sample.begin()) /
           static_cast<double>(sorted_sample.size());
}

ReliabilityCurve reliability_curve(const ForecastPanel& forecast, const ObservationPanel& obs,
                                   std::span<const double> transform_sample) {
    if (forecast.cells() != obs.cells() || forecast.days() != obs.days())
        throw ValidationError("panel dimensions do not agree");
    PavResult pav = pav_recalibrate(forecast.values(), obs.counts());

    ReliabilityCurve curve;
    for (std::size_t p = 0; p < pav.sorted_x.size(); ++p) {
        if (curve.x.empty() || pav.sorted_x[p] != curve.x.back()) {
            curve.x.push_back(pav.sorted_x[p]);
            curve.x_hat.push_back(pav.fitted[p]);
        }
    }
    if (!transform_sample.empty()) {
        std::vector<double> sorted(transform_sample.begin(), transform_sample.end());
        std::sort(sorted.begin(), sorted.end());
        curve.x_ecdf.reserve(curve.x.size());
        curve.x_hat_ecdf.reserve(curve.x.size());
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            curve.x_ecdf.push_back(ecdf_value(sorted, curve.x[i]));
            curve.x_hat_ecdf.push_back(ecdf_value(sorted, curve.x_hat[i]));
        }
    }
    return curve;
}

ScoreDecomposition corp_decompose(std::span<const double> x, std::span<const double> y,
                                  const ScoringFunction& s) {
    if (!s.strictly_consistent())
        throw ValidationError("corp decomposition requires a strictly mean-consistent score");
    if (x.empty() || x.size() != y.size())
        throw ValidationError("corp decomposition: need equally many forecasts and outcomes");
    const double n = static_cast<double>(x.size());

    KahanSum raw, marginal_mean;
    for (std::size_t i = 0; i < x.size(); ++i) {
        raw.add(s(x[i], y[i]));
        marginal_mean.add(y[i]);
    }
    const double x_mg = marginal_mean.value() / n;

    PavResult pav = pav_recalibrate(x, y);
    KahanSum recal, marginal;
    for (std::size_t p = 0; p < x.size(); ++p) {
        double yi = y[pav.order[p]];
        recal.add(s(pav.fitted[p], yi));
        marginal.add(s(x_mg, yi));
    }

    ScoreDecomposition d;
    d.mean_score = raw.value() / n;
    const double s_rc = recal.value() / n;
    d.unc = marginal.value() / n;
    d.mcb = d.mean_score - s_rc;
    d.dsc = d.unc - s_rc;
    if (!std::isfinite(d.mean_score) || !std::isfinite(d.mcb) || !std::isfinite(d.dsc) ||
        !std::isfinite(d.unc))
        throw DegenerateError("nonfinite_component",
                              "corp decomposition has a non-finite component");
    return d;
}

ScoreDecomposition corp_decompose(const ForecastPanel& forecast, const ObservationPanel& obs,
                                  const ScoringFunction& s) {
    if (forecast.cells() != obs.cells() || forecast.days() != obs.days())
        throw ValidationError("panel dimensions do not agree");
    return corp_decompose(forecast.values(), obs.counts(), s);
}

ConsistencyBand consistency_band(const ForecastPanel& forecast, const ObservationPanel& obs,
                                 double level, int replicates, uint64_t seed) {
    if (forecast.cells() != obs.cells() || forecast.days() != obs.days())
        throw ValidationError("panel dimensions do not agree");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("band level must be in (0, 1)");
    if (replicates < 2) throw ValidationError("band needs at least two replicates");

    const auto& xs = forecast.values();
    const auto& ys = obs.counts();
    const std::size_t n = xs.size();

    // Empirical pmf of the pooled observed counts.
    std::size_t max_count = 0;
    for (double y : ys) max_count = std::max(max_count, static_cast<std::size_t>(y));
    std::vector<double> pmf(max_count + 1, 0.0);
    for (double y : ys) pmf[static_cast<std::size_t>(y)] += 1.0;
    for (double& p : pmf) p /= static_cast<double>(n);
    double obs_mean = 0.0;
    for (std::size_t k = 1; k < pmf.size(); ++k) obs_mean += static_cast<double>(k) * pmf[k];

    // Distinct forecast values and the case -> group map.
    std::vector<std::size_t> order;
    std::vector<Group> groups = pool_ties(xs, ys, order);
    const std::size_t n_groups = groups.size();
    std::vector<std::size_t> case_group(n);
    for (std::size_t g = 0; g < n_groups; ++g)
        for (std::size_t p = groups[g].first; p <= groups[g].last; ++p)
            case_group[order[p]] = g;

    // Tilted predictive distribution F_x per distinct forecast value,
    // stored as a CDF table. F_0 is the point mass at zero.
    std::vector<std::vector<double>> cdf(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) {
        const double x = groups[g].x;
        auto& table = cdf[g];
        table.resize(pmf.size());
        if (x == 0.0) {
            std::fill(table.begin(), table.end(), 1.0);
            continue;
        }
        if (obs_mean <= 0.0)
            throw DegenerateError("degenerate_observations",
                                  "consistency band: no events ever observed, cannot tilt to a "
                                  "positive mean");
        const double eps = obs_mean / x - 1.0;
        if (pmf[0] + eps < 0.0)
            throw DegenerateError("tilt_bound",
                                  "consistency band: forecast value exceeds the tilting bound, "
                                  "zero mass would go negative");
        const double norm = 1.0 + eps;
        double run = (pmf[0] + eps) / norm;
        table[0] = run;
        for (std::size_t k = 1; k < pmf.size(); ++k) {
            run += pmf[k] / norm;
            table[k] = std::min(run, 1.0);
        }
        table.back() = 1.0;
    }

    // Replicate r: draw y* ~ F_{x_i} per case, recompute the isotonic
    // fit on the groups, record the curve value at every abscissa.
    std::vector<double> record(static_cast<std::size_t>(replicates) * n_groups);
    parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t r) {
        std::vector<double> group_sum(n_groups, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& table = cdf[case_group[i]];
            double u = rng::uniform01(seed, r, i);
            auto it = std::upper_bound(table.begin(), table.end(), u);
            group_sum[case_group[i]] +=
                static_cast<double>(it == table.end() ? table.size() - 1
                                                      : static_cast<std::size_t>(it - table.begin()));
        }
        std::vector<Group> rep_groups(groups);
        for (std::size_t g = 0; g < n_groups; ++g) rep_groups[g].sum_y = group_sum[g];
        std::vector<SweepBin> bins = pav_sweep(rep_groups);
        double* row = record.data() + r * n_groups;
        for (const SweepBin& b : bins)
            for (std::size_t g = b.first_group; g <= b.last_group; ++g) row[g] = b.value;
    });

    ConsistencyBand band;
    band.level = level;
    band.replicates = replicates;
    band.abscissae.resize(n_groups);
    band.lower.resize(n_groups);
    band.upper.resize(n_groups);
    const double alpha = (1.0 - level) / 2.0;
    auto nearest_rank = [&](std::vector<double>& sorted_vals, double q) {
        std::size_t rank = static_cast<std::size_t>(
            std::ceil(q * static_cast<double>(replicates)));
        rank = std::clamp<std::size_t>(rank, 1, static_cast<std::size_t>(replicates));
        return sorted_vals[rank - 1];
    };
    std::vector<double> column(static_cast<std::size_t>(replicates));
    for (std::size_t g = 0; g < n_groups; ++g) {
        for (std::size_t r = 0; r < static_cast<std::size_t>(replicates); ++r)
            column[r] = record[r * n_groups + g];
        std::sort(column.begin(), column.end());
        band.abscissae[g] = groups[g].x;
        band.lower[g] = nearest_rank(column, alpha);
        band.upper[g] = nearest_rank(column, 1.0 - alpha);
    }
    return band;
}

} // namespace quakescore
