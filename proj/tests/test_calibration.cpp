#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "quakescore/calibration.hpp"
#include "quakescore/errors.hpp"
#include "quakescore/kahan.hpp"

using namespace quakescore;

namespace {

ForecastPanel fp(std::size_t c, std::size_t t, std::vector<double> v, std::string id = "m") {
    return {std::move(id), c, t, std::move(v)};
}

ObservationPanel op(std::size_t c, std::size_t t, std::vector<double> v) {
    return {c, t, std::move(v)};
}

// Brute-force isotonic least squares: enumerate all partitions of the
// tie-pooled groups into consecutive blocks, fit each block at its
// outcome mean, keep the feasible (nondecreasing) fit with least
// squared error. Independent of the sweep under test.
std::vector<double> brute_isotonic(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    struct G {
        double sum;
        double cnt;
    };
    std::vector<G> groups;
    std::vector<double> gx;
    for (std::size_t p = 0; p < n;) {
        std::size_t q = p;
        double sum = 0.0;
        while (q < n && x[order[q]] == x[order[p]]) sum += y[order[q++]];
        groups.push_back({sum, static_cast<double>(q - p)});
        gx.push_back(x[order[p]]);
        p = q;
    }
    const std::size_t g = groups.size();
    double best_sse = std::numeric_limits<double>::infinity();
    std::vector<double> best_fit;
    // bitmask over the g-1 possible block boundaries
    for (std::size_t mask = 0; mask < (std::size_t{1} << (g - 1)); ++mask) {
        std::vector<double> fit(g);
        bool feasible = true;
        double prev = -std::numeric_limits<double>::infinity();
        std::size_t start = 0;
        for (std::size_t i = 0; i < g; ++i) {
            bool boundary = i + 1 == g || (mask >> i) & 1;
            if (!boundary) continue;
            double sum = 0.0, cnt = 0.0;
            for (std::size_t j = start; j <= i; ++j) {
                sum += groups[j].sum;
                cnt += groups[j].cnt;
            }
            double value = sum / cnt;
            if (value < prev) {
                feasible = false;
                break;
            }
            for (std::size_t j = start; j <= i; ++j) fit[j] = value;
            prev = value;
            start = i + 1;
        }
        if (!feasible) continue;
        double sse = 0.0;
        for (std::size_t j = 0, p = 0; j < g; ++j) {
            // expand to points of this group
            for (double c = 0; c < groups[j].cnt; ++c, ++p) {
                double resid = fit[j] - y[order[p]];
                sse += resid * resid;
            }
        }
        if (sse < best_sse - 1e-15) {
            best_sse = sse;
            best_fit = fit;
        }
    }
    // expand group fit to sorted point order
    std::vector<double> out(n);
    for (std::size_t j = 0, p = 0; j < groups.size(); ++j)
        for (double c = 0; c < groups[j].cnt; ++c, ++p) out[p] = best_fit[j];
    return out;
}

} // namespace

TEST_CASE("pav: worked examples") {
    SUBCASE("already isotonic input is untouched") {
        auto r = pav_recalibrate(std::vector<double>{1, 2, 3}, std::vector<double>{0, 1, 2});
        CHECK(r.fitted == std::vector<double>{0, 1, 2});
        CHECK(r.bins.size() == 3);
    }
    SUBCASE("two-point violation pools to the mean") {
        auto r = pav_recalibrate(std::vector<double>{1, 2}, std::vector<double>{3, 1});
        CHECK(r.fitted == std::vector<double>{2, 2});
        CHECK(r.bins.size() == 1);
    }
    SUBCASE("all-tied forecasts pool to the outcome mean") {
        auto r = pav_recalibrate(std::vector<double>{1, 1, 1}, std::vector<double>{0, 2, 4});
        CHECK(r.fitted == std::vector<double>{2, 2, 2});
    }
    SUBCASE("pool of three then a free point") {
        auto r = pav_recalibrate(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 0, 0, 3});
        CHECK(r.fitted[0] == doctest::Approx(1.0 / 3.0));
        CHECK(r.fitted[1] == doctest::Approx(1.0 / 3.0));
        CHECK(r.fitted[2] == doctest::Approx(1.0 / 3.0));
        CHECK(r.fitted[3] == 3.0);
    }
}

TEST_CASE("pav invariants: monotone fit, bin structure, order invariance") {
    std::mt19937_64 eng(1234);
    std::uniform_real_distribution<double> xdist(0.0, 1.0);
    std::uniform_int_distribution<int> ydist(0, 3);
    for (int rep = 0; rep < 50; ++rep) {
        std::size_t n = 2 + eng() % 30;
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = eng() % 4 == 0 ? 0.5 : xdist(eng); // inject ties
        for (auto& v : y) v = static_cast<double>(ydist(eng));
        auto r = pav_recalibrate(x, y);
        for (std::size_t i = 1; i < n; ++i) {
            CHECK(r.fitted[i] >= r.fitted[i - 1]);
            CHECK(r.sorted_x[i] >= r.sorted_x[i - 1]);
        }
        for (std::size_t b = 1; b < r.bins.size(); ++b)
            CHECK(r.bins[b].value > r.bins[b - 1].value);
        // bin values are the mean of their outcomes
        for (const auto& bin : r.bins) {
            KahanSum sum;
            for (std::size_t p = bin.first; p <= bin.last; ++p) sum.add(y[r.order[p]]);
            CHECK(bin.value ==
                  doctest::Approx(sum.value() / static_cast<double>(bin.last - bin.first + 1))
                      .epsilon(1e-14));
        }

        // shuffling the input leaves the sorted fit unchanged
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), eng);
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = x[perm[i]];
            ys[i] = y[perm[i]];
        }
        auto r2 = pav_recalibrate(xs, ys);
        CHECK(r2.fitted == r.fitted);
    }
}

TEST_CASE("pav matches the brute-force partition oracle exactly") {
    std::mt19937_64 eng(31337);
    std::uniform_int_distribution<int> ydist(0, 3);
    std::uniform_real_distribution<double> xdist(0.0, 1.0);
    for (int rep = 0; rep < 500; ++rep) {
        std::size_t n = 1 + eng() % 10;
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = eng() % 3 == 0 ? 0.25 : xdist(eng);
        for (auto& v : y) v = static_cast<double>(ydist(eng));
        auto r = pav_recalibrate(x, y);
        auto oracle = brute_isotonic(x, y);
        for (std::size_t i = 0; i < n; ++i) CHECK(r.fitted[i] == oracle[i]);
    }
}

TEST_CASE("pav is invariant under strictly increasing transforms of x") {
    std::mt19937_64 eng(40);
    std::uniform_real_distribution<double> xdist(0.01, 2.0);
    std::uniform_int_distribution<int> ydist(0, 3);
    std::size_t n = 60;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = xdist(eng);
    for (auto& v : y) v = static_cast<double>(ydist(eng));
    auto base = pav_recalibrate(x, y);
    auto transforms = std::vector<std::vector<double>>{};
    std::vector<double> quadratic(n), expo(n), scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        quadratic[i] = x[i] * x[i];
        expo[i] = std::exp(x[i]);
        scaled[i] = 4.0 * x[i];
    }
    for (const auto& tx : {quadratic, expo, scaled}) {
        auto r = pav_recalibrate(tx, y);
        CHECK(r.fitted == base.fitted);
        CHECK(r.order == base.order);
    }
}

TEST_CASE("pav fit beats random nondecreasing fits under the poisson score") {
    std::mt19937_64 eng(606);
    std::uniform_real_distribution<double> xdist(0.05, 2.0);
    std::poisson_distribution<int> ydist(0.8);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::size_t n = 24;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = xdist(eng);
    for (auto& v : y) v = static_cast<double>(ydist(eng));
    auto r = pav_recalibrate(x, y);
    std::vector<double> y_sorted(n);
    for (std::size_t i = 0; i < n; ++i) y_sorted[i] = y[r.order[i]];

    auto avg_pois = [&](const std::vector<double>& fit) {
        KahanSum s;
        for (std::size_t i = 0; i < n; ++i) s.add(poisson_score(fit[i], y_sorted[i]));
        return s.value() / static_cast<double>(n);
    };
    double pav_score = avg_pois(r.fitted);
    for (int cand = 0; cand < 1000; ++cand) {
        std::vector<double> fit(n);
        double run = 0.02 * unif(eng);
        for (std::size_t i = 0; i < n; ++i) {
            run += 0.2 * unif(eng);
            fit[i] = run;
        }
        CHECK(pav_score <= avg_pois(fit) + 1e-12);
    }
}

TEST_CASE("reliability curve basics") {
    SUBCASE("recalibrated forecasts land on the diagonal") {
        std::mt19937_64 eng(3);
        std::uniform_real_distribution<double> xdist(0.0, 2.0);
        std::poisson_distribution<int> ydist(1);
        std::size_t C = 5, T = 8;
        std::vector<double> x(C * T), y(C * T);
        for (auto& v : x) v = xdist(eng);
        for (auto& v : y) v = static_cast<double>(ydist(eng));
        auto pav = pav_recalibrate(x, y);
        // feed the recalibrated values back in as forecasts
        std::vector<double> xhat(C * T);
        for (std::size_t p = 0; p < x.size(); ++p) xhat[pav.order[p]] = pav.fitted[p];
        auto curve = reliability_curve(fp(C, T, xhat), op(C, T, y));
        for (std::size_t i = 0; i < curve.x.size(); ++i)
            CHECK(curve.x_hat[i] == doctest::Approx(curve.x[i]).epsilon(1e-12));
    }
    SUBCASE("constant forecasts give a single point at the outcome mean") {
        auto curve = reliability_curve(fp(2, 2, {0.7, 0.7, 0.7, 0.7}), op(2, 2, {0, 1, 2, 1}));
        REQUIRE(curve.x.size() == 1);
        CHECK(curve.x[0] == 0.7);
        CHECK(curve.x_hat[0] == 1.0);
    }
    SUBCASE("overforecasting by 4x puts the curve below the diagonal") {
        std::mt19937_64 eng(9);
        std::uniform_real_distribution<double> xdist(0.1, 2.0);
        std::poisson_distribution<int> ydist(1);
        std::size_t C = 6, T = 10;
        std::vector<double> x(C * T), y(C * T);
        for (auto& v : x) v = xdist(eng);
        for (auto& v : y) v = static_cast<double>(ydist(eng));
        auto pav = pav_recalibrate(x, y);
        std::vector<double> calibrated(C * T);
        for (std::size_t p = 0; p < x.size(); ++p) calibrated[pav.order[p]] = pav.fitted[p];
        std::vector<double> inflated(calibrated);
        for (auto& v : inflated) v *= 4.0;
        auto curve = reliability_curve(fp(C, T, inflated), op(C, T, y));
        for (std::size_t i = 0; i < curve.x.size(); ++i)
            if (curve.x[i] > 0.0) CHECK(curve.x_hat[i] < curve.x[i]);
    }
}

TEST_CASE("ecdf transform is right-continuous and hits the curve columns") {
    std::vector<double> sample = {0.1, 0.2, 0.2, 0.5};
    CHECK(ecdf_value(sample, 0.05) == 0.0);
    CHECK(ecdf_value(sample, 0.1) == 0.25);
    CHECK(ecdf_value(sample, 0.2) == 0.75);
    CHECK(ecdf_value(sample, 0.3) == 0.75);
    CHECK(ecdf_value(sample, 0.5) == 1.0);
    CHECK(ecdf_value(sample, 9.0) == 1.0);

    auto curve = reliability_curve(fp(1, 2, {0.2, 0.1}), op(1, 2, {0.0, 1.0}),
                                   std::vector<double>{0.1, 0.2, 0.2, 0.5});
    REQUIRE(curve.x_ecdf.size() == curve.x.size());
    CHECK(curve.x_ecdf[0] == 0.25);
    CHECK(curve.x_ecdf[1] == 0.75);
}

TEST_CASE("corp decomposition identities") {
    std::mt19937_64 eng(500);
    std::uniform_real_distribution<double> xdist(0.05, 2.5);
    std::poisson_distribution<int> ydist(0.7);
    std::vector<ScoringFunction> scores = {ScoringFunction::poisson(),
                                           ScoringFunction::quadratic(),
                                           ScoringFunction::patton(1.5)};
    for (int rep = 0; rep < 40; ++rep) {
        std::size_t C = 1 + eng() % 8, T = 1 + eng() % 10;
        std::vector<double> x(C * T), y(C * T);
        for (auto& v : x) v = xdist(eng);
        for (auto& v : y) v = static_cast<double>(ydist(eng));
        auto f = fp(C, T, x);
        auto o = op(C, T, y);
        for (const auto& s : scores) {
            auto d = corp_decompose(f, o, s);
            CHECK(std::fabs(d.mean_score - (d.mcb - d.dsc + d.unc)) < 1e-10);
            CHECK(d.mcb >= -1e-12);
            CHECK(d.dsc >= -1e-12);
        }
    }
}

TEST_CASE("corp decomposition special cases") {
    SUBCASE("marginal-mean forecast has zero MCB and zero DSC") {
        std::vector<double> y = {0, 1, 2, 0, 1, 0};
        double mean = 4.0 / 6.0;
        auto d = corp_decompose(fp(2, 3, std::vector<double>(6, mean)), op(2, 3, y),
                                ScoringFunction::poisson());
        CHECK(std::fabs(d.mcb) < 1e-12);
        CHECK(std::fabs(d.dsc) < 1e-12);
        CHECK(d.mean_score == doctest::Approx(d.unc).epsilon(1e-12));
    }
    SUBCASE("recalibrated forecast keeps DSC and zeroes MCB") {
        std::mt19937_64 eng(41);
        std::uniform_real_distribution<double> xdist(0.05, 2.0);
        std::poisson_distribution<int> ydist(1);
        std::size_t C = 5, T = 9;
        std::vector<double> x(C * T), y(C * T);
        for (auto& v : x) v = xdist(eng);
        for (auto& v : y) v = static_cast<double>(ydist(eng));
        auto original = corp_decompose(fp(C, T, x), op(C, T, y), ScoringFunction::poisson());
        auto pav = pav_recalibrate(x, y);
        std::vector<double> xhat(C * T);
        for (std::size_t p = 0; p < x.size(); ++p) xhat[pav.order[p]] = pav.fitted[p];
        auto recal = corp_decompose(fp(C, T, xhat), op(C, T, y), ScoringFunction::poisson());
        CHECK(std::fabs(recal.mcb) < 1e-12);
        CHECK(recal.dsc == doctest::Approx(original.dsc).epsilon(1e-10));
        CHECK(recal.unc == doctest::Approx(original.unc).epsilon(1e-12));
    }
    SUBCASE("elementary score is rejected") {
        CHECK_THROWS_AS(corp_decompose(fp(1, 1, {1.0}), op(1, 1, {1.0}),
                                       ScoringFunction::elementary(0.5)),
                        ValidationError);
    }
}

TEST_CASE("consistency band: tilting math") {
    // pooled pmf (0.9, 0.1): mean 0.1, tilting bound 0.1 / 0.1 = 1.
    std::vector<double> y(10, 0.0);
    y[0] = 1.0; // one event in ten cases
    SUBCASE("x below the mean tilts mass onto zero") {
        std::vector<double> x(10, 0.05);
        auto band = consistency_band(fp(2, 5, x), op(2, 5, y), 0.9, 50, 1);
        REQUIRE(band.abscissae == std::vector<double>{0.05});
        // F_x = (0.95, 0.05): every resampled curve value is the group
        // mean of draws from it, so it stays within [0, 1]
        CHECK(band.lower[0] >= 0.0);
        CHECK(band.upper[0] <= 1.0);
        CHECK(band.lower[0] <= band.upper[0]);
    }
    SUBCASE("x at the mean is tilt-free") {
        std::vector<double> x(10, 0.1);
        auto band = consistency_band(fp(2, 5, x), op(2, 5, y), 0.9, 50, 1);
        CHECK(band.lower[0] <= band.upper[0]);
    }
    SUBCASE("x above the bound errors") {
        std::vector<double> x(10, 2.0);
        CHECK_THROWS_AS(consistency_band(fp(2, 5, x), op(2, 5, y), 0.9, 50, 1), DegenerateError);
    }
    SUBCASE("no events ever observed errors for positive forecasts") {
        std::vector<double> zeros(10, 0.0);
        std::vector<double> x(10, 0.1);
        CHECK_THROWS_AS(consistency_band(fp(2, 5, x), op(2, 5, zeros), 0.9, 50, 1),
                        DegenerateError);
    }
    SUBCASE("parameter validation") {
        std::vector<double> x(10, 0.05);
        CHECK_THROWS_AS(consistency_band(fp(2, 5, x), op(2, 5, y), 1.5, 50, 1), ValidationError);
        CHECK_THROWS_AS(consistency_band(fp(2, 5, x), op(2, 5, y), 0.9, 1, 1), ValidationError);
    }
}

TEST_CASE("consistency band is reproducible and seed-sensitive") {
    std::mt19937_64 eng(77);
    std::uniform_real_distribution<double> xdist(0.02, 0.4);
    std::poisson_distribution<int> ydist(0.3);
    std::size_t C = 10, T = 12;
    std::vector<double> x(C * T), y(C * T);
    for (auto& v : x) v = xdist(eng);
    for (auto& v : y) v = static_cast<double>(ydist(eng));
    auto f = fp(C, T, x);
    auto o = op(C, T, y);
    auto b1 = consistency_band(f, o, 0.9, 200, 42);
    auto b2 = consistency_band(f, o, 0.9, 200, 42);
    CHECK(b1.lower == b2.lower);
    CHECK(b1.upper == b2.upper);
    auto b3 = consistency_band(f, o, 0.9, 200, 43);
    CHECK(b1.lower != b3.lower);
}

TEST_CASE("mean calibration keeps the curve inside a wide band most of the time") {
    // a loose functional check; the sharp coverage experiment lives in
    // the acceptance suite
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> xdist(0.05, 0.9);
    std::size_t C = 20, T = 25;
    std::vector<double> x(C * T);
    for (auto& v : x) v = xdist(eng);
    // draw y from a poisson at exactly the forecast mean
    std::vector<double> y(C * T);
    for (std::size_t i = 0; i < y.size(); ++i) {
        std::poisson_distribution<int> d(x[i]);
        y[i] = static_cast<double>(d(eng));
    }
    auto f = fp(C, T, x);
    auto o = op(C, T, y);
    auto band = consistency_band(f, o, 0.98, 300, 5);
    auto curve = reliability_curve(f, o);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < curve.x.size(); ++i)
        if (curve.x_hat[i] >= band.lower[i] && curve.x_hat[i] <= band.upper[i]) ++inside;
    CHECK(static_cast<double>(inside) / static_cast<double>(curve.x.size()) > 0.85);
}
