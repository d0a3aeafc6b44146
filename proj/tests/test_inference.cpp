#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "quakescore/errors.hpp"
#include "quakescore/inference.hpp"
#include "quakescore/kahan.hpp"
#include "quakescore/synth.hpp"

using namespace quakescore;

namespace {

ForecastPanel fp(std::size_t c, std::size_t t, std::vector<double> v, std::string id = "m") {
    return {std::move(id), c, t, std::move(v)};
}

ObservationPanel op(std::size_t c, std::size_t t, std::vector<double> v) {
    return {c, t, std::move(v)};
}

DailyScoreSeries series_of(std::vector<double> v, std::string id = "s") {
    return {std::move(id), std::move(v)};
}

// Independent double-sum route to the information gain of model k over
// model j (per-event log-rate terms plus the rate-mass difference).
double ig_double_sum(const ForecastPanel& fj, const ForecastPanel& fk,
                     const ObservationPanel& obs) {
    KahanSum events, mass;
    for (std::size_t i = 0; i < obs.counts().size(); ++i) {
        double y = obs.counts()[i];
        if (y > 0.0) events.add(y * (std::log(fk.values()[i]) - std::log(fj.values()[i])));
        mass.add(fk.values()[i] - fj.values()[i]);
    }
    return events.value() - mass.value();
}

} // namespace

TEST_CASE("dm test: hand-computed T=4 cases") {
    auto a = series_of({1.0, -1.0, 1.0, -1.0}, "a");
    auto zero = series_of({0.0, 0.0, 0.0, 0.0}, "b");

    SUBCASE("L=0: unit variance, centered statistic") {
        TestResult r = dm_test(a, zero, 0);
        CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(r.variance_estimate == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.p_one_sided == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("L=1: truncated lag window turns the variance negative") {
        CHECK_THROWS_AS(dm_test(a, zero, 1), DegenerateError);
        try {
            dm_test(a, zero, 1);
        } catch (const DegenerateError& e) {
            CHECK(e.code == "nonpositive_variance");
        }
    }
    SUBCASE("identical series: zero variance with its own code") {
        try {
            dm_test(a, a, 0);
            FAIL("expected DegenerateError");
        } catch (const DegenerateError& e) {
            CHECK(e.code == "zero_variance");
        }
    }
    SUBCASE("lag bounds") {
        CHECK_THROWS_AS(dm_test(a, zero, -1), ValidationError);
        CHECK_THROWS_AS(dm_test(a, zero, 4), ValidationError);
    }
}

TEST_CASE("dm test antisymmetry") {
    std::mt19937_64 eng(404);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> va(40), vb(40);
    for (std::size_t i = 0; i < va.size(); ++i) {
        va[i] = noise(eng);
        vb[i] = noise(eng) + 0.2;
    }
    auto a = series_of(va, "a");
    auto b = series_of(vb, "b");
    for (int lag : {0, 3}) {
        TestResult ab = dm_test(a, b, lag);
        TestResult ba = dm_test(b, a, lag);
        CHECK(ab.statistic == -ba.statistic);
        CHECK(ab.p_one_sided + ba.p_one_sided == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("information gain: identities and orientation") {
    auto obs = op(1, 3, {1.0, 0.0, 2.0});
    auto a = series_of({2.0, 1.0, 3.0}, "a");
    auto b = series_of({1.0, 1.5, 2.0}, "b");

    SUBCASE("identical series give zero") {
        auto g = information_gain(a, a, obs);
        CHECK(g.ig == 0.0);
        CHECK(g.igpe == 0.0);
        CHECK(g.event_count == 3.0);
    }
    SUBCASE("antisymmetry is exact") {
        auto ab = information_gain(a, b, obs);
        auto ba = information_gain(b, a, obs);
        CHECK(ab.ig == -ba.ig);
        CHECK(ab.igpe == -ba.igpe);
    }
    SUBCASE("igpe requires events") {
        auto no_events = op(1, 3, {0.0, 0.0, 0.0});
        CHECK_THROWS_AS(information_gain(a, b, no_events), DegenerateError);
    }
}

TEST_CASE("information gain equals the independent double-sum formula") {
    std::mt19937_64 eng(2718);
    std::uniform_real_distribution<double> xdist(0.05, 3.0);
    std::poisson_distribution<int> ydist(0.6);
    auto pois = ScoringFunction::poisson();
    for (int rep = 0; rep < 40; ++rep) {
        std::size_t C = 3, T = 4;
        std::vector<double> xj(C * T), xk(C * T), y(C * T);
        for (auto& v : xj) v = xdist(eng);
        for (auto& v : xk) v = xdist(eng);
        for (auto& v : y) v = static_cast<double>(ydist(eng));
        auto fj = fp(C, T, xj, "j");
        auto fk = fp(C, T, xk, "k");
        auto obs = op(C, T, y);
        auto g = information_gain(daily_scores(fj, obs, pois), daily_scores(fk, obs, pois), obs);
        CHECK(g.ig == doctest::Approx(ig_double_sum(fj, fk, obs)).epsilon(1e-10));
    }
}

TEST_CASE("table-3-style consistency relations on published values") {
    // Reported FCM row: score difference 0.08407, IG 463.572,
    // IGPE 0.253, with T = 5514 and N_T = 1834.
    CHECK(std::fabs(5514.0 * 0.08407 - 463.572) < 0.5);
    CHECK(std::fabs(463.572 / 1834.0 - 0.253) < 0.5);
}

TEST_CASE("csep t-test: hand instance with precomputed oracle") {
    // C=1, T=2, y=(1,1), x_j=(e,e), x_k=(1,e^2): Delta=(1,-1), N_T=2,
    // s^2 = 2/(2-1) - 0 = 2. Model j scores e-1 daily, model k
    // (1 + e^2 - 2)/2, so IG = T(S_j - S_k) = -(e-1)^2 and
    // Theta = -(e-1)^2/2; p is the matching 1-dof Student-t tail.
    const double e1 = std::exp(1.0);
    auto fa = fp(1, 2, {e1, e1}, "j");
    auto fb = fp(1, 2, {1.0, e1 * e1}, "k");
    auto obs = op(1, 2, {1.0, 1.0});
    TestResult r = csep_t_test(fa, fb, obs);
    CHECK(r.lag_or_dof == 1);
    CHECK(r.variance_estimate == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.statistic == doctest::Approx(-1.4762462210062799).epsilon(1e-13));
    CHECK(r.p_one_sided == doctest::Approx(0.81048073158540479).epsilon(1e-12));
}

TEST_CASE("csep t-test error paths") {
    auto obs = op(1, 2, {1.0, 1.0});
    SUBCASE("identical panels have zero variance") {
        auto f = fp(1, 2, {1.0, 2.0});
        try {
            csep_t_test(f, f, obs);
            FAIL("expected DegenerateError");
        } catch (const DegenerateError& e) {
            CHECK(e.code == "zero_variance");
        }
    }
    SUBCASE("zero forecast at an event cell") {
        CHECK_THROWS_AS(
            csep_t_test(fp(1, 2, {0.0, 1.0}, "a"), fp(1, 2, {1.0, 1.0}, "b"), obs),
            ValidationError);
    }
    SUBCASE("needs at least two events") {
        CHECK_THROWS_AS(csep_t_test(fp(1, 2, {1.0, 2.0}, "a"), fp(1, 2, {2.0, 1.0}, "b"),
                                    op(1, 2, {1.0, 0.0})),
                        DegenerateError);
    }
}

TEST_CASE("dm and t statistics rank models the same way") {
    std::mt19937_64 eng(55);
    std::uniform_real_distribution<double> xdist(0.1, 2.0);
    std::poisson_distribution<int> ydist(1.0);
    auto pois = ScoringFunction::poisson();
    int checked = 0;
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t C = 4, T = 12;
        std::vector<double> xj(C * T), xk(C * T), y(C * T);
        for (auto& v : xj) v = xdist(eng);
        for (auto& v : xk) v = xdist(eng);
        for (auto& v : y) v = static_cast<double>(ydist(eng));
        auto fj = fp(C, T, xj, "j");
        auto fk = fp(C, T, xk, "k");
        auto obs = op(C, T, y);
        try {
            TestResult dm = dm_test(daily_scores(fj, obs, pois), daily_scores(fk, obs, pois), 0);
            TestResult tt = csep_t_test(fj, fk, obs);
            if (dm.statistic != 0.0 && tt.statistic != 0.0) {
                CHECK(std::signbit(dm.statistic) == std::signbit(tt.statistic));
                ++checked;
            }
        } catch (const DegenerateError&) {
        }
    }
    CHECK(checked > 30);
}

TEST_CASE("weekday subsampling") {
    // 2005-04-18 was a Monday; 14 daily columns contain two Mondays.
    TimeIndex time(parse_date("2005-04-16"), 14, 7);
    auto idx = weekday_indices(time, 0);
    CHECK(idx == std::vector<int>{2, 9});
    CHECK_THROWS_AS(weekday_indices(time, 7), ValidationError);
    CHECK_THROWS_AS(weekday_indices(time, -1), ValidationError);

    SUBCASE("subsampling commutes with daily scoring") {
        std::mt19937_64 eng(8);
        std::uniform_real_distribution<double> xdist(0.05, 2.0);
        std::poisson_distribution<int> ydist(0.5);
        std::size_t C = 3;
        std::vector<double> x(C * 14), y(C * 14);
        for (auto& v : x) v = xdist(eng);
        for (auto& v : y) v = static_cast<double>(ydist(eng));
        auto f = fp(C, 14, x);
        auto obs = op(C, 14, y);
        auto pois = ScoringFunction::poisson();
        auto scored_then_sub = subsample_weekly(daily_scores(f, obs, pois), time, 0);
        auto sub_then_scored = daily_scores(subsample_weekly(f, time, 0),
                                            subsample_weekly(obs, time, 0), pois);
        CHECK(scored_then_sub.values == sub_then_scored.values);
    }
}
