#include <doctest.h>

#include <cmath>

#include "selfish/threshold.hpp"

using namespace selfish;
using doctest::Approx;

namespace {

ThresholdQuery symmetric(Evaluator ev) {
    ThresholdQuery q;
    q.base = make_scenario(0.1, 0.1);
    q.evaluator = ev;
    return q;
}

ErrorCode code_of(const ThresholdQuery& q) {
    try {
        profitable_threshold(q);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InconsistentState;
}

}  // namespace

TEST_CASE("symmetric thresholds from the closed forms") {
    const auto n2 = profitable_threshold(symmetric(AnalyticN2{}));
    CHECK(n2.threshold == Approx(0.2664).epsilon(0.003));
    const auto n4 = profitable_threshold(symmetric(AnalyticN4{}));
    CHECK(std::abs(n4.threshold - 0.2148) < 0.003);
    CHECK(n4.evaluations > 0);
}

TEST_CASE("markov thresholds match the closed forms") {
    const double tol = 1e-5;
    auto m2 = symmetric(MarkovEval{2});
    auto a2 = symmetric(AnalyticN2{});
    CHECK(std::abs(profitable_threshold(m2).threshold - profitable_threshold(a2).threshold) <= 2 * tol);
    auto m4 = symmetric(MarkovEval{4});
    auto a4 = symmetric(AnalyticN4{});
    CHECK(std::abs(profitable_threshold(m4).threshold - profitable_threshold(a4).threshold) <= 2 * tol);
}

TEST_CASE("threshold does not increase with the cap") {
    double prev = 1.0;
    for (int n = 2; n <= 4; ++n) {
        const double t = profitable_threshold(symmetric(MarkovEval{n})).threshold;
        CHECK(t <= prev + 1e-5);
        prev = t;
    }
}

TEST_CASE("margin changes sign across the threshold") {
    auto q = symmetric(AnalyticN4{});
    const double t = profitable_threshold(q).threshold;
    CHECK(profit_margin(q, t - 1e-3) < 0.0);
    CHECK(profit_margin(q, t + 1e-3) > 0.0);
    CHECK(std::abs(profit_margin(q, t)) < 1e-4);
}

TEST_CASE("threshold scenario gives Henry the rest") {
    ThresholdQuery q;
    q.base = make_scenario(0.2, 0.1);
    q.target = ThresholdTarget::Bob;
    const auto s = threshold_scenario(q, 0.3);
    CHECK(s.hashrate.alpha1 == 0.2);
    CHECK(s.hashrate.alpha2 == 0.3);
    CHECK(s.hashrate.alphaH == Approx(0.5));
    q.target = ThresholdTarget::Symmetric;
    CHECK(threshold_scenario(q, 0.3).hashrate.alpha1 == 0.3);
}

TEST_CASE("no sign change on the interval") {
    auto q = symmetric(AnalyticN2{});
    q.lo = 0.01;
    q.hi = 0.2;
    CHECK(code_of(q) == ErrorCode::NoSignChange);
}

TEST_CASE("bad intervals and tolerances") {
    auto q = symmetric(AnalyticN2{});
    q.lo = 0.3;
    q.hi = 0.2;
    CHECK(code_of(q) == ErrorCode::InvalidParameter);
    q = symmetric(AnalyticN2{});
    q.hi = 0.6;
    CHECK(code_of(q) == ErrorCode::InvalidParameter);
    q = symmetric(AnalyticN2{});
    q.tolerance = 1e-7;
    CHECK(code_of(q) == ErrorCode::InvalidParameter);
}

TEST_CASE("honest majority is flagged over the scanned interval") {
    auto q = symmetric(AnalyticN2{});
    CHECK(profitable_threshold(q).majorityWarning);
    q.hi = 1.0 / 3.0;
    CHECK_FALSE(profitable_threshold(q).majorityWarning);
    ThresholdQuery single;
    single.base = make_scenario(0.1, 0.3);
    single.target = ThresholdTarget::Alice;
    single.evaluator = MarkovEval{4};
    single.hi = 0.45;
    const auto s = profitable_threshold(single);
    CHECK(s.majorityWarning);
    CHECK(s.threshold < 0.35);
}

TEST_CASE("single attacker at N=4") {
    ThresholdQuery q;
    q.base = make_scenario(0.1, 0.0);
    q.target = ThresholdTarget::Alice;
    q.evaluator = MarkovEval{4};
    const auto r = profitable_threshold(q);
    CHECK(r.threshold > profitable_threshold(symmetric(MarkovEval{4})).threshold);
    CHECK(r.threshold < 0.3);
}

TEST_CASE("curve endpoint at alpha1 = 0 is the single-attacker threshold") {
    const auto base = make_scenario(0.1, 0.1);
    const auto curve = threshold_curve({0.0, 0.1, 0.2}, base, AnalyticN4{}, 2);
    REQUIRE(curve.points.size() == 3);
    REQUIRE(curve.points[0].threshold);
    ThresholdQuery q;
    q.base = make_scenario(0.0, 0.1);
    q.target = ThresholdTarget::Bob;
    q.evaluator = AnalyticN4{};
    CHECK(*curve.points[0].threshold == Approx(profitable_threshold(q).threshold).epsilon(1e-4));
    REQUIRE(curve.argmin);
    for (const auto& p : curve.points) {
        REQUIRE(p.threshold);
        CHECK(*p.threshold >= *curve.points[*curve.argmin].threshold);
    }
}

TEST_CASE("curve records per-point failures") {
    const auto curve = threshold_curve({0.1, 0.6}, make_scenario(0.1, 0.1), AnalyticN2{}, 1);
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[0].threshold);
    CHECK_FALSE(curve.points[1].threshold);
    CHECK_FALSE(curve.points[1].error.empty());
    CHECK(curve.argmin == 0);
}

TEST_CASE("convergence study over small caps") {
    const auto study = convergence_study(ConvergenceMode::Symmetric, make_scenario(0.1, 0.1), 2, 4, 2);
    REQUIRE(study.rows.size() == 3);
    CHECK(study.rows[0].n == 2);
    for (const auto& r : study.rows) CHECK(r.threshold);
    CHECK(*study.rows[2].threshold < *study.rows[0].threshold);
    CHECK_THROWS_AS(convergence_study(ConvergenceMode::Symmetric, make_scenario(0.1, 0.1), 1, 4), Error);
}

TEST_CASE("monte carlo evaluator lands near the markov threshold") {
    auto q = symmetric(MonteCarloEval{2, 200'000, 5});
    q.tolerance = 1e-3;
    q.prescan = 8;
    q.lo = 0.2;
    q.hi = 0.33;
    const auto r = profitable_threshold(q);
    CHECK(std::abs(r.threshold - 0.2664) < 0.02);
}
