#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "selfish/analytic.hpp"
#include "selfish/markov.hpp"

using namespace selfish;
using doctest::Approx;

namespace {

RewardRates chain_rates(const Scenario& s) {
    const auto ts = build_chain(s);
    return reward_rates_from_chain(ts, solve_stationary(ts));
}

Scenario with_cap(Scenario s, int n) {
    s.protocol.nCap = n;
    return s;
}

// The N=2 chain written out by hand from the protocol rules: states
// 000, 100, 010, 110 and the three tie states. Every excursion from 000
// ends back at 000, so rates per visit are expected rewards per excursion.
struct HandOracle {
    double p000;
    std::array<double, 3> reward;
};

HandOracle hand_n2(const HashrateProfile& h, const TieBreakParams& t) {
    const double a = h.alpha1, b = h.alpha2, c = h.alphaH;
    const double g1 = t.gamma1, g2 = t.gamma2, th1 = t.theta1, th2 = t.theta2;
    using V = std::array<double, 3>;
    auto add = [](V x, V y, double w) {
        for (int i = 0; i < 3; ++i) x[i] += w * y[i];
        return x;
    };
    // Each tie state resolves in one step.
    const V tieA = add(add(add(add(add(V{}, {2, 0, 0}, a), {1, 1, 0}, b * g1), {0, 1, 1}, b * (1 - g1)),
                           {1, 0, 1}, c * g1),
                       {0, 0, 2}, c * (1 - g1));
    const V tieB = add(add(add(add(add(V{}, {0, 2, 0}, b), {1, 1, 0}, a * g2), {1, 0, 1}, a * (1 - g2)),
                           {0, 1, 1}, c * g2),
                       {0, 0, 2}, c * (1 - g2));
    const V tie3 = add(add(add(add(add(V{}, {2, 0, 0}, a), {0, 2, 0}, b), {1, 0, 1}, c * th1), {0, 1, 1}, c * th2),
                       {0, 0, 2}, c * (1 - th1 - th2));
    // 110: a -> A+2, b -> B+2, c -> three-way tie (then one more step).
    const V s110 = add(add(add(V{}, {2, 0, 0}, a), {0, 2, 0}, b), tie3, c);
    const double len110 = 1 + c;
    // 100: a -> A+2, b -> 110, c -> Alice tie.
    const V s100 = add(add(add(V{}, {2, 0, 0}, a), s110, b), tieA, c);
    const double len100 = 1 + b * len110 + c;
    const V s010 = add(add(add(V{}, {0, 2, 0}, b), s110, a), tieB, c);
    const double len010 = 1 + a * len110 + c;
    const V cycle = add(add(add(V{}, {0, 0, 1}, c), s100, a), s010, b);
    const double length = 1 + a * len100 + b * len010;
    return {1.0 / length, cycle};
}

}  // namespace

TEST_CASE("N=2 chain equals the hand-written oracle") {
    for (auto [h, t] : {std::pair{HashrateProfile{0.25, 0.25, 0.5}, TieBreakParams{}},
                        std::pair{HashrateProfile{0.1, 0.2, 0.7}, TieBreakParams{0.3, 0.6, 0.15, 0.25}},
                        std::pair{HashrateProfile{0.3, 0.05, 0.65}, TieBreakParams{0.9, 0.0, 0.5, 0.5}}}) {
        const Scenario s{h, t, ProtocolParams{2}};
        const auto ts = build_chain(s);
        CHECK(ts.size() == 7);
        const auto pi = solve_stationary(ts);
        const auto r = reward_rates_from_chain(ts, pi);
        const auto o = hand_n2(h, t);
        CHECK(pi.rootProbability == Approx(o.p000).epsilon(1e-12));
        CHECK(r.r1 == Approx(o.reward[0]).epsilon(1e-12));
        CHECK(r.r2 == Approx(o.reward[1]).epsilon(1e-12));
        CHECK(r.rh == Approx(o.reward[2]).epsilon(1e-12));
    }
}

TEST_CASE("N=2 chain reproduces the quarter-split example") {
    const auto r = chain_rates(with_cap(make_scenario(0.25, 0.25), 2));
    CHECK(r.r1 == Approx(0.369792).epsilon(1e-6));
    CHECK(r.rh == Approx(0.760417).epsilon(1e-6));
    CHECK(std::abs(r.r1 - 71.0 / 192.0) < 1e-9);
    CHECK(std::abs(*r.p000 - 1.0 / 1.9375) < 1e-9);
}

TEST_CASE("chain equals the closed forms on a parameter grid") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const double a1 = 0.01 + 0.32 * u(gen);
        const double a2 = 0.32 * u(gen);
        if (1 - a1 - a2 <= std::max(a1, a2)) continue;
        const TieBreakParams t{0.05 + 0.9 * u(gen), 0.05 + 0.9 * u(gen), 0.5 * u(gen), 0.5 * u(gen)};
        const Scenario s = make_scenario(a1, a2, t);
        for (int n : {2, 4}) {
            const auto chain = relative_revenue(chain_rates(with_cap(s, n)));
            const auto closed = relative_revenue(n == 2 ? reward_rates_n2(s.hashrate, t) : reward_rates_n4(s.hashrate, t));
            CHECK(std::abs(chain.rA - closed.rA) < 1e-9);
            CHECK(std::abs(chain.rB - closed.rB) < 1e-9);
            CHECK(std::abs(chain.rH - closed.rH) < 1e-9);
        }
    }
}

TEST_CASE("honest-only chain is one self-loop") {
    const Scenario s{{0, 0, 1}, {}, {}};
    const auto ts = build_chain(s);
    REQUIRE(ts.size() == 1);
    REQUIRE(ts.edges[0].size() == 1);
    CHECK(ts.edges[0][0].target == 0);
    CHECK(ts.edges[0][0].reward == std::array<std::uint16_t, 3>{0, 0, 1});
    const auto pi = solve_stationary(ts);
    CHECK(pi.pi[0] == Approx(1.0));
    const auto r = reward_rates_from_chain(ts, pi);
    CHECK(r.r1 == 0.0);
    CHECK(r.rh == Approx(1.0));
}

TEST_CASE("two-state symmetric chain") {
    TransitionSystem ts;
    ts.states.resize(2);
    ts.edges = {{{0, 0.5, {}}, {1, 0.5, {}}}, {{0, 0.5, {}}, {1, 0.5, {}}}};
    const auto pi = solve_stationary(ts);
    CHECK(pi.pi[0] == Approx(0.5));
    CHECK(pi.pi[1] == Approx(0.5));
}

TEST_CASE("disconnected chain is singular") {
    TransitionSystem ts;
    ts.states.resize(2);
    ts.edges = {{{0, 1.0, {}}}, {{1, 1.0, {}}}};
    CHECK_THROWS_AS(solve_stationary(ts), Error);
}

TEST_CASE("structural invariants for N = 2..6") {
    const Scenario base = make_scenario(0.2, 0.15, {0.4, 0.7, 0.3, 0.3});
    for (int n = 2; n <= 6; ++n) {
        const auto ts = build_chain(with_cap(base, n));
        CHECK(ts.states[0].summary.publicHeight == 0);
        std::vector<std::vector<std::uint32_t>> incoming(ts.size());
        for (std::size_t s = 0; s < ts.size(); ++s) {
            double sum = 0.0;
            for (const auto& e : ts.edges[s]) {
                sum += e.prob;
                CHECK(e.reward[0] + e.reward[1] + e.reward[2] <= 2 * n);
                incoming[e.target].push_back(static_cast<std::uint32_t>(s));
            }
            CHECK(sum == Approx(1.0).epsilon(1e-12));
        }
        // Root reachable from every state: reverse search from the root.
        std::vector<bool> seen(ts.size(), false);
        std::vector<std::uint32_t> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            const auto s = stack.back();
            stack.pop_back();
            for (auto p : incoming[s]) {
                if (!seen[p]) {
                    seen[p] = true;
                    stack.push_back(p);
                }
            }
        }
        CHECK(std::count(seen.begin(), seen.end(), false) == 0);
        const auto pi = solve_stationary(ts);
        CHECK(pi.residual <= 1e-10);
    }
}

TEST_CASE("sparse path agrees with the dense path") {
    const Scenario s = with_cap(make_scenario(0.25, 0.25), 7);
    const auto ts = build_chain(s);
    CHECK(ts.size() > kDenseLimit);
    const auto pi = solve_stationary(ts);
    double sum = 0.0;
    for (double p : pi.pi) sum += p;
    CHECK(sum == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("N=4 chain at the symmetric quarter split") {
    const auto s = with_cap(make_scenario(0.25, 0.25), 4);
    const auto r = chain_rates(s);
    const auto closed = reward_rates_n4(s.hashrate, s.tie);
    CHECK(r.r1 == Approx(closed.r1).epsilon(1e-10));
    CHECK(r.r2 == Approx(r.r1).epsilon(1e-10));
    CHECK(r.rh == Approx(closed.rh).epsilon(1e-10));
}

TEST_CASE("single attacker chain has no Bob states") {
    const auto ts = build_chain(with_cap(make_scenario(0.3, 0.0), 4));
    for (const auto& st : ts.states) CHECK(st.summary.bobPrivate == 0);
}

TEST_CASE("state bound raises StateExplosion") {
    try {
        build_chain(with_cap(make_scenario(0.2, 0.2), 5), 10);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StateExplosion);
    }
}

TEST_CASE("edge list export") {
    const auto ts = build_chain(with_cap(make_scenario(0.1, 0.2), 2));
    std::ostringstream out;
    write_edge_list(out, ts);
    const auto text = out.str();
    CHECK(text.rfind("0 ", 0) == 0);
    CHECK(text.find("# 0 ") != std::string::npos);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == ts.edge_count() + ts.size());
}
