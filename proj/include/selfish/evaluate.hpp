// One interface over the four ways of getting steady-state revenue.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "selfish/analytic.hpp"
#include "selfish/model.hpp"

namespace selfish {

struct AnalyticN2 {};
struct AnalyticN4 {};
struct MarkovEval {
    int nCap = 4;
};
struct MonteCarloEval {
    int nCap = 4;
    std::uint64_t blocks = 1'000'000;
    std::uint64_t seed = 1;
};

using Evaluator = std::variant<AnalyticN2, AnalyticN4, MarkovEval, MonteCarloEval>;

// "analytic-n2", "analytic-n4", "markov", "monte-carlo" (aliases "mc", "sim").
// n, blocks and seed fill the markov and monte-carlo variants.
Evaluator parse_evaluator(std::string_view name, int n, std::uint64_t blocks, std::uint64_t seed);
std::string describe(const Evaluator& e);
int cap_of(const Evaluator& e);

struct Evaluation {
    RewardRates rates;
    RelativeRevenue revenue;
    double yield = 0.0;           // main-chain blocks per mined block
    std::array<double, 3> stdError{};  // Monte Carlo only
    std::size_t states = 0;        // Markov chain size when one was built
};

// The scenario's nCap is replaced by the evaluator's. The analytic N=4
// formula has no normalization constant, so its yield comes from the N=4
// chain.
Evaluation evaluate(const Scenario& scenario, const Evaluator& evaluator);

}  // namespace selfish
