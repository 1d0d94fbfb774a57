// Markov chain over canonical world states, generated by exploring every
// placement the rule engine allows from the round-start state.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "selfish/analytic.hpp"
#include "selfish/model.hpp"
#include "selfish/rules.hpp"

namespace selfish {

inline constexpr std::size_t kDefaultStateBound = 400'000;

struct ChainEdge {
    std::uint32_t target = 0;
    double prob = 0.0;
    std::array<std::uint16_t, 3> reward{};  // blocks credited to Alice, Bob, Henry
};

struct ChainState {
    std::string key;
    StateSummary summary;
};

struct TransitionSystem {
    int nCap = 0;
    std::vector<ChainState> states;               // index 0 is the round-start state
    std::vector<std::vector<ChainEdge>> edges;    // outgoing, per state

    std::size_t size() const { return states.size(); }
    std::size_t edge_count() const;
};

struct StationaryDistribution {
    std::vector<double> pi;
    double rootProbability = 0.0;
    double residual = 0.0;  // max |pi P - pi|
};

// The symbolic structure is built once per (nCap, reorg limit) and cached;
// the scenario only supplies the edge probabilities. Edges with zero
// probability and states they alone reach are dropped.
// Throws StateExplosion above max_states.
TransitionSystem build_chain(const Scenario& scenario, std::size_t max_states = kDefaultStateBound);

// Dense LU up to kDenseLimit states, sparse LU above. Throws SingularSystem.
inline constexpr std::size_t kDenseLimit = 2000;
StationaryDistribution solve_stationary(const TransitionSystem& ts);

// Expected credited blocks per step divided by the root probability.
RewardRates reward_rates_from_chain(const TransitionSystem& ts, const StationaryDistribution& pi);

// "state successor probability r1 r2 rh" per line, states by index; the
// state table follows as "# index key privA privB public tie".
void write_edge_list(std::ostream& out, const TransitionSystem& ts);

}  // namespace selfish
