// Block-level Monte Carlo simulation of the two-attacker protocol.

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "selfish/analytic.hpp"
#include "selfish/model.hpp"
#include "selfish/rules.hpp"

namespace selfish {

// mt19937_64 seeded from (seed, stream); each stream is an independent
// replication.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

struct SimConfig {
    Scenario scenario;
    std::uint64_t totalBlocks = 1'000'000;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    int batches = 100;  // for the batch-means error estimate
};

using Tally = std::array<std::uint64_t, 3>;

struct SimResult {
    Tally credited{};
    Tally orphaned{};
    Tally mined{};
    std::uint64_t rounds = 0;
    std::uint64_t mainChainLength = 0;
    std::uint64_t totalBlocks = 0;
    std::vector<Tally> batchCredited;

    RelativeRevenue relative() const;
    // The per-round averages n and m.
    double mean_round_main_blocks() const;
    double mean_round_mined_blocks() const;
    // Fraction of mined blocks that end on the main chain.
    double main_chain_yield() const;
    // Standard error of the miner's relative revenue from batch means.
    double relative_stderr(MinerId m) const;

    SimResult& operator+=(const SimResult& other);
    bool operator==(const SimResult&) const = default;
};

MinerId sample_winner(const HashrateProfile& h, Rng& rng);

// Picks one of the weighted placements (tie resolution when there are several).
Move resolve_tie(const MoveOptions& options, const TieBreakParams& tie, Rng& rng);

// One mined block and all of its consequences.
StepEvents step(World& world, MinerId winner, Rng& rng, const Scenario& scenario);

SimResult run(const SimConfig& config);

}  // namespace selfish
