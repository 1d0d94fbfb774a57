#include "selfish/chain_sim.hpp"

#include <cmath>

namespace selfish {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

RelativeRevenue SimResult::relative() const {
    RewardRates r;
    r.r1 = static_cast<double>(credited[0]);
    r.r2 = static_cast<double>(credited[1]);
    r.rh = static_cast<double>(credited[2]);
    return relative_revenue(r);
}

double SimResult::mean_round_main_blocks() const {
    return rounds ? static_cast<double>(mainChainLength) / static_cast<double>(rounds) : 0.0;
}

double SimResult::mean_round_mined_blocks() const {
    return rounds ? static_cast<double>(totalBlocks) / static_cast<double>(rounds) : 0.0;
}

double SimResult::main_chain_yield() const {
    return totalBlocks ? static_cast<double>(mainChainLength) / static_cast<double>(totalBlocks)
                       : 0.0;
}

double SimResult::relative_stderr(MinerId m) const {
    std::vector<double> shares;
    for (const auto& b : batchCredited) {
        const auto total = b[0] + b[1] + b[2];
        if (total) shares.push_back(static_cast<double>(b[index_of(m)]) / static_cast<double>(total));
    }
    if (shares.size() < 2) return 0.0;
    double mean = 0.0;
    for (double s : shares) mean += s;
    mean /= static_cast<double>(shares.size());
    double var = 0.0;
    for (double s : shares) var += (s - mean) * (s - mean);
    var /= static_cast<double>(shares.size() - 1);
    return std::sqrt(var / static_cast<double>(shares.size()));
}

SimResult& SimResult::operator+=(const SimResult& other) {
    for (std::size_t i = 0; i < 3; ++i) {
        credited[i] += other.credited[i];
        orphaned[i] += other.orphaned[i];
        mined[i] += other.mined[i];
    }
    rounds += other.rounds;
    mainChainLength += other.mainChainLength;
    totalBlocks += other.totalBlocks;
    batchCredited.insert(batchCredited.end(), other.batchCredited.begin(),
                         other.batchCredited.end());
    return *this;
}

MinerId sample_winner(const HashrateProfile& h, Rng& rng) {
    const double u = rng.uniform();
    if (u < h.alpha1) return MinerId::Alice;
    if (u < h.alpha1 + h.alpha2) return MinerId::Bob;
    return MinerId::Henry;
}

Move resolve_tie(const MoveOptions& options, const TieBreakParams& tie, Rng& rng) {
    if (options.count == 1) return options.items[0].move;
    double total = 0.0;
    for (const auto& o : options.view()) total += weight_value(o.weight, tie);
    double u = rng.uniform() * total;
    for (const auto& o : options.view()) {
        const double w = weight_value(o.weight, tie);
        if (u < w) return o.move;
        u -= w;
    }
    for (int i = options.count - 1; i >= 0; --i) {
        if (weight_value(options.items[i].weight, tie) > 0.0) return options.items[i].move;
    }
    throw Error(ErrorCode::InconsistentState, "tie options carry no weight");
}

StepEvents step(World& world, MinerId winner, Rng& rng, const Scenario& scenario) {
    const Move move = resolve_tie(world.options(winner), scenario.tie, rng);
    return world.apply(move, scenario.protocol);
}

namespace {

void record(SimResult& r, Tally& batch, const StepEvents& ev) {
    for (std::size_t i = 0; i < 3; ++i) {
        r.credited[i] += ev.credited[i];
        r.orphaned[i] += ev.orphaned[i];
        batch[i] += ev.credited[i];
    }
    r.mainChainLength += ev.total_credited();
    if (ev.round_closed) ++r.rounds;
}

}  // namespace

SimResult run(const SimConfig& config) {
    if (config.totalBlocks < 1) throw Error(ErrorCode::InvalidParameter, "totalBlocks >= 1");
    if (config.batches < 1) throw Error(ErrorCode::InvalidParameter, "batches >= 1");
    const Scenario& s = config.scenario;
    Rng rng(config.seed, config.stream);
    World world;
    SimResult result;
    result.totalBlocks = config.totalBlocks;

    const auto batches = static_cast<std::uint64_t>(config.batches);
    result.batchCredited.assign(batches, Tally{});
    std::uint64_t batch = 0;
    std::uint64_t next_boundary = config.totalBlocks / batches;

    for (std::uint64_t i = 0; i < config.totalBlocks; ++i) {
        while (i >= next_boundary && batch + 1 < batches) {
            ++batch;
            next_boundary = config.totalBlocks * (batch + 1) / batches;
        }
        const MinerId winner = sample_winner(s.hashrate, rng);
        ++result.mined[index_of(winner)];
        record(result, result.batchCredited[batch], step(world, winner, rng, s));
    }
    const bool pending = !world.at_round_start();
    StepEvents tail = world.flush();
    if (!world.at_round_start()) throw Error(ErrorCode::InconsistentState, "flush left pending blocks");
    tail.round_closed = pending;
    record(result, result.batchCredited[batch], tail);
    return result;
}

}  // namespace selfish
