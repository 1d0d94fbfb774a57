#include "selfish/evaluate.hpp"

#include "selfish/chain_sim.hpp"
#include "selfish/markov.hpp"

namespace selfish {

Evaluator parse_evaluator(std::string_view name, int n, std::uint64_t blocks, std::uint64_t seed) {
    if (name == "analytic-n2") return AnalyticN2{};
    if (name == "analytic-n4") return AnalyticN4{};
    if (name == "markov") return MarkovEval{n};
    if (name == "monte-carlo" || name == "mc" || name == "sim") return MonteCarloEval{n, blocks, seed};
    if (name == "analytic") {
        if (n == 2) return AnalyticN2{};
        if (n == 4) return AnalyticN4{};
        throw Error(ErrorCode::InvalidParameter, "closed forms exist for n = 2 and n = 4 only");
    }
    throw Error(ErrorCode::InvalidParameter, "unknown evaluator '" + std::string(name) + "'");
}

std::string describe(const Evaluator& e) {
    struct {
        std::string operator()(AnalyticN2) const { return "analytic-n2"; }
        std::string operator()(AnalyticN4) const { return "analytic-n4"; }
        std::string operator()(const MarkovEval& m) const { return "markov(n=" + std::to_string(m.nCap) + ")"; }
        std::string operator()(const MonteCarloEval& m) const {
            return "monte-carlo(n=" + std::to_string(m.nCap) + ", blocks=" + std::to_string(m.blocks) +
                   ", seed=" + std::to_string(m.seed) + ")";
        }
    } visitor;
    return std::visit(visitor, e);
}

int cap_of(const Evaluator& e) {
    struct {
        int operator()(AnalyticN2) const { return 2; }
        int operator()(AnalyticN4) const { return 4; }
        int operator()(const MarkovEval& m) const { return m.nCap; }
        int operator()(const MonteCarloEval& m) const { return m.nCap; }
    } visitor;
    return std::visit(visitor, e);
}

namespace {

Evaluation from_chain(const Scenario& s) {
    const auto ts = build_chain(s);
    const auto pi = solve_stationary(ts);
    Evaluation out;
    out.rates = reward_rates_from_chain(ts, pi);
    out.revenue = relative_revenue(out.rates);
    out.yield = out.rates.total() * pi.rootProbability;
    out.states = ts.size();
    return out;
}

}  // namespace

Evaluation evaluate(const Scenario& scenario, const Evaluator& evaluator) {
    Scenario s = scenario;
    s.protocol.nCap = cap_of(evaluator);

    if (std::holds_alternative<AnalyticN2>(evaluator)) {
        Evaluation out;
        out.rates = reward_rates_n2(s.hashrate, s.tie);
        out.revenue = relative_revenue(out.rates);
        out.yield = out.rates.total() * *out.rates.p000;
        return out;
    }
    if (std::holds_alternative<AnalyticN4>(evaluator)) {
        Evaluation out;
        out.rates = reward_rates_n4(s.hashrate, s.tie);
        out.revenue = relative_revenue(out.rates);
        const auto chain = from_chain(s);
        out.yield = out.rates.total() * *chain.rates.p000;
        out.states = chain.states;
        return out;
    }
    if (std::holds_alternative<MarkovEval>(evaluator)) return from_chain(s);

    const auto& mc = std::get<MonteCarloEval>(evaluator);
    SimConfig config{s, mc.blocks, mc.seed};
    const SimResult r = run(config);
    Evaluation out;
    out.rates.r1 = static_cast<double>(r.credited[0]);
    out.rates.r2 = static_cast<double>(r.credited[1]);
    out.rates.rh = static_cast<double>(r.credited[2]);
    if (r.rounds) {
        const double rounds = static_cast<double>(r.rounds);
        out.rates.r1 /= rounds;
        out.rates.r2 /= rounds;
        out.rates.rh /= rounds;
    }
    out.revenue = r.relative();
    out.yield = r.main_chain_yield();
    for (MinerId m : kAllMiners) out.stdError[index_of(m)] = r.relative_stderr(m);
    return out;
}

}  // namespace selfish
