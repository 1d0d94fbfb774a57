#include "selfish/markov.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <unordered_map>

namespace selfish {

std::size_t TransitionSystem::edge_count() const {
    std::size_t n = 0;
    for (const auto& e : edges) n += e.size();
    return n;
}

namespace {

struct SymbolicEdge {
    std::uint32_t target;
    MinerId miner;
    ChoiceWeight weight;
    std::array<std::uint16_t, 3> reward;
};

struct Structure {
    std::vector<ChainState> states;
    std::vector<std::vector<SymbolicEdge>> edges;
};

std::shared_ptr<const Structure> explore(const ProtocolParams& protocol, std::size_t max_states) {
    auto out = std::make_shared<Structure>();
    std::unordered_map<std::string, std::uint32_t> index;
    std::deque<World> queue;

    auto intern = [&](const World& w) -> std::uint32_t {
        std::string key = w.canonical_key();
        auto [it, fresh] = index.try_emplace(std::move(key), static_cast<std::uint32_t>(out->states.size()));
        if (fresh) {
            if (out->states.size() >= max_states) {
                throw Error(ErrorCode::StateExplosion,
                            "more than " + std::to_string(max_states) + " states");
            }
            out->states.push_back({it->first, w.summary()});
            out->edges.emplace_back();
            queue.push_back(w);
        }
        return it->second;
    };

    intern(World{});
    for (std::uint32_t s = 0; !queue.empty(); ++s) {
        const World w = queue.front();
        queue.pop_front();
        std::vector<SymbolicEdge> edges;
        for (MinerId m : kAllMiners) {
            for (const auto& opt : w.options(m).view()) {
                World next = w;
                const StepEvents ev = next.apply(opt.move, protocol);
                const auto target = intern(next);
                edges.push_back({target, m, opt.weight, ev.credited});
            }
        }
        out->edges[s] = std::move(edges);
    }
    return out;
}

std::shared_ptr<const Structure> structure_for(const ProtocolParams& protocol,
                                               std::size_t max_states) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const Structure>> cache;
    const std::pair<int, int> key{protocol.nCap, protocol.reorg_limit()};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) {
            if (it->second->states.size() > max_states) {
                throw Error(ErrorCode::StateExplosion,
                            "more than " + std::to_string(max_states) + " states");
            }
            return it->second;
        }
    }
    auto built = explore(protocol, max_states);
    std::lock_guard lock(mutex);
    return cache.try_emplace(key, std::move(built)).first->second;
}

}  // namespace

TransitionSystem build_chain(const Scenario& scenario, std::size_t max_states) {
    const auto structure = structure_for(scenario.protocol, max_states);
    const auto n = structure->states.size();

    auto probability = [&](const SymbolicEdge& e) {
        return scenario.hashrate.of(e.miner) * weight_value(e.weight, scenario.tie);
    };

    std::vector<std::int64_t> remap(n, -1);
    std::vector<std::uint32_t> order;
    remap[0] = 0;
    order.push_back(0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (const auto& e : structure->edges[order[i]]) {
            if (probability(e) > 0.0 && remap[e.target] < 0) {
                remap[e.target] = static_cast<std::int64_t>(order.size());
                order.push_back(e.target);
            }
        }
    }

    TransitionSystem ts;
    ts.nCap = scenario.protocol.nCap;
    ts.states.reserve(order.size());
    ts.edges.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        ts.states.push_back(structure->states[order[i]]);
        auto& out = ts.edges[i];
        for (const auto& e : structure->edges[order[i]]) {
            const double p = probability(e);
            if (!(p > 0.0)) continue;
            const auto target = static_cast<std::uint32_t>(remap[e.target]);
            auto same = std::find_if(out.begin(), out.end(), [&](const ChainEdge& c) {
                return c.target == target && c.reward == e.reward;
            });
            if (same != out.end()) {
                same->prob += p;
            } else {
                out.push_back({target, p, e.reward});
            }
        }
    }
    return ts;
}

StationaryDistribution solve_stationary(const TransitionSystem& ts) {
    const auto n = static_cast<Eigen::Index>(ts.size());
    if (n == 0) throw Error(ErrorCode::SingularSystem, "empty chain");

    // (P^T - I) pi = 0 with the last row replaced by sum(pi) = 1.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::VectorXd pi;

    if (ts.size() <= kDenseLimit) {
        Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(n, n);
        for (Eigen::Index s = 0; s < n; ++s) {
            for (const auto& e : ts.edges[s]) a(e.target, s) += e.prob;
        }
        a.row(n - 1).setOnes();
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
        if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::SingularSystem, "singular transition system");
        pi = lu.solve(rhs);
    } else {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(ts.edge_count() + 2 * ts.size());
        for (Eigen::Index s = 0; s < n; ++s) {
            if (s != n - 1) triplets.emplace_back(s, s, -1.0);
            for (const auto& e : ts.edges[s]) {
                if (static_cast<Eigen::Index>(e.target) != n - 1) {
                    triplets.emplace_back(e.target, s, e.prob);
                }
            }
            triplets.emplace_back(n - 1, s, 1.0);
        }
        Eigen::SparseMatrix<double> a(n, n);
        a.setFromTriplets(triplets.begin(), triplets.end());
        a.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success) {
            throw Error(ErrorCode::SingularSystem, "sparse factorization failed: " + lu.lastErrorMessage());
        }
        pi = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "sparse solve failed");
    }

    StationaryDistribution out;
    out.pi.assign(pi.data(), pi.data() + n);
    for (double& p : out.pi) {
        if (!std::isfinite(p) || p < -1e-9) throw Error(ErrorCode::SingularSystem, "invalid stationary vector");
        p = std::max(p, 0.0);
    }

    std::vector<double> flow(out.pi.size(), 0.0);
    double sum = 0.0;
    for (std::size_t s = 0; s < ts.size(); ++s) {
        sum += out.pi[s];
        for (const auto& e : ts.edges[s]) flow[e.target] += out.pi[s] * e.prob;
    }
    double residual = std::abs(sum - 1.0);
    for (std::size_t s = 0; s < ts.size(); ++s) residual = std::max(residual, std::abs(flow[s] - out.pi[s]));
    if (!(residual <= 1e-10)) {
        throw Error(ErrorCode::SingularSystem, "residual " + std::to_string(residual));
    }
    out.residual = residual;
    out.rootProbability = out.pi[0];
    if (!(out.rootProbability > 0.0)) throw Error(ErrorCode::SingularSystem, "root state has no mass");
    return out;
}

RewardRates reward_rates_from_chain(const TransitionSystem& ts, const StationaryDistribution& pi) {
    std::array<double, 3> acc{};
    for (std::size_t s = 0; s < ts.size(); ++s) {
        for (const auto& e : ts.edges[s]) {
            for (std::size_t i = 0; i < 3; ++i) acc[i] += pi.pi[s] * e.prob * e.reward[i];
        }
    }
    RewardRates r;
    r.r1 = acc[0] / pi.rootProbability;
    r.r2 = acc[1] / pi.rootProbability;
    r.rh = acc[2] / pi.rootProbability;
    r.p000 = pi.rootProbability;
    return r;
}

void write_edge_list(std::ostream& out, const TransitionSystem& ts) {
    const auto flags = out.flags();
    const auto precision = out.precision(17);
    for (std::size_t s = 0; s < ts.size(); ++s) {
        for (const auto& e : ts.edges[s]) {
            out << s << ' ' << e.target << ' ' << e.prob << ' ' << e.reward[0] << ' ' << e.reward[1]
                << ' ' << e.reward[2] << '\n';
        }
    }
    for (std::size_t s = 0; s < ts.size(); ++s) {
        const auto& st = ts.states[s];
        out << "# " << s << ' ' << (st.key.empty() ? "-" : st.key) << ' ' << st.summary.alicePrivate
            << ' ' << st.summary.bobPrivate << ' ' << st.summary.publicHeight << ' '
            << to_string(st.summary.tie) << '\n';
    }
    out.precision(precision);
    out.flags(flags);
}

}  // namespace selfish
