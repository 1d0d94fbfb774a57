#include "selfish/transient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace selfish {

GrowthSchedule GrowthSchedule::constant() { return {}; }

GrowthSchedule GrowthSchedule::geometric(double rate) {
    if (!std::isfinite(rate) || rate <= -1.0) {
        throw Error(ErrorCode::InvalidParameter, "growth rate must be > -1");
    }
    GrowthSchedule g;
    g.rate_ = rate;
    return g;
}

GrowthSchedule GrowthSchedule::multipliers(std::vector<double> values) {
    for (double v : values) {
        if (!std::isfinite(v) || v <= 0.0) throw Error(ErrorCode::InvalidParameter, "multipliers must be > 0");
    }
    GrowthSchedule g;
    g.values_ = std::move(values);
    return g;
}

GrowthSchedule GrowthSchedule::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidParameter, "cannot read growth file " + path.string());
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        ss.imbue(std::locale::classic());
        double v = 0.0;
        if (!(ss >> v)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw Error(ErrorCode::InvalidParameter,
                        path.string() + ":" + std::to_string(line_no) + ": not a number");
        }
        values.push_back(v);
    }
    if (values.empty()) throw Error(ErrorCode::InvalidParameter, "growth file is empty");
    return multipliers(std::move(values));
}

double GrowthSchedule::at(int epoch) const {
    if (epoch <= 0) return 1.0;
    if (!values_.empty()) {
        const auto i = std::min(static_cast<std::size_t>(epoch), values_.size()) - 1;
        return values_[i];
    }
    return std::pow(1.0 + rate_, epoch);
}

std::string GrowthSchedule::describe() const {
    if (!values_.empty()) return "multipliers(" + std::to_string(values_.size()) + ")";
    if (rate_ == 0.0) return "constant";
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "geometric(" << rate_ << ")";
    return out.str();
}

SteadyRates steady_round_rates(const Scenario& scenario, const Evaluator& evaluator) {
    const Evaluation e = evaluate(scenario, evaluator);
    return {e.yield, e.revenue};
}

EpochTrace simulate_epochs(const SteadyRates& rates, const ProtocolParams& protocol,
                           const GrowthSchedule& growth, int k) {
    if (k < 1) throw Error(ErrorCode::InvalidParameter, "epoch count must be >= 1");
    if (!(rates.n > 0.0 && rates.n <= 1.0 + 1e-12)) {
        throw Error(ErrorCode::InvalidParameter, "main-chain yield must lie in (0, 1]");
    }
    EpochTrace trace;
    trace.blocksPerEpoch = protocol.blocksPerEpoch;
    trace.epochs.reserve(static_cast<std::size_t>(k));
    const double bpe = protocol.blocksPerEpoch;

    double math = 1.0;
    for (int i = 1; i <= k; ++i) {
        if (i > 1) math *= bpe / trace.epochs.back().T;
        EpochRecord r;
        r.epoch = i;
        r.n = rates.n;
        r.mathTime = math;
        r.S = growth.at(i);
        r.t = math * growth.at(i - 1) / r.S;
        r.T = bpe * r.m * r.t / r.n;
        if (!std::isfinite(r.T) || r.T > 1e300 || r.T < 1e-300) {
            throw Error(ErrorCode::DivergentSchedule, "epoch " + std::to_string(i) + " length out of range");
        }
        trace.epochs.push_back(r);
    }
    return trace;
}

EpochTrace simulate_epochs(const Scenario& scenario, const Evaluator& evaluator,
                           const GrowthSchedule& growth, int k) {
    return simulate_epochs(steady_round_rates(scenario, evaluator), scenario.protocol, growth, k);
}

double absolute_revenue(const EpochTrace& trace, double share, std::size_t upto) {
    if (trace.epochs.empty()) throw Error(ErrorCode::InvalidParameter, "empty trace");
    const std::size_t k = upto == 0 ? trace.epochs.size() : std::min(upto, trace.epochs.size());
    double blocks = 0.0;
    double time = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        blocks += trace.blocksPerEpoch * share;
        time += trace.epochs[i].T;
    }
    return blocks / time;
}

ProfitableDelay profitable_delay(const Scenario& scenario, const Evaluator& evaluator,
                                 const GrowthSchedule& growth, int max_epochs) {
    const SteadyRates rates = steady_round_rates(scenario, evaluator);
    const double alpha1 = scenario.hashrate.alpha1;
    ProfitableDelay out;
    out.relative = rates.shares.rA;
    if (!(rates.shares.rA > alpha1)) {
        std::ostringstream msg;
        msg << "steady-state revenue " << rates.shares.rA << " does not exceed " << alpha1;
        throw Error(ErrorCode::NeverProfitable, msg.str());
    }

    const double bpe = scenario.protocol.blocksPerEpoch;
    double math = 1.0;
    double last_T = 0.0;
    double blocks = 0.0;
    double time = 0.0;
    for (int i = 1; i <= max_epochs; ++i) {
        if (i > 1) math *= bpe / last_T;
        const double t = math * growth.at(i - 1) / growth.at(i);
        last_T = bpe * t / rates.n;
        if (!std::isfinite(last_T) || last_T > 1e300 || last_T < 1e-300) {
            throw Error(ErrorCode::DivergentSchedule, "epoch " + std::to_string(i) + " length out of range");
        }
        blocks += bpe * rates.shares.rA;
        time += last_T;
        if (blocks / time > alpha1) {
            out.epochs = i;
            out.days = i * bpe * scenario.protocol.unitTime / 1440.0;
            return out;
        }
    }
    throw Error(ErrorCode::NeverProfitable, "not profitable within " + std::to_string(max_epochs) + " epochs");
}

}  // namespace selfish
