// Absolute revenue across difficulty adjustments.
//
// Per epoch i (blocksPerEpoch main-chain blocks):
//   T_i    = blocksPerEpoch * m_i * t_i / n_i   wall time, unit times
//   t_i    = math_i * S_{i-1} / S_i              actual time per mined block
//   math_i = math_{i-1} * blocksPerEpoch / T_{i-1}, math_1 = 1, S_0 = 1

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "selfish/analytic.hpp"
#include "selfish/evaluate.hpp"
#include "selfish/model.hpp"

namespace selfish {

// Global hashrate multiplier S_i for i >= 0 (S_0 = 1).
class GrowthSchedule {
public:
    static GrowthSchedule constant();
    static GrowthSchedule geometric(double rate);
    // S_1, S_2, ...; the last value repeats past the end.
    static GrowthSchedule multipliers(std::vector<double> values);
    // One multiplier per line; blank lines and '#' comments are skipped.
    static GrowthSchedule from_file(const std::filesystem::path& path);

    double at(int epoch) const;
    std::string describe() const;

private:
    double rate_ = 0.0;
    std::vector<double> values_;
};

struct SteadyRates {
    double n = 1.0;  // main-chain blocks per mined block
    RelativeRevenue shares;
};

SteadyRates steady_round_rates(const Scenario& scenario, const Evaluator& evaluator);

struct EpochRecord {
    int epoch = 0;
    double n = 1.0;
    double m = 1.0;
    double mathTime = 1.0;
    double t = 1.0;
    double T = 0.0;
    double S = 1.0;
};

struct EpochTrace {
    int blocksPerEpoch = 2016;
    std::vector<EpochRecord> epochs;
};

// Throws DivergentSchedule when T_i leaves [1e-300, 1e300] or is not finite.
EpochTrace simulate_epochs(const SteadyRates& rates, const ProtocolParams& protocol,
                           const GrowthSchedule& growth, int k);
EpochTrace simulate_epochs(const Scenario& scenario, const Evaluator& evaluator,
                           const GrowthSchedule& growth, int k);

// Cumulative main-chain blocks of a miner with this share over the first
// `upto` epochs (all when 0), per unit time.
double absolute_revenue(const EpochTrace& trace, double share, std::size_t upto = 0);

struct ProfitableDelay {
    int epochs = 0;
    double days = 0.0;
    double relative = 0.0;  // Alice's steady-state relative revenue
};

// Smallest k with cumulative absolute revenue above alpha1. Throws
// NeverProfitable when the steady state is not profitable or no k up to
// max_epochs qualifies.
ProfitableDelay profitable_delay(const Scenario& scenario, const Evaluator& evaluator,
                                 const GrowthSchedule& growth, int max_epochs = 100000);

}  // namespace selfish
