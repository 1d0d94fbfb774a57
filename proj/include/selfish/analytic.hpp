// Closed-form steady-state reward rates for private-chain caps 2 and 4.

#pragma once

#include <optional>

#include "selfish/model.hpp"

namespace selfish {

// Expected credited blocks per attack round, normalized by the stationary
// probability of the round-start state: (R1, R2, Rh) / P000.
struct RewardRates {
    double r1 = 0.0;
    double r2 = 0.0;
    double rh = 0.0;
    std::optional<double> p000;  // only known in closed form for nCap = 2

    double total() const { return r1 + r2 + rh; }
    double of(MinerId m) const {
        switch (m) {
            case MinerId::Alice: return r1;
            case MinerId::Bob: return r2;
            case MinerId::Henry: return rh;
        }
        return 0.0;
    }
};

// Share of main-chain blocks won by each miner.
struct RelativeRevenue {
    double rA = 0.0;
    double rB = 0.0;
    double rH = 0.0;

    double of(MinerId m) const {
        switch (m) {
            case MinerId::Alice: return rA;
            case MinerId::Bob: return rB;
            case MinerId::Henry: return rH;
        }
        return 0.0;
    }
};

double p000_n2(const HashrateProfile& h);

RewardRates reward_rates_n2(const HashrateProfile& h, const TieBreakParams& t);

// Throws UndefinedBeta when gamma1 + gamma2 == 0.
RewardRates reward_rates_n4(const HashrateProfile& h, const TieBreakParams& t);

// Throws ZeroTotal when all rates vanish.
RelativeRevenue relative_revenue(const RewardRates& r);

}  // namespace selfish
