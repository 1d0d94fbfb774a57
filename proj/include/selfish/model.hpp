// Domain types shared by every module: who mines, how hashrate is split,
// how ties are broken, and the protocol knobs (private-chain cap, epochs).

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace selfish {

enum class MinerId : std::uint8_t { Alice = 0, Bob = 1, Henry = 2 };

inline constexpr std::array<MinerId, 3> kAllMiners = {MinerId::Alice, MinerId::Bob,
                                                      MinerId::Henry};
inline constexpr std::array<MinerId, 2> kAttackers = {MinerId::Alice, MinerId::Bob};

constexpr std::size_t index_of(MinerId m) { return static_cast<std::size_t>(m); }
constexpr bool is_attacker(MinerId m) { return m != MinerId::Henry; }
constexpr MinerId other_attacker(MinerId m) {
    return m == MinerId::Alice ? MinerId::Bob : MinerId::Alice;
}
std::string_view to_string(MinerId m);

enum class ErrorCode {
    InvalidPartition,
    HonestMinority,
    InvalidParameter,
    UndefinedBeta,
    ZeroTotal,
    InconsistentState,
    StateExplosion,
    SingularSystem,
    NoSignChange,
    NonMonotone,
    DivergentSchedule,
    NeverProfitable,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Fractions of global hashrate; they sum to one.
struct HashrateProfile {
    double alpha1 = 0.0;  // Alice
    double alpha2 = 0.0;  // Bob
    double alphaH = 1.0;  // Henry, the aggregated honest miners

    // Henry takes whatever the attackers leave.
    static HashrateProfile from_attackers(double alpha1, double alpha2) {
        return {alpha1, alpha2, 1.0 - alpha1 - alpha2};
    }

    double of(MinerId m) const {
        switch (m) {
            case MinerId::Alice: return alpha1;
            case MinerId::Bob: return alpha2;
            case MinerId::Henry: return alphaH;
        }
        return 0.0;
    }

    bool operator==(const HashrateProfile&) const = default;
};

// Adoption probabilities used when equal-length public branches compete.
//   gamma_i: a non-owner mines on attacker i's branch in an (i, Henry) tie.
//   theta_i: Henry mines on attacker i's branch in a three-way tie.
struct TieBreakParams {
    double gamma1 = 0.5;
    double gamma2 = 0.5;
    double theta1 = 1.0 / 3.0;
    double theta2 = 1.0 / 3.0;

    static TieBreakParams symmetric(double gamma, double theta) {
        return {gamma, gamma, theta, theta};
    }

    bool has_beta() const { return gamma1 + gamma2 > 0.0; }
    // Throws UndefinedBeta when gamma1 + gamma2 == 0.
    double beta1() const;
    double beta2() const;

    double gamma(MinerId attacker) const {
        return attacker == MinerId::Alice ? gamma1 : gamma2;
    }
    double theta(MinerId attacker) const {
        return attacker == MinerId::Alice ? theta1 : theta2;
    }

    bool operator==(const TieBreakParams&) const = default;
};

struct ProtocolParams {
    int nCap = 4;               // private chain is published in full at this length
    int blocksPerEpoch = 2016;  // main-chain blocks per difficulty adjustment
    double unitTime = 10.0;     // target minutes per block
    // Releases that would reorganize more than this many public blocks are
    // rejected by the network; 0 means "use nCap".
    int maxReorgDepth = 0;

    int reorg_limit() const { return maxReorgDepth > 0 ? maxReorgDepth : nCap; }

    bool operator==(const ProtocolParams&) const = default;
};

struct Scenario {
    HashrateProfile hashrate;
    TieBreakParams tie;
    ProtocolParams protocol;

    bool operator==(const Scenario&) const = default;
};

inline constexpr double kPartitionTolerance = 1e-12;

// Checks every type invariant. Returns the scenario unchanged on success.
// Throws Error{InvalidPartition | HonestMinority | InvalidParameter}.
Scenario validate_scenario(const Scenario& scenario, bool honest_majority);

// Convenience: attackers' fractions given, Henry implicit.
Scenario make_scenario(double alpha1, double alpha2, const TieBreakParams& tie = {},
                       const ProtocolParams& protocol = {});

}  // namespace selfish
