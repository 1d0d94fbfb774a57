#include "selfish/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace selfish {

std::string_view to_string(MinerId m) {
    switch (m) {
        case MinerId::Alice: return "Alice";
        case MinerId::Bob: return "Bob";
        case MinerId::Henry: return "Henry";
    }
    return "?";
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidPartition: return "InvalidPartition";
        case ErrorCode::HonestMinority: return "HonestMinority";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::UndefinedBeta: return "UndefinedBeta";
        case ErrorCode::ZeroTotal: return "ZeroTotal";
        case ErrorCode::InconsistentState: return "InconsistentState";
        case ErrorCode::StateExplosion: return "StateExplosion";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::NoSignChange: return "NoSignChange";
        case ErrorCode::NonMonotone: return "NonMonotone";
        case ErrorCode::DivergentSchedule: return "DivergentSchedule";
        case ErrorCode::NeverProfitable: return "NeverProfitable";
    }
    return "Unknown";
}

double TieBreakParams::beta1() const {
    if (!has_beta()) throw Error(ErrorCode::UndefinedBeta, "gamma1 + gamma2 == 0");
    return gamma1 / (gamma1 + gamma2);
}

double TieBreakParams::beta2() const {
    if (!has_beta()) throw Error(ErrorCode::UndefinedBeta, "gamma1 + gamma2 == 0");
    return gamma2 / (gamma1 + gamma2);
}

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

Scenario validate_scenario(const Scenario& s, bool honest_majority) {
    const auto& h = s.hashrate;
    std::ostringstream msg;
    if (!std::isfinite(h.alpha1) || !std::isfinite(h.alpha2) || !std::isfinite(h.alphaH)) {
        throw Error(ErrorCode::InvalidPartition, "non-finite hashrate");
    }
    if (h.alpha1 < 0.0 || h.alpha2 < 0.0 || h.alphaH <= 0.0 || h.alpha1 > 1.0 ||
        h.alpha2 > 1.0 || h.alphaH > 1.0) {
        msg << "hashrates out of range (" << h.alpha1 << ", " << h.alpha2 << ", " << h.alphaH
            << ")";
        throw Error(ErrorCode::InvalidPartition, msg.str());
    }
    if (std::abs(h.alpha1 + h.alpha2 + h.alphaH - 1.0) > kPartitionTolerance) {
        msg << "hashrates sum to " << h.alpha1 + h.alpha2 + h.alphaH;
        throw Error(ErrorCode::InvalidPartition, msg.str());
    }
    if (honest_majority && h.alphaH <= std::max(h.alpha1, h.alpha2)) {
        msg << "alphaH = " << h.alphaH << " does not exceed max(alpha1, alpha2)";
        throw Error(ErrorCode::HonestMinority, msg.str());
    }

    const auto& t = s.tie;
    if (!is_probability(t.gamma1) || !is_probability(t.gamma2)) {
        throw Error(ErrorCode::InvalidParameter, "gamma outside [0, 1]");
    }
    if (!is_probability(t.theta1) || !is_probability(t.theta2) ||
        t.theta1 + t.theta2 > 1.0 + kPartitionTolerance) {
        throw Error(ErrorCode::InvalidParameter, "theta1, theta2 >= 0 with theta1 + theta2 <= 1");
    }

    const auto& p = s.protocol;
    if (p.nCap < 2) throw Error(ErrorCode::InvalidParameter, "nCap must be >= 2");
    if (p.blocksPerEpoch < 1) throw Error(ErrorCode::InvalidParameter, "blocksPerEpoch >= 1");
    if (!(p.unitTime > 0.0)) throw Error(ErrorCode::InvalidParameter, "unitTime must be > 0");
    if (p.maxReorgDepth < 0) throw Error(ErrorCode::InvalidParameter, "maxReorgDepth >= 0");
    return s;
}

Scenario make_scenario(double alpha1, double alpha2, const TieBreakParams& tie,
                       const ProtocolParams& protocol) {
    return Scenario{HashrateProfile::from_attackers(alpha1, alpha2), tie, protocol};
}

}  // namespace selfish
