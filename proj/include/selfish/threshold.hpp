// Profitability thresholds: the hashrate at which an attacker's relative
// revenue starts to exceed its hashrate.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfish/evaluate.hpp"
#include "selfish/model.hpp"

namespace selfish {

enum class ThresholdTarget { Alice, Bob, Symmetric };

struct ThresholdQuery {
    Scenario base;  // the searched hashrate is overwritten, Henry takes the rest
    ThresholdTarget target = ThresholdTarget::Symmetric;
    Evaluator evaluator = MarkovEval{4};
    double lo = 0.01;
    double hi = 0.45;
    double tolerance = 1e-5;
    bool honestMajority = true;
    int prescan = 32;
};

struct ThresholdResult {
    double threshold = 0.0;
    int evaluations = 0;
    // The honest-majority condition failed somewhere on the scanned interval
    // (it holds at the crossing, otherwise HonestMinority is thrown).
    bool majorityWarning = false;
};

// Scenario with the searched hashrate set to alpha.
Scenario threshold_scenario(const ThresholdQuery& q, double alpha);

// f(alpha) = relative revenue of the target - alpha.
double profit_margin(const ThresholdQuery& q, double alpha);

// Throws NoSignChange, NonMonotone, HonestMinority, InvalidParameter.
ThresholdResult profitable_threshold(const ThresholdQuery& q);

struct CurvePoint {
    double alpha1 = 0.0;
    std::optional<double> threshold;
    std::string error;
};

struct ThresholdCurve {
    std::vector<CurvePoint> points;
    std::optional<std::size_t> argmin;
};

// Bob's threshold for each fixed alpha1. Per-point failures are recorded.
ThresholdCurve threshold_curve(const std::vector<double>& alpha1_grid, const Scenario& base,
                               const Evaluator& evaluator, unsigned jobs = 1,
                               double tolerance = 1e-5);

enum class ConvergenceMode { Symmetric, SingleAttacker };

struct ConvergenceRow {
    int n = 0;
    std::optional<double> threshold;
    std::string error;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    std::optional<int> convergedAt;  // first n whose threshold moved < kConvergenceStep
};

inline constexpr double kConvergenceStep = 0.002;

// Markov thresholds for n in [n_min, n_max] (within [2, 8]).
ConvergenceStudy convergence_study(ConvergenceMode mode, const Scenario& base, int n_min, int n_max,
                                   unsigned jobs = 1, double tolerance = 1e-5);

}  // namespace selfish
