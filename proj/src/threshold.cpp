#include "selfish/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selfish/parallel.hpp"

namespace selfish {

Scenario threshold_scenario(const ThresholdQuery& q, double alpha) {
    Scenario s = q.base;
    auto& h = s.hashrate;
    switch (q.target) {
        case ThresholdTarget::Alice: h.alpha1 = alpha; break;
        case ThresholdTarget::Bob: h.alpha2 = alpha; break;
        case ThresholdTarget::Symmetric: h.alpha1 = h.alpha2 = alpha; break;
    }
    h.alphaH = 1.0 - h.alpha1 - h.alpha2;
    return validate_scenario(s, false);
}

namespace {

struct Probe {
    double margin = 0.0;
    double stdError = 0.0;
    bool minority = false;
};

Probe probe(const ThresholdQuery& q, double alpha) {
    const Scenario s = threshold_scenario(q, alpha);
    const Evaluation e = evaluate(s, q.evaluator);
    const MinerId who = q.target == ThresholdTarget::Bob ? MinerId::Bob : MinerId::Alice;
    const auto& h = s.hashrate;
    return {e.revenue.of(who) - alpha, e.stdError[index_of(who)],
            h.alphaH <= std::max(h.alpha1, h.alpha2)};
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double profit_margin(const ThresholdQuery& q, double alpha) { return probe(q, alpha).margin; }

ThresholdResult profitable_threshold(const ThresholdQuery& q) {
    if (!(q.lo > 0.0 && q.hi < 0.5 && q.lo < q.hi)) {
        throw Error(ErrorCode::InvalidParameter, "search interval must lie inside (0, 0.5)");
    }
    if (!(q.tolerance >= 1e-5)) throw Error(ErrorCode::InvalidParameter, "tolerance must be >= 1e-5");
    if (q.prescan < 2) throw Error(ErrorCode::InvalidParameter, "prescan needs at least 2 points");

    ThresholdResult result;
    std::vector<double> xs(static_cast<std::size_t>(q.prescan));
    std::vector<Probe> fs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = q.lo + (q.hi - q.lo) * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
        fs[i] = probe(q, xs[i]);
        ++result.evaluations;
        result.majorityWarning = result.majorityWarning || fs[i].minority;
    }

    int changes = 0;
    std::size_t lo_index = 0, hi_index = 0;
    int last = 0;
    std::size_t last_index = 0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const int s = sign(fs[i].margin);
        if (s == 0) continue;
        if (last != 0 && s != last && ++changes == 1) {
            lo_index = last_index;
            hi_index = i;
        }
        last = s;
        last_index = i;
    }
    if (changes == 0) {
        std::ostringstream msg;
        msg << "f(" << q.lo << ") = " << fs.front().margin << ", f(" << q.hi << ") = " << fs.back().margin;
        throw Error(ErrorCode::NoSignChange, msg.str());
    }
    if (changes > 1) {
        throw Error(ErrorCode::NonMonotone, std::to_string(changes) + " sign changes on the prescan grid");
    }

    double a = xs[lo_index];
    double b = xs[hi_index];
    const int sa = sign(fs[lo_index].margin);
    const double floor_tol = std::max(q.tolerance, 3.0 * fs[lo_index].stdError);
    while (b - a > floor_tol) {
        const double mid = 0.5 * (a + b);
        const Probe p = probe(q, mid);
        ++result.evaluations;
        const int sm = sign(p.margin);
        if (sm == 0) {
            a = b = mid;
            break;
        }
        if (sm == sa) {
            a = mid;
        } else {
            b = mid;
        }
    }
    result.threshold = 0.5 * (a + b);

    if (q.honestMajority) {
        const auto& h = threshold_scenario(q, result.threshold).hashrate;
        if (h.alphaH <= std::max(h.alpha1, h.alpha2)) {
            std::ostringstream msg;
            msg << "honest majority fails at the crossing " << result.threshold;
            throw Error(ErrorCode::HonestMinority, msg.str());
        }
    }
    return result;
}

ThresholdCurve threshold_curve(const std::vector<double>& alpha1_grid, const Scenario& base,
                               const Evaluator& evaluator, unsigned jobs, double tolerance) {
    ThresholdCurve curve;
    curve.points = parallel_map(alpha1_grid.size(), jobs, [&](std::size_t i) {
        CurvePoint pt;
        pt.alpha1 = alpha1_grid[i];
        try {
            ThresholdQuery q;
            q.base = base;
            q.base.hashrate.alpha1 = pt.alpha1;
            q.target = ThresholdTarget::Bob;
            q.evaluator = evaluator;
            q.tolerance = tolerance;
            q.hi = std::min(q.hi, 0.5 * (1.0 - pt.alpha1) - 1e-6);
            pt.threshold = profitable_threshold(q).threshold;
        } catch (const Error& e) {
            pt.error = e.what();
        }
        return pt;
    });
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& t = curve.points[i].threshold;
        if (t && (!curve.argmin || *t < *curve.points[*curve.argmin].threshold)) curve.argmin = i;
    }
    return curve;
}

ConvergenceStudy convergence_study(ConvergenceMode mode, const Scenario& base, int n_min, int n_max,
                                   unsigned jobs, double tolerance) {
    if (n_min < 2 || n_max > 8 || n_min > n_max) {
        throw Error(ErrorCode::InvalidParameter, "n range must lie inside [2, 8]");
    }
    ConvergenceStudy study;
    const auto count = static_cast<std::size_t>(n_max - n_min + 1);
    study.rows = parallel_map(count, jobs, [&](std::size_t i) {
        ConvergenceRow row;
        row.n = n_min + static_cast<int>(i);
        try {
            ThresholdQuery q;
            q.base = base;
            q.evaluator = MarkovEval{row.n};
            q.tolerance = tolerance;
            if (mode == ConvergenceMode::SingleAttacker) {
                q.base.hashrate.alpha2 = 0.0;
                q.target = ThresholdTarget::Alice;
            }
            row.threshold = profitable_threshold(q).threshold;
        } catch (const Error& e) {
            row.error = e.what();
        }
        return row;
    });
    for (std::size_t i = 1; i < study.rows.size(); ++i) {
        const auto& prev = study.rows[i - 1].threshold;
        const auto& cur = study.rows[i].threshold;
        if (prev && cur && std::abs(*cur - *prev) < kConvergenceStep) {
            study.convergedAt = study.rows[i].n;
            break;
        }
    }
    return study;
}

}  // namespace selfish
