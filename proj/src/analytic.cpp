#include "selfish/analytic.hpp"

namespace selfish {

double p000_n2(const HashrateProfile& h) {
    const double a1 = h.alpha1, a2 = h.alpha2, ah = h.alphaH;
    return 1.0 / (1.0 + a1 + a2 + a1 * ah + 2.0 * a1 * a2 + a2 * ah + 2.0 * a1 * a2 * ah);
}

RewardRates reward_rates_n2(const HashrateProfile& h, const TieBreakParams& t) {
    const double a1 = h.alpha1, a2 = h.alpha2, ah = h.alphaH;
    const double g1 = t.gamma1, g2 = t.gamma2, th1 = t.theta1, th2 = t.theta2;

    RewardRates r;
    r.r1 = 2.0 * a1 * a1 * (1.0 + ah) + (a2 + ah) * a1 * ah * g1 + a1 * a2 * ah +
           4.0 * a1 * a1 * a2 * (1.0 + ah) + 2.0 * a1 * a2 * ah * ah * th1;
    r.r2 = 2.0 * a2 * a2 * (1.0 + ah) + (a1 + ah) * ah * a2 * g2 + a1 * a2 * ah +
           4.0 * a2 * a2 * a1 * (1.0 + ah) + 2.0 * a1 * a2 * ah * ah * th2;
    r.rh = a1 * ah * ah * (2.0 - g1) + 2.0 * a1 * a2 * ah * ah * (2.0 - th1 - th2) + ah +
           a2 * ah * ah * (2.0 - g2) + a1 * a2 * ah * (2.0 - g1 - g2);
    r.p000 = p000_n2(h);
    return r;
}

namespace {

// Alice's rate; Bob's follows by exchanging roles.
double attacker_rate_n4(double a, double b, double h, double g, double th, double beta) {
    const double a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a;
    const double b2 = b * b, b3 = b2 * b, b4 = b3 * b;
    const double h2 = h * h, h3 = h2 * h;
    return 4.0 * a4 * (1.0 + h) + 3.0 * a3 * h2 + 16.0 * a4 * b + 4.0 * a2 * h +
           40.0 * a4 * b2 * (1.0 + 2.0 * b) + a * b * h * (1.0 + g + 2.0 * th * h) +
           10.0 * a2 * b * h + 20.0 * a3 * b * h * (3.0 * b + a) + 15.0 * a3 * b * h2 +
           4.0 * a4 * b2 * h * (1.0 + h) + 4.0 * a4 * b3 * h2 * (beta + 20.0) +
           5.0 * a5 * b3 * h + 4.0 * a4 * b3 * h * (b + 21.0) + 3.0 * a3 * b4 * h2 * beta +
           a * h2 * g + 12.0 * a2 * b2 * h2 * beta + a2 * b2 * h3 * beta * (3.0 * a + 2.0 * b) +
           6.0 * a3 * b3 * h2 * (10.0 * h * beta + 1.0);
}

}  // namespace

RewardRates reward_rates_n4(const HashrateProfile& hp, const TieBreakParams& t) {
    const double b1 = t.beta1();
    const double b2 = t.beta2();
    const double a = hp.alpha1, b = hp.alpha2, h = hp.alphaH;
    const double g1 = t.gamma1, g2 = t.gamma2, th1 = t.theta1, th2 = t.theta2;

    RewardRates r;
    r.r1 = attacker_rate_n4(a, b, h, g1, th1, b1);
    r.r2 = attacker_rate_n4(b, a, h, g2, th2, b2);

    const double a2 = a * a, a3 = a2 * a, a4 = a3 * a;
    const double bb2 = b * b, bb3 = bb2 * b, bb4 = bb3 * b;
    const double h2 = h * h, h3 = h2 * h;
    r.rh = a * h2 * (2.0 - g1) + b * h2 * (2.0 - g2) + a2 * bb3 * h3 * (2.0 * b1 + b2) +
           2.0 * a * b * h2 * (2.0 - th1 - th2) + a2 * bb2 * h2 * (6.0 + 4.0 * a * b) +
           a3 * bb2 * h3 * (b1 + 2.0 * b2) + a * b * h * (2.0 - g1 - g2) +
           a3 * bb3 * h * (a + b) + a3 * bb4 * h2 * (2.0 * b1 + b2) + h +
           a4 * bb3 * h2 * (b1 + 2.0 * b2) + 20.0 * a3 * bb3 * h3 + 2.0 * a4 * bb4 * h;
    return r;
}

RelativeRevenue relative_revenue(const RewardRates& r) {
    const double total = r.total();
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroTotal, "reward rates sum to zero");
    return {r.r1 / total, r.r2 / total, r.rh / total};
}

}  // namespace selfish
