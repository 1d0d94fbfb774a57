#include <doctest.h>

#include <array>
#include <cmath>

#include "selfish/chain_sim.hpp"
#include "selfish/rules.hpp"

using namespace selfish;

namespace {

constexpr Move kAlicePrivate{MinerId::Alice, kPrivateTarget};
constexpr Move kBobPrivate{MinerId::Bob, kPrivateTarget};
constexpr Move kHenry{MinerId::Henry, 0};

ProtocolParams cap(int n) {
    ProtocolParams p;
    p.nCap = n;
    return p;
}

}  // namespace

TEST_CASE("fresh world is the round start") {
    World w;
    CHECK(w.at_round_start());
    CHECK_FALSE(w.in_tie());
    CHECK(w.public_height() == 0);
    CHECK(w.nodes().empty());
}

TEST_CASE("honest block is final at once") {
    World w;
    const auto ev = w.apply(kHenry, cap(4));
    CHECK(ev.credited == std::array<std::uint16_t, 3>{0, 0, 1});
    CHECK(ev.round_closed);
    CHECK(w.at_round_start());
}

TEST_CASE("lead of two, Henry mines: Alice releases both and orphans Henry") {
    World w;
    w.apply(kAlicePrivate, cap(4));
    w.apply(kAlicePrivate, cap(4));
    CHECK(w.lead(MinerId::Alice) == 2);
    CHECK(w.private_length(MinerId::Alice) == 2);
    const auto ev = w.apply(kHenry, cap(4));
    CHECK(ev.credited == std::array<std::uint16_t, 3>{2, 0, 0});
    CHECK(ev.orphaned == std::array<std::uint16_t, 3>{0, 0, 1});
    CHECK(ev.round_closed);
}

TEST_CASE("lead of one, Henry mines: two-way tie") {
    World w;
    w.apply(kAlicePrivate, cap(4));
    const auto ev = w.apply(kHenry, cap(4));
    CHECK(ev.total_credited() == 0);
    CHECK(w.tie_kind() == TieKind::AliceHenry);
    CHECK(w.public_tips().size() == 2);
    CHECK(w.summary().publicHeight == 1);
}

TEST_CASE("both hide one, Henry mines: three-way tie") {
    World w;
    w.apply(kAlicePrivate, cap(4));
    w.apply(kBobPrivate, cap(4));
    w.apply(kHenry, cap(4));
    CHECK(w.tie_kind() == TieKind::ThreeWay);
    const auto opts = w.options(MinerId::Henry);
    REQUIRE(opts.count == 3);
    CHECK(opts.items[0].weight == ChoiceWeight::Theta1);
    CHECK(opts.items[1].weight == ChoiceWeight::Theta2);
    CHECK(opts.items[2].weight == ChoiceWeight::ThetaRest);
    CHECK(w.options(MinerId::Alice).count == 1);
}

TEST_CASE("Henry resolves an Alice tie on Alice's branch") {
    World w;
    w.apply(kAlicePrivate, cap(4));
    w.apply(kHenry, cap(4));
    const auto opts = w.options(MinerId::Henry);
    REQUIRE(opts.count == 2);
    CHECK(opts.items[0].weight == ChoiceWeight::Gamma1);
    const auto ev = w.apply(opts.items[0].move, cap(4));
    CHECK(ev.credited == std::array<std::uint16_t, 3>{1, 0, 1});
    CHECK(ev.orphaned == std::array<std::uint16_t, 3>{0, 0, 1});
    CHECK(w.at_round_start());
}

TEST_CASE("bystander Bob settles an Alice tie like Henry would") {
    World w;
    w.apply(kAlicePrivate, cap(4));
    w.apply(kHenry, cap(4));
    const auto opts = w.options(MinerId::Bob);
    REQUIRE(opts.count == 2);
    const auto ev = w.apply(opts.items[1].move, cap(4));
    CHECK(ev.credited == std::array<std::uint16_t, 3>{0, 1, 1});
    CHECK(ev.orphaned == std::array<std::uint16_t, 3>{1, 0, 0});
}

TEST_CASE("gamma1 = 1 always extends Alice's branch") {
    World w;
    w.apply(kAlicePrivate, cap(4));
    w.apply(kHenry, cap(4));
    const TieBreakParams t{1.0, 0.5, 1.0 / 3.0, 1.0 / 3.0};
    Rng rng(7);
    const auto opts = w.options(MinerId::Henry);
    for (int i = 0; i < 1000; ++i) {
        CHECK(resolve_tie(opts, t, rng).branch == opts.items[0].move.branch);
    }
}

TEST_CASE("three-way tie choice frequencies follow theta") {
    World w;
    w.apply(kAlicePrivate, cap(4));
    w.apply(kBobPrivate, cap(4));
    w.apply(kHenry, cap(4));
    const auto opts = w.options(MinerId::Henry);
    const TieBreakParams t = TieBreakParams::symmetric(0.5, 1.0 / 3.0);
    Rng rng(2024);
    constexpr int kTrials = 100000;
    std::array<int, 3> counts{};
    for (int i = 0; i < kTrials; ++i) {
        const auto m = resolve_tie(opts, t, rng);
        for (int k = 0; k < 3; ++k) {
            if (opts.items[k].move.branch == m.branch) ++counts[k];
        }
    }
    const double p = 1.0 / 3.0;
    const double sigma = std::sqrt(kTrials * p * (1 - p));
    for (int c : counts) CHECK(std::abs(c - kTrials * p) < 3 * sigma);
}

TEST_CASE("private chain is published at the cap") {
    World w;
    w.apply(kAlicePrivate, cap(2));
    const auto ev = w.apply(kAlicePrivate, cap(2));
    CHECK(ev.credited == std::array<std::uint16_t, 3>{2, 0, 0});
    CHECK(ev.round_closed);

    World v;
    for (int i = 0; i < 3; ++i) v.apply(kAlicePrivate, cap(4));
    CHECK(v.private_length(MinerId::Alice) == 3);
    const auto last = v.apply(kAlicePrivate, cap(4));
    CHECK(last.credited[0] == 4);
}

TEST_CASE("chain reaction: Alice's release makes Bob abandon") {
    World w;
    w.apply(kAlicePrivate, cap(4));
    w.apply(kAlicePrivate, cap(4));
    w.apply(kBobPrivate, cap(4));
    const auto ev = w.apply(kHenry, cap(4));
    CHECK(ev.credited == std::array<std::uint16_t, 3>{2, 0, 0});
    CHECK(ev.orphaned == std::array<std::uint16_t, 3>{0, 1, 1});
    CHECK(w.at_round_start());
}

TEST_CASE("chain reaction into an Alice-Bob tie uses beta") {
    // Both hold two blocks; Henry's block makes Alice publish (lead 1) and
    // Bob then ties her.
    World w;
    for (int i = 0; i < 2; ++i) {
        w.apply(kAlicePrivate, cap(4));
        w.apply(kBobPrivate, cap(4));
    }
    const auto ev = w.apply(kHenry, cap(4));
    CHECK(ev.orphaned[2] == 1);
    CHECK(w.tie_kind() == TieKind::AliceBob);
    const auto opts = w.options(MinerId::Henry);
    REQUIRE(opts.count == 2);
    CHECK(opts.items[0].weight == ChoiceWeight::Beta1);
    CHECK(opts.items[1].weight == ChoiceWeight::Beta2);
    CHECK(weight_value(ChoiceWeight::Beta1, {0.3, 0.6, 0.2, 0.2}) == doctest::Approx(1.0 / 3.0));
    CHECK(weight_value(ChoiceWeight::Beta1, {0.0, 0.0, 0.2, 0.2}) == 0.5);
}

TEST_CASE("tie owner mines on its own branch") {
    World w;
    w.apply(kAlicePrivate, cap(4));
    w.apply(kHenry, cap(4));
    const auto opts = w.options(MinerId::Alice);
    REQUIRE(opts.count == 1);
    CHECK(opts.items[0].weight == ChoiceWeight::One);
    CHECK(w.branch_tag(opts.items[0].move.branch) == MinerId::Alice);
}

TEST_CASE("attacker with a private chain ignores someone else's tie") {
    World w;
    for (int i = 0; i < 3; ++i) w.apply(kBobPrivate, cap(4));
    w.apply(kAlicePrivate, cap(4));
    w.apply(kHenry, cap(4));
    CHECK(w.tie_kind() == TieKind::AliceHenry);
    CHECK(w.lead(MinerId::Bob) == 2);
    const auto opts = w.options(MinerId::Bob);
    REQUIRE(opts.count == 1);
    CHECK(opts.items[0].move.branch == kPrivateTarget);
}

TEST_CASE("bookkeeping errors raise InconsistentState") {
    World w;
    CHECK_THROWS_AS(w.apply({MinerId::Henry, kPrivateTarget}, cap(4)), Error);
    CHECK_THROWS_AS(w.apply({MinerId::Henry, 2}, cap(4)), Error);
    try {
        World v;
        v.apply({MinerId::Henry, 1}, cap(4));
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InconsistentState);
    }
}

TEST_CASE("flush classifies every pending block") {
    World w;
    w.apply(kAlicePrivate, cap(4));
    w.apply(kAlicePrivate, cap(4));
    w.apply(kBobPrivate, cap(4));
    const auto ev = w.flush();
    CHECK(ev.credited == std::array<std::uint16_t, 3>{2, 0, 0});
    CHECK(ev.orphaned == std::array<std::uint16_t, 3>{0, 1, 0});
    CHECK(w.at_round_start());

    World t;
    t.apply(kAlicePrivate, cap(4));
    t.apply(kHenry, cap(4));
    const auto tie = t.flush();
    CHECK(tie.total_credited() == 1);
    CHECK(tie.orphaned[0] + tie.orphaned[2] == 1);
}

TEST_CASE("canonical key ignores construction order") {
    World a;
    a.apply(kAlicePrivate, cap(4));
    a.apply(kBobPrivate, cap(4));
    World b;
    b.apply(kBobPrivate, cap(4));
    b.apply(kAlicePrivate, cap(4));
    CHECK(a == b);
    CHECK(a.canonical_key() == b.canonical_key());
    World c;
    c.apply(kAlicePrivate, cap(4));
    CHECK_FALSE(a == c);
}

TEST_CASE("debug hooks build a situation directly") {
    World w;
    const auto a = w.debug_add(kRootNode, MinerId::Alice, true);
    const auto h = w.debug_add(kRootNode, MinerId::Henry, true);
    const std::array<std::int16_t, 2> tips{a, h};
    const std::array<MinerId, 2> tags{MinerId::Alice, MinerId::Henry};
    w.debug_set_public(tips, tags);
    CHECK(w.tie_kind() == TieKind::AliceHenry);
    World ref;
    ref.apply(kAlicePrivate, cap(4));
    ref.apply(kHenry, cap(4));
    CHECK(w == ref);
}
