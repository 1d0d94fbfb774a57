// The block-level protocol engine shared by the Monte Carlo simulator and the
// Markov chain builder.
//
// World keeps the fork tree of every block that is not yet final: blocks on
// the public branch(es) plus the two attackers' private chains. A block is
// credited once it is an ancestor of every live tip and orphaned once it is an
// ancestor of none; the lowest common ancestor of all live tips becomes the new
// root and the tree is re-based onto it. An empty tree is the round-start
// state.
//
// Release rules applied after every public change (Alice first, then Bob,
// repeated until nothing fires):
//   - private chain diverging more than reorg_limit() blocks below the public
//     tip: abandoned
//   - private tip below the public height: abandoned
//   - private tip level with the public height: published, creates a tie
//   - private tip one above the public height: published, wins outright
// An attacker whose private chain reaches nCap publishes it at once.
//
// Mining during a tie: the owner of a tied branch mines on it and publishes
// immediately. Everyone else without a private chain picks a branch
// (gamma, theta or beta weights) and the new block settles the tie.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "selfish/model.hpp"

namespace selfish {

inline constexpr std::int16_t kRootNode = -1;
inline constexpr std::int16_t kNoTip = -2;

struct BlockNode {
    std::int16_t parent = kRootNode;
    std::uint8_t height = 0;  // distance from the current root
    MinerId owner = MinerId::Henry;
    bool published = false;
};

enum class TieKind : std::uint8_t { None, AliceHenry, BobHenry, AliceBob, ThreeWay };

std::string_view to_string(TieKind kind);

// Which weight multiplies the winner's hashrate for one placement choice.
enum class ChoiceWeight : std::uint8_t {
    One,
    Gamma1,
    NotGamma1,
    Gamma2,
    NotGamma2,
    Theta1,
    Theta2,
    ThetaRest,
    Beta1,
    Beta2,
};

// beta falls back to 1/2 when gamma1 + gamma2 == 0.
double weight_value(ChoiceWeight w, const TieBreakParams& t);

inline constexpr std::int8_t kPrivateTarget = -1;

// Where the winner of the next block puts it: kPrivateTarget extends (or
// starts) the winner's private chain, otherwise an index into public_tips().
struct Move {
    MinerId miner = MinerId::Henry;
    std::int8_t branch = 0;
};

struct MoveOption {
    Move move;
    ChoiceWeight weight = ChoiceWeight::One;
};

struct MoveOptions {
    std::array<MoveOption, 3> items{};
    std::uint8_t count = 0;

    std::span<const MoveOption> view() const { return {items.data(), count}; }
};

struct StepEvents {
    std::array<std::uint16_t, 3> credited{};
    std::array<std::uint16_t, 3> orphaned{};
    bool round_closed = false;  // the world returned to the round-start state

    std::uint32_t total_credited() const { return credited[0] + credited[1] + credited[2]; }
};

// Coarse view of a state: what the (privA, privB, public, tie) tuple shows.
struct StateSummary {
    int alicePrivate = 0;
    int bobPrivate = 0;
    int publicHeight = 0;
    TieKind tie = TieKind::None;
};

class World {
public:
    static constexpr int kCapacity = 160;

    World() = default;

    bool at_round_start() const {
        return size_ == 0 && public_count_ == 1 && private_tip_[0] == kNoTip &&
               private_tip_[1] == kNoTip;
    }
    bool in_tie() const { return public_count_ > 1; }
    TieKind tie_kind() const;
    int public_height() const { return height_of(public_tip_[0]); }
    int private_length(MinerId attacker) const;
    bool has_private(MinerId attacker) const {
        return private_tip_[index_of(attacker)] != kNoTip;
    }
    // Private tip height minus public height; 0 without a private chain.
    int lead(MinerId attacker) const;

    std::span<const std::int16_t> public_tips() const {
        return {public_tip_.data(), public_count_};
    }
    MinerId branch_tag(int i) const { return branch_tag_[i]; }
    std::int16_t private_tip(MinerId attacker) const {
        return private_tip_[index_of(attacker)];
    }
    std::span<const BlockNode> nodes() const { return {nodes_.data(), size_}; }
    int height_of(std::int16_t node) const {
        return node == kRootNode ? 0 : nodes_[node].height;
    }

    StateSummary summary() const;
    // Canonical serialization; equal keys mean equal futures.
    std::string canonical_key() const;

    // Legal placements for the next block won by `winner`.
    MoveOptions options(MinerId winner) const;

    // Adds one block, runs the release rules to a fixed point, then credits
    // final blocks and drops orphans. Throws InconsistentState on bookkeeping
    // failures.
    StepEvents apply(const Move& move, const ProtocolParams& protocol);

    // End-of-run classification: the highest live tip (public first, then
    // Alice, then Bob on equal height) becomes the final chain.
    StepEvents flush();

    // Test hooks for building specific situations.
    std::int16_t debug_add(std::int16_t parent, MinerId owner, bool published);
    void debug_set_public(std::span<const std::int16_t> tips, std::span<const MinerId> tags);
    void debug_set_private(MinerId attacker, std::int16_t tip);

    bool operator==(const World& other) const { return canonical_key() == other.canonical_key(); }

private:
    std::int16_t add_node(std::int16_t parent, MinerId owner, bool published);
    void publish_chain(std::int16_t tip);
    void set_unique_public(std::int16_t tip, MinerId tag);
    void add_public_branch(std::int16_t tip, MinerId tag);
    std::int16_t lca(std::int16_t a, std::int16_t b) const;
    int divergence_depth(std::int16_t private_tip) const;
    void release(const ProtocolParams& protocol);
    StepEvents settle();
    std::string serialize(std::int16_t node,
                          const std::vector<std::vector<std::int16_t>>& children) const;

    std::array<BlockNode, kCapacity> nodes_{};
    std::uint16_t size_ = 0;
    std::array<std::int16_t, 3> public_tip_{kRootNode, kNoTip, kNoTip};
    std::array<MinerId, 3> branch_tag_{MinerId::Henry, MinerId::Henry, MinerId::Henry};
    std::uint8_t public_count_ = 1;
    std::array<std::int16_t, 2> private_tip_{kNoTip, kNoTip};
};

}  // namespace selfish
