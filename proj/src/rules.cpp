#include "selfish/rules.hpp"

#include <algorithm>
#include <sstream>

namespace selfish {

std::string_view to_string(TieKind kind) {
    switch (kind) {
        case TieKind::None: return "none";
        case TieKind::AliceHenry: return "alice-henry";
        case TieKind::BobHenry: return "bob-henry";
        case TieKind::AliceBob: return "alice-bob";
        case TieKind::ThreeWay: return "three-way";
    }
    return "?";
}

double weight_value(ChoiceWeight w, const TieBreakParams& t) {
    const double sum = t.gamma1 + t.gamma2;
    switch (w) {
        case ChoiceWeight::One: return 1.0;
        case ChoiceWeight::Gamma1: return t.gamma1;
        case ChoiceWeight::NotGamma1: return 1.0 - t.gamma1;
        case ChoiceWeight::Gamma2: return t.gamma2;
        case ChoiceWeight::NotGamma2: return 1.0 - t.gamma2;
        case ChoiceWeight::Theta1: return t.theta1;
        case ChoiceWeight::Theta2: return t.theta2;
        case ChoiceWeight::ThetaRest: return std::max(0.0, 1.0 - t.theta1 - t.theta2);
        case ChoiceWeight::Beta1: return sum > 0.0 ? t.gamma1 / sum : 0.5;
        case ChoiceWeight::Beta2: return sum > 0.0 ? t.gamma2 / sum : 0.5;
    }
    return 0.0;
}

namespace {

[[noreturn]] void inconsistent(const char* what) {
    throw Error(ErrorCode::InconsistentState, what);
}

char owner_char(MinerId m, bool published) {
    static constexpr char kPublished[] = {'A', 'B', 'H'};
    static constexpr char kPrivate[] = {'a', 'b', 'h'};
    return published ? kPublished[index_of(m)] : kPrivate[index_of(m)];
}

}  // namespace

TieKind World::tie_kind() const {
    if (public_count_ == 1) return TieKind::None;
    if (public_count_ == 3) return TieKind::ThreeWay;
    const bool has_alice = branch_tag_[0] == MinerId::Alice || branch_tag_[1] == MinerId::Alice;
    const bool has_bob = branch_tag_[0] == MinerId::Bob || branch_tag_[1] == MinerId::Bob;
    if (has_alice && has_bob) return TieKind::AliceBob;
    return has_alice ? TieKind::AliceHenry : TieKind::BobHenry;
}

int World::private_length(MinerId attacker) const {
    int len = 0;
    for (auto n = private_tip_[index_of(attacker)]; n >= 0 && !nodes_[n].published;
         n = nodes_[n].parent) {
        ++len;
    }
    return len;
}

int World::lead(MinerId attacker) const {
    const auto tip = private_tip_[index_of(attacker)];
    if (tip == kNoTip) return 0;
    return height_of(tip) - public_height();
}

StateSummary World::summary() const {
    return {private_length(MinerId::Alice), private_length(MinerId::Bob), public_height(),
            tie_kind()};
}

MoveOptions World::options(MinerId winner) const {
    MoveOptions out;
    auto push = [&out](Move m, ChoiceWeight w) { out.items[out.count++] = {m, w}; };

    if (is_attacker(winner) && (has_private(winner) || !in_tie())) {
        push({winner, kPrivateTarget}, ChoiceWeight::One);
        return out;
    }
    if (!in_tie()) {
        push({winner, 0}, ChoiceWeight::One);
        return out;
    }

    std::array<std::int8_t, 3> branch_of{-1, -1, -1};
    for (int i = 0; i < public_count_ && i < 3; ++i) branch_of[index_of(branch_tag_[i])] = std::int8_t(i);
    const auto alice = branch_of[index_of(MinerId::Alice)];
    const auto bob = branch_of[index_of(MinerId::Bob)];
    const auto henry = branch_of[index_of(MinerId::Henry)];

    if (is_attacker(winner) && branch_of[index_of(winner)] >= 0) {
        push({winner, branch_of[index_of(winner)]}, ChoiceWeight::One);
        return out;
    }
    switch (tie_kind()) {
        case TieKind::AliceHenry:
            push({winner, alice}, ChoiceWeight::Gamma1);
            push({winner, henry}, ChoiceWeight::NotGamma1);
            break;
        case TieKind::BobHenry:
            push({winner, bob}, ChoiceWeight::Gamma2);
            push({winner, henry}, ChoiceWeight::NotGamma2);
            break;
        case TieKind::AliceBob:
            push({winner, alice}, ChoiceWeight::Beta1);
            push({winner, bob}, ChoiceWeight::Beta2);
            break;
        case TieKind::ThreeWay:
            push({winner, alice}, ChoiceWeight::Theta1);
            push({winner, bob}, ChoiceWeight::Theta2);
            push({winner, henry}, ChoiceWeight::ThetaRest);
            break;
        case TieKind::None: break;
    }
    return out;
}

std::int16_t World::add_node(std::int16_t parent, MinerId owner, bool published) {
    if (size_ >= kCapacity) inconsistent("fork tree capacity exceeded");
    const int h = height_of(parent) + 1;
    if (h > 255) inconsistent("fork tree too deep");
    nodes_[size_] = BlockNode{parent, static_cast<std::uint8_t>(h), owner, published};
    return static_cast<std::int16_t>(size_++);
}

void World::publish_chain(std::int16_t tip) {
    for (auto n = tip; n >= 0 && !nodes_[n].published; n = nodes_[n].parent) {
        nodes_[n].published = true;
    }
}

void World::set_unique_public(std::int16_t tip, MinerId tag) {
    public_tip_ = {tip, kNoTip, kNoTip};
    branch_tag_[0] = tag;
    public_count_ = 1;
}

void World::add_public_branch(std::int16_t tip, MinerId tag) {
    if (public_count_ >= 3) inconsistent("more than three tied branches");
    if (height_of(tip) != public_height()) inconsistent("tied branches differ in height");
    for (int i = 0; i < public_count_; ++i) {
        if (branch_tag_[i] == tag) inconsistent("two tied branches with the same owner");
    }
    public_tip_[public_count_] = tip;
    branch_tag_[public_count_] = tag;
    ++public_count_;
}

std::int16_t World::lca(std::int16_t a, std::int16_t b) const {
    while (height_of(a) > height_of(b)) a = nodes_[a].parent;
    while (height_of(b) > height_of(a)) b = nodes_[b].parent;
    while (a != b) {
        a = nodes_[a].parent;
        b = nodes_[b].parent;
    }
    return a;
}

int World::divergence_depth(std::int16_t tip) const {
    int fork = 0;
    for (int i = 0; i < public_count_; ++i) {
        fork = std::max(fork, height_of(lca(tip, public_tip_[i])));
    }
    return public_height() - fork;
}

void World::release(const ProtocolParams& protocol) {
    const int reorg_limit = protocol.reorg_limit();
    for (int pass = 0;; ++pass) {
        if (pass > 8) inconsistent("release rules did not reach a fixed point");
        bool changed = false;
        for (MinerId x : kAttackers) {
            auto& tip = private_tip_[index_of(x)];
            if (tip == kNoTip) continue;
            if (divergence_depth(tip) > reorg_limit) {
                tip = kNoTip;
                changed = true;
                continue;
            }
            const int lead = height_of(tip) - public_height();
            if (lead < 0) {
                tip = kNoTip;
            } else if (lead == 0) {
                publish_chain(tip);
                add_public_branch(tip, x);
                tip = kNoTip;
            } else if (lead == 1) {
                publish_chain(tip);
                set_unique_public(tip, x);
                tip = kNoTip;
            } else {
                continue;
            }
            changed = true;
        }
        if (!changed) return;
    }
}

StepEvents World::apply(const Move& move, const ProtocolParams& protocol) {
    const MinerId miner = move.miner;
    if (move.branch == kPrivateTarget) {
        if (!is_attacker(miner)) inconsistent("Henry has no private chain");
        auto& tip = private_tip_[index_of(miner)];
        std::int16_t parent = tip;
        if (parent == kNoTip) {
            if (in_tie()) inconsistent("new private chain during a tie");
            parent = public_tip_[0];
        }
        const auto node = add_node(parent, miner, false);
        tip = node;
        if (private_length(miner) >= protocol.nCap) {
            if (height_of(node) <= public_height()) inconsistent("capped chain is not ahead");
            publish_chain(node);
            tip = kNoTip;
            set_unique_public(node, miner);
            release(protocol);
        }
    } else {
        if (move.branch < 0 || move.branch >= public_count_) inconsistent("bad branch index");
        const auto node = add_node(public_tip_[move.branch], miner, true);
        set_unique_public(node, miner);
        release(protocol);
    }
    return settle();
}

StepEvents World::settle() {
    std::array<std::int16_t, 5> tips{};
    int tip_count = 0;
    for (int i = 0; i < public_count_; ++i) tips[tip_count++] = public_tip_[i];
    for (auto t : private_tip_) {
        if (t != kNoTip) tips[tip_count++] = t;
    }

    std::int16_t root = tips[0];
    for (int i = 1; i < tip_count; ++i) root = lca(root, tips[i]);

    // 0 = orphan, 1 = live, 2 = final
    std::array<std::uint8_t, kCapacity> mark{};
    for (int i = 0; i < tip_count; ++i) {
        for (auto n = tips[i]; n >= 0 && mark[n] == 0; n = nodes_[n].parent) mark[n] = 1;
    }
    for (auto n = root; n >= 0; n = nodes_[n].parent) mark[n] = 2;

    StepEvents ev;
    std::array<std::int16_t, kCapacity> remap{};
    const int base = height_of(root);
    std::uint16_t kept = 0;
    for (std::uint16_t i = 0; i < size_; ++i) {
        const BlockNode node = nodes_[i];
        if (mark[i] == 0) {
            ++ev.orphaned[index_of(node.owner)];
        } else if (mark[i] == 2) {
            ++ev.credited[index_of(node.owner)];
        } else {
            std::int16_t parent = kRootNode;
            if (node.parent != root) {
                if (node.parent < 0 || mark[node.parent] != 1) inconsistent("live block off the tree");
                parent = remap[node.parent];
            }
            nodes_[kept] = BlockNode{parent, static_cast<std::uint8_t>(node.height - base),
                                     node.owner, node.published};
            remap[i] = static_cast<std::int16_t>(kept++);
        }
    }
    size_ = kept;

    auto relocate = [&](std::int16_t t) -> std::int16_t {
        if (t == kNoTip || t == kRootNode) return t;
        if (t == root) return kRootNode;
        return remap[t];
    };
    for (int i = 0; i < public_count_; ++i) public_tip_[i] = relocate(public_tip_[i]);
    for (auto& t : private_tip_) {
        if (t == root && t != kNoTip) inconsistent("private tip became final");
        t = relocate(t);
    }
    ev.round_closed = at_round_start();
    return ev;
}

StepEvents World::flush() {
    std::int16_t best = public_tip_[0];
    MinerId best_tag = branch_tag_[0];
    for (MinerId x : kAttackers) {
        const auto t = private_tip_[index_of(x)];
        if (t != kNoTip && height_of(t) > height_of(best)) {
            best = t;
            best_tag = x;
        }
    }
    publish_chain(best);
    set_unique_public(best, best_tag);
    private_tip_ = {kNoTip, kNoTip};
    return settle();
}

std::string World::serialize(std::int16_t node,
                             const std::vector<std::vector<std::int16_t>>& children) const {
    std::string out;
    if (node != kRootNode) out += owner_char(nodes_[node].owner, nodes_[node].published);
    for (int i = 0; i < public_count_; ++i) {
        if (public_tip_[i] != node) continue;
        out += '*';
        if (in_tie()) out += owner_char(branch_tag_[i], true);
    }
    if (private_tip_[0] == node) out += "!a";
    if (private_tip_[1] == node) out += "!b";

    const auto& kids = children[static_cast<std::size_t>(node + 1)];
    if (!kids.empty()) {
        std::vector<std::string> parts;
        parts.reserve(kids.size());
        for (auto c : kids) parts.push_back(serialize(c, children));
        std::sort(parts.begin(), parts.end());
        out += '(';
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) out += ',';
            out += parts[i];
        }
        out += ')';
    }
    return out;
}

std::string World::canonical_key() const {
    std::vector<std::vector<std::int16_t>> children(size_ + 1u);
    for (std::uint16_t i = 0; i < size_; ++i) {
        children[static_cast<std::size_t>(nodes_[i].parent + 1)].push_back(static_cast<std::int16_t>(i));
    }
    return serialize(kRootNode, children);
}

std::int16_t World::debug_add(std::int16_t parent, MinerId owner, bool published) {
    return add_node(parent, owner, published);
}

void World::debug_set_public(std::span<const std::int16_t> tips, std::span<const MinerId> tags) {
    public_count_ = 0;
    for (std::size_t i = 0; i < tips.size() && i < 3; ++i) {
        public_tip_[i] = tips[i];
        branch_tag_[i] = i < tags.size() ? tags[i] : MinerId::Henry;
        ++public_count_;
    }
}

void World::debug_set_private(MinerId attacker, std::int16_t tip) {
    private_tip_[index_of(attacker)] = tip;
}

}  // namespace selfish
