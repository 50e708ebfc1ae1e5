#pragma once

// Token-game semantics: markings, transition firing, bounded breadth-first
// state-space exploration, the soundness checker, and the exhaustive
// reachability-based concurrency relation used as ground truth.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpnet/bitset.hpp"
#include "cpnet/petri.hpp"

namespace cpnet {

inline constexpr std::size_t kDefaultStateCap = 100000;

// Thrown when an exhaustive analysis would need more states than the cap;
// partial results are never returned.
class TruncatedError : public NetError {
public:
    using NetError::NetError;
};

// Token counts indexed by place position (see PetriNet::place_position).
struct Marking {
    std::vector<std::uint32_t> tokens;

    bool operator==(const Marking&) const = default;
};

struct MarkingHash {
    std::size_t operator()(const Marking& m) const {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        for (std::uint32_t t : m.tokens) {
            h ^= t;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

inline Marking initial_marking(const WorkflowNet& wn) {
    Marking m;
    m.tokens.assign(wn.net().place_count(), 0);
    m.tokens[wn.net().place_position(wn.source())] = 1;
    return m;
}

// Marking as declared on the net itself (tokens recorded on places).
inline Marking declared_marking(const PetriNet& net) {
    Marking m;
    m.tokens.assign(net.place_count(), 0);
    for (NodeId p : net.places())
        m.tokens[net.place_position(p)] = net.initial_tokens(p);
    return m;
}

inline bool is_enabled(const PetriNet& net, const Marking& m, NodeId t) {
    if (!net.is_transition(t)) throw NetError("is_enabled: node is not a transition");
    for (NodeId p : net.preset(t))
        if (m.tokens[net.place_position(p)] == 0) return false;
    return true;
}

inline std::vector<NodeId> enabled_transitions(const PetriNet& net, const Marking& m) {
    std::vector<NodeId> out;
    for (NodeId t : net.transitions())
        if (is_enabled(net, m, t)) out.push_back(t);
    return out;
}

inline Marking fire(const PetriNet& net, const Marking& m, NodeId t) {
    if (!is_enabled(net, m, t))
        throw NetError("fire: transition '" + net.label(t) + "' is not enabled");
    Marking next = m;
    for (NodeId p : net.preset(t)) --next.tokens[net.place_position(p)];
    for (NodeId p : net.postset(t)) ++next.tokens[net.place_position(p)];
    return next;
}

struct ExploreEdge {
    std::uint32_t from;     // index into ExploreResult::markings
    NodeId transition;
    std::uint32_t to;
};

struct ExploreResult {
    std::vector<Marking> markings;  // breadth-first discovery order, [0] = start
    std::vector<ExploreEdge> edges;
    bool truncated = false;

    std::optional<std::uint32_t> index_of(const Marking& m) const {
        for (std::uint32_t i = 0; i < markings.size(); ++i)
            if (markings[i] == m) return i;
        return std::nullopt;
    }
};

// Breadth-first reachability graph from `start`, stopping (with the
// truncated flag set) as soon as more than `state_cap` distinct markings
// would be recorded. Deterministic: transitions fire in ascending id order.
inline ExploreResult explore(const PetriNet& net, const Marking& start,
                             std::size_t state_cap = kDefaultStateCap) {
    ExploreResult result;
    std::unordered_map<Marking, std::uint32_t, MarkingHash> seen;
    std::deque<std::uint32_t> frontier;
    result.markings.push_back(start);
    seen.emplace(start, 0);
    frontier.push_back(0);
    while (!frontier.empty()) {
        const std::uint32_t cur = frontier.front();
        frontier.pop_front();
        for (NodeId t : net.transitions()) {
            const Marking m = result.markings[cur];
            if (!is_enabled(net, m, t)) continue;
            Marking next = fire(net, m, t);
            auto it = seen.find(next);
            if (it == seen.end()) {
                if (result.markings.size() >= state_cap) {
                    result.truncated = true;
                    return result;
                }
                const auto idx = static_cast<std::uint32_t>(result.markings.size());
                seen.emplace(next, idx);
                result.markings.push_back(std::move(next));
                frontier.push_back(idx);
                result.edges.push_back({cur, t, idx});
            } else {
                result.edges.push_back({cur, t, it->second});
            }
        }
    }
    return result;
}

inline ExploreResult explore(const WorkflowNet& wn,
                             std::size_t state_cap = kDefaultStateCap) {
    return explore(wn.net(), initial_marking(wn), state_cap);
}

enum class SoundnessCondition {
    OptionToComplete,   // some reachable marking cannot reach the final marking
    ProperCompletion,   // sink marked together with other tokens
    DeadTransition,     // transition enabled in no reachable marking
};

inline const char* to_string(SoundnessCondition c) {
    switch (c) {
        case SoundnessCondition::OptionToComplete: return "option-to-complete";
        case SoundnessCondition::ProperCompletion: return "proper-completion";
        case SoundnessCondition::DeadTransition: return "dead-transition";
    }
    return "?";
}

struct SoundnessVerdict {
    bool sound = false;
    bool truncated = false;
    std::optional<SoundnessCondition> violated;
    std::optional<Marking> witness_marking;
    std::optional<NodeId> witness_transition;
};

// Behavioural soundness: from every reachable marking the final marking
// (one token on the sink) stays reachable, the sink is only marked alone,
// and every transition can fire somewhere. Exhaustive up to `state_cap`;
// a truncated verdict decides nothing.
inline SoundnessVerdict check_soundness(const WorkflowNet& wn,
                                        std::size_t state_cap = kDefaultStateCap) {
    SoundnessVerdict verdict;
    const ExploreResult space = explore(wn, state_cap);
    if (space.truncated) {
        verdict.truncated = true;
        return verdict;
    }
    const PetriNet& net = wn.net();
    const std::size_t sink_pos = net.place_position(wn.sink());

    Marking final_marking;
    final_marking.tokens.assign(net.place_count(), 0);
    final_marking.tokens[sink_pos] = 1;
    const std::optional<std::uint32_t> final_idx = space.index_of(final_marking);

    // A marked sink must imply the final marking exactly. Checked before the
    // completion-option condition: an improperly completed marking can never
    // reach the final marking either (the sink is never consumed), and the
    // more specific verdict is the useful one.
    for (const Marking& m : space.markings) {
        if (m.tokens[sink_pos] >= 1 && m != final_marking) {
            verdict.violated = SoundnessCondition::ProperCompletion;
            verdict.witness_marking = m;
            return verdict;
        }
    }

    // Every reachable marking must be able to reach the final marking.
    Bitset can_finish(space.markings.size());
    if (final_idx) {
        std::vector<std::vector<std::uint32_t>> rev(space.markings.size());
        for (const ExploreEdge& e : space.edges) rev[e.to].push_back(e.from);
        std::vector<std::uint32_t> stack{*final_idx};
        can_finish.set(*final_idx);
        while (!stack.empty()) {
            const std::uint32_t v = stack.back();
            stack.pop_back();
            for (std::uint32_t u : rev[v])
                if (!can_finish.test(u)) {
                    can_finish.set(u);
                    stack.push_back(u);
                }
        }
    }
    for (std::uint32_t i = 0; i < space.markings.size(); ++i) {
        if (!can_finish.test(i)) {
            verdict.violated = SoundnessCondition::OptionToComplete;
            verdict.witness_marking = space.markings[i];
            return verdict;
        }
    }

    // Condition 3: no dead transitions.
    Bitset fired(net.node_count());
    for (const ExploreEdge& e : space.edges) fired.set(e.transition);
    for (NodeId t : net.transitions()) {
        if (!fired.test(t)) {
            verdict.violated = SoundnessCondition::DeadTransition;
            verdict.witness_transition = t;
            return verdict;
        }
    }

    verdict.sound = true;
    return verdict;
}

enum class RelationScope { PlacesOnly, AllNodes };

// Symmetric, irreflexive relation over the nodes of one net, stored as one
// bit row per node.
class ConcurrencyRelation {
public:
    ConcurrencyRelation() = default;
    ConcurrencyRelation(std::size_t node_count, RelationScope scope)
        : scope_(scope), rows_(node_count, Bitset(node_count)) {}

    // Adopts prebuilt rows; the caller guarantees symmetry and an empty
    // diagonal. Lets word-parallel builders skip the per-pair add() path.
    static ConcurrencyRelation from_rows(std::vector<Bitset> rows,
                                         RelationScope scope) {
        ConcurrencyRelation rel;
        rel.scope_ = scope;
        rel.rows_ = std::move(rows);
        assert(rel.is_symmetric_irreflexive());
        return rel;
    }

    RelationScope scope() const { return scope_; }
    std::size_t node_count() const { return rows_.size(); }

    void add(NodeId a, NodeId b) {
        if (a == b) return;
        rows_[a].set(b);
        rows_[b].set(a);
    }

    bool contains(NodeId a, NodeId b) const {
        return a != b && rows_[a].test(b);
    }

    const Bitset& row(NodeId a) const { return rows_[a]; }

    // Unordered pairs (a < b).
    std::vector<std::pair<NodeId, NodeId>> pairs() const {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (NodeId a = 0; a < rows_.size(); ++a)
            rows_[a].for_each([&](std::size_t b) {
                if (a < b) out.emplace_back(a, static_cast<NodeId>(b));
            });
        return out;
    }

    std::size_t pair_count() const {
        std::size_t total = 0;
        for (const Bitset& row : rows_) total += row.count();
        return total / 2;
    }

    // Pairs restricted to places, as a PlacesOnly relation on the same net.
    ConcurrencyRelation restricted_to_places(const PetriNet& net) const {
        ConcurrencyRelation out(rows_.size(), RelationScope::PlacesOnly);
        for (NodeId a = 0; a < rows_.size(); ++a) {
            if (!net.is_place(a)) continue;
            rows_[a].for_each([&](std::size_t b) {
                if (a < b && net.is_place(static_cast<NodeId>(b)))
                    out.add(a, static_cast<NodeId>(b));
            });
        }
        return out;
    }

    bool is_symmetric_irreflexive() const {
        for (NodeId a = 0; a < rows_.size(); ++a) {
            if (rows_[a].test(a)) return false;
            bool ok = true;
            rows_[a].for_each([&](std::size_t b) {
                if (!rows_[b].test(a)) ok = false;
            });
            if (!ok) return false;
        }
        return true;
    }

    bool operator==(const ConcurrencyRelation& other) const {
        return rows_ == other.rows_;
    }

private:
    RelationScope scope_ = RelationScope::PlacesOnly;
    std::vector<Bitset> rows_;
};

// Ground-truth concurrency by exhaustive exploration. Two places are
// concurrent when some reachable marking puts tokens on both. A transition
// joins a pair when it is enabled while the partner (place marked /
// transition enabled) is active in the same marking and, in addition, each
// of its input places is pairwise concurrent with the partner's side — this
// keeps the relation consistent with its place core. Throws TruncatedError
// beyond `state_cap`.
inline ConcurrencyRelation oracle_concurrency(
    const WorkflowNet& wn, RelationScope scope = RelationScope::AllNodes,
    std::size_t state_cap = kDefaultStateCap) {
    const PetriNet& net = wn.net();
    const ExploreResult space = explore(wn, state_cap);
    if (space.truncated)
        throw TruncatedError("state space exceeds cap of " +
                             std::to_string(state_cap) + " markings");

    const std::size_t n = net.node_count();
    const std::size_t num_places = net.place_count();
    const std::size_t num_trans = net.transition_count();

    // Co-occurrence accumulators, indexed by place/transition position.
    std::vector<Bitset> marked_with(num_places, Bitset(num_places));
    std::vector<Bitset> active_place(num_trans, Bitset(num_places));
    std::vector<Bitset> active_trans(num_trans, Bitset(num_trans));

    std::vector<std::size_t> trans_pos(n, 0);
    for (std::size_t i = 0; i < net.transitions().size(); ++i)
        trans_pos[net.transitions()[i]] = i;

    for (const Marking& m : space.markings) {
        Bitset marked(num_places);
        for (std::size_t pp = 0; pp < num_places; ++pp)
            if (m.tokens[pp] >= 1) marked.set(pp);
        marked.for_each([&](std::size_t pp) { marked_with[pp] |= marked; });
        if (scope == RelationScope::AllNodes) {
            Bitset enabled(num_trans);
            for (std::size_t ti = 0; ti < num_trans; ++ti)
                if (is_enabled(net, m, net.transitions()[ti])) enabled.set(ti);
            enabled.for_each([&](std::size_t ti) {
                active_place[ti] |= marked;
                active_trans[ti] |= enabled;
            });
        }
    }

    ConcurrencyRelation rel(n, scope);
    for (std::size_t a = 0; a < num_places; ++a)
        marked_with[a].for_each([&](std::size_t b) {
            if (a < b) rel.add(net.places()[a], net.places()[b]);
        });
    if (scope == RelationScope::PlacesOnly) return rel;

    auto place_pair_ok = [&](NodeId p, NodeId q) {
        return p != q &&
               marked_with[net.place_position(p)].test(net.place_position(q));
    };

    for (std::size_t ti = 0; ti < num_trans; ++ti) {
        const NodeId t = net.transitions()[ti];
        // Transition–place pairs.
        active_place[ti].for_each([&](std::size_t pp) {
            const NodeId p = net.places()[pp];
            for (NodeId z : net.preset(t))
                if (!place_pair_ok(z, p)) return;
            rel.add(t, p);
        });
        // Transition–transition pairs.
        active_trans[ti].for_each([&](std::size_t tj) {
            if (tj <= ti) return;
            const NodeId u = net.transitions()[tj];
            for (NodeId z : net.preset(t))
                for (NodeId z2 : net.preset(u))
                    if (!place_pair_ok(z, z2)) return;
            rel.add(t, u);
        });
    }
    return rel;
}

}  // namespace cpnet
