#pragma once

// Loop decomposition: rewrites a cyclic workflow net into a family of
// acyclic workflow nets. Every maximal cycle is replaced in the surrounding
// net by a fresh "loop place"; the part of the cycle reachable from its
// entries without touching an exit (the do-body) is copied in front of that
// place so the first traversal stays visible. The cycle itself becomes a
// separate workflow net, cut open at its exits: a fresh marked source feeds
// every entry and exit through fresh transitions, and a fresh sink collects
// the exits as well as the transitions that previously fed them. Both the
// surrounding net and the cycle nets are decomposed recursively until
// everything is acyclic.
//
// Bookkeeping uses ids in a global space: nodes of the input net keep their
// ids, every synthetic node (loop place, do-body copy, source/sink/adapter)
// receives a fresh id beyond them. `connections` remembers which original
// nodes a loop place stands for, `copy_origin` maps copies back to their
// originals.

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpnet/petri.hpp"
#include "cpnet/semantics.hpp"
#include "cpnet/structure.hpp"

namespace cpnet {

using GlobalId = std::uint64_t;

struct DecomposedNet {
    WorkflowNet net;
    std::vector<GlobalId> global_ids;  // per local node id
};

struct DecompositionResult {
    std::vector<DecomposedNet> nets;  // [0] = fully reduced surrounding net
    std::map<GlobalId, std::vector<GlobalId>> connections;  // loop place -> originals
    std::unordered_map<GlobalId, GlobalId> copy_origin;     // copy -> original
    std::unordered_map<GlobalId, std::string> synthetic_labels;
    GlobalId original_node_count = 0;

    bool is_synthetic(GlobalId g) const { return g >= original_node_count; }

    // Original node a copy stands for; identity for everything else.
    GlobalId resolve(GlobalId g) const {
        auto it = copy_origin.find(g);
        return it == copy_origin.end() ? g : it->second;
    }

    const std::string& label_of(GlobalId g, const PetriNet& original) const {
        if (!is_synthetic(g)) return original.label(static_cast<NodeId>(g));
        return synthetic_labels.at(g);
    }
};

// Loop nodes reachable from the loop entries without entering an exit node;
// exits themselves are excluded. Empty when every entry is also an exit.
inline std::vector<NodeId> identify_do_body(const PetriNet& net, const Loop& loop) {
    Bitset in_loop(net.node_count()), is_exit(net.node_count());
    for (NodeId v : loop.nodes) in_loop.set(v);
    for (NodeId v : loop.exits) is_exit.set(v);
    Bitset seen(net.node_count());
    std::vector<NodeId> stack;
    for (NodeId v : loop.entries)
        if (!is_exit.test(v)) {
            seen.set(v);
            stack.push_back(v);
        }
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (NodeId w : net.postset(v))
            if (in_loop.test(w) && !is_exit.test(w) && !seen.test(w)) {
                seen.set(w);
                stack.push_back(w);
            }
    }
    std::vector<NodeId> out;
    seen.for_each([&](std::size_t v) { out.push_back(static_cast<NodeId>(v)); });
    return out;
}

namespace detail {

constexpr NodeId kNoNode = 0xffffffffu;

struct DecompositionState {
    DecompositionResult* out;
    GlobalId next_gid;

    GlobalId fresh(std::string label) {
        const GlobalId g = next_gid++;
        out->synthetic_labels.emplace(g, std::move(label));
        return g;
    }
};

inline void decompose_recursive(const PetriNet& net,
                                const std::vector<GlobalId>& gid,
                                DecompositionState& state) {
    const std::vector<Loop> loops = find_loops(net);
    if (loops.empty()) {
        state.out->nets.push_back({WorkflowNet::from(net), gid});
        return;
    }

    // In the supported class of nets every cycle is bounded by places; a
    // transition on the boundary would make the cut construction invalid.
    for (const Loop& loop : loops)
        for (const std::vector<NodeId>* boundary : {&loop.entries, &loop.exits})
            for (NodeId v : *boundary)
                if (net.is_transition(v))
                    throw ValidationError(
                        "loop boundary node '" + net.label(v) +
                            "' is a transition; only place-bounded loops are "
                            "supported",
                        {});

    const std::size_t n = net.node_count();
    std::vector<int> loop_of(n, -1);
    for (std::size_t i = 0; i < loops.size(); ++i)
        for (NodeId v : loops[i].nodes) loop_of[v] = static_cast<int>(i);

    std::vector<Bitset> body(loops.size(), Bitset(n));
    for (std::size_t i = 0; i < loops.size(); ++i)
        for (NodeId v : identify_do_body(net, loops[i])) body[i].set(v);

    // ---- Surrounding net: loops collapse to loop places, do-bodies copied.
    PetriNetBuilder reduced;
    std::vector<GlobalId> reduced_gid;
    auto add_reduced = [&](NodeKind kind, const std::string& label,
                           std::uint32_t tokens, GlobalId g) {
        const NodeId id = kind == NodeKind::Place
                              ? reduced.add_place(label, tokens)
                              : reduced.add_transition(label);
        reduced_gid.push_back(g);
        return id;
    };

    std::vector<NodeId> kept(n, kNoNode);
    for (NodeId v = 0; v < n; ++v)
        if (loop_of[v] < 0)
            kept[v] = add_reduced(net.kind(v), net.label(v),
                                  net.is_place(v) ? net.initial_tokens(v) : 0,
                                  gid[v]);

    std::vector<NodeId> loop_place(loops.size());
    std::vector<std::vector<NodeId>> copy_of(loops.size(),
                                             std::vector<NodeId>(n, kNoNode));
    for (std::size_t i = 0; i < loops.size(); ++i) {
        const GlobalId place_gid = state.fresh("loop" + std::to_string(state.next_gid));
        loop_place[i] =
            add_reduced(NodeKind::Place, state.out->synthetic_labels.at(place_gid),
                        0, place_gid);
        std::vector<GlobalId>& members = state.out->connections[place_gid];
        for (NodeId v : loops[i].nodes)
            members.push_back(state.out->resolve(gid[v]));
        std::sort(members.begin(), members.end());
        for (NodeId v : loops[i].nodes) {
            if (!body[i].test(v)) continue;
            const GlobalId copy_gid = state.fresh(net.label(v));
            state.out->copy_origin[copy_gid] = state.out->resolve(gid[v]);
            copy_of[i][v] =
                add_reduced(net.kind(v), net.label(v), 0, copy_gid);
        }
    }

    for (const Flow& f : net.flows()) {
        const int lu = loop_of[f.from], lv = loop_of[f.to];
        if (lu == lv && lu >= 0) {
            const auto& b = body[lu];
            if (b.test(f.from) && b.test(f.to))
                reduced.add_flow(copy_of[lu][f.from], copy_of[lu][f.to]);
            else if (b.test(f.from) && !b.test(f.to))
                // Completion of the copied body feeds the loop place.
                reduced.add_flow(copy_of[lu][f.from], loop_place[lu]);
            // Everything else stays inside the loop's own net.
            continue;
        }
        const NodeId from = lu < 0 ? kept[f.from] : loop_place[lu];
        NodeId to;
        if (lv < 0)
            to = kept[f.to];
        else if (body[lv].test(f.to))
            to = copy_of[lv][f.to];  // external inflow reaches the copied entry
        else
            to = loop_place[lv];
        reduced.add_flow(from, to);
    }

    decompose_recursive(reduced.build(), reduced_gid, state);

    // ---- One net per loop, cut open at the exits.
    for (std::size_t i = 0; i < loops.size(); ++i) {
        const Loop& loop = loops[i];
        Bitset is_exit(n);
        for (NodeId v : loop.exits) is_exit.set(v);

        PetriNetBuilder cut;
        std::vector<GlobalId> cut_gid;
        auto add_cut = [&](NodeKind kind, const std::string& label,
                           std::uint32_t tokens, GlobalId g) {
            const NodeId id = kind == NodeKind::Place
                                  ? cut.add_place(label, tokens)
                                  : cut.add_transition(label);
            cut_gid.push_back(g);
            return id;
        };

        std::vector<NodeId> local(n, kNoNode);
        for (NodeId v : loop.nodes)
            local[v] = add_cut(net.kind(v), net.label(v), 0, gid[v]);

        const GlobalId source_gid = state.fresh("src" + std::to_string(state.next_gid));
        const NodeId source =
            add_cut(NodeKind::Place, state.out->synthetic_labels.at(source_gid), 1,
                    source_gid);
        const GlobalId sink_gid = state.fresh("snk" + std::to_string(state.next_gid));
        const NodeId sink =
            add_cut(NodeKind::Place, state.out->synthetic_labels.at(sink_gid), 0,
                    sink_gid);

        // Start adapters: one transition from the fresh source to every
        // entry and exit.
        Bitset boundary(n);
        for (NodeId v : loop.entries) boundary.set(v);
        for (NodeId v : loop.exits) boundary.set(v);
        boundary.for_each([&](std::size_t v) {
            const GlobalId g = state.fresh(
                "in_" + net.label(static_cast<NodeId>(v)) + "_" +
                std::to_string(state.next_gid));
            const NodeId adapter =
                add_cut(NodeKind::Transition, state.out->synthetic_labels.at(g), 0, g);
            cut.add_flow(source, adapter);
            cut.add_flow(adapter, local[v]);
        });

        // End adapters: every exit drains into the fresh sink.
        for (NodeId v : loop.exits) {
            const GlobalId g = state.fresh("out_" + net.label(v) + "_" +
                                           std::to_string(state.next_gid));
            const NodeId adapter =
                add_cut(NodeKind::Transition, state.out->synthetic_labels.at(g), 0, g);
            cut.add_flow(local[v], adapter);
            cut.add_flow(adapter, sink);
        }

        // Internal flows; flows into an exit are cut, their transitions
        // complete into the fresh sink instead.
        for (const Flow& f : net.flows()) {
            if (local[f.from] == kNoNode || local[f.to] == kNoNode) continue;
            if (is_exit.test(f.to))
                cut.add_flow(local[f.from], sink);
            else
                cut.add_flow(local[f.from], local[f.to]);
        }

        decompose_recursive(cut.build(), cut_gid, state);
    }
}

}  // namespace detail

inline DecompositionResult decompose_loops(const WorkflowNet& wn) {
    DecompositionResult result;
    result.original_node_count = wn.net().node_count();
    std::vector<GlobalId> gid(wn.net().node_count());
    for (std::size_t v = 0; v < gid.size(); ++v) gid[v] = v;
    detail::DecompositionState state{&result, result.original_node_count};
    detail::decompose_recursive(wn.net(), gid, state);
    return result;
}

// Structural safety invariant: in no reachable marking do two marked places
// lie on a common directed path. Cyclic nets are checked through their
// decomposition. Throws TruncatedError when exploration exceeds the cap.
inline bool check_path_to_end(const WorkflowNet& wn,
                              std::size_t state_cap = kDefaultStateCap) {
    if (is_acyclic(wn.net())) {
        const auto has_path = compute_has_path(wn.net());
        const ExploreResult space = explore(wn, state_cap);
        if (space.truncated)
            throw TruncatedError("state space exceeds cap of " +
                                 std::to_string(state_cap) + " markings");
        const PetriNet& net = wn.net();
        for (const Marking& m : space.markings) {
            std::vector<NodeId> marked;
            for (NodeId p : net.places())
                if (m.tokens[net.place_position(p)] >= 1) marked.push_back(p);
            for (std::size_t x = 0; x < marked.size(); ++x)
                for (std::size_t y = 0; y < marked.size(); ++y)
                    if (x != y && has_path[marked[x]].test(marked[y]))
                        return false;
        }
        return true;
    }
    for (const DecomposedNet& part : decompose_loops(wn).nets)
        if (!check_path_to_end(part.net, state_cap)) return false;
    return true;
}

}  // namespace cpnet
