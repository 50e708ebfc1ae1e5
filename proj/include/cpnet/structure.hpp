#pragma once

// Structural graph analysis over nets: deterministic reverse topological
// order, reachable-node closures per node (HasPath), acyclicity, and
// maximal-cycle detection with entry/exit classification.

#include <string>
#include <vector>

#include "cpnet/bitset.hpp"
#include "cpnet/petri.hpp"

namespace cpnet {

// Thrown by the order/closure routines when the net contains a cycle.
class CyclicNetError : public NetError {
public:
    using NetError::NetError;
};

// Nodes ordered so that every flow (u, v) places v before u (sinks first).
// Deterministic: depth-first post-order with roots and successors visited in
// ascending id order. Throws CyclicNetError on cyclic input.
inline std::vector<NodeId> reverse_topological_order(const PetriNet& net) {
    const std::size_t n = net.node_count();
    enum : std::uint8_t { White, Gray, Black };
    std::vector<std::uint8_t> color(n, White);
    std::vector<NodeId> order;
    order.reserve(n);
    struct Frame {
        NodeId node;
        std::size_t next_child;
    };
    std::vector<Frame> stack;
    for (NodeId root = 0; root < n; ++root) {
        if (color[root] != White) continue;
        color[root] = Gray;
        stack.push_back({root, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto& out = net.postset(f.node);
            if (f.next_child < out.size()) {
                const NodeId child = out[f.next_child++];
                if (color[child] == White) {
                    color[child] = Gray;
                    stack.push_back({child, 0});
                } else if (color[child] == Gray) {
                    throw CyclicNetError("net contains a cycle through '" +
                                         net.label(child) + "'");
                }
            } else {
                color[f.node] = Black;
                order.push_back(f.node);
                stack.pop_back();
            }
        }
    }
    return order;
}

inline bool is_acyclic(const PetriNet& net) {
    try {
        reverse_topological_order(net);
        return true;
    } catch (const CyclicNetError&) {
        return false;
    }
}

// has_path[x] = set of nodes reachable from x along flows, including x
// itself. Only defined for acyclic nets (throws CyclicNetError otherwise).
inline std::vector<Bitset> compute_has_path(const PetriNet& net) {
    const std::vector<NodeId> order = reverse_topological_order(net);
    const std::size_t n = net.node_count();
    std::vector<Bitset> has_path(n, Bitset(n));
    for (NodeId x : order) {  // successors of x are already complete
        Bitset& row = has_path[x];
        row.set(x);
        for (NodeId s : net.postset(x)) row |= has_path[s];
    }
    return has_path;
}

// All nodes reachable from `from` along flows (including `from`).
inline Bitset reachable_from(const PetriNet& net, NodeId from) {
    return detail::reach_forward(net, from);
}

// All nodes that can reach `to` along flows (including `to`).
inline Bitset reaching(const PetriNet& net, NodeId to) {
    return detail::reach_backward(net, to);
}

// A maximal strongly connected subgraph with at least one internal flow.
struct Loop {
    std::vector<NodeId> nodes;    // ascending
    std::vector<NodeId> entries;  // members with a predecessor outside
    std::vector<NodeId> exits;    // members with a successor outside
};

// Maximal cycles (Tarjan strongly connected components, iterative), ordered
// by their smallest member id. Singleton components are never loops because
// flows connect nodes of different kinds, so no node can reference itself.
inline std::vector<Loop> find_loops(const PetriNet& net) {
    const std::size_t n = net.node_count();
    constexpr std::uint32_t kUnvisited = 0xffffffffu;
    std::vector<std::uint32_t> index(n, kUnvisited), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<NodeId> scc_stack;
    std::uint32_t next_index = 0;
    std::vector<std::vector<NodeId>> components;

    struct Frame {
        NodeId node;
        std::size_t next_child;
    };
    std::vector<Frame> call;
    for (NodeId root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        scc_stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            const auto& out = net.postset(f.node);
            if (f.next_child < out.size()) {
                const NodeId child = out[f.next_child++];
                if (index[child] == kUnvisited) {
                    call.push_back({child, 0});
                    index[child] = lowlink[child] = next_index++;
                    scc_stack.push_back(child);
                    on_stack[child] = true;
                } else if (on_stack[child]) {
                    lowlink[f.node] = std::min(lowlink[f.node], index[child]);
                }
            } else {
                if (lowlink[f.node] == index[f.node]) {
                    std::vector<NodeId> comp;
                    NodeId v;
                    do {
                        v = scc_stack.back();
                        scc_stack.pop_back();
                        on_stack[v] = false;
                        comp.push_back(v);
                    } while (v != f.node);
                    if (comp.size() >= 2) {
                        std::sort(comp.begin(), comp.end());
                        components.push_back(std::move(comp));
                    }
                }
                const NodeId done = f.node;
                call.pop_back();
                if (!call.empty())
                    lowlink[call.back().node] =
                        std::min(lowlink[call.back().node], lowlink[done]);
            }
        }
    }

    std::sort(components.begin(), components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    std::vector<Loop> loops;
    loops.reserve(components.size());
    for (auto& comp : components) {
        Bitset members(n);
        for (NodeId v : comp) members.set(v);
        Loop loop;
        loop.nodes = std::move(comp);
        for (NodeId v : loop.nodes) {
            bool entry = false, exit = false;
            for (NodeId u : net.preset(v))
                if (!members.test(u)) entry = true;
            for (NodeId w : net.postset(v))
                if (!members.test(w)) exit = true;
            if (entry) loop.entries.push_back(v);
            if (exit) loop.exits.push_back(v);
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

}  // namespace cpnet
