#pragma once

// Place/transition net model: immutable net structure built through a
// builder, plus the structural checks a workflow net must satisfy (unique
// source/sink places, full connectivity) and the free-choice test.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cpnet/bitset.hpp"

namespace cpnet {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { Place, Transition };

struct Flow {
    NodeId from = 0;
    NodeId to = 0;
    bool operator==(const Flow&) const = default;
};

// Base class for every error this library throws.
class NetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A net that fails workflow-shape validation; carries one line per defect.
class ValidationError : public NetError {
public:
    ValidationError(std::string message, std::vector<std::string> diagnostics)
        : NetError(std::move(message)), diagnostics_(std::move(diagnostics)) {}
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

class PetriNetBuilder;

class PetriNet {
public:
    PetriNet() = default;

    std::size_t node_count() const { return kind_.size(); }
    std::size_t place_count() const { return places_.size(); }
    std::size_t transition_count() const { return transitions_.size(); }
    std::size_t flow_count() const { return flows_.size(); }

    NodeKind kind(NodeId id) const { return kind_.at(id); }
    bool is_place(NodeId id) const { return kind(id) == NodeKind::Place; }
    bool is_transition(NodeId id) const { return kind(id) == NodeKind::Transition; }

    const std::string& label(NodeId id) const { return labels_.at(id); }

    std::optional<NodeId> find(std::string_view label) const {
        auto it = by_label_.find(std::string(label));
        if (it == by_label_.end()) return std::nullopt;
        return it->second;
    }

    // Node id for `label`, throwing when absent.
    NodeId node(std::string_view label) const {
        auto id = find(label);
        if (!id) throw NetError("unknown node label: " + std::string(label));
        return *id;
    }

    const std::vector<NodeId>& preset(NodeId id) const { return pre_.at(id); }
    const std::vector<NodeId>& postset(NodeId id) const { return post_.at(id); }
    const std::vector<Flow>& flows() const { return flows_; }

    // Places and transitions in insertion order (ids are interleaved).
    const std::vector<NodeId>& places() const { return places_; }
    const std::vector<NodeId>& transitions() const { return transitions_; }

    // Dense index of a place among all places (for place-indexed vectors).
    std::size_t place_position(NodeId id) const { return place_pos_.at(id); }

    std::uint32_t initial_tokens(NodeId place) const {
        if (!is_place(place)) throw NetError("initial_tokens: node is not a place");
        return tokens_.at(place);
    }

    bool has_flow(NodeId from, NodeId to) const {
        const auto& out = post_.at(from);
        return std::binary_search(out.begin(), out.end(), to);
    }

    // Structural equality including labels, ordering and initial tokens.
    bool operator==(const PetriNet& other) const {
        return kind_ == other.kind_ && labels_ == other.labels_ &&
               flows_ == other.flows_ && tokens_ == other.tokens_;
    }

private:
    friend class PetriNetBuilder;

    std::vector<NodeKind> kind_;
    std::vector<std::string> labels_;
    std::vector<std::uint32_t> tokens_;  // per node; nonzero only on places
    std::vector<std::vector<NodeId>> pre_, post_;
    std::vector<Flow> flows_;  // sorted by (from, to)
    std::vector<NodeId> places_, transitions_;
    std::unordered_map<NodeId, std::size_t> place_pos_;
    std::unordered_map<std::string, NodeId> by_label_;
};

class PetriNetBuilder {
public:
    NodeId add_place(std::string label, std::uint32_t tokens = 0) {
        return add_node(NodeKind::Place, std::move(label), tokens);
    }

    NodeId add_transition(std::string label) {
        return add_node(NodeKind::Transition, std::move(label), 0);
    }

    void add_flow(NodeId from, NodeId to) {
        if (from >= kind_.size() || to >= kind_.size())
            throw NetError("add_flow: unknown node id");
        if (kind_[from] == kind_[to])
            throw NetError("add_flow: flow must connect a place and a transition (" +
                           labels_[from] + " -> " + labels_[to] + ")");
        flows_.push_back(Flow{from, to});
    }

    void add_flow(std::string_view from, std::string_view to) {
        add_flow(require(from), require(to));
    }

    bool has_node(std::string_view label) const {
        return by_label_.count(std::string(label)) > 0;
    }

    NodeId require(std::string_view label) const {
        auto it = by_label_.find(std::string(label));
        if (it == by_label_.end())
            throw NetError("unknown node label: " + std::string(label));
        return it->second;
    }

    std::size_t node_count() const { return kind_.size(); }

    PetriNet build() {
        PetriNet net;
        net.kind_ = kind_;
        net.labels_ = labels_;
        net.tokens_ = tokens_;
        net.by_label_ = by_label_;
        const std::size_t n = kind_.size();
        net.pre_.assign(n, {});
        net.post_.assign(n, {});
        std::sort(flows_.begin(), flows_.end(), [](const Flow& a, const Flow& b) {
            return a.from != b.from ? a.from < b.from : a.to < b.to;
        });
        flows_.erase(std::unique(flows_.begin(), flows_.end()), flows_.end());
        net.flows_ = flows_;
        for (const Flow& f : flows_) {
            net.post_[f.from].push_back(f.to);
            net.pre_[f.to].push_back(f.from);
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::sort(net.pre_[i].begin(), net.pre_[i].end());
            std::sort(net.post_[i].begin(), net.post_[i].end());
            if (kind_[i] == NodeKind::Place) {
                net.place_pos_[static_cast<NodeId>(i)] = net.places_.size();
                net.places_.push_back(static_cast<NodeId>(i));
            } else {
                net.transitions_.push_back(static_cast<NodeId>(i));
            }
        }
        return net;
    }

private:
    NodeId add_node(NodeKind kind, std::string label, std::uint32_t tokens) {
        if (label.empty()) throw NetError("node label must not be empty");
        if (by_label_.count(label))
            throw NetError("duplicate node label: " + label);
        const NodeId id = static_cast<NodeId>(kind_.size());
        kind_.push_back(kind);
        tokens_.push_back(tokens);
        by_label_.emplace(label, id);
        labels_.push_back(std::move(label));
        return id;
    }

    std::vector<NodeKind> kind_;
    std::vector<std::string> labels_;
    std::vector<std::uint32_t> tokens_;
    std::vector<Flow> flows_;
    std::unordered_map<std::string, NodeId> by_label_;
};

// Strict free-choice test: every place with more than one output transition
// must be the sole input of each of those transitions. On failure, `why`
// (when given) receives the first offending place/transition pair.
inline bool is_free_choice(const PetriNet& net, std::string* why = nullptr) {
    for (NodeId p : net.places()) {
        const auto& out = net.postset(p);
        if (out.size() <= 1) continue;
        for (NodeId t : out) {
            const auto& in = net.preset(t);
            if (in.size() != 1 || in[0] != p) {
                if (why)
                    *why = "place '" + net.label(p) + "' has " +
                           std::to_string(out.size()) +
                           " output transitions but transition '" + net.label(t) +
                           "' has other input places";
                return false;
            }
        }
    }
    return true;
}

namespace detail {

inline Bitset reach_forward(const PetriNet& net, NodeId from) {
    Bitset seen(net.node_count());
    std::vector<NodeId> stack{from};
    seen.set(from);
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (NodeId w : net.postset(v))
            if (!seen.test(w)) {
                seen.set(w);
                stack.push_back(w);
            }
    }
    return seen;
}

inline Bitset reach_backward(const PetriNet& net, NodeId from) {
    Bitset seen(net.node_count());
    std::vector<NodeId> stack{from};
    seen.set(from);
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (NodeId w : net.preset(v))
            if (!seen.test(w)) {
                seen.set(w);
                stack.push_back(w);
            }
    }
    return seen;
}

}  // namespace detail

// Workflow-shape diagnostics; an empty result means the net is a workflow
// net: one source place, one sink place, every node on a source-to-sink
// path, and any declared marking being one token on the source.
inline std::vector<std::string> workflow_diagnostics(const PetriNet& net) {
    std::vector<std::string> out;
    if (net.place_count() == 0 || net.transition_count() == 0) {
        out.push_back("net must contain at least one place and one transition");
        return out;
    }
    std::vector<NodeId> sources, sinks;
    for (NodeId p : net.places()) {
        if (net.preset(p).empty()) sources.push_back(p);
        if (net.postset(p).empty()) sinks.push_back(p);
    }
    for (NodeId t : net.transitions()) {
        if (net.preset(t).empty())
            out.push_back("transition '" + net.label(t) + "' has no input place");
        if (net.postset(t).empty())
            out.push_back("transition '" + net.label(t) + "' has no output place");
    }
    if (sources.size() != 1) {
        std::string msg = "expected exactly one source place, found " +
                          std::to_string(sources.size());
        for (NodeId p : sources) msg += " '" + net.label(p) + "'";
        out.push_back(msg);
    }
    if (sinks.size() != 1) {
        std::string msg = "expected exactly one sink place, found " +
                          std::to_string(sinks.size());
        for (NodeId p : sinks) msg += " '" + net.label(p) + "'";
        out.push_back(msg);
    }
    if (sources.size() == 1 && sinks.size() == 1) {
        const Bitset fwd = detail::reach_forward(net, sources[0]);
        const Bitset bwd = detail::reach_backward(net, sinks[0]);
        for (NodeId v = 0; v < net.node_count(); ++v) {
            if (!fwd.test(v))
                out.push_back("node '" + net.label(v) +
                              "' is not reachable from the source");
            else if (!bwd.test(v))
                out.push_back("node '" + net.label(v) + "' cannot reach the sink");
        }
        for (NodeId p : net.places()) {
            const std::uint32_t tok = net.initial_tokens(p);
            if (p == sources[0]) {
                if (tok > 1)
                    out.push_back("source place '" + net.label(p) + "' declares " +
                                  std::to_string(tok) + " tokens (at most 1 allowed)");
            } else if (tok != 0) {
                out.push_back("place '" + net.label(p) +
                              "' declares initial tokens but is not the source");
            }
        }
    }
    return out;
}

// A validated workflow net. Construction throws ValidationError when the
// shape checks fail; the canonical initial marking is one token on source().
class WorkflowNet {
public:
    static WorkflowNet from(PetriNet net) {
        auto diags = workflow_diagnostics(net);
        if (!diags.empty())
            throw ValidationError("not a workflow net", std::move(diags));
        NodeId source = 0, sink = 0;
        for (NodeId p : net.places()) {
            if (net.preset(p).empty()) source = p;
            if (net.postset(p).empty()) sink = p;
        }
        return WorkflowNet(std::move(net), source, sink);
    }

    const PetriNet& net() const { return net_; }
    NodeId source() const { return source_; }
    NodeId sink() const { return sink_; }

private:
    WorkflowNet(PetriNet net, NodeId source, NodeId sink)
        : net_(std::move(net)), source_(source), sink_(sink) {}

    PetriNet net_;
    NodeId source_;
    NodeId sink_;
};

}  // namespace cpnet
