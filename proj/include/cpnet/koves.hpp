#pragma once

// Worklist closure computing the place-concurrency relation of a free-choice
// net directly on the net structure: seeded with source-place pairs and the
// output pairs of every transition, it propagates each concurrent pair (x, p)
// across p's successor transitions whenever x is concurrent with that whole
// preset, adding (x, p') for every place p' that any successor of p feeds.

#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "cpnet/bitset.hpp"
#include "cpnet/petri.hpp"
#include "cpnet/semantics.hpp"

namespace cpnet {

// Thrown when an algorithm that requires free choice sees a non-free-choice
// net.
class FreeChoiceError : public NetError {
public:
    using NetError::NetError;
};

struct KovesStats {
    std::uint64_t pops = 0;  // worklist entries processed
};

enum class WorklistOrder { Fifo, Lifo };

inline ConcurrencyRelation koves_concurrency(const PetriNet& net,
                                             KovesStats* stats = nullptr,
                                             WorklistOrder order = WorklistOrder::Fifo) {
    std::string why;
    if (!is_free_choice(net, &why))
        throw FreeChoiceError("free-choice net required: " + why);

    const std::size_t num_places = net.place_count();
    const auto& places = net.places();
    auto pos = [&](NodeId p) { return net.place_position(p); };

    // successors[p] = places one transition downstream of p.
    std::vector<Bitset> successors(num_places, Bitset(num_places));
    for (std::size_t pp = 0; pp < num_places; ++pp)
        for (NodeId t : net.postset(places[pp]))
            for (NodeId q : net.postset(t)) successors[pp].set(pos(q));

    std::vector<Bitset> rel(num_places, Bitset(num_places));
    std::deque<std::pair<std::uint32_t, std::uint32_t>> worklist;
    auto add_pair = [&](std::uint32_t a, std::uint32_t b) {
        if (a == b || rel[a].test(b)) return;
        rel[a].set(b);
        rel[b].set(a);
        worklist.emplace_back(a, b);
        worklist.emplace_back(b, a);
    };

    // Seeds: pairwise source places and pairwise transition outputs.
    std::vector<std::uint32_t> sources;
    for (std::size_t pp = 0; pp < num_places; ++pp)
        if (net.preset(places[pp]).empty())
            sources.push_back(static_cast<std::uint32_t>(pp));
    for (std::size_t i = 0; i < sources.size(); ++i)
        for (std::size_t j = i + 1; j < sources.size(); ++j)
            add_pair(sources[i], sources[j]);
    for (NodeId t : net.transitions()) {
        const auto& out = net.postset(t);
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t j = i + 1; j < out.size(); ++j)
                add_pair(static_cast<std::uint32_t>(pos(out[i])),
                         static_cast<std::uint32_t>(pos(out[j])));
    }

    while (!worklist.empty()) {
        std::uint32_t x, p;
        if (order == WorklistOrder::Fifo) {
            std::tie(x, p) = worklist.front();
            worklist.pop_front();
        } else {
            std::tie(x, p) = worklist.back();
            worklist.pop_back();
        }
        if (stats) ++stats->pops;
        const auto& post_p = net.postset(places[p]);
        if (post_p.empty()) continue;
        const NodeId t = post_p.front();  // smallest-id successor transition
        bool concurrent_with_preset = true;
        for (NodeId y : net.preset(t)) {
            if (!rel[x].test(pos(y))) {  // y == x fails here: irreflexive
                concurrent_with_preset = false;
                break;
            }
        }
        if (!concurrent_with_preset) continue;
        successors[p].for_each([&](std::size_t q) {
            add_pair(x, static_cast<std::uint32_t>(q));
        });
    }

    ConcurrencyRelation result(net.node_count(), RelationScope::PlacesOnly);
    for (std::size_t pp = 0; pp < num_places; ++pp)
        rel[pp].for_each([&](std::size_t qq) {
            if (pp < qq) result.add(places[pp], places[qq]);
        });
    return result;
}

inline ConcurrencyRelation koves_concurrency(const WorkflowNet& wn,
                                             KovesStats* stats = nullptr,
                                             WorklistOrder order = WorklistOrder::Fifo) {
    return koves_concurrency(wn.net(), stats, order);
}

}  // namespace cpnet
