#pragma once

// Concurrency relation of sound free-choice workflow nets from path
// closures. Acyclic case: two output places of the same transition start
// concurrently; from such a pair (x, y), every node a reachable from x but
// not from y runs alongside everything reachable from y but not from a. A
// fused union-with-difference folds these sets with word operations and
// reports whether it added anything new.
//
// Cyclic case: the net is first decomposed into acyclic nets (see
// decompose.hpp), the per-net relations are accumulated over a joint row
// space of original nodes and loop places (do-body copies fold onto their
// originals), and finally every loop place is expanded into the loop
// members it stands for.

#include <array>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cpnet/bitset.hpp"
#include "cpnet/decompose.hpp"
#include "cpnet/petri.hpp"
#include "cpnet/semantics.hpp"
#include "cpnet/structure.hpp"

namespace cpnet {

struct CpStats {
    std::uint64_t union_calls = 0;   // executions of the set-union step
    std::uint64_t noop_unions = 0;   // unions that added no new pair
    std::uint64_t visited_nodes = 0; // nodes over all processed nets
    std::uint64_t nets = 0;          // acyclic nets processed
};

namespace detail {

// Core propagation over one acyclic net. `rows` are relation rows over an
// external row space; `to_row` maps local node ids into it (nullptr: rows
// are local, which enables the fused word-parallel update directly on the
// reachability sets).
inline void cp_accumulate(const PetriNet& net,
                          const std::vector<std::uint32_t>* to_row,
                          std::vector<Bitset>& rows, CpStats* stats) {
    const std::size_t n = net.node_count();
    const std::vector<Bitset> has_path = compute_has_path(net);

    const std::vector<Bitset>* reach = &has_path;
    std::vector<Bitset> remapped;
    if (to_row) {
        const std::size_t width = rows.empty() ? 0 : rows.front().size();
        remapped.assign(n, Bitset(width));
        for (std::size_t v = 0; v < n; ++v)
            has_path[v].for_each(
                [&](std::size_t w) { remapped[v].set((*to_row)[w]); });
        reach = &remapped;
    }
    auto row_index = [&](std::size_t a) { return to_row ? (*to_row)[a] : a; };

    // Sibling pairs: outputs started together by one transition. Deduplicated
    // and ordered by node id, both orientations kept.
    std::vector<std::pair<NodeId, NodeId>> siblings;
    for (NodeId t : net.transitions()) {
        const auto& out = net.postset(t);
        if (out.size() < 2) continue;
        for (NodeId x : out)
            for (NodeId y : out)
                if (x != y) siblings.emplace_back(x, y);
    }
    std::sort(siblings.begin(), siblings.end());
    siblings.erase(std::unique(siblings.begin(), siblings.end()),
                   siblings.end());

    Bitset delta(n);
    for (const auto& [x, y] : siblings) {
        delta.assign_difference(has_path[x], has_path[y]);
        delta.for_each([&](std::size_t a) {
            const bool grew =
                rows[row_index(a)].union_difference((*reach)[y], (*reach)[a]);
            if (stats) {
                ++stats->union_calls;
                if (!grew) ++stats->noop_unions;
            }
        });
    }
    if (stats) {
        stats->visited_nodes += n;
        ++stats->nets;
    }
}

// Symmetric closure of the leading node_count x node_count corner of
// `rows` (which may be wider), diagonal cleared. Runs word-parallel: the
// direct half is a masked row copy, the mirrored half a blockwise bit-matrix
// transpose.
inline ConcurrencyRelation harvest(const std::vector<Bitset>& rows,
                                   std::size_t node_count) {
    const std::size_t num_words = (node_count + 63) / 64;
    const std::uint64_t tail_mask =
        (node_count & 63) ? ((std::uint64_t{1} << (node_count & 63)) - 1)
                          : ~std::uint64_t{0};
    std::vector<Bitset> sym(node_count, Bitset(node_count));
    for (std::size_t a = 0; a < node_count; ++a) {
        const std::vector<std::uint64_t>& words = rows[a].words();
        for (std::size_t wi = 0; wi < num_words; ++wi)
            sym[a].or_word(wi, wi + 1 == num_words ? words[wi] & tail_mask
                                                   : words[wi]);
    }
    std::array<std::uint64_t, 64> block;
    for (std::size_t bi = 0; bi < num_words; ++bi) {
        for (std::size_t bj = 0; bj < num_words; ++bj) {
            bool nonzero = false;
            for (std::size_t r = 0; r < 64; ++r) {
                const std::size_t src = bi * 64 + r;
                std::uint64_t word =
                    src < node_count ? rows[src].words()[bj] : 0;
                if (bj + 1 == num_words) word &= tail_mask;
                block[r] = word;
                nonzero |= word != 0;
            }
            if (!nonzero) continue;
            transpose64(block);
            for (std::size_t c = 0; c < 64; ++c) {
                const std::size_t dst = bj * 64 + c;
                if (dst < node_count && block[c]) sym[dst].or_word(bi, block[c]);
            }
        }
    }
    for (std::size_t a = 0; a < node_count; ++a) sym[a].reset(a);
    return ConcurrencyRelation::from_rows(std::move(sym), RelationScope::AllNodes);
}

}  // namespace detail

// Concurrency relation of an acyclic workflow net; throws CyclicNetError on
// cycles. The seeded overload starts from an already known partial relation.
inline ConcurrencyRelation cp_acyclic(const WorkflowNet& wn,
                                      CpStats* stats = nullptr) {
    const std::size_t n = wn.net().node_count();
    std::vector<Bitset> rows(n, Bitset(n));
    detail::cp_accumulate(wn.net(), nullptr, rows, stats);
    return detail::harvest(rows, n);
}

inline ConcurrencyRelation cp_acyclic(const WorkflowNet& wn,
                                      const ConcurrencyRelation& seed,
                                      CpStats* stats = nullptr) {
    const std::size_t n = wn.net().node_count();
    std::vector<Bitset> rows;
    rows.reserve(n);
    for (NodeId v = 0; v < n; ++v) rows.push_back(seed.row(v));
    detail::cp_accumulate(wn.net(), nullptr, rows, stats);
    return detail::harvest(rows, n);
}

// Concurrency relation of a sound workflow net, cyclic or not.
inline ConcurrencyRelation concurrent_paths(const WorkflowNet& wn,
                                            CpStats* stats = nullptr) {
    if (is_acyclic(wn.net())) return cp_acyclic(wn, stats);

    const DecompositionResult decomposition = decompose_loops(wn);
    const GlobalId originals = decomposition.original_node_count;

    // Joint row space: original nodes keep their ids, every other surviving
    // id (loop places, fresh sources/sinks/starters) gets the next free row.
    std::unordered_map<GlobalId, std::uint32_t> extra_rows;
    std::uint32_t next_row = static_cast<std::uint32_t>(originals);
    auto row_for = [&](GlobalId g) -> std::uint32_t {
        if (g < originals) return static_cast<std::uint32_t>(g);
        const auto [it, fresh] = extra_rows.try_emplace(g, next_row);
        if (fresh) ++next_row;
        return it->second;
    };
    std::vector<std::vector<std::uint32_t>> net_rows;
    net_rows.reserve(decomposition.nets.size());
    for (const DecomposedNet& part : decomposition.nets) {
        std::vector<std::uint32_t>& map = net_rows.emplace_back();
        map.reserve(part.global_ids.size());
        for (GlobalId g : part.global_ids)
            map.push_back(row_for(decomposition.resolve(g)));
    }

    const std::uint32_t width = next_row;
    std::vector<Bitset> rows(width, Bitset(width));
    for (std::size_t i = 0; i < decomposition.nets.size(); ++i)
        detail::cp_accumulate(decomposition.nets[i].net.net(), &net_rows[i],
                              rows, stats);

    // Loop place rows as bitsets over the joint row space.
    std::unordered_map<std::uint32_t, Bitset> members_of;
    for (const auto& [place, members] : decomposition.connections) {
        Bitset bits(width);
        for (GlobalId g : members) bits.set(row_for(g));
        members_of.emplace(row_for(place), std::move(bits));
    }

    // Expansion: everything concurrent with a loop place is concurrent with
    // each of its members, and vice versa; pairs of loop places exchange
    // their member sets.
    for (const auto& [place, members] : decomposition.connections) {
        const std::uint32_t l = row_for(place);
        const Bitset& conn = members_of.at(l);
        const Bitset snapshot = rows[l];
        snapshot.for_each([&](std::size_t c) {
            rows[c].reset(l);
            const auto other = members_of.find(static_cast<std::uint32_t>(c));
            const Bitset* expanded = nullptr;
            Bitset self;
            if (other != members_of.end()) {
                expanded = &other->second;
            } else {
                self = Bitset(width);
                self.set(c);
                expanded = &self;
            }
            conn.for_each([&](std::size_t a) { rows[a] |= *expanded; });
            expanded->for_each([&](std::size_t b) { rows[b] |= conn; });
        });
    }

    return detail::harvest(rows, originals);
}

}  // namespace cpnet
