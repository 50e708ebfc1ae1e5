#pragma once

// Random block-structured workflow nets: every net is built between an
// entry and an exit place from nested sequence, exclusive-choice, parallel
// and loop blocks, which makes it a sound free-choice workflow net by
// construction. The generator is deterministic in the seed and avoids
// standard-library distributions so the same seed reproduces the same net
// on any platform.
//
// Also provides two parameterized families with known shape: parallel
// chains between one split and one join (concurrency grows quadratically
// with the number of chains) and a plain sequence (no concurrency at all).

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cpnet/petri.hpp"

namespace cpnet {

struct GenConfig {
    std::uint64_t seed = 1;
    int max_blocks = 12;  // budget of non-atomic blocks
    int max_branch = 3;   // branches per choice/parallel block
    int max_depth = 5;
    double w_seq = 1.0;
    double w_xor = 1.0;
    double w_and = 1.0;
    double w_loop = 0.0;  // 0: acyclic by construction
};

namespace detail {

class BlockGenerator {
public:
    explicit BlockGenerator(const GenConfig& config)
        : config_(config), rng_(config.seed), budget_(config.max_blocks) {}

    PetriNet generate() {
        const NodeId source = place(1);
        const NodeId sink = place(0);
        block(source, sink, 0);
        return builder_.build();
    }

    PetriNet chain_of_loops(int loop_count) {
        NodeId from = place(1);
        const NodeId sink = place(0);
        for (int i = 0; i < loop_count; ++i) {
            const NodeId next = place(0);
            loop_block(from, next, 0);
            from = next;
        }
        const NodeId t = transition();
        builder_.add_flow(from, t);
        builder_.add_flow(t, sink);
        return builder_.build();
    }

private:
    enum class Block { Seq, Xor, And, Loop };

    NodeId place(std::uint32_t tokens = 0) {
        return builder_.add_place("p" + std::to_string(next_place_++), tokens);
    }
    NodeId transition() {
        return builder_.add_transition("t" + std::to_string(next_transition_++));
    }

    std::uint64_t uniform(std::uint64_t bound) {
        return bound < 2 ? 0 : rng_() % bound;
    }
    int branch_count() {
        const int extra = std::max(config_.max_branch, 2) - 1;
        return 2 + static_cast<int>(uniform(static_cast<std::uint64_t>(extra)));
    }

    Block pick_block() {
        const double total =
            config_.w_seq + config_.w_xor + config_.w_and + config_.w_loop;
        const double roll =
            total * static_cast<double>(uniform(1u << 30)) / (1u << 30);
        double edge = config_.w_seq;
        if (roll < edge) return Block::Seq;
        edge += config_.w_xor;
        if (roll < edge) return Block::Xor;
        edge += config_.w_and;
        if (roll < edge) return Block::And;
        return Block::Loop;
    }

    void atom(NodeId from, NodeId to) {
        const NodeId t = transition();
        builder_.add_flow(from, t);
        builder_.add_flow(t, to);
    }

    void block(NodeId from, NodeId to, int depth) {
        if (budget_ <= 0 || depth >= config_.max_depth) {
            atom(from, to);
            return;
        }
        --budget_;
        switch (pick_block()) {
            case Block::Seq: {
                const NodeId mid = place();
                block(from, mid, depth + 1);
                block(mid, to, depth + 1);
                break;
            }
            case Block::Xor: {
                const int branches = branch_count();
                for (int i = 0; i < branches; ++i) {
                    const NodeId t = transition();
                    const NodeId entry = place();
                    builder_.add_flow(from, t);
                    builder_.add_flow(t, entry);
                    block(entry, to, depth + 1);
                }
                break;
            }
            case Block::And: {
                const NodeId split = transition();
                const NodeId join = transition();
                builder_.add_flow(from, split);
                builder_.add_flow(join, to);
                const int branches = branch_count();
                for (int i = 0; i < branches; ++i) {
                    const NodeId entry = place();
                    const NodeId exit = place();
                    builder_.add_flow(split, entry);
                    block(entry, exit, depth + 1);
                    builder_.add_flow(exit, join);
                }
                break;
            }
            case Block::Loop:
                loop_block(from, to, depth);
                break;
        }
    }

    // from -> t_in -> entry ~body~ exit; exit repeats into entry or leaves
    // through t_out. Entry and exit of the cycle are places by construction.
    void loop_block(NodeId from, NodeId to, int depth) {
        const NodeId t_in = transition();
        const NodeId entry = place();
        const NodeId exit = place();
        builder_.add_flow(from, t_in);
        builder_.add_flow(t_in, entry);
        block(entry, exit, depth + 1);
        const NodeId t_back = transition();
        builder_.add_flow(exit, t_back);
        builder_.add_flow(t_back, entry);
        const NodeId t_out = transition();
        builder_.add_flow(exit, t_out);
        builder_.add_flow(t_out, to);
    }

    GenConfig config_;
    PetriNetBuilder builder_;
    std::mt19937_64 rng_;
    int budget_;
    int next_place_ = 0;
    int next_transition_ = 0;
};

}  // namespace detail

inline PetriNet generate(const GenConfig& config) {
    return detail::BlockGenerator(config).generate();
}

// Chain of exactly `loop_count` loops whose bodies are random acyclic
// blocks; the only cycles are the loop back-edges.
inline PetriNet generate_with_loops(const GenConfig& config, int loop_count) {
    GenConfig body = config;
    body.w_loop = 0.0;
    return detail::BlockGenerator(body).chain_of_loops(loop_count);
}

// One split into `chains` parallel chains of `chain_length` places each,
// rejoined before the sink. Concurrent place pairs:
// chains*(chains-1)/2 * chain_length^2.
inline PetriNet parallel_family(int chains, int chain_length) {
    PetriNetBuilder b;
    const NodeId source = b.add_place("p0", 1);
    const NodeId split = b.add_transition("t0");
    b.add_flow(source, split);
    const NodeId join = b.add_transition("t1");
    int next_place = 1, next_transition = 2;
    for (int c = 0; c < chains; ++c) {
        NodeId prev = b.add_place("p" + std::to_string(next_place++));
        b.add_flow(split, prev);
        for (int l = 1; l < chain_length; ++l) {
            const NodeId t =
                b.add_transition("t" + std::to_string(next_transition++));
            const NodeId p = b.add_place("p" + std::to_string(next_place++));
            b.add_flow(prev, t);
            b.add_flow(t, p);
            prev = p;
        }
        b.add_flow(prev, join);
    }
    const NodeId sink = b.add_place("p" + std::to_string(next_place));
    b.add_flow(join, sink);
    return b.build();
}

inline PetriNet sequence_net(int length) {
    PetriNetBuilder b;
    NodeId prev = b.add_place("p0", 1);
    for (int i = 0; i < length; ++i) {
        const NodeId t = b.add_transition("t" + std::to_string(i));
        const NodeId p = b.add_place("p" + std::to_string(i + 1));
        b.add_flow(prev, t);
        b.add_flow(t, p);
        prev = p;
    }
    return b.build();
}

}  // namespace cpnet
