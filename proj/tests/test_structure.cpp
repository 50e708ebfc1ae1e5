#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "cpnet/structure.hpp"
#include "test_nets.hpp"

using namespace cpnet;

namespace {

std::vector<std::string> labels_of(const PetriNet& net,
                                   const std::vector<NodeId>& ids) {
    std::vector<std::string> out;
    for (NodeId v : ids) out.push_back(net.label(v));
    return out;
}

std::set<std::string> label_set(const PetriNet& net, const Bitset& bits) {
    std::set<std::string> out;
    bits.for_each([&](std::size_t v) { out.insert(net.label(static_cast<NodeId>(v))); });
    return out;
}

}  // namespace

TEST_CASE("reverse topological order lists the chain sink first") {
    const PetriNet net = testnets::make_sequence(1);  // p0 -> t0 -> p1
    const auto order = labels_of(net, reverse_topological_order(net));
    REQUIRE(order == std::vector<std::string>{"p1", "t0", "p0"});
}

TEST_CASE("reverse topological order respects every flow") {
    const PetriNet net = testnets::make_fig2();
    const auto order = reverse_topological_order(net);
    REQUIRE(order.size() == net.node_count());
    std::vector<std::size_t> pos(net.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const Flow& f : net.flows()) REQUIRE(pos[f.to] < pos[f.from]);
}

TEST_CASE("cyclic nets are rejected by order and closure computations") {
    const PetriNet net = testnets::make_two_exit_loop();
    REQUIRE_THROWS_AS(reverse_topological_order(net), CyclicNetError);
    REQUIRE_THROWS_AS(compute_has_path(net), CyclicNetError);
    REQUIRE_FALSE(is_acyclic(net));
    REQUIRE(is_acyclic(testnets::make_fig1()));
}

TEST_CASE("has_path closure on the split/join net") {
    const PetriNet net = testnets::make_fig1();
    const auto hp = compute_has_path(net);

    auto row = [&](const std::string& l) { return label_set(net, hp[net.node(l)]); };
    REQUIRE(row("a") ==
            std::set<std::string>{"a", "A", "b", "B", "c", "C", "d", "e", "D", "o"});
    REQUIRE(row("b") == std::set<std::string>{"b", "B", "c", "C", "e", "D", "o"});
    REQUIRE(row("d") == std::set<std::string>{"d", "D", "o"});
    REQUIRE(row("o") == std::set<std::string>{"o"});

    for (NodeId v = 0; v < net.node_count(); ++v) {
        REQUIRE(hp[v].test(v));
        for (NodeId s : net.postset(v)) REQUIRE(hp[s].is_subset_of(hp[v]));
    }
}

TEST_CASE("reachability closures") {
    const PetriNet net = testnets::make_fig4();
    REQUIRE(label_set(net, reachable_from(net, net.node("c"))) ==
            std::set<std::string>{"c", "C", "o"});
    REQUIRE(label_set(net, reaching(net, net.node("c"))) ==
            std::set<std::string>{"a", "A", "c"});
}

TEST_CASE("acyclic nets contain no loops") {
    REQUIRE(find_loops(testnets::make_fig1()).empty());
    REQUIRE(find_loops(testnets::make_fig2()).empty());
    REQUIRE(find_loops(testnets::make_fig4()).empty());
}

TEST_CASE("single loop with shared entry/exit place") {
    const PetriNet net = testnets::make_two_exit_loop();
    const auto loops = find_loops(net);
    REQUIRE(loops.size() == 1);
    REQUIRE(labels_of(net, loops[0].nodes) ==
            std::vector<std::string>{"p1", "p2", "tnext", "tback"});
    REQUIRE(labels_of(net, loops[0].entries) == std::vector<std::string>{"p1"});
    REQUIRE(labels_of(net, loops[0].exits) ==
            std::vector<std::string>{"p1", "p2"});
}

TEST_CASE("nested loops collapse into one maximal component") {
    const PetriNet net = testnets::make_nested_loops();
    const auto loops = find_loops(net);
    REQUIRE(loops.size() == 1);
    std::set<std::string> nodes;
    for (NodeId v : loops[0].nodes) nodes.insert(net.label(v));
    REQUIRE(nodes == std::set<std::string>{"p", "U1", "x", "V1", "y", "V2",
                                           "U2", "r", "U3"});
    REQUIRE(labels_of(net, loops[0].entries) == std::vector<std::string>{"p"});
    REQUIRE(labels_of(net, loops[0].exits) == std::vector<std::string>{"r"});
}

TEST_CASE("two-loop fixture yields both loops with their entries and exits") {
    const PetriNet net = testnets::make_fig5();
    const auto loops = find_loops(net);
    REQUIRE(loops.size() == 2);

    std::set<std::string> left;
    for (NodeId v : loops[0].nodes) left.insert(net.label(v));
    REQUIRE(left == std::set<std::string>{"b", "B", "c", "d", "C", "e", "D",
                                          "f", "E", "g", "F"});
    REQUIRE(labels_of(net, loops[0].entries) == std::vector<std::string>{"b"});
    REQUIRE(labels_of(net, loops[0].exits) == std::vector<std::string>{"f"});

    std::set<std::string> right;
    for (NodeId v : loops[1].nodes) right.insert(net.label(v));
    REQUIRE(right == std::set<std::string>{"h", "H", "i", "I", "j", "J", "k",
                                           "K", "l", "m", "L", "n", "M"});
    REQUIRE(labels_of(net, loops[1].entries) == std::vector<std::string>{"h"});
    REQUIRE(labels_of(net, loops[1].exits) == std::vector<std::string>{"j", "k"});
}
