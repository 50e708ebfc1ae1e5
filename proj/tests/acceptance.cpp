// Acceptance gate: one line per release-blocking criterion, exit code =
// number of failures. Every threshold is pinned here in code. The corpus
// criteria share one deterministic generated corpus; a disagreement anywhere
// is a failure, there is no tolerance.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cpnet/bench.hpp"
#include "cpnet/cp.hpp"
#include "cpnet/decompose.hpp"
#include "cpnet/generate.hpp"
#include "cpnet/io.hpp"
#include "cpnet/koves.hpp"
#include "cpnet/petri.hpp"
#include "cpnet/semantics.hpp"
#include "cpnet/structure.hpp"
#include "test_nets.hpp"

using namespace cpnet;
using namespace testnets;
using steady = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("[ACCEPT] C%d %s: %s (%s)\n", id, name, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <class Fn>
void criterion(int id, const char* name, Fn fn) {
    Outcome outcome;
    try {
        outcome = fn();
    } catch (const std::exception& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    report(id, name, outcome.pass, outcome.detail);
}

double seconds_since(steady::time_point start) {
    return std::chrono::duration<double>(steady::now() - start).count();
}

// ---------------------------------------------------------------- corpus --

// Deterministic generated corpus shared by the agreement, path-invariant,
// no-op-union and decomposition criteria.
struct Corpus {
    bool built = false;
    std::size_t acyclic = 0, cyclic = 0;
    std::size_t agreement_failures = 0;
    std::size_t acyclic_path_failures = 0;
    std::size_t cyclic_path_checked = 0, cyclic_path_failures = 0;
    std::uint64_t union_calls = 0, noop_unions = 0;
    std::size_t decomposed_parts = 0, part_failures = 0;
    double elapsed_seconds = 0;
    std::string first_problem;

    void note(const std::string& problem) {
        if (first_problem.empty()) first_problem = problem;
    }
};

constexpr std::size_t kWantAcyclic = 1000;
constexpr std::size_t kWantCyclic = 300;
constexpr std::size_t kMinNodes = 5, kMaxNodes = 80;
constexpr double kCorpusBudgetSeconds = 600.0;

bool verified_sound(const WorkflowNet& wn) {
    const SoundnessVerdict verdict = check_soundness(wn);
    return !verdict.truncated && verdict.sound;
}

void corpus_check_one(Corpus& corpus, const WorkflowNet& wn, bool cyclic,
                      std::uint64_t seed) {
    const PetriNet& net = wn.net();
    CpStats stats;
    const ConcurrencyRelation cp = concurrent_paths(wn, &stats);
    const ConcurrencyRelation koves = koves_concurrency(net);
    const ConcurrencyRelation oracle = oracle_concurrency(wn);
    const bool agree = cp == oracle && cp.restricted_to_places(net) == koves;
    if (!agree) {
        ++corpus.agreement_failures;
        corpus.note("algorithms disagree on seed " + std::to_string(seed));
    }
    if (!cyclic) {
        corpus.union_calls += stats.union_calls;
        corpus.noop_unions += stats.noop_unions;
        if (stats.noop_unions)
            corpus.note("no-op unions on acyclic seed " + std::to_string(seed));
        if (!check_path_to_end(wn)) {
            ++corpus.acyclic_path_failures;
            corpus.note("path invariant failed on acyclic seed " +
                        std::to_string(seed));
        }
    } else {
        if (corpus.cyclic_path_checked < 100) {
            ++corpus.cyclic_path_checked;
            if (!check_path_to_end(wn)) {
                ++corpus.cyclic_path_failures;
                corpus.note("path invariant failed on cyclic seed " +
                            std::to_string(seed));
            }
        }
        for (const DecomposedNet& part : decompose_loops(wn).nets) {
            ++corpus.decomposed_parts;
            const PetriNet& piece = part.net.net();
            std::string why;
            const bool ok = is_acyclic(piece) && is_free_choice(piece, &why) &&
                            workflow_diagnostics(piece).empty() &&
                            verified_sound(part.net);
            if (!ok) {
                ++corpus.part_failures;
                corpus.note("bad decomposition part on seed " +
                            std::to_string(seed) +
                            (why.empty() ? "" : ": " + why));
            }
        }
    }
}

const Corpus& corpus() {
    static const Corpus instance = [] {
        Corpus c;
        const auto start = steady::now();
        for (std::uint64_t seed = 1; c.acyclic < kWantAcyclic && seed <= 8000;
             ++seed) {
            GenConfig config;
            config.seed = seed;
            config.max_blocks = 3 + static_cast<int>(seed % 12);
            config.max_branch = 2 + static_cast<int>(seed % 3);
            const PetriNet net = generate(config);
            if (net.node_count() < kMinNodes || net.node_count() > kMaxNodes)
                continue;
            const WorkflowNet wn = WorkflowNet::from(net);
            if (!verified_sound(wn)) continue;
            ++c.acyclic;
            try {
                corpus_check_one(c, wn, false, seed);
            } catch (const std::exception& e) {
                ++c.agreement_failures;
                c.note("exception on acyclic seed " + std::to_string(seed) +
                       ": " + e.what());
            }
        }
        for (std::uint64_t seed = 1; c.cyclic < kWantCyclic && seed <= 8000;
             ++seed) {
            GenConfig config;
            config.seed = seed;
            config.max_blocks = 3 + static_cast<int>(seed % 8);
            config.max_branch = 2 + static_cast<int>(seed % 3);
            config.w_loop = 0.4 + 0.2 * static_cast<double>(seed % 3);
            const PetriNet net = generate(config);
            if (net.node_count() < kMinNodes || net.node_count() > kMaxNodes)
                continue;
            if (is_acyclic(net)) continue;
            const WorkflowNet wn = WorkflowNet::from(net);
            if (!verified_sound(wn)) continue;
            ++c.cyclic;
            try {
                corpus_check_one(c, wn, true, seed);
            } catch (const std::exception& e) {
                ++c.agreement_failures;
                c.note("exception on cyclic seed " + std::to_string(seed) +
                       ": " + e.what());
            }
        }
        c.elapsed_seconds = seconds_since(start);
        c.built = true;
        return c;
    }();
    return instance;
}

std::string corpus_size_note(const Corpus& c) {
    std::ostringstream out;
    out << c.acyclic << " acyclic + " << c.cyclic << " cyclic nets";
    return out.str();
}

// ------------------------------------------------------------- criteria --

Outcome c1_reference_relation() {
    const WorkflowNet wn = fig5();
    const auto start = steady::now();
    const ConcurrencyRelation rel = concurrent_paths(wn);
    const double elapsed = seconds_since(start);
    const LabelPairSet got = label_pairs(rel, wn.net());
    const LabelPairSet want = rows_to_pairs(fig5_expected_rows());
    std::ostringstream detail;
    detail << got.size() << "/" << want.size() << " expected pairs, "
           << std::fixed << std::setprecision(3) << elapsed * 1000 << " ms";
    return {got == want && elapsed < 1.0, detail.str()};
}

Outcome c2_reduced_net_reachability() {
    const WorkflowNet wn = fig5();
    const DecompositionResult result = decompose_loops(wn);
    const DecomposedNet& reduced = result.nets.at(0);

    // Loop places take greek display names, copies keep their original label.
    std::map<GlobalId, std::string> rename;
    const auto place_of = [&](const std::string& member) {
        const GlobalId id = wn.net().node(member);
        for (const auto& [place, members] : result.connections)
            if (std::find(members.begin(), members.end(), id) != members.end())
                return place;
        throw std::logic_error("no loop contains " + member);
    };
    rename[place_of("f")] = "alpha";
    rename[place_of("j")] = "beta";
    const auto display = [&](NodeId v) {
        const auto it = rename.find(reduced.global_ids[v]);
        return it != rename.end() ? it->second : reduced.net.net().label(v);
    };

    const std::vector<Bitset> has_path = compute_has_path(reduced.net.net());
    LabelRows rows;
    for (NodeId v = 0; v < reduced.net.net().node_count(); ++v) {
        auto& row = rows[display(v)];
        has_path[v].for_each(
            [&](std::size_t w) { row.insert(display(static_cast<NodeId>(w))); });
    }

    const LabelRows expected = {
        {"a", {"a", "A", "b", "B", "c", "d", "C", "e", "D", "alpha", "G", "h",
               "H", "i", "I", "beta", "o"}},
        {"A", {"A", "b", "B", "c", "d", "C", "e", "D", "alpha", "G", "h", "H",
               "i", "I", "beta", "o"}},
        {"b", {"b", "B", "c", "d", "C", "e", "D", "alpha", "G", "o"}},
        {"B", {"B", "c", "d", "C", "e", "D", "alpha", "G", "o"}},
        {"c", {"c", "C", "e", "D", "alpha", "G", "o"}},
        {"d", {"d", "C", "e", "D", "alpha", "G", "o"}},
        {"C", {"C", "e", "D", "alpha", "G", "o"}},
        {"e", {"e", "D", "alpha", "G", "o"}},
        {"D", {"D", "alpha", "G", "o"}},
        {"alpha", {"alpha", "G", "o"}},
        {"h", {"h", "H", "i", "I", "beta", "G", "o"}},
        {"H", {"H", "i", "I", "beta", "G", "o"}},
        {"i", {"i", "I", "beta", "G", "o"}},
        {"I", {"I", "beta", "G", "o"}},
        {"beta", {"beta", "G", "o"}},
        {"G", {"G", "o"}},
        {"o", {"o"}}};
    std::size_t matching = 0;
    for (const auto& [label, members] : expected) {
        const auto it = rows.find(label);
        if (it != rows.end() && it->second == members) ++matching;
    }
    std::ostringstream detail;
    detail << matching << "/" << expected.size() << " reference rows match";
    return {rows == expected, detail.str()};
}

Outcome c3_named_node_facts() {
    struct Fact {
        const WorkflowNet net;
        const char *a, *b;
        bool concurrent;
    };
    const std::vector<Fact> facts = {
        {fig1(), "e", "d", true},  {fig1(), "d", "C", true},
        {fig1(), "b", "B", false}, {fig2(), "b", "h", true},
        {fig2(), "b", "g", false}, {fig4(), "c", "d", false},
    };
    std::size_t ok = 0;
    std::ostringstream detail;
    for (const Fact& fact : facts) {
        const ConcurrencyRelation rel = concurrent_paths(fact.net);
        const bool got = rel.contains(fact.net.net().node(fact.a),
                                      fact.net.net().node(fact.b));
        if (got == fact.concurrent) {
            ++ok;
        } else {
            detail << " (" << fact.a << "," << fact.b << ") wrong;";
        }
    }
    detail << " " << ok << "/" << facts.size() << " facts hold";
    return {ok == facts.size(), detail.str()};
}

Outcome c4_triple_agreement() {
    const Corpus& c = corpus();
    std::ostringstream detail;
    detail << corpus_size_note(c) << ", " << c.agreement_failures
           << " disagreements, " << std::fixed << std::setprecision(1)
           << c.elapsed_seconds << " s";
    if (!c.first_problem.empty()) detail << "; first: " << c.first_problem;
    const bool pass = c.built && c.acyclic >= kWantAcyclic &&
                      c.cyclic >= kWantCyclic && c.agreement_failures == 0 &&
                      c.elapsed_seconds < kCorpusBudgetSeconds;
    return {pass, detail.str()};
}

Outcome c5_no_path_invariant() {
    const Corpus& c = corpus();
    std::ostringstream detail;
    detail << c.acyclic << " acyclic nets, " << c.acyclic_path_failures
           << " violations";
    return {c.built && c.acyclic >= kWantAcyclic &&
                c.acyclic_path_failures == 0,
            detail.str()};
}

Outcome c6_no_wasted_unions() {
    const Corpus& c = corpus();
    std::ostringstream detail;
    detail << c.noop_unions << " no-op of " << c.union_calls
           << " unions over the acyclic corpus";
    return {c.built && c.acyclic >= kWantAcyclic && c.noop_unions == 0,
            detail.str()};
}

Outcome c7_scaling() {
    BenchOptions options;  // repeat 10, 2 ms samples
    std::vector<BenchNet> parallel;
    for (const int chains : {8, 16, 32, 64})
        parallel.push_back({"parallel_" + std::to_string(chains) + "x2",
                            WorkflowNet::from(parallel_family(chains, 2))});
    const std::vector<BenchRecord> records =
        bench_suite(parallel, {BenchAlgo::Cp, BenchAlgo::Koves}, options);
    std::vector<double> cp_pairs, cp_ns, koves_pairs, koves_ns;
    for (const BenchRecord& r : records) {
        if (r.algo == "cp") {
            cp_pairs.push_back(static_cast<double>(r.pair_count));
            cp_ns.push_back(static_cast<double>(r.wall_time_ns));
        } else {
            koves_pairs.push_back(static_cast<double>(r.pair_count));
            koves_ns.push_back(static_cast<double>(r.wall_time_ns));
        }
    }
    const double cp_slope = fit_loglog_slope(cp_pairs, cp_ns);
    const double koves_slope = fit_loglog_slope(koves_pairs, koves_ns);
    const double speedup = koves_ns.back() / cp_ns.back();

    // Pinned thresholds. The middle clause demands that the worklist
    // algorithm scale at least with exponent 1.6 on this family; measured
    // behavior is ~1.25 (its cost here is near-linear in the relation size
    // plus a cubic join term), so an honest run fails that clause.
    const bool cp_ok = cp_slope <= 1.3;
    const bool koves_ok = koves_slope >= 1.6;
    const bool speedup_ok = speedup >= 5.0;

    std::vector<BenchNet> sequence;
    for (int length = 10; length <= 200; length += 10)
        sequence.push_back({"sequence_" + std::to_string(length),
                            WorkflowNet::from(sequence_net(length))});
    const std::vector<BenchRecord> seq_records =
        bench_suite(sequence, {BenchAlgo::Cp, BenchAlgo::Koves}, options);
    std::size_t koves_wins = 0;
    for (std::size_t i = 0; i + 1 < seq_records.size(); i += 2)
        if (seq_records[i + 1].wall_time_ns < seq_records[i].wall_time_ns)
            ++koves_wins;

    std::ostringstream detail;
    detail << std::fixed << std::setprecision(2) << "cp_slope=" << cp_slope
           << (cp_ok ? "<=1.3 ok" : ">1.3 VIOLATED")
           << ", koves_slope=" << koves_slope
           << (koves_ok ? ">=1.6 ok" : "<1.6 VIOLATED")
           << ", speedup@64=" << speedup << "x"
           << (speedup_ok ? ">=5 ok" : "<5 VIOLATED")
           << "; sequence family: koves faster on " << koves_wins
           << "/20 nets (allowed)";
    return {cp_ok && koves_ok && speedup_ok, detail.str()};
}

Outcome c8_decomposition_wellformed() {
    const Corpus& c = corpus();
    std::ostringstream detail;
    detail << c.decomposed_parts << " parts from " << c.cyclic
           << " cyclic nets, " << c.part_failures << " defective";
    return {c.built && c.cyclic >= kWantCyclic && c.part_failures == 0,
            detail.str()};
}

Outcome c9_path_invariant_on_sound_nets() {
    namespace fs = std::filesystem;
    const fs::path fixtures = CPNET_FIXTURE_DIR;
    std::size_t sound_fixtures = 0, fixture_failures = 0;
    std::vector<std::string> excluded;
    for (const char* name :
         {"fig1.net", "fig2.net", "fig4.net", "fig5.net", "two_exit_loop.net"}) {
        const WorkflowNet wn = WorkflowNet::from(load_net(fixtures / name));
        if (!verified_sound(wn)) {
            excluded.push_back(name);  // unsound nets are out of scope
            continue;
        }
        ++sound_fixtures;
        if (!check_path_to_end(wn)) ++fixture_failures;
    }
    const Corpus& c = corpus();
    const bool generated_ok = c.built && c.acyclic_path_failures == 0 &&
                              c.cyclic_path_checked == 100 &&
                              c.cyclic_path_failures == 0;
    const std::size_t generated_checked =
        std::min<std::size_t>(c.acyclic, 100) + c.cyclic_path_checked;
    std::ostringstream detail;
    detail << sound_fixtures << " sound fixtures ok, excluded:";
    for (const std::string& name : excluded) detail << " " << name;
    detail << "; " << generated_checked << " generated sound nets checked, "
           << c.acyclic_path_failures + c.cyclic_path_failures << " violations";
    const bool pass = fixture_failures == 0 &&
                      excluded == std::vector<std::string>{"fig5.net"} &&
                      generated_ok;
    return {pass, detail.str()};
}

Outcome c10_round_trip() {
    std::size_t round_trips = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        GenConfig config;
        config.seed = seed;
        config.max_blocks = 3 + static_cast<int>(seed % 10);
        if (seed % 3 == 0) config.w_loop = 0.5;
        const PetriNet net = generate(config);
        if (parse_net_text(write_net_text(net)) == net &&
            parse_pnml(write_pnml(net)) == net)
            ++round_trips;
    }
    const PetriNet pnml =
        load_net(std::filesystem::path(CPNET_FIXTURE_DIR) / "fig5.pnml");
    std::set<std::string> labels;
    for (NodeId v = 0; v < pnml.node_count(); ++v)
        if (!pnml.label(v).empty()) labels.insert(pnml.label(v));
    std::ostringstream detail;
    detail << round_trips << "/100 nets round-trip both formats, pnml fixture has "
           << labels.size() << " labeled nodes";
    return {round_trips == 100 && pnml.node_count() == 28 && labels.size() == 28,
            detail.str()};
}

}  // namespace

int main() {
    criterion(1, "reference-relation", c1_reference_relation);
    criterion(2, "reduced-net-reachability", c2_reduced_net_reachability);
    criterion(3, "named-node-facts", c3_named_node_facts);
    criterion(4, "triple-agreement", c4_triple_agreement);
    criterion(5, "acyclic-path-invariant", c5_no_path_invariant);
    criterion(6, "no-wasted-unions", c6_no_wasted_unions);
    criterion(7, "scaling", c7_scaling);
    criterion(8, "decomposition-wellformed", c8_decomposition_wellformed);
    criterion(9, "sound-net-path-invariant", c9_path_invariant_on_sound_nets);
    criterion(10, "round-trip", c10_round_trip);
    std::printf("[ACCEPT] %d of 10 criteria failed\n", failures);
    return failures;
}
