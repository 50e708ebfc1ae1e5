// cpnet — concurrency analysis for workflow nets.
//
//   cpnet analyze [options] FILE   compute which nodes can be active at the
//                                  same time, or validate the net (--check)
//   cpnet bench   [options]        time the algorithms, emit CSV
//   cpnet gen     [options]        generate a random workflow net
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid or rejected input,
// 3 state-space exploration hit the state cap.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpnet/bench.hpp"
#include "cpnet/cp.hpp"
#include "cpnet/generate.hpp"
#include "cpnet/io.hpp"
#include "cpnet/koves.hpp"
#include "cpnet/petri.hpp"
#include "cpnet/semantics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitTruncated = 3;

struct AnalyzeArgs {
    std::string file;
    std::string algo = "cp";
    std::string format;  // empty = by file extension
    std::string out = "pairs";
    bool places_only = false;
    bool check_only = false;
    std::size_t state_cap = cpnet::kDefaultStateCap;
    bool state_cap_set = false;
};

struct BenchArgs {
    std::string family;
    std::string dir;
    std::string algos = "cp,koves";
    std::string out;
    int repeat = 10;
    int parallel = 1;
};

struct GenArgs {
    std::uint64_t seed = 1;
    int blocks = 12;
    int loops = 0;
    std::string out;
    std::string format = "net";
};

std::optional<cpnet::NetFormat> parse_format(const std::string& name) {
    if (name.empty()) return std::nullopt;
    return name == "pnml" ? cpnet::NetFormat::Pnml : cpnet::NetFormat::Text;
}

// The CP_STATE_CAP environment variable supplies a default exploration cap;
// an explicit --state-cap always wins.
void apply_state_cap_env(AnalyzeArgs& args) {
    if (args.state_cap_set) return;
    const char* env = std::getenv("CP_STATE_CAP");
    if (!env) return;
    try {
        const unsigned long long value = std::stoull(env);
        if (value > 0) args.state_cap = static_cast<std::size_t>(value);
    } catch (const std::exception&) {
        std::cerr << "warning: ignoring invalid CP_STATE_CAP='" << env << "'\n";
    }
}

// Label pairs, each ordered lexicographically, the list sorted the same way.
std::vector<std::pair<std::string, std::string>> sorted_label_pairs(
    const cpnet::ConcurrencyRelation& rel, const cpnet::PetriNet& net) {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [a, b] : rel.pairs()) {
        std::string la = net.label(a), lb = net.label(b);
        if (lb < la) std::swap(la, lb);
        out.emplace_back(std::move(la), std::move(lb));
    }
    std::sort(out.begin(), out.end());
    return out;
}

int run_check(const cpnet::PetriNet& net) {
    std::vector<std::string> problems = cpnet::workflow_diagnostics(net);
    std::string why;
    if (!cpnet::is_free_choice(net, &why)) problems.push_back(why);
    if (!problems.empty()) {
        std::cerr << "net rejected:\n";
        for (const std::string& p : problems) std::cerr << "  - " << p << '\n';
        return kExitInvalidInput;
    }
    std::cout << "ok: " << net.places().size() << " places, "
              << net.transitions().size() << " transitions, "
              << net.flows().size() << " arcs"
              << (cpnet::is_acyclic(net) ? ", acyclic" : ", cyclic") << '\n';
    return kExitOk;
}

int run_analyze(AnalyzeArgs& args) {
    apply_state_cap_env(args);
    std::vector<std::string> warnings;
    const cpnet::PetriNet net =
        cpnet::load_net(args.file, parse_format(args.format), &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
    if (args.check_only) return run_check(net);

    const cpnet::WorkflowNet wn = cpnet::WorkflowNet::from(net);
    const auto algo = cpnet::bench_algo_from(args.algo);
    std::uint64_t visited = 0;
    cpnet::BenchOptions options;
    options.oracle_cap = args.state_cap;
    cpnet::ConcurrencyRelation rel =
        cpnet::detail::run_algorithm(*algo, wn, options, &visited);
    const bool places_only =
        args.places_only || rel.scope() == cpnet::RelationScope::PlacesOnly;
    if (places_only && rel.scope() == cpnet::RelationScope::AllNodes)
        rel = rel.restricted_to_places(net);

    const auto pairs = sorted_label_pairs(rel, net);
    if (args.out == "pairs") {
        for (const auto& [a, b] : pairs) std::cout << a << ' ' << b << '\n';
    } else if (args.out == "csv") {
        std::cout << "a,b\n";
        for (const auto& [a, b] : pairs) std::cout << a << ',' << b << '\n';
    } else {
        nlohmann::json doc;
        doc["file"] = args.file;
        doc["algo"] = args.algo;
        doc["scope"] = places_only ? "places" : "all";
        doc["node_count"] = net.node_count();
        doc["place_count"] = net.places().size();
        doc["transition_count"] = net.transitions().size();
        doc["pair_count"] = pairs.size();
        doc["visited"] = visited;
        nlohmann::json list = nlohmann::json::array();
        for (const auto& [a, b] : pairs)
            list.push_back(nlohmann::json::array({a, b}));
        doc["pairs"] = std::move(list);
        std::cout << doc.dump(2) << '\n';
    }
    return kExitOk;
}

std::vector<cpnet::BenchNet> family_nets(const std::string& family) {
    std::vector<cpnet::BenchNet> nets;
    if (family == "parallel") {
        for (const int chains : {8, 16, 32, 64})
            nets.push_back({"parallel_" + std::to_string(chains) + "x2",
                            cpnet::WorkflowNet::from(
                                cpnet::parallel_family(chains, 2))});
    } else {  // sequence: twenty nets of growing length
        for (int length = 10; length <= 200; length += 10)
            nets.push_back({"sequence_" + std::to_string(length),
                            cpnet::WorkflowNet::from(cpnet::sequence_net(length))});
    }
    return nets;
}

std::vector<cpnet::BenchNet> dir_nets(const std::string& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".net" || ext == ".pnml" || ext == ".xml")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<cpnet::BenchNet> nets;
    for (const std::filesystem::path& file : files)
        nets.push_back({file.stem().string(),
                        cpnet::WorkflowNet::from(cpnet::load_net(file))});
    return nets;
}

int run_bench(const BenchArgs& args) {
    if (args.family.empty() && args.dir.empty()) {
        std::cerr << "error: pick --family parallel|sequence or --dir DIR\n";
        return kExitInvalidInput;
    }
    std::vector<cpnet::BenchAlgo> algos;
    std::istringstream list(args.algos);
    for (std::string name; std::getline(list, name, ',');) {
        const auto algo = cpnet::bench_algo_from(name);
        if (!algo) {
            std::cerr << "error: unknown algorithm '" << name << "'\n";
            return kExitInvalidInput;
        }
        algos.push_back(*algo);
    }
    const std::vector<cpnet::BenchNet> nets =
        args.dir.empty() ? family_nets(args.family) : dir_nets(args.dir);
    if (nets.empty()) {
        std::cerr << "error: nothing to benchmark\n";
        return kExitInvalidInput;
    }
    cpnet::BenchOptions options;
    options.repeat = args.repeat;
    options.workers = args.parallel;
    const std::vector<cpnet::BenchRecord> records =
        cpnet::bench_suite(nets, algos, options);
    if (args.out.empty()) {
        cpnet::write_csv(std::cout, records);
    } else {
        std::ofstream out(args.out);
        if (!out) throw cpnet::NetError("cannot write '" + args.out + "'");
        cpnet::write_csv(out, records);
        std::cerr << records.size() << " records -> " << args.out << '\n';
    }
    return kExitOk;
}

int run_gen(const GenArgs& args) {
    cpnet::GenConfig config;
    config.seed = args.seed;
    config.max_blocks = args.blocks;
    const cpnet::PetriNet net =
        args.loops > 0 ? cpnet::generate_with_loops(config, args.loops)
                       : cpnet::generate(config);
    const std::string text = args.format == "pnml" ? cpnet::write_pnml(net)
                                                   : cpnet::write_net_text(net);
    if (args.out.empty()) {
        std::cout << text;
    } else {
        cpnet::save_net(args.out, net, parse_format(
            args.out.ends_with(".pnml") || args.out.ends_with(".xml")
                ? "pnml" : "net"));
        std::cerr << "net with " << net.node_count() << " nodes -> " << args.out
                  << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"concurrency analysis for workflow nets"};
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    CLI::App* analyze =
        app.add_subcommand("analyze", "compute or check a net's concurrency");
    analyze->add_option("file", analyze_args.file, "net file (.net or .pnml)")
        ->required();
    analyze->add_option("--algo", analyze_args.algo, "cp, koves or oracle")
        ->check(CLI::IsMember({"cp", "koves", "oracle"}));
    analyze->add_option("--format", analyze_args.format,
                        "input format, otherwise guessed from the extension")
        ->check(CLI::IsMember({"net", "pnml"}));
    analyze->add_flag("--places-only", analyze_args.places_only,
                      "restrict the relation to place pairs");
    analyze->add_option("--out", analyze_args.out, "pairs, json or csv")
        ->check(CLI::IsMember({"pairs", "json", "csv"}));
    analyze
        ->add_option("--state-cap", analyze_args.state_cap,
                     "marking limit for the oracle (env CP_STATE_CAP)")
        ->each([&](const std::string&) { analyze_args.state_cap_set = true; });
    analyze->add_flag("--check", analyze_args.check_only,
                      "only validate workflow shape and free choice");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "time the algorithms, emit CSV");
    CLI::Option* family_opt =
        bench->add_option("--family", bench_args.family, "parallel or sequence")
            ->check(CLI::IsMember({"parallel", "sequence"}));
    bench->add_option("--dir", bench_args.dir, "benchmark every net in a directory")
        ->excludes(family_opt);
    bench->add_option("--algos", bench_args.algos,
                      "comma-separated algorithms (default cp,koves)");
    bench->add_option("--repeat", bench_args.repeat, "samples per measurement")
        ->check(CLI::PositiveNumber);
    bench->add_option("--parallel", bench_args.parallel, "worker threads")
        ->check(CLI::PositiveNumber);
    bench->add_option("--out", bench_args.out, "CSV file (default stdout)");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a random workflow net");
    gen->add_option("--seed", gen_args.seed, "generator seed");
    gen->add_option("--blocks", gen_args.blocks, "size budget")
        ->check(CLI::PositiveNumber);
    gen->add_option("--loops", gen_args.loops, "exact number of loops")
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--out", gen_args.out, "output file (default stdout)");
    gen->add_option("--format", gen_args.format, "net or pnml (stdout only)")
        ->check(CLI::IsMember({"net", "pnml"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(analyze_args);
        if (bench->parsed()) return run_bench(bench_args);
        return run_gen(gen_args);
    } catch (const cpnet::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        for (const std::string& d : e.diagnostics())
            std::cerr << "  - " << d << '\n';
        return kExitInvalidInput;
    } catch (const cpnet::FreeChoiceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const cpnet::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const cpnet::TruncatedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitTruncated;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
