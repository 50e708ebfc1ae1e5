#pragma once

// Benchmark harness: times the concurrency algorithms on named nets and
// emits CSV. Each measurement repeats the computation until a minimum
// wall-clock sample is reached (so fast nets are not lost in timer noise),
// takes several such samples and reports their trimmed mean. Before any
// timing, the harness computes each algorithm's relation once and verifies
// that all requested algorithms agree on the concurrent place pairs; a
// mismatch aborts with a diff instead of producing misleading numbers.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cpnet/cp.hpp"
#include "cpnet/koves.hpp"
#include "cpnet/petri.hpp"
#include "cpnet/semantics.hpp"

namespace cpnet {

enum class BenchAlgo { Cp, Koves, Oracle };

inline const char* to_string(BenchAlgo algo) {
    switch (algo) {
        case BenchAlgo::Cp: return "cp";
        case BenchAlgo::Koves: return "koves";
        case BenchAlgo::Oracle: return "oracle";
    }
    return "?";
}

inline std::optional<BenchAlgo> bench_algo_from(std::string_view name) {
    if (name == "cp") return BenchAlgo::Cp;
    if (name == "koves") return BenchAlgo::Koves;
    if (name == "oracle") return BenchAlgo::Oracle;
    return std::nullopt;
}

struct BenchNet {
    std::string name;
    WorkflowNet net;
};

struct BenchRecord {
    std::string net_name;
    std::size_t node_count = 0;
    std::size_t place_count = 0;
    std::size_t transition_count = 0;
    std::size_t flow_count = 0;
    std::size_t pair_count = 0;  // of the relation this algorithm computes
    std::string algo;
    std::uint64_t wall_time_ns = 0;
    std::uint64_t visited_nodes = 0;
};

struct BenchOptions {
    int repeat = 10;
    std::uint64_t min_sample_ns = 2'000'000;  // adaptive inner-loop target
    int workers = 1;
    std::size_t oracle_cap = kDefaultStateCap;
};

class AlgorithmMismatchError : public NetError {
    using NetError::NetError;
};

namespace detail {

// Nanoseconds for a single run; repeats the callable until the total
// sample is long enough to trust the clock.
template <class Fn>
std::uint64_t time_single_run(Fn&& fn, std::uint64_t min_sample_ns) {
    using clock = std::chrono::steady_clock;
    std::uint64_t iterations = 1;
    for (;;) {
        const auto start = clock::now();
        for (std::uint64_t i = 0; i < iterations; ++i) fn();
        const auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                 clock::now() - start)
                                 .count();
        if (elapsed >= static_cast<long long>(min_sample_ns) ||
            iterations >= (1ull << 24))
            return static_cast<std::uint64_t>(elapsed) / iterations;
        const std::uint64_t grow =
            elapsed <= 0 ? iterations * 16
                         : iterations * min_sample_ns / elapsed + 1;
        iterations = std::max(iterations + 1, grow);
    }
}

inline std::uint64_t trimmed_mean(std::vector<std::uint64_t> samples) {
    if (samples.empty()) return 0;
    std::sort(samples.begin(), samples.end());
    std::size_t lo = 0, hi = samples.size();
    if (samples.size() >= 3) {
        ++lo;  // drop the best and the worst sample
        --hi;
    }
    std::uint64_t total = 0;
    for (std::size_t i = lo; i < hi; ++i) total += samples[i];
    return total / (hi - lo);
}

inline ConcurrencyRelation run_algorithm(BenchAlgo algo, const WorkflowNet& wn,
                                         const BenchOptions& options,
                                         std::uint64_t* visited) {
    switch (algo) {
        case BenchAlgo::Cp: {
            CpStats stats;
            ConcurrencyRelation rel = concurrent_paths(wn, &stats);
            if (visited) *visited = stats.visited_nodes;
            return rel;
        }
        case BenchAlgo::Koves: {
            KovesStats stats;
            ConcurrencyRelation rel = koves_concurrency(wn.net(), &stats);
            if (visited) *visited = stats.pops;
            return rel;
        }
        case BenchAlgo::Oracle: {
            if (visited)
                *visited = explore(wn, options.oracle_cap).markings.size();
            return oracle_concurrency(wn, RelationScope::AllNodes,
                                      options.oracle_cap);
        }
    }
    throw NetError("unknown benchmark algorithm");
}

inline void describe_difference(std::ostringstream& out, const char* kind,
                                const PetriNet& net,
                                const ConcurrencyRelation& have,
                                const ConcurrencyRelation& lack) {
    int shown = 0;
    for (auto [a, b] : have.pairs()) {
        if (lack.contains(a, b)) continue;
        if (shown++ == 8) {
            out << " ...";
            break;
        }
        out << " (" << net.label(a) << "," << net.label(b) << ")";
    }
    if (shown) out << " only in " << kind << ";";
}

}  // namespace detail

// Times every requested algorithm on one net. All computed relations must
// agree on the concurrent place pairs.
inline std::vector<BenchRecord> bench_net(const std::string& name,
                                          const WorkflowNet& wn,
                                          const std::vector<BenchAlgo>& algos,
                                          const BenchOptions& options = {}) {
    const PetriNet& net = wn.net();
    std::vector<BenchRecord> records;
    std::vector<ConcurrencyRelation> place_relations;
    for (const BenchAlgo algo : algos) {
        BenchRecord record;
        record.net_name = name;
        record.node_count = net.node_count();
        record.place_count = net.places().size();
        record.transition_count = net.transitions().size();
        record.flow_count = net.flows().size();
        record.algo = to_string(algo);

        const ConcurrencyRelation rel =
            detail::run_algorithm(algo, wn, options, &record.visited_nodes);
        record.pair_count = rel.pair_count();
        place_relations.push_back(rel.scope() == RelationScope::PlacesOnly
                                      ? rel
                                      : rel.restricted_to_places(net));

        std::vector<std::uint64_t> samples;
        samples.reserve(static_cast<std::size_t>(std::max(options.repeat, 1)));
        for (int r = 0; r < std::max(options.repeat, 1); ++r)
            samples.push_back(detail::time_single_run(
                [&] { detail::run_algorithm(algo, wn, options, nullptr); },
                options.min_sample_ns));
        record.wall_time_ns = detail::trimmed_mean(std::move(samples));
        records.push_back(std::move(record));
    }

    for (std::size_t i = 1; i < place_relations.size(); ++i) {
        if (place_relations[i] == place_relations[0]) continue;
        std::ostringstream out;
        out << "algorithms disagree on net '" << name << "':";
        detail::describe_difference(out, to_string(algos[0]), net,
                                    place_relations[0], place_relations[i]);
        detail::describe_difference(out, to_string(algos[i]), net,
                                    place_relations[i], place_relations[0]);
        throw AlgorithmMismatchError(out.str());
    }
    return records;
}

// Benchmarks a whole suite, optionally spreading nets over worker threads.
// Records keep the input order regardless of the worker count.
inline std::vector<BenchRecord> bench_suite(const std::vector<BenchNet>& nets,
                                            const std::vector<BenchAlgo>& algos,
                                            const BenchOptions& options = {}) {
    std::vector<std::vector<BenchRecord>> slots(nets.size());
    const int workers =
        std::max(1, std::min<int>(options.workers,
                                  static_cast<int>(nets.size() ? nets.size() : 1)));
    if (workers == 1) {
        for (std::size_t i = 0; i < nets.size(); ++i)
            slots[i] = bench_net(nets[i].name, nets[i].net, algos, options);
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::string first_error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= nets.size() || failed.load()) return;
                    try {
                        slots[i] =
                            bench_net(nets[i].name, nets[i].net, algos, options);
                    } catch (const std::exception& e) {
                        const std::lock_guard<std::mutex> lock(error_mutex);
                        if (!failed.exchange(true)) first_error = e.what();
                        return;
                    }
                }
            });
        for (std::thread& t : pool) t.join();
        if (failed.load()) throw AlgorithmMismatchError(first_error);
    }
    std::vector<BenchRecord> records;
    for (std::vector<BenchRecord>& slot : slots)
        for (BenchRecord& record : slot) records.push_back(std::move(record));
    return records;
}

inline constexpr const char* kBenchCsvHeader =
    "net_name,node_count,place_count,transition_count,flow_count,pair_count,"
    "algo,wall_time_ns,visited_nodes";

inline void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << kBenchCsvHeader << '\n';
    for (const BenchRecord& r : records)
        out << r.net_name << ',' << r.node_count << ',' << r.place_count << ','
            << r.transition_count << ',' << r.flow_count << ',' << r.pair_count
            << ',' << r.algo << ',' << r.wall_time_ns << ',' << r.visited_nodes
            << '\n';
}

// Least-squares slope of log(y) against log(x); requires positive values.
inline double fit_loglog_slope(const std::vector<double>& x,
                               const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw NetError("slope fit needs at least two matching samples");
    const std::size_t n = x.size();
    double mean_x = 0, mean_y = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] <= 0 || y[i] <= 0)
            throw NetError("slope fit needs positive samples");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mean_x += lx[i];
        mean_y += ly[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double numerator = 0, denominator = 0;
    for (std::size_t i = 0; i < n; ++i) {
        numerator += (lx[i] - mean_x) * (ly[i] - mean_y);
        denominator += (lx[i] - mean_x) * (lx[i] - mean_x);
    }
    if (denominator == 0) throw NetError("slope fit needs distinct x samples");
    return numerator / denominator;
}

}  // namespace cpnet
