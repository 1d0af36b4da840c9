#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hlearn/heuristics.hpp"
#include "hlearn/search.hpp"

namespace hlearn {

struct TestInstance {
    std::string id;
    StateSpaceSpec spec;
    PuzzleState start;
    int scramble_depth = 0;
    std::uint64_t seed = 0;
};

/// Exact cost-to-go for every state reachable from the goal.
struct OracleTable {
    StateSpaceSpec spec;
    std::unordered_map<PuzzleState, double, PuzzleStateHash> dist;
    double max_cost = 0.0;

    std::optional<double> lookup(const PuzzleState& s) const {
        auto it = dist.find(s);
        if (it == dist.end()) return std::nullopt;
        return it->second;
    }
};

using DepthSchedule = std::function<int(std::uint64_t index)>;

/// Deterministic instance list; instance i is scrambled to depth_schedule(i)
/// with per-instance seed base_seed + i.
std::vector<TestInstance> generate_test_set(const StateSpaceSpec& spec, std::uint64_t count,
                                            const DepthSchedule& depth_schedule,
                                            std::uint64_t base_seed);
/// Default schedule: linear ramp from 0 to depth_max.
std::vector<TestInstance> generate_test_set(const StateSpaceSpec& spec, std::uint64_t count,
                                            int depth_max, std::uint64_t base_seed);

/// Rough upper bound on the domain's state count, used to refuse oracle
/// construction on spaces that cannot be enumerated.
double estimate_state_count(const StateSpaceSpec& spec);

/// Backward uniform-cost enumeration from the goal. Throws ConfigError with
/// the state-count estimate when it exceeds `cap`.
OracleTable build_oracle(const StateSpaceSpec& spec, double cap = 5e6);

struct BenchmarkRow {
    RunRecord record;
    std::optional<double> optimal_cost;
};

struct BenchmarkOptions {
    std::vector<int> batch_sizes = {1};
    double lambda = 1.0;
    SearchLimits limits;
    const OracleTable* oracle = nullptr;  // optional, fills optimal_cost
};

/// Runs bwas for every (instance, B) cell; rows in instance-major order.
std::vector<BenchmarkRow> benchmark(const HeuristicModel& model,
                                    const std::vector<TestInstance>& instances,
                                    const BenchmarkOptions& opts);

/// (expansion_index, h, g) rows for a single run; see bwas trace semantics.
std::vector<TraceRow> depression_trace(const HeuristicModel& model, const TestInstance& instance,
                                       int batch_size, double lambda, const SearchLimits& limits);

/// Writes the results CSV. The wall_time_ms column is left empty when
/// include_wall_time is false so identical runs produce identical bytes.
void write_results_csv(const std::string& path, const std::vector<BenchmarkRow>& rows,
                       bool include_wall_time = true);
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

}  // namespace hlearn
