#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlearn/domains.hpp"
#include "hlearn/heuristics.hpp"

namespace hlearn {

struct SearchLimits {
    std::uint64_t max_expansions = 0;  // 0 = unlimited
    double max_time_ms = 0.0;          // 0 = unlimited
    std::uint64_t max_states = 0;      // open+closed unique states, 0 = unlimited

    bool any() const { return max_expansions > 0 || max_time_ms > 0.0 || max_states > 0; }
};

enum class LimitHit { None, Expansions, Time, Memory };

std::string limit_hit_name(LimitHit l);

struct RunRecord {
    std::string instance_id;
    bool solved = false;
    double solution_cost = 0.0;  // meaningful only when solved
    std::size_t solution_length = 0;
    std::uint64_t nodes_generated = 0;  // every successor produced, pre-dedup
    std::uint64_t nodes_expanded = 0;
    double wall_time_ms = 0.0;
    int batch_size = 1;
    double lambda = 1.0;
    LimitHit limit_hit = LimitHit::None;
};

struct TraceRow {
    std::uint64_t expansion_index;
    double h;
    double g;
};

struct SolveResult {
    RunRecord record;
    std::vector<int> path_ops;  // populated when solved
};

/// Batch Weighted A*: each round removes up to `batch_size` lowest-f nodes
/// (f = lambda*g + h), goal-tests them at selection, and expands the rest with
/// all successor heuristic evaluations batched into one evaluate_batch call.
/// Ties: lower f, then higher g, then FIFO. Duplicates keep the lower g and
/// are reopened when improved. At least one limit must be set.
///
/// `trace`, when given, receives one row per expansion plus a final row for
/// the selected goal (omitted when the start is already the goal).
SolveResult bwas(const StateSpaceSpec& spec, const HeuristicModel& model,
                 const PuzzleState& start, int batch_size, double lambda,
                 const SearchLimits& limits, bool use_target = false,
                 std::vector<TraceRow>* trace = nullptr);

/// Partially expanded, duplicate-merged search graph. Vertices with no
/// outgoing edges are the frontier leaves. May contain cycles.
struct SearchGraph {
    StateSpaceSpec spec;
    std::vector<PuzzleState> states;  // empty for synthetic test graphs
    std::vector<std::vector<std::pair<int, double>>> out;
    std::vector<char> expanded;
    std::vector<char> goal_flag;
    std::vector<double> best_g;
    std::vector<int> expansion_order;
    int root = 0;

    std::size_t size() const { return out.size(); }
    bool is_leaf(int v) const { return out[static_cast<std::size_t>(v)].empty(); }
};

enum class HorizonAlgo { AStarUnit, Gbfs };

/// Runs min(N, reachable) expansions from `start` guided by the model's
/// target parameters, recording every generated edge (duplicates and cycles
/// included). A selected goal stops the search and remains a leaf.
SearchGraph run_limited_horizon(const StateSpaceSpec& spec, const HeuristicModel& model,
                                const PuzzleState& start, int horizon, HorizonAlgo algo);

/// Operator sequence of a solved run. Throws std::logic_error when unsolved.
std::vector<int> reconstruct_path(const SolveResult& result);

}  // namespace hlearn
