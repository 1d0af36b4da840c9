#pragma once

#include <vector>

#include "hlearn/heuristics.hpp"
#include "hlearn/search.hpp"

namespace hlearn {

/// Search graph plus the auxiliary sink z, stored edge-reversed and ready for
/// Dijkstra: rev_out[v] lists (u, c) for every forward edge (u, v, c). z is
/// vertex index `size() - 1`; it carries one reversed edge per leaf with cost
/// equal to the leaf's clamped target-heuristic value (0 for goal leaves).
struct AugmentedGraph {
    std::vector<std::vector<std::pair<int, double>>> rev_out;
    int z = 0;
    std::size_t original_vertices = 0;
};

/// Single-step Bellman label: 0 for the goal, otherwise the minimum over
/// successors of edge cost plus the clamped target-heuristic value, evaluated
/// in one batch call.
double ssb_label(const StateSpaceSpec& spec, const HeuristicModel& heuristic_target,
                 const PuzzleState& s);

/// Leaf heuristic values for a graph, via one batched target evaluation.
/// Non-leaf positions hold 0. Goal leaves are pinned to exactly 0.
std::vector<double> leaf_heuristics(const SearchGraph& graph,
                                    const HeuristicModel& heuristic_target);

/// Builds the reversed augmented graph from explicit leaf values (entries are
/// read only at leaf indices; they must be finite and >= 0).
AugmentedGraph build_augmented_graph(const SearchGraph& graph,
                                     const std::vector<double>& leaf_values);
AugmentedGraph build_augmented_graph(const SearchGraph& graph,
                                     const HeuristicModel& heuristic_target);

/// Limited-horizon Bellman labels: Dijkstra from z on the reversed augmented
/// graph. Returns one value per original vertex; vertices that reach no leaf
/// get +infinity.
std::vector<double> lhb_labels(const SearchGraph& graph, const std::vector<double>& leaf_values);
std::vector<double> lhb_labels(const SearchGraph& graph, const HeuristicModel& heuristic_target);

/// Packs labels into a training batch. By default only expanded vertices are
/// emitted; infinite labels are always dropped.
LabelBatch labels_to_batch(const std::vector<double>& labels, const SearchGraph& graph,
                           bool include_leaves = false);

}  // namespace hlearn
