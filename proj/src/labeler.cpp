#include "hlearn/labeler.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <queue>

#include "hlearn/errors.hpp"

namespace hlearn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double ssb_label(const StateSpaceSpec& spec, const HeuristicModel& heuristic_target,
                 const PuzzleState& s) {
    if (is_goal(spec, s)) return 0.0;
    std::vector<Successor> sucs = successors(spec, s);
    if (sucs.empty()) throw std::runtime_error("dead-end state: no successors and not a goal");
    std::vector<PuzzleState> states;
    states.reserve(sucs.size());
    for (const Successor& suc : sucs) states.push_back(suc.state);
    std::vector<double> hs = heuristic_target.evaluate_batch(true, states);
    double best = kInf;
    for (std::size_t i = 0; i < sucs.size(); ++i) best = std::min(best, sucs[i].cost + hs[i]);
    return best;
}

std::vector<double> leaf_heuristics(const SearchGraph& graph,
                                    const HeuristicModel& heuristic_target) {
    std::vector<double> values(graph.size(), 0.0);
    std::vector<int> leaves;
    std::vector<PuzzleState> leaf_states;
    for (int v = 0; v < static_cast<int>(graph.size()); ++v) {
        if (!graph.is_leaf(v)) continue;
        leaves.push_back(v);
        leaf_states.push_back(graph.states[v]);
    }
    std::vector<double> hs = heuristic_target.evaluate_batch(true, leaf_states);
    for (std::size_t i = 0; i < leaves.size(); ++i)
        values[leaves[i]] = graph.goal_flag[leaves[i]] ? 0.0 : hs[i];
    return values;
}

AugmentedGraph build_augmented_graph(const SearchGraph& graph,
                                     const std::vector<double>& leaf_values) {
    if (graph.size() == 0) throw std::invalid_argument("empty search graph");
    AugmentedGraph aug;
    aug.original_vertices = graph.size();
    aug.z = static_cast<int>(graph.size());
    aug.rev_out.resize(graph.size() + 1);
    for (int u = 0; u < static_cast<int>(graph.size()); ++u) {
        for (auto [v, c] : graph.out[u]) aug.rev_out[v].emplace_back(u, c);
        if (graph.is_leaf(u)) {
            double h = graph.goal_flag[u] ? 0.0 : leaf_values[u];
            if (!(h >= 0.0) || !std::isfinite(h))
                throw std::logic_error("leaf heuristic must be finite and nonnegative");
            aug.rev_out[aug.z].emplace_back(u, h);
        }
    }
    return aug;
}

AugmentedGraph build_augmented_graph(const SearchGraph& graph,
                                     const HeuristicModel& heuristic_target) {
    return build_augmented_graph(graph, leaf_heuristics(graph, heuristic_target));
}

std::vector<double> lhb_labels(const SearchGraph& graph, const std::vector<double>& leaf_values) {
    AugmentedGraph aug = build_augmented_graph(graph, leaf_values);

    // Dijkstra from z with a binary heap and lazy stale-entry skipping.
    std::vector<double> dist(aug.rev_out.size(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[aug.z] = 0.0;
    heap.push({0.0, aug.z});
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (auto [u, c] : aug.rev_out[v]) {
            double nd = d + c;
            if (nd < dist[u]) {
                dist[u] = nd;
                heap.push({nd, u});
            }
        }
    }
    dist.resize(aug.original_vertices);
    return dist;
}

std::vector<double> lhb_labels(const SearchGraph& graph, const HeuristicModel& heuristic_target) {
    return lhb_labels(graph, leaf_heuristics(graph, heuristic_target));
}

LabelBatch labels_to_batch(const std::vector<double>& labels, const SearchGraph& graph,
                           bool include_leaves) {
    LabelBatch batch;
    batch.provenance = LabelProvenance::Lhb;
    for (int v = 0; v < static_cast<int>(graph.size()); ++v) {
        // The root is always emitted; it is only a leaf in the degenerate
        // goal-start graph, which still yields the single label (goal, 0).
        if (!include_leaves && graph.is_leaf(v) && v != graph.root) continue;
        if (!std::isfinite(labels[v])) continue;
        batch.states.push_back(graph.states[v]);
        batch.targets.push_back(graph.goal_flag[v] ? 0.0 : labels[v]);
    }
    return batch;
}

}  // namespace hlearn
