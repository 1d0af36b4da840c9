#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hlearn/labeler.hpp"
#include "support/oracles.hpp"

using namespace hlearn;

namespace {

const StateSpaceSpec kStp8{Family::SlidingTile, 8};

SearchGraph synthetic_graph(int n) {
    SearchGraph g;
    g.out.resize(n);
    for (int v = 0; v < n; ++v)
        g.states.push_back(PuzzleState{{static_cast<std::uint8_t>(v)}});
    g.expanded.assign(n, 0);
    g.goal_flag.assign(n, 0);
    g.best_g.assign(n, 0.0);
    g.root = 0;
    return g;
}

}  // namespace

TEST_CASE("ssb label of the goal is 0") {
    auto m = HeuristicModel::make_mlp(kStp8, {16}, 3);
    CHECK(ssb_label(kStp8, m, goal_state(kStp8)) == 0.0);
}

TEST_CASE("ssb label with zero heuristic is one unit edge") {
    auto m = HeuristicModel::make_zero(kStp8);
    std::mt19937_64 rng(5);
    PuzzleState s = scramble(kStp8, 17, rng);
    if (!is_goal(kStp8, s)) CHECK(ssb_label(kStp8, m, s) == 1.0);
}

TEST_CASE("worked example: single-step backs up 6, limited-horizon backs up 3") {
    // Frontier layout: S's direct successors A, B, C carry prior estimates
    // 5, 6, 7; behind B a two-edge corridor reaches the goal G. Unit costs.
    //
    // Single-step view: only A, B, C are visible, so the best backup is
    // 1 + h(A) = 6. Limited-horizon view: the frontier contains A, C, and G,
    // and the shortest path S->B->D->G plus h(G)=0 gives 3.
    SearchGraph full = synthetic_graph(6);  // S=0 A=1 B=2 C=3 D=4 G=5
    full.out[0] = {{1, 1.0}, {2, 1.0}, {3, 1.0}};
    full.out[2] = {{4, 1.0}};
    full.out[4] = {{5, 1.0}};
    full.expanded = {1, 0, 1, 0, 1, 0};
    full.goal_flag[5] = 1;
    std::vector<double> leaf_h = {0, 5.0, 0, 7.0, 0, 0.0};
    CHECK(lhb_labels(full, leaf_h)[0] == 3.0);

    // The same frontier truncated to S's immediate successors degenerates to
    // the single-step value.
    SearchGraph one = synthetic_graph(4);  // S=0 A=1 B=2 C=3
    one.out[0] = {{1, 1.0}, {2, 1.0}, {3, 1.0}};
    one.expanded = {1, 0, 0, 0};
    std::vector<double> one_h = {0, 5.0, 6.0, 7.0};
    CHECK(lhb_labels(one, one_h)[0] == 6.0);
}

TEST_CASE("augmented graph of a single goal vertex") {
    SearchGraph g = synthetic_graph(1);
    g.goal_flag[0] = 1;
    AugmentedGraph aug = build_augmented_graph(g, {123.0});  // goal pins to 0
    CHECK(aug.rev_out.size() == 2);
    REQUIRE(aug.rev_out[aug.z].size() == 1);
    CHECK(aug.rev_out[aug.z][0] == std::make_pair(0, 0.0));
    CHECK(lhb_labels(g, {123.0})[0] == 0.0);
}

TEST_CASE("augmented graph of a single expansion") {
    SearchGraph g = synthetic_graph(4);
    g.out[0] = {{1, 2.0}, {2, 3.0}, {3, 4.0}};
    g.expanded[0] = 1;
    AugmentedGraph aug = build_augmented_graph(g, {0, 1.0, 2.0, 3.0});
    CHECK(aug.rev_out[aug.z].size() == 3);  // one z-edge per leaf
    std::size_t reversed_root_edges = 0;
    for (int v = 1; v <= 3; ++v) reversed_root_edges += aug.rev_out[v].size();
    CHECK(reversed_root_edges == 3);
    CHECK(aug.rev_out[0].empty());
}

TEST_CASE("negative leaf heuristic trips the contract assertion") {
    SearchGraph g = synthetic_graph(2);
    g.out[0] = {{1, 1.0}};
    g.expanded[0] = 1;
    CHECK_THROWS_AS(lhb_labels(g, {0, -0.5}), std::logic_error);
}

TEST_CASE("two-cycle graph terminates and matches path enumeration") {
    // R -> u -> v -> u (cycle), v -> L(leaf h=2), R -> M(leaf h=9).
    SearchGraph g = synthetic_graph(5);  // R=0 u=1 v=2 L=3 M=4
    g.out[0] = {{1, 1.0}, {4, 1.0}};
    g.out[1] = {{2, 1.0}};
    g.out[2] = {{1, 1.0}, {3, 1.0}};
    g.expanded = {1, 1, 1, 0, 0};
    std::vector<double> leaf_h = {0, 0, 0, 2.0, 9.0};
    auto labels = lhb_labels(g, leaf_h);
    testsupport::SimplePathOracle oracle(g, leaf_h);
    for (int v = 0; v < 5; ++v) CHECK(labels[v] == doctest::Approx(oracle.label(v)).epsilon(1e-12));
    CHECK(labels[0] == 5.0);  // R -> u -> v -> L -> z
}

TEST_CASE("labels match exhaustive simple-path oracle on random graphs") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 300; ++trial) {
        auto rg = testsupport::random_search_graph(rng);
        auto labels = lhb_labels(rg.graph, rg.leaf_h);
        testsupport::SimplePathOracle oracle(rg.graph, rg.leaf_h);
        for (int v = 0; v < static_cast<int>(rg.graph.size()); ++v) {
            double expect = oracle.label(v);
            if (std::isinf(expect))
                CHECK(std::isinf(labels[v]));
            else
                CHECK(std::abs(labels[v] - expect) < 1e-9);
        }
    }
}

TEST_CASE("single-step reduction on random single-expansion graphs") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> k_dist(1, 8);
    std::uniform_real_distribution<double> cost(0.1, 10.0);
    std::uniform_real_distribution<double> hval(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        int k = k_dist(rng);
        SearchGraph g = synthetic_graph(k + 1);
        g.expanded[0] = 1;
        std::vector<double> leaf_h(k + 1, 0.0);
        double expect = testsupport::kInf;
        for (int i = 1; i <= k; ++i) {
            double c = cost(rng), h = hval(rng);
            g.out[0].emplace_back(i, c);
            leaf_h[i] = h;
            expect = std::min(expect, c + h);
        }
        CHECK(lhb_labels(g, leaf_h)[0] == expect);
    }
}

TEST_CASE("domain graphs: single root expansion equals ssb_label") {
    auto m = HeuristicModel::make_mlp(kStp8, {16, 16}, 29);
    std::mt19937_64 rng(101);
    for (int i = 0; i < 20; ++i) {
        PuzzleState start = scramble(kStp8, 2 + i, rng);
        if (is_goal(kStp8, start)) continue;
        SearchGraph g = run_limited_horizon(kStp8, m, start, 1, HorizonAlgo::AStarUnit);
        CHECK(lhb_labels(g, m)[g.root] == ssb_label(kStp8, m, start));
    }
}

TEST_CASE("triangle dominance along recorded edges") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        auto rg = testsupport::random_search_graph(rng);
        auto labels = lhb_labels(rg.graph, rg.leaf_h);
        for (int v = 0; v < static_cast<int>(rg.graph.size()); ++v) {
            for (auto [u, c] : rg.graph.out[v]) {
                double via = rg.graph.is_leaf(u)
                                 ? (rg.graph.goal_flag[u] ? 0.0 : rg.leaf_h[u])
                                 : labels[u];
                CHECK(labels[v] <= c + via + 1e-9);
            }
        }
    }
}

TEST_CASE("goal vertices are pinned to label 0") {
    std::mt19937_64 rng(911);
    for (int trial = 0; trial < 50; ++trial) {
        auto rg = testsupport::random_search_graph(rng);
        auto labels = lhb_labels(rg.graph, rg.leaf_h);
        for (int v = 0; v < static_cast<int>(rg.graph.size()); ++v)
            if (rg.graph.goal_flag[v]) CHECK(labels[v] == 0.0);
    }
}

TEST_CASE("labels_to_batch emits expanded vertices and drops infinities") {
    // R -> L(leaf), R -> u, u <-> v cycle with no leaf below: u, v get +inf.
    SearchGraph g = synthetic_graph(5);  // R=0 L=1 u=2 v=3 M=4
    g.out[0] = {{1, 1.0}, {2, 1.0}};
    g.out[2] = {{3, 1.0}};
    g.out[3] = {{2, 1.0}};
    g.expanded = {1, 0, 1, 1, 0};
    g.out[0].emplace_back(4, 2.0);
    std::vector<double> leaf_h = {0, 4.0, 0, 0, 1.0};
    auto labels = lhb_labels(g, leaf_h);
    CHECK(std::isinf(labels[2]));
    CHECK(std::isinf(labels[3]));
    LabelBatch batch = labels_to_batch(labels, g, false);
    CHECK(batch.states.size() == 1);  // only the root survives
    CHECK(batch.targets[0] == 3.0);   // R -> M costs 2 plus h(M)=1

    LabelBatch with_leaves = labels_to_batch(labels, g, true);
    CHECK(with_leaves.states.size() == 3);  // root + two reachable leaves
}

TEST_CASE("labels_to_batch sizes on domain graphs") {
    auto m = HeuristicModel::make_zero(kStp8);
    std::mt19937_64 rng(606);
    PuzzleState start = scramble(kStp8, 25, rng);
    SearchGraph g = run_limited_horizon(kStp8, m, start, 50, HorizonAlgo::Gbfs);
    auto labels = lhb_labels(g, m);
    LabelBatch batch = labels_to_batch(labels, g, false);
    std::size_t expanded = 0;
    for (char e : g.expanded) expanded += e;
    CHECK(batch.states.size() == expanded);
    for (double t : batch.targets) CHECK(std::isfinite(t));
}

TEST_CASE("degenerate goal-start graph yields the single label (goal, 0)") {
    auto m = HeuristicModel::make_zero(kStp8);
    SearchGraph g = run_limited_horizon(kStp8, m, goal_state(kStp8), 3, HorizonAlgo::AStarUnit);
    auto labels = lhb_labels(g, m);
    LabelBatch batch = labels_to_batch(labels, g, false);
    REQUIRE(batch.states.size() == 1);
    CHECK(batch.targets[0] == 0.0);
    CHECK(is_goal(kStp8, batch.states[0]));
}
