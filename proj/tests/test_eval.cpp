#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hlearn/eval.hpp"
#include "support/oracles.hpp"

using namespace hlearn;

namespace {

const StateSpaceSpec kStp8{Family::SlidingTile, 8};
const StateSpaceSpec kLights3{Family::LightsOut, 3};

const OracleTable& stp8_oracle() {
    static OracleTable table = build_oracle(kStp8);
    return table;
}

HeuristicModel oracle_tabular(const OracleTable& table) {
    auto model = HeuristicModel::make_tabular(table.spec);
    LabelBatch batch;
    for (const auto& [s, d] : table.dist) {
        batch.states.push_back(s);
        batch.targets.push_back(d);
    }
    model.train_step(batch, 1.0);
    model.sync_target();
    return model;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("8-puzzle oracle: size, extremes, Bellman optimality") {
    const OracleTable& t = stp8_oracle();
    CHECK(t.dist.size() == 181440);
    CHECK(t.dist.at(goal_state(kStp8)) == 0.0);
    CHECK(t.max_cost == 31.0);
    // h*(s) == min over successors (c + h*(s')) on a sample.
    std::mt19937_64 rng(17);
    for (int i = 0; i < 2000; ++i) {
        PuzzleState s = scramble(kStp8, 1 + i % 30, rng);
        if (is_goal(kStp8, s)) continue;
        double best = 1e300;
        for (const Successor& suc : successors(kStp8, s))
            best = std::min(best, suc.cost + t.dist.at(suc.state));
        CHECK(t.dist.at(s) == best);
    }
}

TEST_CASE("lights_out 3 oracle has 512 entries within 9 presses") {
    OracleTable t = build_oracle(kLights3);
    CHECK(t.dist.size() == 512);
    CHECK(t.max_cost <= 9.0);
}

TEST_CASE("35-puzzle oracle is refused with a state-count estimate") {
    StateSpaceSpec stp35{Family::SlidingTile, 35};
    CHECK_THROWS_WITH_AS(build_oracle(stp35), doctest::Contains("3.72e+41"), ConfigError);
}

TEST_CASE("generate_test_set basics") {
    auto one = generate_test_set(kStp8, 1, 0, 5);
    REQUIRE(one.size() == 1);
    CHECK(is_goal(kStp8, one[0].start));

    auto a = generate_test_set(kStp8, 20, 25, 7);
    auto b = generate_test_set(kStp8, 20, 25, 7);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].start == b[i].start);
}

TEST_CASE("depth ramp covers a wide oracle range") {
    const OracleTable& t = stp8_oracle();
    auto set = generate_test_set(kStp8, 200, 31, 11);
    double lo = 1e300, hi = 0;
    for (const TestInstance& inst : set) {
        double d = *t.lookup(inst.start);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    CHECK(lo == 0.0);
    CHECK(hi >= 20.0);
}

TEST_CASE("benchmark with the oracle heuristic is optimal everywhere") {
    const OracleTable& t = stp8_oracle();
    auto model = oracle_tabular(t);
    auto set = generate_test_set(kStp8, 30, 31, 3);
    BenchmarkOptions opts;
    opts.batch_sizes = {1};
    opts.lambda = 1.0;
    opts.limits.max_expansions = 500000;
    opts.oracle = &t;
    for (const BenchmarkRow& row : benchmark(model, set, opts)) {
        REQUIRE(row.record.solved);
        CHECK(row.record.solution_cost == *row.optimal_cost);
    }
}

TEST_CASE("depth-0 instances solve with zero expansions at every B") {
    auto model = HeuristicModel::make_zero(kStp8);
    auto set = generate_test_set(kStp8, 3, 0, 21);
    BenchmarkOptions opts;
    opts.batch_sizes = {1, 100};
    opts.limits.max_expansions = 10;
    for (const BenchmarkRow& row : benchmark(model, set, opts)) {
        CHECK(row.record.solved);
        CHECK(row.record.nodes_expanded == 0);
    }
}

TEST_CASE("node generations do not shrink as B grows") {
    auto model = HeuristicModel::make_manhattan(kStp8);
    auto set = generate_test_set(kStp8, 25, 28, 13);
    BenchmarkOptions opts;
    opts.batch_sizes = {1, 100};
    opts.lambda = 0.6;
    opts.limits.max_expansions = 500000;
    double gen1 = 0, gen100 = 0;
    for (const BenchmarkRow& row : benchmark(model, set, opts)) {
        REQUIRE(row.record.solved);
        (row.record.batch_size == 1 ? gen1 : gen100) += row.record.nodes_generated;
    }
    CHECK(gen100 >= gen1);
}

TEST_CASE("depression trace shapes") {
    const OracleTable& t = stp8_oracle();
    SearchLimits limits{.max_expansions = 100000};

    auto solved = generate_test_set(kStp8, 1, 0, 5)[0];
    auto model_star = oracle_tabular(t);
    CHECK(depression_trace(model_star, solved, 1, 1.0, limits).empty());

    auto set = generate_test_set(kStp8, 1, 24, 77);
    auto trace = depression_trace(model_star, set[0], 1, 1.0, limits);
    REQUIRE(!trace.empty());
    CHECK(trace.front().h == *t.lookup(set[0].start));
    CHECK(trace.back().h == 0.0);
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i - 1].h - trace[i].h <= 1.0 + 1e-9);

    auto zero = HeuristicModel::make_zero(kStp8);
    auto flat = depression_trace(zero, set[0], 1, 0.6, limits);
    for (const TraceRow& row : flat) CHECK(row.h == 0.0);
}

TEST_CASE("results csv is byte-stable without wall time") {
    namespace fs = std::filesystem;
    auto model = HeuristicModel::make_manhattan(kStp8);
    auto set = generate_test_set(kStp8, 5, 15, 1);
    BenchmarkOptions opts;
    opts.batch_sizes = {1, 10};
    opts.lambda = 0.6;
    opts.limits.max_expansions = 200000;
    opts.oracle = &stp8_oracle();
    std::string p1 = (fs::temp_directory_path() / "hlearn_res1.csv").string();
    std::string p2 = (fs::temp_directory_path() / "hlearn_res2.csv").string();
    write_results_csv(p1, benchmark(model, set, opts), false);
    write_results_csv(p2, benchmark(model, set, opts), false);
    std::string body = slurp(p1);
    CHECK(body == slurp(p2));
    CHECK(body.rfind("instance_id,B,lambda,solved,solution_cost,optimal_cost,nodes_generated,"
                     "nodes_expanded,wall_time_ms,limit_hit\n", 0) == 0);
    fs::remove(p1);
    fs::remove(p2);
}
