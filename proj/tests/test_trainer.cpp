#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hlearn/trainer.hpp"
#include "support/oracles.hpp"

using namespace hlearn;

namespace {

const StateSpaceSpec kStp8{Family::SlidingTile, 8};
const StateSpaceSpec kLights3{Family::LightsOut, 3};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("sample_start_states: depth 0 yields goals, seeds replay exactly") {
    std::mt19937_64 rng(1);
    for (const PuzzleState& s : sample_start_states(kStp8, 10, 0, rng))
        CHECK(is_goal(kStp8, s));
    std::mt19937_64 a(42), b(42);
    auto sa = sample_start_states(kStp8, 50, 31, a);
    auto sb = sample_start_states(kStp8, 50, 31, b);
    CHECK(sa == sb);
}

TEST_CASE("sampled 8-puzzle states are always solvable") {
    std::mt19937_64 rng(9);
    for (const PuzzleState& s : sample_start_states(kStp8, 10000, 31, rng))
        REQUIRE(sliding_tile_solvable(kStp8, s));
}

TEST_CASE("zero budget returns the model untouched with an empty log") {
    TrainConfig cfg;
    cfg.spec = kStp8;
    cfg.samples_budget = 0;
    auto model = HeuristicModel::make_mlp(kStp8, {16}, 3);
    auto before = model.parameters();
    auto log = train(cfg, model);
    CHECK(log.empty());
    CHECK(model.parameters() == before);
}

TEST_CASE("lights_out tabular value iteration converges to the oracle") {
    auto dist = testsupport::bfs_distances(kLights3);
    for (TrainMode mode : {TrainMode::Ssbl, TrainMode::Lhbl}) {
        auto model = HeuristicModel::make_tabular(kLights3);
        auto res = tabular_value_iteration(kLights3, mode, 5, HorizonAlgo::AStarUnit, 50, model);
        CHECK(res.converged);
        for (const auto& [s, d] : dist)
            CHECK(model.evaluate_one(false, s) == doctest::Approx(d).epsilon(1e-9));
    }
}

TEST_CASE("the oracle is a fixed point of both label rules") {
    auto dist = testsupport::bfs_distances(kLights3);
    for (TrainMode mode : {TrainMode::Ssbl, TrainMode::Lhbl}) {
        auto model = HeuristicModel::make_tabular(kLights3);
        LabelBatch seed;
        for (const auto& [s, d] : dist) {
            seed.states.push_back(s);
            seed.targets.push_back(d);
        }
        model.train_step(seed, 1.0);
        model.sync_target();
        auto res = tabular_value_iteration(kLights3, mode, 5, HorizonAlgo::AStarUnit, 1, model);
        CHECK(res.converged);  // one full sweep changes nothing
        for (const auto& [s, d] : dist) CHECK(model.evaluate_one(false, s) == d);
    }
}

TEST_CASE("limited-horizon sweeps need no more sweeps than single-step") {
    auto dist = testsupport::bfs_distances(kLights3);
    auto sweeps_to_tolerance = [&](TrainMode mode) {
        auto model = HeuristicModel::make_tabular(kLights3);
        int converged_at = -1;
        tabular_value_iteration(kLights3, mode, 5, HorizonAlgo::AStarUnit, 50, model,
                                [&](int sweep, const HeuristicModel& m) {
                                    for (const auto& [s, d] : dist)
                                        if (std::abs(m.evaluate_one(false, s) - d) >= 1e-6)
                                            return false;
                                    converged_at = sweep;
                                    return true;
                                });
        REQUIRE(converged_at > 0);
        return converged_at;
    };
    int lhbl = sweeps_to_tolerance(TrainMode::Lhbl);
    int ssbl = sweeps_to_tolerance(TrainMode::Ssbl);
    CHECK(lhbl <= ssbl);
}

TEST_CASE("monotone loss on a frozen target") {
    auto model = HeuristicModel::make_mlp(kStp8, {32}, 8);
    std::mt19937_64 rng(12);
    LabelBatch batch;
    batch.states = sample_start_states(kStp8, 32, 20, rng);
    for (const PuzzleState& s : batch.states)
        batch.targets.push_back(is_goal(kStp8, s) ? 0.0 : 5.0);
    double first = model.train_step(batch, 1e-2);
    double last = first;
    for (int i = 0; i < 400; ++i) last = model.train_step(batch, 1e-2);
    CHECK(last < first * 0.05);
}

TEST_CASE("training runs are deterministic end to end") {
    namespace fs = std::filesystem;
    auto run = [&](const std::string& dir) {
        TrainConfig cfg;
        cfg.spec = kStp8;
        cfg.mode = TrainMode::Lhbl;
        cfg.horizon = 5;
        cfg.scramble_depth_max = 12;
        cfg.samples_budget = 256;
        cfg.minibatch_size = 32;
        cfg.learning_rate = 1e-3;
        cfg.target_sync_interval = 4;
        cfg.seed = 7;
        cfg.out_dir = dir;
        auto model = HeuristicModel::make_mlp(kStp8, {16, 16}, 7);
        train(cfg, model);
    };
    std::string d1 = (fs::temp_directory_path() / "hlearn_det_a").string();
    std::string d2 = (fs::temp_directory_path() / "hlearn_det_b").string();
    run(d1);
    run(d2);
    CHECK(slurp(d1 + "/train_log.csv") == slurp(d2 + "/train_log.csv"));
    CHECK(slurp(d1 + "/ckpt_8.hh") == slurp(d2 + "/ckpt_8.hh"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("samples accounting") {
    TrainConfig cfg;
    cfg.spec = kStp8;
    cfg.mode = TrainMode::Ssbl;
    cfg.scramble_depth_max = 10;
    cfg.samples_budget = 320;
    cfg.minibatch_size = 32;
    cfg.seed = 3;
    auto model = HeuristicModel::make_mlp(kStp8, {16}, 3);
    auto log = train(cfg, model);
    auto acc = samples_accounting(log);
    CHECK(acc.start_states == 320);  // one start state per labeled example
    CHECK(acc.labels == 320);

    TrainConfig lh = cfg;
    lh.mode = TrainMode::Lhbl;
    lh.horizon = 10;
    auto model2 = HeuristicModel::make_mlp(kStp8, {16}, 3);
    auto log2 = train(lh, model2);
    auto acc2 = samples_accounting(log2);
    CHECK(acc2.labels >= 320);
    CHECK(acc2.start_states <= acc2.labels);  // each graph yields >= 1 label
    CHECK(log2.back().graphs == acc2.start_states);
}

TEST_CASE("divergent training aborts with a diagnostic") {
    TrainConfig cfg;
    cfg.spec = kStp8;
    cfg.mode = TrainMode::Ssbl;
    cfg.scramble_depth_max = 20;
    cfg.samples_budget = 50000;
    cfg.minibatch_size = 64;
    cfg.learning_rate = 50.0;  // guaranteed blow-up
    cfg.seed = 1;
    auto model = HeuristicModel::make_mlp(kStp8, {32, 32}, 5);
    CHECK_THROWS_AS(train(cfg, model), DivergenceError);
}

TEST_CASE("config validation names bad fields") {
    TrainConfig cfg;
    cfg.spec = kStp8;
    cfg.mode = TrainMode::Lhbl;
    cfg.horizon = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.horizon = 10;
    cfg.minibatch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
