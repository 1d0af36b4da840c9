#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hlearn/heuristics.hpp"
#include "hlearn/search.hpp"

namespace hlearn {

enum class TrainMode { Ssbl, LhblS, Lhbl };

std::string train_mode_name(TrainMode m);
TrainMode train_mode_from_name(const std::string& name);

struct TrainConfig {
    StateSpaceSpec spec;
    TrainMode mode = TrainMode::Ssbl;
    int horizon = 10;  // ignored for Ssbl
    HorizonAlgo search_algo = HorizonAlgo::AStarUnit;
    int scramble_depth_max = 31;
    std::uint64_t samples_budget = 0;  // labeled examples consumed by training
    int minibatch_size = 128;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Sgd;
    std::uint64_t target_sync_interval = 1000;  // train steps between syncs
    std::uint64_t seed = 1;
    std::uint64_t checkpoint_interval = 0;  // steps; 0 = final checkpoint only
    std::string out_dir;                    // empty = keep everything in memory

    void validate() const;
};

struct TrainLogRow {
    std::uint64_t step = 0;
    std::uint64_t samples = 0;  // start states sampled so far
    std::uint64_t graphs = 0;   // horizon searches run so far
    std::uint64_t labels = 0;   // labeled examples consumed so far
    double loss = 0.0;
    double mean_label = 0.0;
    std::uint64_t target_syncs = 0;
};

struct SamplesAccounting {
    std::uint64_t start_states = 0;
    std::uint64_t labels = 0;
};

/// States scrambled with depth drawn uniformly from {0..scramble_depth_max}.
std::vector<PuzzleState> sample_start_states(const StateSpaceSpec& spec, std::uint64_t count,
                                             int scramble_depth_max, std::mt19937_64& rng);

/// Runs the configured pipeline against `model` until the label budget is
/// consumed. Writes `train_log.csv` and `ckpt_{step}.hh` files under
/// config.out_dir when set. Throws DivergenceError on non-finite or exploding
/// loss.
std::vector<TrainLogRow> train(const TrainConfig& config, HeuristicModel& model);

SamplesAccounting samples_accounting(const std::vector<TrainLogRow>& log);

/// Synchronous tabular value iteration over the full reachable state space:
/// each sweep relabels every state from the sweep-start target snapshot
/// (Ssbl: single-step labels; Lhbl: limited-horizon labels of the sweep
/// root). `on_sweep` runs after each sweep and may return true to stop early.
struct SweepResult {
    int sweeps = 0;
    bool converged = false;  // a full sweep changed nothing
};
SweepResult tabular_value_iteration(
    const StateSpaceSpec& spec, TrainMode mode, int horizon, HorizonAlgo algo, int max_sweeps,
    HeuristicModel& model,
    const std::function<bool(int, const HeuristicModel&)>& on_sweep = nullptr);

}  // namespace hlearn
