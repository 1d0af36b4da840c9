#include "hlearn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "hlearn/errors.hpp"
#include "hlearn/labeler.hpp"

namespace hlearn {
namespace {

constexpr double kLossCeiling = 1e8;

void write_log_csv(const std::string& path, const std::vector<TrainLogRow>& log) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write training log: " + path);
    os << "step,samples,graphs,labels,loss,mean_label,target_syncs\n";
    char buf[160];
    for (const TrainLogRow& r : log) {
        std::snprintf(buf, sizeof(buf), "%llu,%llu,%llu,%llu,%.9g,%.9g,%llu\n",
                      static_cast<unsigned long long>(r.step),
                      static_cast<unsigned long long>(r.samples),
                      static_cast<unsigned long long>(r.graphs),
                      static_cast<unsigned long long>(r.labels), r.loss, r.mean_label,
                      static_cast<unsigned long long>(r.target_syncs));
        os << buf;
    }
}

// Duplicate states keep the smaller label.
LabelBatch dedup_min(std::vector<std::pair<PuzzleState, double>>& pairs,
                     LabelProvenance provenance) {
    std::unordered_map<PuzzleState, std::size_t, PuzzleStateHash> index;
    LabelBatch batch;
    batch.provenance = provenance;
    for (auto& [s, v] : pairs) {
        auto it = index.find(s);
        if (it == index.end()) {
            index.emplace(s, batch.states.size());
            batch.states.push_back(std::move(s));
            batch.targets.push_back(v);
        } else {
            batch.targets[it->second] = std::min(batch.targets[it->second], v);
        }
    }
    return batch;
}

// All states reachable from the goal, BFS order (deterministic).
std::vector<PuzzleState> enumerate_reachable(const StateSpaceSpec& spec) {
    std::vector<PuzzleState> order;
    std::unordered_map<PuzzleState, char, PuzzleStateHash> seen;
    std::deque<PuzzleState> frontier;
    PuzzleState g = goal_state(spec);
    seen.emplace(g, 1);
    frontier.push_back(g);
    while (!frontier.empty()) {
        PuzzleState s = std::move(frontier.front());
        frontier.pop_front();
        order.push_back(s);
        for (const Successor& suc : successors(spec, order.back()))
            if (seen.emplace(suc.state, 1).second) frontier.push_back(suc.state);
    }
    return order;
}

}  // namespace

std::string train_mode_name(TrainMode m) {
    switch (m) {
        case TrainMode::Ssbl: return "ssbl";
        case TrainMode::LhblS: return "lhbl_s";
        default: return "lhbl";
    }
}

TrainMode train_mode_from_name(const std::string& name) {
    if (name == "ssbl") return TrainMode::Ssbl;
    if (name == "lhbl_s") return TrainMode::LhblS;
    if (name == "lhbl") return TrainMode::Lhbl;
    throw ConfigError("unknown train mode: " + name);
}

void TrainConfig::validate() const {
    validate_spec(spec);
    if (mode != TrainMode::Ssbl && horizon < 1) throw ConfigError("horizon must be >= 1");
    if (scramble_depth_max < 0) throw ConfigError("scramble_depth_max must be >= 0");
    if (minibatch_size < 1) throw ConfigError("minibatch_size must be >= 1");
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
    if (target_sync_interval < 1) throw ConfigError("target_sync_interval must be >= 1");
}

std::vector<PuzzleState> sample_start_states(const StateSpaceSpec& spec, std::uint64_t count,
                                             int scramble_depth_max, std::mt19937_64& rng) {
    std::vector<PuzzleState> out;
    out.reserve(count);
    std::uniform_int_distribution<int> depth_dist(0, scramble_depth_max);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(scramble(spec, depth_dist(rng), rng));
    return out;
}

std::vector<TrainLogRow> train(const TrainConfig& config, HeuristicModel& model) {
    config.validate();
    if (!(model.spec() == config.spec))
        throw DomainMismatchError("model domain does not match train config");
    model.set_optimizer(config.optimizer);

    std::vector<TrainLogRow> log;
    if (config.samples_budget == 0) {
        if (!config.out_dir.empty()) {
            std::filesystem::create_directories(config.out_dir);
            write_log_csv(config.out_dir + "/train_log.csv", log);
        }
        return log;
    }

    std::mt19937_64 rng(config.seed);
    std::uint64_t samples = 0, graphs = 0, labels_consumed = 0, step = 0, syncs = 0;
    std::vector<std::pair<PuzzleState, double>> buffer;

    auto save_ckpt = [&](std::uint64_t at_step) {
        if (config.out_dir.empty()) return;
        std::filesystem::create_directories(config.out_dir);
        model.save_checkpoint(config.out_dir + "/ckpt_" + std::to_string(at_step) + ".hh");
    };

    while (labels_consumed < config.samples_budget) {
        // Fill the buffer up to one minibatch.
        while (buffer.size() < static_cast<std::size_t>(config.minibatch_size)) {
            if (config.mode == TrainMode::Ssbl) {
                std::uint64_t need = config.minibatch_size - buffer.size();
                for (PuzzleState& s :
                     sample_start_states(config.spec, need, config.scramble_depth_max, rng)) {
                    ++samples;
                    double label = ssb_label(config.spec, model, s);
                    buffer.emplace_back(std::move(s), label);
                }
            } else {
                PuzzleState start =
                    sample_start_states(config.spec, 1, config.scramble_depth_max, rng)[0];
                ++samples;
                SearchGraph graph = run_limited_horizon(config.spec, model, start, config.horizon,
                                                        config.search_algo);
                ++graphs;
                if (config.mode == TrainMode::LhblS) {
                    for (int v = 0; v < static_cast<int>(graph.size()); ++v) {
                        if (graph.is_leaf(v) && v != graph.root) continue;
                        buffer.emplace_back(graph.states[v],
                                            ssb_label(config.spec, model, graph.states[v]));
                    }
                } else {
                    LabelBatch part = labels_to_batch(lhb_labels(graph, model), graph);
                    for (std::size_t i = 0; i < part.states.size(); ++i)
                        buffer.emplace_back(std::move(part.states[i]), part.targets[i]);
                }
            }
        }

        std::vector<std::pair<PuzzleState, double>> take(
            buffer.begin(), buffer.begin() + config.minibatch_size);
        buffer.erase(buffer.begin(), buffer.begin() + config.minibatch_size);
        LabelBatch batch = dedup_min(
            take, config.mode == TrainMode::Lhbl ? LabelProvenance::Lhb : LabelProvenance::Ssb);

        double loss = model.train_step(batch, config.learning_rate);
        if (!std::isfinite(loss) || loss > kLossCeiling)
            throw DivergenceError("training loss diverged at step " + std::to_string(step + 1) +
                                  ": " + std::to_string(loss));
        ++step;
        labels_consumed += config.minibatch_size;
        if (step % config.target_sync_interval == 0) {
            model.sync_target();
            ++syncs;
        }

        double mean_label = 0.0;
        for (double t : batch.targets) mean_label += t;
        mean_label /= static_cast<double>(batch.targets.size());
        log.push_back({step, samples, graphs, labels_consumed, loss, mean_label, syncs});

        if (config.checkpoint_interval > 0 && step % config.checkpoint_interval == 0)
            save_ckpt(step);
    }

    save_ckpt(step);
    if (!config.out_dir.empty()) write_log_csv(config.out_dir + "/train_log.csv", log);
    return log;
}

SamplesAccounting samples_accounting(const std::vector<TrainLogRow>& log) {
    SamplesAccounting acc;
    if (!log.empty()) {
        acc.start_states = log.back().samples;
        acc.labels = log.back().labels;
    }
    return acc;
}

SweepResult tabular_value_iteration(
    const StateSpaceSpec& spec, TrainMode mode, int horizon, HorizonAlgo algo, int max_sweeps,
    HeuristicModel& model, const std::function<bool(int, const HeuristicModel&)>& on_sweep) {
    if (model.kind() != ModelKind::Tabular)
        throw ConfigError("tabular_value_iteration requires a Tabular model");
    if (mode == TrainMode::LhblS)
        throw ConfigError("sweep mode supports Ssbl and Lhbl");
    std::vector<PuzzleState> states = enumerate_reachable(spec);

    SweepResult result;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        model.sync_target();  // labels for this sweep come from the snapshot
        LabelBatch batch;
        batch.provenance = mode == TrainMode::Lhbl ? LabelProvenance::Lhb : LabelProvenance::Ssb;
        batch.states = states;
        batch.targets.reserve(states.size());
        for (const PuzzleState& s : states) {
            double label;
            if (mode == TrainMode::Ssbl) {
                label = ssb_label(spec, model, s);
            } else {
                SearchGraph graph = run_limited_horizon(spec, model, s, horizon, algo);
                label = lhb_labels(graph, model)[graph.root];
            }
            batch.targets.push_back(label);
        }
        double max_change = 0.0;
        {
            std::vector<double> prior = model.evaluate_batch(false, states);
            model.train_step(batch, /*lr=*/1.0);
            for (std::size_t i = 0; i < states.size(); ++i)
                max_change = std::max(max_change, std::abs(prior[i] - batch.targets[i]));
        }
        result.sweeps = sweep;
        if (on_sweep && on_sweep(sweep, model)) return result;
        if (max_change < 1e-12) {
            result.converged = true;
            return result;
        }
    }
    return result;
}

}  // namespace hlearn
