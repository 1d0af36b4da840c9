#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hlearn/domains.hpp"

namespace hlearn {

enum class ModelKind { Zero, Manhattan, Tabular, Mlp };
enum class Optimizer { Sgd, Adam };

enum class LabelProvenance { Ssb, Lhb };

/// One training minibatch: states with their target cost-to-go values.
struct LabelBatch {
    std::vector<PuzzleState> states;
    std::vector<double> targets;
    LabelProvenance provenance = LabelProvenance::Ssb;
};

/// Cost-to-go estimator with a target snapshot. All parameter values are kept
/// exactly float32-representable so checkpoints (which store 32-bit floats)
/// round-trip bit-exactly; arithmetic is done in double.
class HeuristicModel {
public:
    static HeuristicModel make_zero(const StateSpaceSpec& spec);
    static HeuristicModel make_manhattan(const StateSpaceSpec& spec);
    static HeuristicModel make_tabular(const StateSpaceSpec& spec);
    static HeuristicModel make_mlp(const StateSpaceSpec& spec, std::vector<std::uint32_t> hidden,
                                   std::uint64_t init_seed);

    ModelKind kind() const { return kind_; }
    const StateSpaceSpec& spec() const { return spec_; }
    const std::vector<std::uint32_t>& hidden_widths() const { return hidden_; }

    /// Clamped nonnegative values; exactly 0 on goal states. Reads theta- when
    /// use_target is set. Safe for concurrent callers.
    std::vector<double> evaluate_batch(bool use_target, const std::vector<PuzzleState>& states) const;
    double evaluate_one(bool use_target, const PuzzleState& s) const;

    /// One optimizer step on the mean squared error over the batch (raw,
    /// unclamped outputs). Returns the pre-step loss. Tabular assigns targets
    /// exactly. Throws ConfigError for Zero/Manhattan, std::invalid_argument
    /// on an empty batch.
    double train_step(const LabelBatch& batch, double lr);

    void set_optimizer(Optimizer opt) { optimizer_ = opt; }
    Optimizer optimizer() const { return optimizer_; }

    /// theta- <- theta.
    void sync_target();

    // Mlp introspection, used by the gradient check and checkpointing.
    const std::vector<double>& parameters() const { return params_; }
    void set_parameters(const std::vector<double>& p);
    double loss_for_params(const LabelBatch& batch, const std::vector<double>& params) const;
    std::vector<double> loss_gradient(const LabelBatch& batch, double* loss_out = nullptr) const;

    // Tabular introspection.
    const std::unordered_map<PuzzleState, double, PuzzleStateHash>& table() const { return table_; }

    void save_checkpoint(const std::string& path) const;
    static HeuristicModel load_checkpoint(const std::string& path);
    static HeuristicModel load_checkpoint(const std::string& path, const StateSpaceSpec& expected);

private:
    HeuristicModel(ModelKind kind, const StateSpaceSpec& spec) : kind_(kind), spec_(spec) {}

    double raw_value(bool use_target, const PuzzleState& s) const;
    double mlp_forward(const std::vector<double>& params, const double* x) const;
    std::size_t param_count() const { return params_.size(); }

    ModelKind kind_;
    StateSpaceSpec spec_;
    Optimizer optimizer_ = Optimizer::Sgd;

    // Mlp
    std::vector<std::uint32_t> hidden_;
    std::vector<std::size_t> dims_;  // input, hidden..., 1
    std::vector<double> params_;     // theta, flat, float32-representable
    std::vector<double> target_params_;
    std::vector<double> adam_m_, adam_v_;
    std::uint64_t adam_t_ = 0;

    // Tabular
    std::unordered_map<PuzzleState, double, PuzzleStateHash> table_;
    std::unordered_map<PuzzleState, double, PuzzleStateHash> target_table_;
};

}  // namespace hlearn
