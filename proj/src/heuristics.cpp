#include "hlearn/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "hlearn/errors.hpp"

namespace hlearn {
namespace {

constexpr char kMagic[6] = {'H', 'H', 'E', 'U', 'R', '1'};

double round_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f32(std::ostream& os, float v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw FormatError("checkpoint truncated");
    return v;
}

float read_f32(std::istream& is) {
    float v;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw FormatError("checkpoint truncated");
    return v;
}

double manhattan_value(const StateSpaceSpec& spec, const PuzzleState& s) {
    int side = 1;
    while (side * side < spec.size + 1) ++side;
    double d = 0;
    for (int i = 0; i < static_cast<int>(s.payload.size()); ++i) {
        int t = s.payload[i];
        if (t == 0) continue;
        int target = t - 1;  // goal places tile t at cell t-1
        d += std::abs(i / side - target / side) + std::abs(i % side - target % side);
    }
    return d * spec.unit_cost;
}

}  // namespace

HeuristicModel HeuristicModel::make_zero(const StateSpaceSpec& spec) {
    validate_spec(spec);
    return HeuristicModel(ModelKind::Zero, spec);
}

HeuristicModel HeuristicModel::make_manhattan(const StateSpaceSpec& spec) {
    validate_spec(spec);
    if (spec.family != Family::SlidingTile)
        throw ConfigError("manhattan heuristic is defined for sliding_tile only");
    return HeuristicModel(ModelKind::Manhattan, spec);
}

HeuristicModel HeuristicModel::make_tabular(const StateSpaceSpec& spec) {
    validate_spec(spec);
    return HeuristicModel(ModelKind::Tabular, spec);
}

HeuristicModel HeuristicModel::make_mlp(const StateSpaceSpec& spec,
                                        std::vector<std::uint32_t> hidden,
                                        std::uint64_t init_seed) {
    validate_spec(spec);
    HeuristicModel m(ModelKind::Mlp, spec);
    m.hidden_ = std::move(hidden);
    m.dims_.push_back(encode_dim(spec));
    for (auto w : m.hidden_) {
        if (w == 0) throw ConfigError("hidden layer width must be positive");
        m.dims_.push_back(w);
    }
    m.dims_.push_back(1);

    std::size_t count = 0;
    for (std::size_t l = 0; l + 1 < m.dims_.size(); ++l)
        count += m.dims_[l + 1] * m.dims_[l] + m.dims_[l + 1];
    m.params_.resize(count);

    // He fan-in initialization, biases zero.
    std::mt19937_64 rng(init_seed);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < m.dims_.size(); ++l) {
        std::size_t in = m.dims_[l], out = m.dims_[l + 1];
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(in)));
        for (std::size_t i = 0; i < out * in; ++i) m.params_[off + i] = round_f32(dist(rng));
        off += out * in;
        for (std::size_t i = 0; i < out; ++i) m.params_[off + i] = 0.0;
        off += out;
    }
    m.target_params_ = m.params_;
    m.adam_m_.assign(count, 0.0);
    m.adam_v_.assign(count, 0.0);
    return m;
}

double HeuristicModel::mlp_forward(const std::vector<double>& params, const double* x) const {
    std::size_t max_w = 0;
    for (auto d : dims_) max_w = std::max(max_w, d);
    std::vector<double> a(max_w), z(max_w);
    std::size_t cur = dims_[0];
    std::copy(x, x + cur, a.begin());
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        std::size_t in = dims_[l], out = dims_[l + 1];
        const double* w = params.data() + off;
        const double* b = params.data() + off + out * in;
        for (std::size_t o = 0; o < out; ++o) {
            double acc = b[o];
            const double* row = w + o * in;
            for (std::size_t i = 0; i < in; ++i) acc += row[i] * a[i];
            z[o] = acc;
        }
        bool last = (l + 2 == dims_.size());
        for (std::size_t o = 0; o < out; ++o) a[o] = last ? z[o] : std::max(z[o], 0.0);
        cur = out;
        off += out * in + out;
    }
    return a[0];
}

double HeuristicModel::raw_value(bool use_target, const PuzzleState& s) const {
    switch (kind_) {
        case ModelKind::Zero:
            return 0.0;
        case ModelKind::Manhattan:
            return manhattan_value(spec_, s);
        case ModelKind::Tabular: {
            const auto& t = use_target ? target_table_ : table_;
            auto it = t.find(s);
            return it == t.end() ? 0.0 : it->second;
        }
        case ModelKind::Mlp: {
            std::vector<double> x(dims_[0]);
            encode_into(spec_, s, x.data());
            return mlp_forward(use_target ? target_params_ : params_, x.data());
        }
    }
    return 0.0;
}

std::vector<double> HeuristicModel::evaluate_batch(bool use_target,
                                                   const std::vector<PuzzleState>& states) const {
    std::vector<double> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const PuzzleState& s = states[i];
        validate_state(spec_, s);
        out[i] = is_goal(spec_, s) ? 0.0 : std::max(raw_value(use_target, s), 0.0);
    }
    return out;
}

double HeuristicModel::evaluate_one(bool use_target, const PuzzleState& s) const {
    validate_state(spec_, s);
    return is_goal(spec_, s) ? 0.0 : std::max(raw_value(use_target, s), 0.0);
}

double HeuristicModel::loss_for_params(const LabelBatch& batch,
                                       const std::vector<double>& params) const {
    if (kind_ != ModelKind::Mlp) throw ConfigError("loss_for_params requires an Mlp model");
    std::vector<double> x(dims_[0]);
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.states.size(); ++i) {
        encode_into(spec_, batch.states[i], x.data());
        double diff = batch.targets[i] - mlp_forward(params, x.data());
        loss += diff * diff;
    }
    return loss / static_cast<double>(batch.states.size());
}

std::vector<double> HeuristicModel::loss_gradient(const LabelBatch& batch, double* loss_out) const {
    if (kind_ != ModelKind::Mlp) throw ConfigError("loss_gradient requires an Mlp model");
    const std::size_t n = batch.states.size();
    if (n == 0) throw std::invalid_argument("empty batch");

    std::vector<double> grad(params_.size(), 0.0);
    std::size_t layers = dims_.size() - 1;
    // Per-layer activations (post-nonlinearity) for one example.
    std::vector<std::vector<double>> act(dims_.size());
    for (std::size_t l = 0; l < dims_.size(); ++l) act[l].resize(dims_[l]);
    std::vector<std::vector<double>> pre(layers);  // pre-activation values
    for (std::size_t l = 0; l < layers; ++l) pre[l].resize(dims_[l + 1]);
    std::vector<double> delta, delta_next;

    double loss = 0.0;
    for (std::size_t ex = 0; ex < n; ++ex) {
        encode_into(spec_, batch.states[ex], act[0].data());
        std::size_t off = 0;
        for (std::size_t l = 0; l < layers; ++l) {
            std::size_t in = dims_[l], out = dims_[l + 1];
            const double* w = params_.data() + off;
            const double* b = params_.data() + off + out * in;
            for (std::size_t o = 0; o < out; ++o) {
                double acc = b[o];
                const double* row = w + o * in;
                for (std::size_t i = 0; i < in; ++i) acc += row[i] * act[l][i];
                pre[l][o] = acc;
                act[l + 1][o] = (l + 1 == layers) ? acc : std::max(acc, 0.0);
            }
            off += out * in + out;
        }
        double diff = act[layers][0] - batch.targets[ex];
        loss += diff * diff;

        // dL/dout for this example (before the 1/n average): 2 * diff.
        delta.assign(1, 2.0 * diff);
        std::size_t layer_off = params_.size();
        for (std::size_t l = layers; l-- > 0;) {
            std::size_t in = dims_[l], out = dims_[l + 1];
            layer_off -= out * in + out;
            double* gw = grad.data() + layer_off;
            double* gb = grad.data() + layer_off + out * in;
            const double* w = params_.data() + layer_off;
            if (l > 0) delta_next.assign(in, 0.0);
            for (std::size_t o = 0; o < out; ++o) {
                double d = delta[o];
                if (d == 0.0) continue;
                double* grow = gw + o * in;
                const double* wrow = w + o * in;
                for (std::size_t i = 0; i < in; ++i) {
                    grow[i] += d * act[l][i];
                    if (l > 0) delta_next[i] += d * wrow[i];
                }
                gb[o] += d;
            }
            if (l > 0) {
                // Gate through the ReLU of layer l.
                for (std::size_t i = 0; i < in; ++i)
                    if (pre[l - 1][i] <= 0.0) delta_next[i] = 0.0;
                delta = delta_next;
            }
        }
    }
    double inv_n = 1.0 / static_cast<double>(n);
    for (double& g : grad) g *= inv_n;
    if (loss_out) *loss_out = loss * inv_n;
    return grad;
}

double HeuristicModel::train_step(const LabelBatch& batch, double lr) {
    if (batch.states.empty()) throw std::invalid_argument("empty batch");
    if (batch.states.size() != batch.targets.size())
        throw std::invalid_argument("batch states/targets size mismatch");
    switch (kind_) {
        case ModelKind::Tabular: {
            double loss = 0.0;
            for (std::size_t i = 0; i < batch.states.size(); ++i) {
                double prior = raw_value(false, batch.states[i]);
                double diff = batch.targets[i] - prior;
                loss += diff * diff;
                table_[batch.states[i]] = batch.targets[i];
            }
            return loss / static_cast<double>(batch.states.size());
        }
        case ModelKind::Mlp: {
            double loss = 0.0;
            std::vector<double> grad = loss_gradient(batch, &loss);
            if (optimizer_ == Optimizer::Sgd) {
                for (std::size_t i = 0; i < params_.size(); ++i)
                    params_[i] = round_f32(params_[i] - lr * grad[i]);
            } else {
                constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
                ++adam_t_;
                double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_t_));
                double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_t_));
                for (std::size_t i = 0; i < params_.size(); ++i) {
                    adam_m_[i] = b1 * adam_m_[i] + (1.0 - b1) * grad[i];
                    adam_v_[i] = b2 * adam_v_[i] + (1.0 - b2) * grad[i] * grad[i];
                    double step = lr * (adam_m_[i] / c1) / (std::sqrt(adam_v_[i] / c2) + eps);
                    params_[i] = round_f32(params_[i] - step);
                }
            }
            return loss;
        }
        default:
            throw ConfigError("train_step requires a Tabular or Mlp model");
    }
}

void HeuristicModel::set_parameters(const std::vector<double>& p) {
    if (kind_ != ModelKind::Mlp) throw ConfigError("set_parameters requires an Mlp model");
    if (p.size() != params_.size()) throw ConfigError("parameter count mismatch");
    params_ = p;
    for (double& v : params_) v = round_f32(v);
}

void HeuristicModel::sync_target() {
    if (kind_ == ModelKind::Mlp)
        target_params_ = params_;
    else if (kind_ == ModelKind::Tabular)
        target_table_ = table_;
}

void HeuristicModel::save_checkpoint(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_u32(os, static_cast<std::uint32_t>(spec_.family));
    write_u32(os, static_cast<std::uint32_t>(spec_.size));
    write_u32(os, static_cast<std::uint32_t>(kind_));
    write_u32(os, static_cast<std::uint32_t>(hidden_.size()));
    for (auto w : hidden_) write_u32(os, w);
    if (kind_ == ModelKind::Mlp) {
        write_u32(os, static_cast<std::uint32_t>(params_.size()));
        for (double v : params_) write_f32(os, static_cast<float>(v));
        for (double v : target_params_) write_f32(os, static_cast<float>(v));
    } else if (kind_ == ModelKind::Tabular) {
        auto dump = [&](const std::unordered_map<PuzzleState, double, PuzzleStateHash>& t) {
            std::vector<const PuzzleState*> keys;
            keys.reserve(t.size());
            for (const auto& kv : t) keys.push_back(&kv.first);
            std::sort(keys.begin(), keys.end(),
                      [](const PuzzleState* a, const PuzzleState* b) {
                          return a->payload < b->payload;
                      });
            write_u32(os, static_cast<std::uint32_t>(keys.size()));
            for (const PuzzleState* k : keys) {
                write_u32(os, static_cast<std::uint32_t>(k->payload.size()));
                os.write(reinterpret_cast<const char*>(k->payload.data()),
                         static_cast<std::streamsize>(k->payload.size()));
                write_f32(os, static_cast<float>(t.at(*k)));
            }
        };
        dump(table_);
        dump(target_table_);
    }
    if (!os) throw IoError("failed writing checkpoint: " + path);
}

HeuristicModel HeuristicModel::load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path);
    char magic[6];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError("bad checkpoint magic: " + path);
    StateSpaceSpec spec;
    spec.family = static_cast<Family>(read_u32(is));
    spec.size = static_cast<int>(read_u32(is));
    auto kind = static_cast<ModelKind>(read_u32(is));
    std::uint32_t n_hidden = read_u32(is);
    std::vector<std::uint32_t> hidden(n_hidden);
    for (auto& w : hidden) w = read_u32(is);

    switch (kind) {
        case ModelKind::Zero:
            return make_zero(spec);
        case ModelKind::Manhattan:
            return make_manhattan(spec);
        case ModelKind::Mlp: {
            HeuristicModel m = make_mlp(spec, hidden, /*init_seed=*/0);
            std::uint32_t count = read_u32(is);
            if (count != m.params_.size()) throw FormatError("checkpoint parameter count mismatch");
            for (auto& v : m.params_) v = static_cast<double>(read_f32(is));
            for (auto& v : m.target_params_) v = static_cast<double>(read_f32(is));
            return m;
        }
        case ModelKind::Tabular: {
            HeuristicModel m = make_tabular(spec);
            auto load = [&](std::unordered_map<PuzzleState, double, PuzzleStateHash>& t) {
                std::uint32_t count = read_u32(is);
                for (std::uint32_t i = 0; i < count; ++i) {
                    std::uint32_t len = read_u32(is);
                    PuzzleState s;
                    s.payload.resize(len);
                    is.read(reinterpret_cast<char*>(s.payload.data()), len);
                    if (!is) throw FormatError("checkpoint truncated");
                    t[std::move(s)] = static_cast<double>(read_f32(is));
                }
            };
            load(m.table_);
            load(m.target_table_);
            return m;
        }
    }
    throw FormatError("unknown model kind in checkpoint");
}

HeuristicModel HeuristicModel::load_checkpoint(const std::string& path,
                                               const StateSpaceSpec& expected) {
    HeuristicModel m = load_checkpoint(path);
    if (!(m.spec_ == expected))
        throw DomainMismatchError("checkpoint domain " + family_name(m.spec_.family) + "/" +
                                  std::to_string(m.spec_.size) + " does not match run domain " +
                                  family_name(expected.family) + "/" +
                                  std::to_string(expected.size));
    return m;
}

}  // namespace hlearn
