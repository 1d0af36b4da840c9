// hlearn command-line interface: train / solve / eval / oracle / label-check /
// trace. One JSON config file (sections: domain, model, train; plus a single
// top-level seed) drives training; --set key=value overrides win over the
// file. Exit codes: 0 success, 2 config error, 3 runtime limit or divergence,
// 4 IO or file-format error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "hlearn/errors.hpp"
#include "hlearn/eval.hpp"
#include "hlearn/labeler.hpp"
#include "hlearn/trainer.hpp"

using nlohmann::json;
using namespace hlearn;

namespace {

// ---------------------------------------------------------------------------
// Config plumbing

const char* kTrainConfigHelp = R"(Config file keys (JSON) and defaults:
  seed                       1           master seed; all randomness flows from it
  domain.family              (required)  sliding_tile | lights_out | rubiks_cube
  domain.size                (required)  tile count / board side / cube side
  model.kind                 mlp         mlp | tabular
  model.hidden               [256,256]   hidden layer widths (mlp only)
  model.optimizer            sgd         sgd | adam
  train.mode                 ssbl        ssbl | lhbl_s | lhbl
  train.horizon              10          expansions per labeling search (lhbl*)
  train.search_algo          astar       astar | gbfs (horizon search guidance)
  train.scramble_depth_max   31          start-state scramble depth, uniform {0..max}
  train.samples_budget       0           labeled examples to consume (required > 0)
  train.minibatch_size       128         labels per optimizer step
  train.learning_rate        0.001       step size
  train.target_sync_interval 1000        optimizer steps between target syncs
  train.checkpoint_interval  0           steps between checkpoints (0 = final only)
  train.out_dir              ""          output directory for log + checkpoints
Overrides: --set key=value (dotted path, e.g. --set train.samples_budget=1000))";

json parse_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read config file: " + path);
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
}

void apply_override(json& cfg, const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key=value, got: " + kv);
    std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        auto dot = key.find('.', pos);
        std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (part.empty()) throw ConfigError("empty path segment in override: " + kv);
        if (dot == std::string::npos) {
            json parsed;
            try {
                parsed = json::parse(value);
            } catch (const json::exception&) {
                parsed = value;  // bare strings like lhbl need no quotes
            }
            (*node)[part] = parsed;
            return;
        }
        node = &(*node)[part];
        pos = dot + 1;
    }
}

void reject_unknown_keys(const json& obj, const std::string& section,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown config key: " + (section.empty() ? key : section + "." + key));
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for config key '" + key + "': " + e.what());
    }
}

StateSpaceSpec spec_from_config(const json& cfg) {
    if (!cfg.contains("domain")) throw ConfigError("missing config section: domain");
    const json& d = cfg.at("domain");
    reject_unknown_keys(d, "domain", {"family", "size"});
    if (!d.contains("family")) throw ConfigError("missing config key: domain.family");
    if (!d.contains("size")) throw ConfigError("missing config key: domain.size");
    StateSpaceSpec spec;
    spec.family = family_from_name(d.at("family").get<std::string>());
    spec.size = get_or<int>(d, "size", 0);
    validate_spec(spec);
    return spec;
}

HeuristicModel model_from_config(const json& cfg, const StateSpaceSpec& spec,
                                 std::uint64_t seed) {
    json m = cfg.contains("model") ? cfg.at("model") : json::object();
    reject_unknown_keys(m, "model", {"kind", "hidden", "optimizer"});
    std::string kind = get_or<std::string>(m, "kind", "mlp");
    HeuristicModel model = [&] {
        if (kind == "tabular") return HeuristicModel::make_tabular(spec);
        if (kind == "mlp") {
            auto hidden = get_or<std::vector<std::uint32_t>>(m, "hidden", {256, 256});
            return HeuristicModel::make_mlp(spec, hidden, seed);
        }
        throw ConfigError("model.kind must be mlp or tabular for training, got: " + kind);
    }();
    std::string opt = get_or<std::string>(m, "optimizer", "sgd");
    if (opt == "adam")
        model.set_optimizer(Optimizer::Adam);
    else if (opt != "sgd")
        throw ConfigError("model.optimizer must be sgd or adam, got: " + opt);
    return model;
}

TrainConfig train_config_from(const json& cfg, const StateSpaceSpec& spec, std::uint64_t seed) {
    json t = cfg.contains("train") ? cfg.at("train") : json::object();
    reject_unknown_keys(t, "train",
                        {"mode", "horizon", "search_algo", "scramble_depth_max", "samples_budget",
                         "minibatch_size", "learning_rate", "target_sync_interval",
                         "checkpoint_interval", "out_dir"});
    TrainConfig c;
    c.spec = spec;
    c.mode = train_mode_from_name(get_or<std::string>(t, "mode", "ssbl"));
    c.horizon = get_or<int>(t, "horizon", 10);
    std::string algo = get_or<std::string>(t, "search_algo", "astar");
    if (algo == "astar")
        c.search_algo = HorizonAlgo::AStarUnit;
    else if (algo == "gbfs")
        c.search_algo = HorizonAlgo::Gbfs;
    else
        throw ConfigError("train.search_algo must be astar or gbfs, got: " + algo);
    c.scramble_depth_max = get_or<int>(t, "scramble_depth_max", 31);
    c.samples_budget = get_or<std::uint64_t>(t, "samples_budget", 0);
    c.minibatch_size = get_or<int>(t, "minibatch_size", 128);
    c.learning_rate = get_or<double>(t, "learning_rate", 1e-3);
    c.target_sync_interval = get_or<std::uint64_t>(t, "target_sync_interval", 1000);
    c.checkpoint_interval = get_or<std::uint64_t>(t, "checkpoint_interval", 0);
    c.out_dir = get_or<std::string>(t, "out_dir", "");
    c.seed = seed;
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Shared subcommand options

struct InstanceArgs {
    std::string checkpoint;
    std::string model = "checkpoint";  // checkpoint | zero | manhattan
    std::string family;
    int size = 0;
    int depth = 0;
    std::uint64_t instance_seed = 1;
};

struct SearchArgs {
    int batch_size = 1;
    double lambda = 1.0;
    std::uint64_t max_expansions = 1'000'000;
    double max_time_ms = 0.0;
    std::uint64_t max_states = 0;
};

void add_instance_options(CLI::App* cmd, InstanceArgs& a, bool with_depth) {
    cmd->add_option("--checkpoint", a.checkpoint, "model checkpoint (.hh) to load");
    cmd->add_option("--model", a.model,
                    "heuristic source: checkpoint | zero | manhattan (default checkpoint)");
    cmd->add_option("--family", a.family,
                    "domain family (required for --model zero/manhattan; otherwise checked "
                    "against the checkpoint)");
    cmd->add_option("--size", a.size, "domain size parameter");
    if (with_depth) {
        cmd->add_option("--depth", a.depth, "scramble depth of the instance (default 0)");
        cmd->add_option("--instance-seed", a.instance_seed,
                        "seed for the instance scramble (default 1)");
    }
}

void add_search_options(CLI::App* cmd, SearchArgs& a) {
    cmd->add_option("--batch-size", a.batch_size, "nodes removed per expansion round (default 1)");
    cmd->add_option("--lambda", a.lambda, "path-cost weight in f = lambda*g + h (default 1)");
    cmd->add_option("--max-expansions", a.max_expansions,
                    "expansion limit (default 1000000; 0 = unlimited)");
    cmd->add_option("--max-time-ms", a.max_time_ms, "wall-clock limit (default off)");
    cmd->add_option("--max-states", a.max_states, "unique-state limit (default off)");
}

std::pair<HeuristicModel, StateSpaceSpec> resolve_model(const InstanceArgs& a) {
    if (a.model == "checkpoint") {
        if (a.checkpoint.empty())
            throw ConfigError("--checkpoint is required unless --model zero/manhattan is given");
        HeuristicModel m = a.family.empty()
                               ? HeuristicModel::load_checkpoint(a.checkpoint)
                               : HeuristicModel::load_checkpoint(
                                     a.checkpoint,
                                     StateSpaceSpec{family_from_name(a.family), a.size});
        StateSpaceSpec spec = m.spec();
        return {std::move(m), spec};
    }
    if (a.family.empty() || a.size == 0)
        throw ConfigError("--family and --size are required with --model " + a.model);
    StateSpaceSpec spec{family_from_name(a.family), a.size};
    validate_spec(spec);
    if (a.model == "zero") return {HeuristicModel::make_zero(spec), spec};
    if (a.model == "manhattan") return {HeuristicModel::make_manhattan(spec), spec};
    throw ConfigError("--model must be checkpoint, zero, or manhattan, got: " + a.model);
}

SearchLimits limits_of(const SearchArgs& a) {
    return SearchLimits{a.max_expansions, a.max_time_ms, a.max_states};
}

// ---------------------------------------------------------------------------
// label-check audit: independent exhaustive simple-path enumeration compared
// against lhb_labels on randomly generated partially-expanded graphs.

double enumerate_label(const SearchGraph& g, const std::vector<double>& leaf_h, int v0) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> on_path(g.size(), 0);
    std::function<void(int, double)> dfs = [&](int v, double cost) {
        if (cost >= best) return;
        if (g.is_leaf(v)) {
            best = std::min(best, cost + (g.goal_flag[v] ? 0.0 : leaf_h[v]));
            return;
        }
        on_path[v] = 1;
        for (auto [u, c] : g.out[v])
            if (!on_path[u]) dfs(u, cost + c);
        on_path[v] = 0;
    };
    dfs(v0, 0.0);
    return best;
}

SearchGraph random_audit_graph(std::mt19937_64& rng, std::vector<double>& leaf_h) {
    std::uniform_int_distribution<int> nv(2, 24);
    int n = nv(rng);
    std::uniform_real_distribution<double> cost(1e-6, 10.0);
    std::uniform_real_distribution<double> hval(0.0, 10.0);
    std::uniform_int_distribution<int> deg(0, 2);
    SearchGraph g;
    g.out.resize(n);
    for (int i = 0; i < n; ++i) g.states.push_back(PuzzleState{{static_cast<std::uint8_t>(i)}});
    g.expanded.assign(n, 0);
    g.goal_flag.assign(n, 0);
    g.best_g.assign(n, 0.0);
    g.root = 0;
    std::vector<std::vector<int>> targets(n);
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        targets[parent(rng)].push_back(i);
    }
    if (targets[0].empty()) targets[0].push_back(1);
    for (int v = 0; v < n; ++v) {
        if (targets[v].empty()) continue;
        std::uniform_int_distribution<int> any(0, n - 1);
        for (int k = deg(rng); k > 0; --k) targets[v].push_back(any(rng));
        for (int u : targets[v])
            if (u != v) g.out[v].emplace_back(u, cost(rng));
    }
    std::bernoulli_distribution goal_coin(0.15);
    leaf_h.assign(n, 0.0);
    for (int v = 0; v < n; ++v) {
        g.expanded[v] = g.out[v].empty() ? 0 : 1;
        if (g.expanded[v]) continue;
        leaf_h[v] = hval(rng);
        if (goal_coin(rng)) {
            g.goal_flag[v] = 1;
            leaf_h[v] = 0.0;
        }
    }
    return g;
}

int cmd_label_check(std::uint64_t trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double max_diff = 0.0;
    std::printf("graph_id,vertex,lhb,oracle,diff\n");
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::vector<double> leaf_h;
        SearchGraph g = random_audit_graph(rng, leaf_h);
        std::vector<double> labels = lhb_labels(g, leaf_h);
        for (int v = 0; v < static_cast<int>(g.size()); ++v) {
            double expect = enumerate_label(g, leaf_h, v);
            double diff = (std::isinf(labels[v]) && std::isinf(expect))
                              ? 0.0
                              : std::abs(labels[v] - expect);
            max_diff = std::max(max_diff, diff);
            std::printf("%llu,%d,%.17g,%.17g,%.17g\n", static_cast<unsigned long long>(t), v,
                        labels[v], expect, diff);
        }
    }
    std::fprintf(stderr, "label-check: %llu graphs, max diff %.3g\n",
                 static_cast<unsigned long long>(trials), max_diff);
    if (max_diff >= 1e-9) {
        std::fprintf(stderr, "label-check FAILED: max diff %.17g >= 1e-9\n", max_diff);
        return 3;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Remaining subcommand bodies

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides) {
    json cfg = parse_json_file(config_path);
    for (const std::string& kv : overrides) apply_override(cfg, kv);
    reject_unknown_keys(cfg, "", {"seed", "domain", "model", "train"});
    std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 1);
    StateSpaceSpec spec = spec_from_config(cfg);
    HeuristicModel model = model_from_config(cfg, spec, seed);
    TrainConfig tc = train_config_from(cfg, spec, seed);
    std::vector<TrainLogRow> log = train(tc, model);
    if (!log.empty()) {
        const TrainLogRow& last = log.back();
        std::printf("steps: %llu\nlabels: %llu\nfinal_loss: %.17g\n",
                    static_cast<unsigned long long>(last.step),
                    static_cast<unsigned long long>(last.labels), last.loss);
    }
    return 0;
}

int cmd_solve(const InstanceArgs& inst, const SearchArgs& search) {
    auto [model, spec] = resolve_model(inst);
    std::mt19937_64 rng(inst.instance_seed);
    PuzzleState start = scramble(spec, inst.depth, rng);
    SolveResult r = bwas(spec, model, start, search.batch_size, search.lambda, limits_of(search));
    std::printf("solved: %d\n", r.record.solved ? 1 : 0);
    if (r.record.solved) {
        std::printf("solution_cost: %.17g\nsolution_length: %zu\n", r.record.solution_cost,
                    r.record.solution_length);
    } else {
        std::printf("limit_hit: %s\n", limit_hit_name(r.record.limit_hit).c_str());
    }
    std::printf("nodes_generated: %llu\nnodes_expanded: %llu\n",
                static_cast<unsigned long long>(r.record.nodes_generated),
                static_cast<unsigned long long>(r.record.nodes_expanded));
    if (r.record.solved) {
        std::printf("path:");
        for (int op : r.path_ops) std::printf(" %s", operator_name(spec, op).c_str());
        std::printf("\n");
    }
    return r.record.solved ? 0 : 3;
}

int cmd_eval(const InstanceArgs& inst, const SearchArgs& search, std::uint64_t count,
             int depth_max, std::uint64_t set_seed, const std::vector<int>& batch_sizes,
             const std::string& out, bool with_oracle, bool wall_time) {
    auto [model, spec] = resolve_model(inst);
    std::vector<TestInstance> set = generate_test_set(spec, count, depth_max, set_seed);
    BenchmarkOptions opts;
    if (!batch_sizes.empty()) opts.batch_sizes = batch_sizes;
    opts.lambda = search.lambda;
    opts.limits = limits_of(search);
    OracleTable oracle;
    if (with_oracle) {
        oracle = build_oracle(spec);
        opts.oracle = &oracle;
    }
    std::vector<BenchmarkRow> rows = benchmark(model, set, opts);
    write_results_csv(out, rows, wall_time);
    std::uint64_t solved = 0;
    for (const BenchmarkRow& row : rows) solved += row.record.solved;
    std::printf("rows: %zu\nsolved: %llu\n", rows.size(),
                static_cast<unsigned long long>(solved));
    return 0;
}

int cmd_oracle(const std::string& family, int size, const std::string& out) {
    StateSpaceSpec spec{family_from_name(family), size};
    OracleTable table = build_oracle(spec);
    std::vector<std::pair<std::vector<std::uint8_t>, double>> rows;
    rows.reserve(table.dist.size());
    for (const auto& [s, d] : table.dist) rows.emplace_back(s.payload, d);
    std::sort(rows.begin(), rows.end());
    std::ofstream os(out, std::ios::binary);
    if (!os) throw IoError("cannot write oracle table: " + out);
    os << "state,cost\n";
    for (const auto& [payload, d] : rows) {
        for (std::size_t i = 0; i < payload.size(); ++i)
            os << (i ? "-" : "") << static_cast<int>(payload[i]);
        os << ',' << d << '\n';
    }
    if (!os.flush()) throw IoError("write failed: " + out);
    std::printf("states: %zu\nmax_cost: %.17g\n", rows.size(), table.max_cost);
    return 0;
}

int cmd_trace(const InstanceArgs& inst, const SearchArgs& search, const std::string& out) {
    auto [model, spec] = resolve_model(inst);
    std::mt19937_64 rng(inst.instance_seed);
    TestInstance instance;
    instance.id = family_name(spec.family) + "-" + std::to_string(spec.size);
    instance.spec = spec;
    instance.start = scramble(spec, inst.depth, rng);
    std::vector<TraceRow> rows =
        depression_trace(model, instance, search.batch_size, search.lambda, limits_of(search));
    write_trace_csv(out, rows);
    std::printf("rows: %zu\n", rows.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hlearn: learned cost-to-go heuristics inside batch weighted A*"};
    app.require_subcommand(1);

    // train
    std::string config_path;
    std::vector<std::string> overrides;
    CLI::App* train_cmd = app.add_subcommand("train", "train a heuristic from a JSON config");
    train_cmd->add_option("--config", config_path, "JSON config file")->required();
    train_cmd->add_option("--set", overrides, "override a config key (dotted path, repeatable)");
    train_cmd->footer(kTrainConfigHelp);

    // solve
    InstanceArgs solve_inst;
    SearchArgs solve_search;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one scrambled instance with bwas");
    add_instance_options(solve_cmd, solve_inst, true);
    add_search_options(solve_cmd, solve_search);

    // eval
    InstanceArgs eval_inst;
    SearchArgs eval_search;
    std::uint64_t eval_count = 10, eval_seed = 1;
    int eval_depth_max = 31;
    std::vector<int> eval_batches;
    std::string eval_out = "results.csv";
    bool eval_oracle = false, eval_wall = false;
    CLI::App* eval_cmd = app.add_subcommand("eval", "benchmark over a generated test set");
    add_instance_options(eval_cmd, eval_inst, false);
    add_search_options(eval_cmd, eval_search);
    eval_cmd->add_option("--count", eval_count, "number of instances (default 10)");
    eval_cmd->add_option("--depth-max", eval_depth_max, "scramble depth ramp top (default 31)");
    eval_cmd->add_option("--seed", eval_seed, "test-set seed (default 1)");
    eval_cmd->add_option("--batch-sizes", eval_batches,
                         "batch sizes to sweep (default: just --batch-size 1)");
    eval_cmd->add_option("--out", eval_out, "results CSV path (default results.csv)");
    eval_cmd->add_flag("--oracle", eval_oracle, "fill optimal_cost from an exact oracle");
    eval_cmd->add_flag("--wall-time", eval_wall,
                       "record wall_time_ms (off by default so reruns are byte-identical)");

    // oracle
    std::string oracle_family, oracle_out = "oracle.csv";
    int oracle_size = 0;
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "write the exact cost-to-go table");
    oracle_cmd->add_option("--family", oracle_family, "domain family")->required();
    oracle_cmd->add_option("--size", oracle_size, "domain size parameter")->required();
    oracle_cmd->add_option("--out", oracle_out, "output CSV path (default oracle.csv)");

    // label-check
    std::uint64_t lc_trials = 1000, lc_seed = 1;
    CLI::App* lc_cmd = app.add_subcommand(
        "label-check", "audit limited-horizon labels against exhaustive path enumeration");
    lc_cmd->add_option("--trials", lc_trials, "number of random graphs (default 1000)");
    lc_cmd->add_option("--seed", lc_seed, "graph generator seed (default 1)");

    // trace
    InstanceArgs trace_inst;
    SearchArgs trace_search;
    std::string trace_out = "trace.csv";
    CLI::App* trace_cmd =
        app.add_subcommand("trace", "record (expansion_index,h,g) along one search");
    add_instance_options(trace_cmd, trace_inst, true);
    add_search_options(trace_cmd, trace_search);
    trace_cmd->add_option("--out", trace_out, "trace CSV path (default trace.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(config_path, overrides);
        if (solve_cmd->parsed()) return cmd_solve(solve_inst, solve_search);
        if (eval_cmd->parsed())
            return cmd_eval(eval_inst, eval_search, eval_count, eval_depth_max, eval_seed,
                            eval_batches, eval_out, eval_oracle, eval_wall);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_family, oracle_size, oracle_out);
        if (lc_cmd->parsed()) return cmd_label_check(lc_trials, lc_seed);
        if (trace_cmd->parsed()) return cmd_trace(trace_inst, trace_search, trace_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 3;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return 4;
    } catch (const DomainMismatchError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return 4;
    } catch (const MalformedStateError& e) {
        std::fprintf(stderr, "state error: %s\n", e.what());
        return 4;
    }
    return 2;  // unreachable: require_subcommand guarantees one branch above
}
