#include "hlearn/search.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "hlearn/errors.hpp"

namespace hlearn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct OpenEntry {
    double f;
    double g;
    std::uint64_t seq;
    int id;
};

// Best node first: lower f, then higher g, then lower seq (FIFO).
struct OpenWorse {
    bool operator()(const OpenEntry& a, const OpenEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g < b.g;
        return a.seq > b.seq;
    }
};

using OpenQueue = std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenWorse>;

struct NodeTable {
    std::unordered_map<PuzzleState, int, PuzzleStateHash> ids;
    std::vector<PuzzleState> states;
    std::vector<double> best_g;
    std::vector<double> closed_g;  // g at expansion, inf if never expanded
    std::vector<double> h;
    std::vector<char> is_goal_state;
    std::vector<int> parent;
    std::vector<int> parent_op;
    std::vector<double> parent_cost;

    int intern(const StateSpaceSpec& spec, const PuzzleState& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(states.size());
        ids.emplace(s, id);
        states.push_back(s);
        best_g.push_back(kInf);
        closed_g.push_back(kInf);
        h.push_back(-1.0);  // not evaluated yet
        is_goal_state.push_back(is_goal(spec, s) ? 1 : 0);
        parent.push_back(-1);
        parent_op.push_back(-1);
        parent_cost.push_back(0.0);
        return id;
    }
};

}  // namespace

std::string limit_hit_name(LimitHit l) {
    switch (l) {
        case LimitHit::None: return "none";
        case LimitHit::Expansions: return "expansions";
        case LimitHit::Time: return "time";
        default: return "memory";
    }
}

SolveResult bwas(const StateSpaceSpec& spec, const HeuristicModel& model,
                 const PuzzleState& start, int batch_size, double lambda,
                 const SearchLimits& limits, bool use_target, std::vector<TraceRow>* trace) {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must be in [0,1]");
    if (!limits.any()) throw ConfigError("at least one search limit must be set");
    validate_state(spec, start);

    auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    SolveResult result;
    RunRecord& rec = result.record;
    rec.batch_size = batch_size;
    rec.lambda = lambda;

    NodeTable nodes;
    OpenQueue open;
    std::uint64_t seq = 0;

    int root = nodes.intern(spec, start);
    nodes.best_g[root] = 0.0;
    nodes.h[root] = model.evaluate_batch(use_target, {start})[0];
    open.push({lambda * 0.0 + nodes.h[root], 0.0, seq++, root});

    int goal_id = -1;
    std::vector<std::pair<int, double>> batch;  // (id, g) selected for expansion
    std::vector<int> fresh;                     // successor ids needing h

    while (goal_id < 0) {
        if (limits.max_time_ms > 0.0 && elapsed_ms() > limits.max_time_ms) {
            rec.limit_hit = LimitHit::Time;
            break;
        }
        if (limits.max_states > 0 && nodes.states.size() > limits.max_states) {
            rec.limit_hit = LimitHit::Memory;
            break;
        }

        batch.clear();
        while (static_cast<int>(batch.size()) < batch_size && !open.empty()) {
            OpenEntry e = open.top();
            open.pop();
            if (e.g > nodes.best_g[e.id]) continue;          // stale
            if (nodes.closed_g[e.id] <= e.g) continue;       // already expanded at this g
            if (nodes.is_goal_state[e.id]) {
                goal_id = e.id;
                break;
            }
            batch.emplace_back(e.id, e.g);
        }
        if (goal_id >= 0) break;
        if (batch.empty()) break;  // OPEN exhausted

        // Expand the selected batch, collecting every successor first so all
        // new heuristic evaluations go through a single batched call.
        fresh.clear();
        std::vector<std::tuple<int, double>> to_push;  // (id, g)
        bool limit_tripped = false;
        for (auto [id, g] : batch) {
            nodes.closed_g[id] = g;
            if (trace) trace->push_back({rec.nodes_expanded, nodes.h[id], g});
            ++rec.nodes_expanded;
            for (const Successor& suc : successors(spec, nodes.states[id])) {
                ++rec.nodes_generated;
                int sid = nodes.intern(spec, suc.state);
                double g2 = g + suc.cost;
                if (g2 < nodes.best_g[sid]) {
                    nodes.best_g[sid] = g2;
                    nodes.parent[sid] = id;
                    nodes.parent_op[sid] = suc.op;
                    nodes.parent_cost[sid] = suc.cost;
                    if (nodes.h[sid] < 0.0) fresh.push_back(sid);
                    to_push.emplace_back(sid, g2);
                }
            }
            if (limits.max_expansions > 0 && rec.nodes_expanded >= limits.max_expansions) {
                rec.limit_hit = LimitHit::Expansions;
                limit_tripped = true;
                break;
            }
        }
        if (!fresh.empty()) {
            std::vector<PuzzleState> fresh_states;
            fresh_states.reserve(fresh.size());
            for (int sid : fresh) fresh_states.push_back(nodes.states[sid]);
            std::vector<double> hs = model.evaluate_batch(use_target, fresh_states);
            for (std::size_t i = 0; i < fresh.size(); ++i) nodes.h[fresh[i]] = hs[i];
        }
        for (auto [sid, g2] : to_push) {
            if (g2 > nodes.best_g[sid]) continue;  // improved again within the batch
            open.push({lambda * g2 + nodes.h[sid], g2, seq++, sid});
        }
        if (limit_tripped) break;
    }

    if (goal_id >= 0) {
        rec.solved = true;
        // Walk the best-parent chain; its edge sum is the cost we report.
        std::vector<int> ops;
        double cost = 0.0;
        for (int v = goal_id; v != root; v = nodes.parent[v]) {
            ops.push_back(nodes.parent_op[v]);
            cost += nodes.parent_cost[v];
        }
        std::reverse(ops.begin(), ops.end());
        rec.solution_cost = cost;
        rec.solution_length = ops.size();
        result.path_ops = std::move(ops);
        if (trace && rec.nodes_expanded > 0)
            trace->push_back({rec.nodes_expanded, 0.0, nodes.best_g[goal_id]});
    }
    rec.wall_time_ms = elapsed_ms();
    return result;
}

SearchGraph run_limited_horizon(const StateSpaceSpec& spec, const HeuristicModel& model,
                                const PuzzleState& start, int horizon, HorizonAlgo algo) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    validate_state(spec, start);
    double lambda = algo == HorizonAlgo::AStarUnit ? 1.0 : 0.0;

    SearchGraph g;
    g.spec = spec;

    NodeTable nodes;
    OpenQueue open;
    std::uint64_t seq = 0;

    auto graph_vertex = [&](int id) {
        while (g.out.size() < nodes.states.size()) {
            g.states.push_back(nodes.states[g.out.size()]);
            g.out.emplace_back();
            g.expanded.push_back(0);
            g.goal_flag.push_back(nodes.is_goal_state[g.out.size() - 1]);
            g.best_g.push_back(nodes.best_g[g.out.size() - 1]);
        }
        return id;
    };

    int root = nodes.intern(spec, start);
    nodes.best_g[root] = 0.0;
    nodes.h[root] = model.evaluate_batch(true, {start})[0];
    graph_vertex(root);
    g.root = root;
    open.push({lambda * 0.0 + nodes.h[root], 0.0, seq++, root});

    int expansions = 0;
    while (expansions < horizon && !open.empty()) {
        OpenEntry e = open.top();
        open.pop();
        if (nodes.closed_g[e.id] < kInf) continue;  // expand each state at most once
        if (e.g > nodes.best_g[e.id]) continue;
        if (nodes.is_goal_state[e.id]) break;  // goal selected; stays a leaf
        nodes.closed_g[e.id] = e.g;
        g.expanded[e.id] = 1;
        g.expansion_order.push_back(e.id);
        ++expansions;

        std::vector<int> fresh;
        std::vector<std::pair<int, double>> to_push;
        for (const Successor& suc : successors(spec, nodes.states[e.id])) {
            int sid = nodes.intern(spec, suc.state);
            graph_vertex(sid);
            g.out[e.id].emplace_back(sid, suc.cost);  // record every generated edge
            double g2 = e.g + suc.cost;
            if (g2 < nodes.best_g[sid]) {
                nodes.best_g[sid] = g2;
                g.best_g[sid] = g2;
                if (nodes.h[sid] < 0.0) fresh.push_back(sid);
                if (nodes.closed_g[sid] == kInf) to_push.emplace_back(sid, g2);
            }
        }
        if (!fresh.empty()) {
            std::vector<PuzzleState> fresh_states;
            fresh_states.reserve(fresh.size());
            for (int sid : fresh) fresh_states.push_back(nodes.states[sid]);
            std::vector<double> hs = model.evaluate_batch(true, fresh_states);
            for (std::size_t i = 0; i < fresh.size(); ++i) nodes.h[fresh[i]] = hs[i];
        }
        for (auto [sid, g2] : to_push) {
            if (g2 > nodes.best_g[sid]) continue;
            open.push({lambda * g2 + nodes.h[sid], g2, seq++, sid});
        }
    }
    return g;
}

std::vector<int> reconstruct_path(const SolveResult& result) {
    if (!result.record.solved) throw std::logic_error("reconstruct_path on an unsolved run");
    return result.path_ops;
}

}  // namespace hlearn
