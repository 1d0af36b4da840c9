#include "hlearn/eval.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>

#include "hlearn/errors.hpp"

namespace hlearn {

std::vector<TestInstance> generate_test_set(const StateSpaceSpec& spec, std::uint64_t count,
                                            const DepthSchedule& depth_schedule,
                                            std::uint64_t base_seed) {
    if (count < 1) throw ConfigError("test set count must be >= 1");
    validate_spec(spec);
    std::vector<TestInstance> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        TestInstance inst;
        inst.id = family_name(spec.family) + "-" + std::to_string(spec.size) + "-" +
                  std::to_string(i);
        inst.spec = spec;
        inst.scramble_depth = depth_schedule(i);
        inst.seed = base_seed + i;
        std::mt19937_64 rng(inst.seed);
        inst.start = scramble(spec, inst.scramble_depth, rng);
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<TestInstance> generate_test_set(const StateSpaceSpec& spec, std::uint64_t count,
                                            int depth_max, std::uint64_t base_seed) {
    return generate_test_set(
        spec, count,
        [count, depth_max](std::uint64_t i) {
            if (count <= 1) return depth_max;
            return static_cast<int>(std::llround(static_cast<double>(i) * depth_max /
                                                 static_cast<double>(count - 1)));
        },
        base_seed);
}

double estimate_state_count(const StateSpaceSpec& spec) {
    switch (spec.family) {
        case Family::SlidingTile: {
            double f = 1.0;
            for (int i = 2; i <= spec.size + 1; ++i) f *= i;
            return f;
        }
        case Family::LightsOut:
            return std::pow(2.0, static_cast<double>(spec.size) * spec.size);
        default:
            // Sticker configurations reachable from the solved cube (no fixed
            // orientation): 24 * 3,674,160 for 2x2, 24 * 4.3e19 for 3x3.
            return spec.size == 2 ? 88179840.0 : 1.04e21;
    }
}

OracleTable build_oracle(const StateSpaceSpec& spec, double cap) {
    validate_spec(spec);
    double estimate = estimate_state_count(spec);
    if (estimate > cap) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3g", estimate);
        throw ConfigError("oracle refused: estimated state count " + std::string(buf) +
                          " exceeds cap " + std::to_string(static_cast<long long>(cap)));
    }
    OracleTable table;
    table.spec = spec;
    // Unit edge costs: breadth-first from the goal over (reversible) moves.
    std::deque<PuzzleState> frontier;
    PuzzleState g = goal_state(spec);
    table.dist.emplace(g, 0.0);
    frontier.push_back(g);
    while (!frontier.empty()) {
        PuzzleState s = std::move(frontier.front());
        frontier.pop_front();
        double d = table.dist.at(s);
        for (const Successor& suc : successors(spec, s)) {
            if (table.dist.emplace(suc.state, d + suc.cost).second) {
                table.max_cost = std::max(table.max_cost, d + suc.cost);
                frontier.push_back(suc.state);
            }
        }
    }
    return table;
}

std::vector<BenchmarkRow> benchmark(const HeuristicModel& model,
                                    const std::vector<TestInstance>& instances,
                                    const BenchmarkOptions& opts) {
    std::vector<BenchmarkRow> rows;
    rows.reserve(instances.size() * opts.batch_sizes.size());
    for (const TestInstance& inst : instances) {
        if (!(inst.spec == model.spec()))
            throw DomainMismatchError("instance domain does not match model");
        for (int b : opts.batch_sizes) {
            SolveResult res = bwas(inst.spec, model, inst.start, b, opts.lambda, opts.limits);
            res.record.instance_id = inst.id;
            BenchmarkRow row;
            row.record = res.record;
            if (opts.oracle) row.optimal_cost = opts.oracle->lookup(inst.start);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<TraceRow> depression_trace(const HeuristicModel& model, const TestInstance& instance,
                                       int batch_size, double lambda, const SearchLimits& limits) {
    std::vector<TraceRow> trace;
    bwas(instance.spec, model, instance.start, batch_size, lambda, limits, false, &trace);
    return trace;
}

void write_results_csv(const std::string& path, const std::vector<BenchmarkRow>& rows,
                       bool include_wall_time) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write results csv: " + path);
    os << "instance_id,B,lambda,solved,solution_cost,optimal_cost,nodes_generated,"
          "nodes_expanded,wall_time_ms,limit_hit\n";
    char buf[128];
    for (const BenchmarkRow& row : rows) {
        const RunRecord& r = row.record;
        os << r.instance_id << ',' << r.batch_size << ',';
        std::snprintf(buf, sizeof(buf), "%.9g,", r.lambda);
        os << buf << (r.solved ? 1 : 0) << ',';
        if (r.solved) {
            std::snprintf(buf, sizeof(buf), "%.9g", r.solution_cost);
            os << buf;
        }
        os << ',';
        if (row.optimal_cost) {
            std::snprintf(buf, sizeof(buf), "%.9g", *row.optimal_cost);
            os << buf;
        }
        os << ',' << r.nodes_generated << ',' << r.nodes_expanded << ',';
        if (include_wall_time) {
            std::snprintf(buf, sizeof(buf), "%.3f", r.wall_time_ms);
            os << buf;
        }
        os << ',' << limit_hit_name(r.limit_hit) << '\n';
    }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write trace csv: " + path);
    os << "expansion_index,h,g\n";
    char buf[96];
    for (const TraceRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%llu,%.9g,%.9g\n",
                      static_cast<unsigned long long>(r.expansion_index), r.h, r.g);
        os << buf;
    }
}

}  // namespace hlearn
