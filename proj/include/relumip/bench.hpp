#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relumip/applications.hpp"
#include "relumip/milp_solver.hpp"

namespace relumip {

struct BenchConfig {
    int instances = 20;
    std::uint64_t seed = 0;
    double time_limit_s = 300.0;
    double margin_factor = 1.2;
    std::optional<double> pixel_cap;
};

struct BenchInstance {
    int index = 0;
    int true_label = 0;
    int target = 0;
    MilpStatus status = MilpStatus::Infeasible;
    double objective = 0.0;
    double pct_gap = 0.0;
    long nodes = 0;
    double time_s = 0.0;
};

/// Aggregates one model variant the way the comparison table reports it:
/// share of instances solved to proven optimality, mean gap, mean node
/// count, mean time with timed-out runs counted at the full limit.
struct BenchRow {
    std::string name;
    double pct_solved = 0.0;
    double mean_gap = 0.0;
    double mean_nodes = 0.0;
    double mean_time_s = 0.0;
};

struct BenchReport {
    BenchRow basic;
    BenchRow improved;
    std::vector<BenchInstance> basic_runs;
    std::vector<BenchInstance> improved_runs;
};

/// Seeded adversarial instances (random in-box references, true label from
/// the network itself, target by label rotation), each solved twice: once
/// with the interval bounds ("basic") and once with tightened bounds
/// ("improved").
BenchReport run_bench(const Network& net, const BoundsTable& interval,
                      const BoundsTable& tightened, const BenchConfig& config);

BenchRow aggregate(const std::string& name, const std::vector<BenchInstance>& runs,
                   double time_limit_s);

std::string format_bench_table(const BenchReport& report);

}  // namespace relumip
