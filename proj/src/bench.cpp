#include "relumip/bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace relumip {

namespace {

BenchInstance solve_instance(const Network& net, const BoundsTable& bounds,
                             const AdversarialSpec& spec, int index,
                             const BenchConfig& config)
{
    MilpModel model = build_adversarial_model(net, bounds, spec);
    linearize_indicators(model);

    SolverConfig sc;
    sc.time_limit_s = config.time_limit_s;
    MilpResult res = solve_milp(model, sc);

    BenchInstance inst;
    inst.index = index;
    inst.true_label = spec.true_label;
    inst.target = spec.target;
    inst.status = res.status;
    inst.objective = res.has_incumbent() ? res.objective : 0.0;
    inst.pct_gap = res.has_incumbent() ? res.stats.pct_gap : 100.0;
    if (res.status == MilpStatus::ProvenOptimal || res.status == MilpStatus::Infeasible)
        inst.pct_gap = 0.0;
    inst.nodes = res.stats.nodes;
    inst.time_s = res.stats.wall_time_s;
    return inst;
}

}  // namespace

BenchRow aggregate(const std::string& name, const std::vector<BenchInstance>& runs,
                   double time_limit_s)
{
    BenchRow row;
    row.name = name;
    if (runs.empty())
        return row;
    int solved = 0;
    double gap = 0.0, nodes = 0.0, time = 0.0;
    for (const BenchInstance& r : runs) {
        bool proven = r.status == MilpStatus::ProvenOptimal ||
                      r.status == MilpStatus::Infeasible;
        if (proven)
            ++solved;
        gap += r.pct_gap;
        nodes += static_cast<double>(r.nodes);
        // Timed-out runs count at the full limit.
        time += proven ? std::min(r.time_s, time_limit_s) : time_limit_s;
    }
    double n = static_cast<double>(runs.size());
    row.pct_solved = 100.0 * solved / n;
    row.mean_gap = gap / n;
    row.mean_nodes = nodes / n;
    row.mean_time_s = time / n;
    return row;
}

BenchReport run_bench(const Network& net, const BoundsTable& interval,
                      const BoundsTable& tightened, const BenchConfig& config)
{
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int classes = net.output_dim();

    std::vector<AdversarialSpec> specs;
    for (int i = 0; i < config.instances; ++i) {
        AdversarialSpec spec;
        spec.reference_input.resize(net.input_dim);
        for (int j = 0; j < net.input_dim; ++j)
            spec.reference_input[j] =
                net.input_lb[j] + unit(rng) * (net.input_ub[j] - net.input_lb[j]);
        spec.true_label = classify(net, spec.reference_input).first;
        spec.target = target_label(spec.true_label, classes);
        spec.margin_factor = config.margin_factor;
        spec.pixel_cap = config.pixel_cap;
        specs.push_back(std::move(spec));
    }

    BenchReport report;
    for (int i = 0; i < config.instances; ++i) {
        report.basic_runs.push_back(solve_instance(net, interval, specs[i], i, config));
        report.improved_runs.push_back(
            solve_instance(net, tightened, specs[i], i, config));
    }
    report.basic = aggregate("basic", report.basic_runs, config.time_limit_s);
    report.improved = aggregate("improved", report.improved_runs, config.time_limit_s);
    return report;
}

std::string format_bench_table(const BenchReport& report)
{
    std::ostringstream out;
    out << std::fixed;
    out << std::setw(10) << "model" << std::setw(10) << "%solved" << std::setw(10)
        << "%gap" << std::setw(12) << "nodes" << std::setw(12) << "time(s)" << "\n";
    for (const BenchRow* row : {&report.basic, &report.improved}) {
        out << std::setw(10) << row->name << std::setprecision(1) << std::setw(10)
            << row->pct_solved << std::setprecision(2) << std::setw(10) << row->mean_gap
            << std::setprecision(1) << std::setw(12) << row->mean_nodes
            << std::setprecision(2) << std::setw(12) << row->mean_time_s << "\n";
    }
    return out.str();
}

}  // namespace relumip
