#include "relumip/bound_tightening.hpp"

#include <algorithm>
#include <cmath>

#include "relumip/milp_solver.hpp"
#include "relumip/simplex.hpp"

namespace relumip {

namespace {

// Network truncated to layers 1..k with layer k reduced to one unit.
Network truncate_to_unit(const Network& net, int layer, int unit)
{
    Network sub;
    sub.input_dim = net.input_dim;
    sub.input_lb = net.input_lb;
    sub.input_ub = net.input_ub;
    sub.layers.assign(net.layers.begin(), net.layers.begin() + layer - 1);

    const Layer& full = net.layers[layer - 1];
    Layer reduced;
    reduced.kind = full.kind;
    if (full.kind == LayerKind::Dense) {
        reduced.weights = {full.weights[unit]};
        reduced.bias = {full.bias[unit]};
        reduced.activation = full.activation;
    } else {
        reduced.groups = {full.groups[unit]};
    }
    sub.layers.push_back(std::move(reduced));
    return sub;
}

BoundsTable truncate_table(const BoundsTable& table, int layer, int unit)
{
    BoundsTable sub;
    sub.input_lb = table.input_lb;
    sub.input_ub = table.input_ub;
    sub.units.assign(table.units.begin(), table.units.begin() + layer - 1);
    sub.units.push_back({table.units[layer - 1][unit]});
    return sub;
}

struct BoundSolve {
    double value = kInfinity;
    bool estimate = false;  // dual bound after a time limit, not a proven optimum
    bool ok = false;
};

// Optimize one objective over the truncated model. `sense` Maximize yields an
// upper bound directly; Minimize is used for the negative side of linear and
// pooling units, where -result bounds the magnitude.
BoundSolve optimize_unit(MilpModel& model, int var, ObjSense sense,
                         const TightenConfig& config)
{
    model.base.clear_objective();
    model.base.set_objective_coeff(var, 1.0);
    model.base.set_sense(sense);

    BoundSolve out;
    if (config.use_milp) {
        SolverConfig sc;
        sc.time_limit_s = config.per_bound_time_limit_s;
        MilpResult res = solve_milp(model, sc);
        if (res.status == MilpStatus::ProvenOptimal && res.has_incumbent()) {
            out.value = res.objective;
            out.ok = true;
        } else if (res.status != MilpStatus::Infeasible) {
            out.value = res.dual_bound;
            out.estimate = true;
            out.ok = std::isfinite(out.value);
        }
    } else {
        LpSolution sol = solve_lp(model.base);
        if (sol.status == LpStatus::Optimal) {
            out.value = sol.objective;
            out.ok = true;
        }
    }
    return out;
}

}  // namespace

BoundsTable tighten_bounds(const Network& net, const TightenConfig& config,
                           const BoundsTable* seed)
{
    BoundsTable interval = derive_interval_bounds(net);
    BoundsTable table = interval;
    if (seed) {
        if (!seed->same_shape(interval))
            throw std::invalid_argument("tighten_bounds: seed table shape mismatch");
        table = *seed;
    }

    for (int k = 1; k <= net.num_layers(); ++k) {
        const Layer& l = net.layers[k - 1];
        for (int j = 0; j < l.output_size(); ++j) {
            try {
                Network sub = truncate_to_unit(net, k, j);
                BoundsTable sub_table = truncate_table(table, k, j);
                MilpModel model = encode_network(sub, sub_table);
                linearize_indicators(model);

                UnitBounds& entry = table.at(k, j);
                bool relu_unit =
                    l.kind == LayerKind::Dense && l.activation == Activation::ReLU;

                BoundSolve bx =
                    optimize_unit(model, model.var(k, 0, VarRole::X), ObjSense::Maximize,
                                  config);
                if (bx.ok) {
                    entry.ub_x = std::max(0.0, std::min(bx.value, entry.ub_x));
                    entry.tag_x = bx.estimate ? BoundProvenance::TimeLimitEstimate
                                              : BoundProvenance::LpTightened;
                }

                BoundSolve bs;
                if (relu_unit) {
                    bs = optimize_unit(model, model.var(k, 0, VarRole::S),
                                       ObjSense::Maximize, config);
                } else {
                    bs = optimize_unit(model, model.var(k, 0, VarRole::X),
                                       ObjSense::Minimize, config);
                    bs.value = -bs.value;
                }
                if (bs.ok) {
                    entry.ub_s = std::max(0.0, std::min(bs.value, entry.ub_s));
                    entry.tag_s = bs.estimate ? BoundProvenance::TimeLimitEstimate
                                              : BoundProvenance::LpTightened;
                }
            } catch (const std::exception& e) {
                throw TightenAborted("tighten_bounds: layer " + std::to_string(k) +
                                         " unit " + std::to_string(j) + ": " + e.what(),
                                     std::move(table));
            }
        }
    }
    return table;
}

TableComparison compare_tables(const BoundsTable& a, const BoundsTable& b)
{
    if (!a.same_shape(b))
        throw std::invalid_argument("compare_tables: tables have different shapes");

    TableComparison cmp;
    for (size_t k = 0; k < a.units.size(); ++k) {
        for (size_t j = 0; j < a.units[k].size(); ++j) {
            BoundDelta d;
            d.layer = static_cast<int>(k) + 1;
            d.unit = static_cast<int>(j);
            d.dx = a.units[k][j].ub_x - b.units[k][j].ub_x;
            d.ds = a.units[k][j].ub_s - b.units[k][j].ub_s;
            cmp.max_tightening = std::max({cmp.max_tightening, d.dx, d.ds});
            if (d.dx < 0.0 || d.ds < 0.0)
                cmp.looser.push_back(d);
            cmp.deltas.push_back(d);
        }
    }
    return cmp;
}

}  // namespace relumip
