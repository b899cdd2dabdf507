#include "relumip/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "relumip/simplex.hpp"

namespace relumip {

namespace {

struct PatternEnumerator {
    // Positions in model.binaries that are plain ReLU binaries, and the
    // selector groups (as positions) that must stay one-hot.
    std::vector<int> relu_pos;
    std::vector<std::vector<int>> group_pos;
    std::vector<int> current;  // 0/1 per entry of model.binaries

    explicit PatternEnumerator(const MilpModel& model)
    {
        std::vector<int> pos_of(model.base.num_variables(), -1);
        for (size_t i = 0; i < model.binaries.size(); ++i)
            pos_of[model.binaries[i]] = static_cast<int>(i);

        std::vector<bool> in_pool(model.binaries.size(), false);
        for (const PoolGroup& g : model.pools) {
            std::vector<int> positions;
            for (int z : g.selector_vars) {
                positions.push_back(pos_of[z]);
                in_pool[pos_of[z]] = true;
            }
            group_pos.push_back(std::move(positions));
        }
        for (size_t i = 0; i < model.binaries.size(); ++i)
            if (!in_pool[i])
                relu_pos.push_back(static_cast<int>(i));

        current.assign(model.binaries.size(), 0);
    }

    long total() const
    {
        long t = 1L << relu_pos.size();
        for (const auto& g : group_pos)
            t *= static_cast<long>(g.size());
        return t;
    }

    // Decode pattern number `idx` into `current`.
    void decode(long idx)
    {
        for (size_t i = 0; i < relu_pos.size(); ++i) {
            current[relu_pos[i]] = static_cast<int>(idx & 1);
            idx >>= 1;
        }
        for (const auto& g : group_pos) {
            long hot = idx % static_cast<long>(g.size());
            idx /= static_cast<long>(g.size());
            for (size_t i = 0; i < g.size(); ++i)
                current[g[i]] = i == static_cast<size_t>(hot) ? 1 : 0;
        }
    }
};

}  // namespace

OracleResult brute_force_optimum(const MilpModel& model)
{
    if (model.binaries.size() > 20)
        throw std::invalid_argument("brute_force_optimum: " +
                                    std::to_string(model.binaries.size()) +
                                    " binaries exceed the cap of 20");

    PatternEnumerator en(model);
    bool maximize = model.base.sense() == ObjSense::Maximize;

    std::vector<int> pos_of_binary(model.base.num_variables(), -1);
    for (size_t i = 0; i < model.binaries.size(); ++i)
        pos_of_binary[model.binaries[i]] = static_cast<int>(i);

    OracleResult result;
    LinearProgram lp = model.base;
    SimplexSolver solver;

    for (long idx = 0; idx < en.total(); ++idx) {
        en.decode(idx);

        // Fix the binaries and apply any active indicator constraints.
        // Patterns that contradict an already-fixed binary are infeasible.
        bool conflict = false;
        for (size_t i = 0; i < model.binaries.size(); ++i) {
            double v = en.current[i];
            int z = model.binaries[i];
            if (v < model.base.variable_lb(z) || v > model.base.variable_ub(z)) {
                conflict = true;
                break;
            }
            lp.set_variable_bounds(z, v, v);
        }
        for (const IndicatorConstraint& ind : model.indicators) {
            if (conflict)
                break;
            if (en.current[pos_of_binary[ind.binary]] != ind.active_when)
                continue;
            if (ind.reference < 0) {
                double lb = lp.variable_lb(ind.var);
                if (lb > 0.0) {
                    conflict = true;
                    break;
                }
                lp.set_variable_bounds(ind.var, lb, std::min(lp.variable_ub(ind.var), 0.0));
            } else {
                lp.add_row({{ind.var, 1.0}, {ind.reference, -1.0}}, -kInfinity, 0.0);
            }
        }

        LpSolution sol;
        if (!conflict)
            sol = solver.solve(lp);
        ++result.patterns_tried;

        if (model.indicators.empty()) {
            for (int z : model.binaries)
                lp.set_variable_bounds(z, model.base.variable_lb(z),
                                       model.base.variable_ub(z));
        } else {
            lp = model.base;  // indicators may have touched rows and bounds
        }

        if (conflict || sol.status != LpStatus::Optimal)
            continue;

        bool better;
        if (!result.found) {
            better = true;
        } else {
            double delta = maximize ? sol.objective - result.objective
                                    : result.objective - sol.objective;
            if (delta > 1e-12)
                better = true;
            else if (delta < -1e-12)
                better = false;
            else
                better = std::lexicographical_compare(en.current.begin(), en.current.end(),
                                                      result.pattern.begin(),
                                                      result.pattern.end());
        }
        if (better) {
            result.found = true;
            result.objective = sol.objective;
            result.assignment = sol.values;
            result.pattern = en.current;
        }
    }
    return result;
}

std::vector<BoundViolation> sample_check_bounds(const Network& net,
                                                const BoundsTable& bounds,
                                                int n_samples, std::uint64_t seed)
{
    if (n_samples < 1)
        throw std::invalid_argument("sample_check_bounds: n_samples must be >= 1");

    constexpr double kTol = 1e-7;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<BoundViolation> violations;
    std::vector<double> x0(net.input_dim);

    for (int s = 0; s < n_samples; ++s) {
        for (int j = 0; j < net.input_dim; ++j)
            x0[j] = net.input_lb[j] + unit(rng) * (net.input_ub[j] - net.input_lb[j]);
        LayerActivations acts = forward_eval(net, x0);

        for (int k = 1; k <= net.num_layers(); ++k) {
            const Layer& l = net.layers[k - 1];
            for (int j = 0; j < l.output_size(); ++j) {
                const UnitBounds& ub = bounds.at(k, j);
                double x = acts.outputs[k][j];
                if (x > ub.ub_x + kTol)
                    violations.push_back({k, j, false, x, ub.ub_x});
                if (l.kind == LayerKind::Dense) {
                    double sval = std::max(0.0, -acts.pre[k - 1][j]);
                    if (sval > ub.ub_s + kTol)
                        violations.push_back({k, j, true, sval, ub.ub_s});
                } else if (x < -ub.ub_s - kTol) {
                    violations.push_back({k, j, true, x, -ub.ub_s});
                }
            }
        }
    }
    return violations;
}

}  // namespace relumip
