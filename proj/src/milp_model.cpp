#include "relumip/milp_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relumip {

namespace {

std::string vname(const char* prefix, int layer, int unit)
{
    return std::string(prefix) + std::to_string(layer) + "_" + std::to_string(unit);
}

}  // namespace

bool BoundsTable::same_shape(const BoundsTable& other) const
{
    if (input_lb.size() != other.input_lb.size() || units.size() != other.units.size())
        return false;
    for (size_t k = 0; k < units.size(); ++k)
        if (units[k].size() != other.units[k].size())
            return false;
    return true;
}

BoundsTable derive_interval_bounds(const Network& net)
{
    for (int j = 0; j < net.input_dim; ++j)
        if (!std::isfinite(net.input_lb[j]) || !std::isfinite(net.input_ub[j]))
            throw std::invalid_argument(
                "derive_interval_bounds: input box must be finite");

    BoundsTable table;
    table.input_lb = net.input_lb;
    table.input_ub = net.input_ub;
    table.units.resize(net.num_layers());

    std::vector<double> lo = net.input_lb;
    std::vector<double> hi = net.input_ub;

    for (int k = 1; k <= net.num_layers(); ++k) {
        const Layer& l = net.layers[k - 1];
        std::vector<double> next_lo(l.output_size());
        std::vector<double> next_hi(l.output_size());
        table.units[k - 1].resize(l.output_size());

        for (int j = 0; j < l.output_size(); ++j) {
            double unit_lo, unit_hi;
            if (l.kind == LayerKind::Dense) {
                double pre_lo = l.bias[j];
                double pre_hi = l.bias[j];
                for (size_t i = 0; i < l.weights[j].size(); ++i) {
                    double w = l.weights[j][i];
                    pre_lo += std::min(w * lo[i], w * hi[i]);
                    pre_hi += std::max(w * lo[i], w * hi[i]);
                }
                table.units[k - 1][j].ub_x = std::max(0.0, pre_hi);
                table.units[k - 1][j].ub_s = std::max(0.0, -pre_lo);
                if (l.activation == Activation::ReLU) {
                    unit_lo = std::max(0.0, pre_lo);
                    unit_hi = std::max(0.0, pre_hi);
                } else {
                    unit_lo = pre_lo;
                    unit_hi = pre_hi;
                }
            } else if (l.kind == LayerKind::AvgPool) {
                double s_lo = 0.0, s_hi = 0.0;
                for (int idx : l.groups[j]) {
                    s_lo += lo[idx];
                    s_hi += hi[idx];
                }
                unit_lo = s_lo / static_cast<double>(l.groups[j].size());
                unit_hi = s_hi / static_cast<double>(l.groups[j].size());
                table.units[k - 1][j].ub_x = std::max(0.0, unit_hi);
                table.units[k - 1][j].ub_s = std::max(0.0, -unit_lo);
            } else {
                unit_lo = -kInfinity;
                unit_hi = -kInfinity;
                for (int idx : l.groups[j]) {
                    unit_lo = std::max(unit_lo, lo[idx]);
                    unit_hi = std::max(unit_hi, hi[idx]);
                }
                table.units[k - 1][j].ub_x = std::max(0.0, unit_hi);
                table.units[k - 1][j].ub_s = std::max(0.0, -unit_lo);
            }
            next_lo[j] = unit_lo;
            next_hi[j] = unit_hi;
        }
        lo = std::move(next_lo);
        hi = std::move(next_hi);
    }
    return table;
}

void MilpModel::register_var(int layer, int unit, VarRole role, int var_index)
{
    index_[{layer, unit, static_cast<int>(role)}] = var_index;
    reverse_[var_index] = {layer, unit, role};
}

int MilpModel::var(int layer, int unit, VarRole role) const
{
    int v = find_var(layer, unit, role);
    if (v < 0)
        throw std::invalid_argument("no variable for layer " + std::to_string(layer) +
                                    " unit " + std::to_string(unit));
    return v;
}

int MilpModel::find_var(int layer, int unit, VarRole role) const
{
    auto it = index_.find({layer, unit, static_cast<int>(role)});
    return it == index_.end() ? -1 : it->second;
}

std::optional<std::tuple<int, int, VarRole>> MilpModel::key_of(int var_index) const
{
    auto it = reverse_.find(var_index);
    if (it == reverse_.end())
        return std::nullopt;
    return it->second;
}

void encode_maxpool(MilpModel& model, const std::vector<int>& member_vars, int out_var)
{
    if (member_vars.empty())
        throw std::invalid_argument("encode_maxpool: empty group");

    PoolGroup group;
    group.out_var = out_var;
    group.member_vars = member_vars;

    std::vector<std::pair<int, double>> one_hot;
    for (size_t i = 0; i < member_vars.size(); ++i) {
        int z = model.base.add_variable(
            model.base.variable(out_var).name + "_sel" + std::to_string(i), 0.0, 1.0);
        model.binaries.push_back(z);
        group.selector_vars.push_back(z);
        one_hot.push_back({z, 1.0});

        // out >= member
        model.base.add_row({{out_var, 1.0}, {member_vars[i], -1.0}}, 0.0, kInfinity);
        // selector = 1 -> out <= member
        model.indicators.push_back({z, 1, out_var, member_vars[i]});
    }
    model.base.add_row(std::move(one_hot), 1.0, 1.0);
    model.pools.push_back(std::move(group));
}

MilpModel encode_network(const Network& net, const BoundsTable& bounds)
{
    if (static_cast<int>(bounds.input_lb.size()) != net.input_dim ||
        static_cast<int>(bounds.units.size()) != net.num_layers())
        throw std::invalid_argument("encode_network: bounds table shape mismatch");
    for (int k = 1; k <= net.num_layers(); ++k)
        if (static_cast<int>(bounds.units[k - 1].size()) != net.layers[k - 1].output_size())
            throw std::invalid_argument("encode_network: missing bounds for layer " +
                                        std::to_string(k));

    MilpModel model;
    model.set_network(net);

    for (int j = 0; j < net.input_dim; ++j) {
        int v = model.base.add_variable(vname("x", 0, j), bounds.input_lb[j],
                                        bounds.input_ub[j]);
        model.register_var(0, j, VarRole::X, v);
    }

    for (int k = 1; k <= net.num_layers(); ++k) {
        const Layer& l = net.layers[k - 1];
        for (int j = 0; j < l.output_size(); ++j) {
            const UnitBounds& ub = bounds.at(k, j);

            if (l.kind == LayerKind::Dense && l.activation == Activation::ReLU) {
                int x = model.base.add_variable(vname("x", k, j), 0.0, ub.ub_x);
                int s = model.base.add_variable(vname("s", k, j), 0.0, ub.ub_s);
                int z = model.base.add_variable(vname("z", k, j), 0.0, 1.0);
                model.register_var(k, j, VarRole::X, x);
                model.register_var(k, j, VarRole::S, s);
                model.register_var(k, j, VarRole::Z, z);
                model.binaries.push_back(z);

                // Stable units: the bound already decides the phase.
                if (ub.ub_x <= 0.0)
                    model.base.set_variable_bounds(z, 1.0, 1.0);
                else if (ub.ub_s <= 0.0)
                    model.base.set_variable_bounds(z, 0.0, 0.0);

                std::vector<std::pair<int, double>> coeffs;
                coeffs.reserve(l.weights[j].size() + 2);
                for (size_t i = 0; i < l.weights[j].size(); ++i)
                    if (l.weights[j][i] != 0.0)
                        coeffs.push_back({model.var(k - 1, static_cast<int>(i), VarRole::X),
                                          l.weights[j][i]});
                coeffs.push_back({x, -1.0});
                coeffs.push_back({s, 1.0});
                model.base.add_row(std::move(coeffs), -l.bias[j], -l.bias[j]);

                model.indicators.push_back({z, 1, x, -1});
                model.indicators.push_back({z, 0, s, -1});
            } else if (l.kind == LayerKind::Dense) {
                int x = model.base.add_variable(vname("x", k, j), -ub.ub_s, ub.ub_x);
                model.register_var(k, j, VarRole::X, x);
                std::vector<std::pair<int, double>> coeffs;
                coeffs.reserve(l.weights[j].size() + 1);
                for (size_t i = 0; i < l.weights[j].size(); ++i)
                    if (l.weights[j][i] != 0.0)
                        coeffs.push_back({model.var(k - 1, static_cast<int>(i), VarRole::X),
                                          l.weights[j][i]});
                coeffs.push_back({x, -1.0});
                model.base.add_row(std::move(coeffs), -l.bias[j], -l.bias[j]);
            } else if (l.kind == LayerKind::AvgPool) {
                int x = model.base.add_variable(vname("x", k, j), -ub.ub_s, ub.ub_x);
                model.register_var(k, j, VarRole::X, x);
                double inv_t = 1.0 / static_cast<double>(l.groups[j].size());
                std::vector<std::pair<int, double>> coeffs;
                for (int idx : l.groups[j])
                    coeffs.push_back({model.var(k - 1, idx, VarRole::X), inv_t});
                coeffs.push_back({x, -1.0});
                model.base.add_row(std::move(coeffs), 0.0, 0.0);
            } else {
                int x = model.base.add_variable(vname("x", k, j), -ub.ub_s, ub.ub_x);
                model.register_var(k, j, VarRole::X, x);
                std::vector<int> members;
                for (int idx : l.groups[j])
                    members.push_back(model.var(k - 1, idx, VarRole::X));
                size_t first_sel = model.base.num_variables();
                encode_maxpool(model, members, x);
                for (size_t i = 0; i < l.groups[j].size(); ++i)
                    model.register_var(k, l.groups[j][i], VarRole::Z,
                                       static_cast<int>(first_sel + i));
            }
        }
    }
    return model;
}

void linearize_indicators(MilpModel& model)
{
    for (const IndicatorConstraint& ind : model.indicators) {
        double ub_v = model.base.variable_ub(ind.var);
        if (!std::isfinite(ub_v))
            throw std::invalid_argument(
                "linearize_indicators: variable " + model.base.variable(ind.var).name +
                " has no finite upper bound");
        if (ind.reference < 0) {
            if (ind.active_when == 1) {
                // v <= ub * (1 - z)
                model.base.add_row({{ind.var, 1.0}, {ind.binary, ub_v}}, -kInfinity, ub_v);
            } else {
                // v <= ub * z
                model.base.add_row({{ind.var, 1.0}, {ind.binary, -ub_v}}, -kInfinity, 0.0);
            }
        } else {
            double lb_ref = model.base.variable_lb(ind.reference);
            if (!std::isfinite(lb_ref))
                throw std::invalid_argument(
                    "linearize_indicators: variable " +
                    model.base.variable(ind.reference).name + " has no finite lower bound");
            // v - ref <= M * (1 - z), M = ub_v - lb_ref (clipped at 0: the
            // implication is never slack in that direction).
            double big_m = std::max(0.0, ub_v - lb_ref);
            model.base.add_row({{ind.var, 1.0}, {ind.reference, -1.0}, {ind.binary, big_m}},
                               -kInfinity, big_m);
        }
    }
    model.indicators.clear();
    model.linearized = true;
}

void set_objective(MilpModel& model, const std::map<std::pair<int, int>, double>& x_costs,
                   const std::map<std::pair<int, int>, double>& z_costs, ObjSense sense)
{
    model.base.clear_objective();
    for (const auto& [key, c] : x_costs)
        model.base.set_objective_coeff(model.var(key.first, key.second, VarRole::X), c);
    for (const auto& [key, c] : z_costs)
        model.base.set_objective_coeff(model.var(key.first, key.second, VarRole::Z), c);
    model.base.set_sense(sense);
}

MilpPointReport check_milp_point(const MilpModel& model, const std::vector<double>& point,
                                 double tol)
{
    MilpPointReport rep;
    FeasibilityReport lp_rep = check_feasible(model.base, point, tol);
    rep.max_row_violation = lp_rep.max_row_violation;
    rep.max_bound_violation = lp_rep.max_bound_violation;

    for (int z : model.binaries)
        rep.max_integrality_violation =
            std::max(rep.max_integrality_violation,
                     std::fabs(point[z] - std::round(point[z])));

    for (const IndicatorConstraint& ind : model.indicators) {
        bool active = std::fabs(point[ind.binary] - ind.active_when) < 0.5;
        if (!active)
            continue;
        double rhs = ind.reference < 0 ? 0.0 : point[ind.reference];
        rep.max_indicator_violation =
            std::max(rep.max_indicator_violation, point[ind.var] - rhs);
    }

    rep.feasible = rep.max_row_violation <= tol && rep.max_bound_violation <= tol &&
                   rep.max_indicator_violation <= tol &&
                   rep.max_integrality_violation <= tol;
    return rep;
}

}  // namespace relumip
