#include "relumip/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace relumip {

int LinearProgram::add_variable(std::string name, double lb, double ub)
{
    vars_.push_back({std::move(name), lb, ub});
    objective_.push_back(0.0);
    return static_cast<int>(vars_.size()) - 1;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> coeffs, double lb,
                           double ub)
{
    rows_.push_back({std::move(coeffs), lb, ub});
    return static_cast<int>(rows_.size()) - 1;
}

void LinearProgram::set_variable_bounds(int j, double lb, double ub)
{
    vars_[j].lb = lb;
    vars_[j].ub = ub;
}

void LinearProgram::set_objective_coeff(int j, double c)
{
    objective_[j] = c;
}

void LinearProgram::clear_objective()
{
    std::fill(objective_.begin(), objective_.end(), 0.0);
}

void LinearProgram::validate() const
{
    for (int j = 0; j < num_variables(); ++j) {
        const LpVariable& v = vars_[j];
        if (std::isnan(v.lb) || std::isnan(v.ub))
            throw std::invalid_argument("variable " + v.name + ": NaN bound");
        if (v.lb > v.ub)
            throw std::invalid_argument("variable " + v.name + ": lb > ub");
        if (!std::isfinite(objective_[j]))
            throw std::invalid_argument("variable " + v.name +
                                        ": non-finite objective coefficient");
    }
    for (int i = 0; i < num_rows(); ++i) {
        const LpRow& r = rows_[i];
        if (std::isnan(r.lb) || std::isnan(r.ub))
            throw std::invalid_argument("row " + std::to_string(i) + ": NaN bound");
        if (r.lb > r.ub)
            throw std::invalid_argument("row " + std::to_string(i) + ": lb > ub");
        for (auto [j, a] : r.coeffs) {
            if (j < 0 || j >= num_variables())
                throw std::invalid_argument("row " + std::to_string(i) +
                                            ": coefficient on undeclared variable");
            if (!std::isfinite(a))
                throw std::invalid_argument("row " + std::to_string(i) +
                                            ": non-finite coefficient");
        }
    }
}

FeasibilityReport check_feasible(const LinearProgram& lp,
                                 const std::vector<double>& point, double tol)
{
    if (static_cast<int>(point.size()) != lp.num_variables())
        throw std::invalid_argument("check_feasible: point length " +
                                    std::to_string(point.size()) + " != " +
                                    std::to_string(lp.num_variables()) + " variables");

    FeasibilityReport rep;
    for (int j = 0; j < lp.num_variables(); ++j) {
        const LpVariable& v = lp.variable(j);
        rep.max_bound_violation = std::max(rep.max_bound_violation, v.lb - point[j]);
        rep.max_bound_violation = std::max(rep.max_bound_violation, point[j] - v.ub);
    }
    for (int i = 0; i < lp.num_rows(); ++i) {
        const LpRow& r = lp.row(i);
        double activity = 0.0;
        for (auto [j, a] : r.coeffs)
            activity += a * point[j];
        rep.max_row_violation = std::max(rep.max_row_violation, r.lb - activity);
        rep.max_row_violation = std::max(rep.max_row_violation, activity - r.ub);
    }
    rep.max_bound_violation = std::max(rep.max_bound_violation, 0.0);
    rep.max_row_violation = std::max(rep.max_row_violation, 0.0);
    rep.feasible = rep.max_bound_violation <= tol && rep.max_row_violation <= tol;
    return rep;
}

void write_lp_text(const LinearProgram& lp, std::ostream& out)
{
    out << (lp.sense() == ObjSense::Minimize ? "minimize" : "maximize");
    for (int j = 0; j < lp.num_variables(); ++j)
        if (lp.objective_coeff(j) != 0.0)
            out << ' ' << (lp.objective_coeff(j) >= 0 ? "+" : "") << lp.objective_coeff(j)
                << ' ' << lp.variable(j).name;
    out << '\n';
    for (int i = 0; i < lp.num_rows(); ++i) {
        const LpRow& r = lp.row(i);
        out << "row" << i << ": " << r.lb << " <=";
        for (auto [j, a] : r.coeffs)
            out << ' ' << (a >= 0 ? "+" : "") << a << ' ' << lp.variable(j).name;
        out << " <= " << r.ub << '\n';
    }
    for (int j = 0; j < lp.num_variables(); ++j) {
        const LpVariable& v = lp.variable(j);
        out << v.lb << " <= " << v.name << " <= " << v.ub << '\n';
    }
}

const char* to_string(LpStatus s)
{
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
    }
    return "?";
}

}  // namespace relumip
