#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace relumip {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class ObjSense { Minimize, Maximize };

struct LpVariable {
    std::string name;
    double lb = -kInfinity;
    double ub = kInfinity;
};

/// Ranged linear row lb <= sum(coeff * var) <= ub; equality when lb == ub.
struct LpRow {
    std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
    double lb = -kInfinity;
    double ub = kInfinity;
};

class LinearProgram {
public:
    int add_variable(std::string name, double lb, double ub);
    int add_row(std::vector<std::pair<int, double>> coeffs, double lb, double ub);

    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }

    const LpVariable& variable(int j) const { return vars_[j]; }
    const LpRow& row(int i) const { return rows_[i]; }

    void set_variable_bounds(int j, double lb, double ub);
    double variable_lb(int j) const { return vars_[j].lb; }
    double variable_ub(int j) const { return vars_[j].ub; }

    void set_objective_coeff(int j, double c);
    double objective_coeff(int j) const { return objective_[j]; }
    const std::vector<double>& objective() const { return objective_; }
    void clear_objective();

    void set_sense(ObjSense s) { sense_ = s; }
    ObjSense sense() const { return sense_; }

    /// Throws std::invalid_argument on any malformed piece: out-of-range
    /// row coefficients, crossed finite bounds, non-finite coefficients.
    void validate() const;

private:
    std::vector<LpVariable> vars_;
    std::vector<LpRow> rows_;
    std::vector<double> objective_;
    ObjSense sense_ = ObjSense::Minimize;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

/// Basic (vertex) solution. `basic_cols` and `nonbasic_at_upper` describe the
/// final simplex basis over structural columns 0..n-1 and logical columns
/// n..n+m-1, and can be fed back in as a warm start.
struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;  // structural variables, empty if none found
    double objective = 0.0;
    long iterations = 0;
    std::vector<int> basic_cols;
    std::vector<unsigned char> nonbasic_at_upper;
};

struct FeasibilityReport {
    double max_bound_violation = 0.0;
    double max_row_violation = 0.0;
    bool feasible = false;
};

/// Residuals of a candidate point against bounds and rows.
/// Feasible iff both maxima are within `tol`.
FeasibilityReport check_feasible(const LinearProgram& lp,
                                 const std::vector<double>& point,
                                 double tol = 1e-7);

/// Human-readable dump (one row per line, named variables) for debugging.
void write_lp_text(const LinearProgram& lp, std::ostream& out);

const char* to_string(LpStatus s);

}  // namespace relumip
