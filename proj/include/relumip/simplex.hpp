#pragma once

#include "relumip/linear_program.hpp"

namespace relumip {

/// Simplex basis snapshot: basic column per row slot plus the bound each
/// nonbasic column rests at. Columns 0..n-1 are structural, n..n+m-1 logical.
struct SimplexBasis {
    std::vector<int> basic_cols;
    std::vector<unsigned char> nonbasic_at_upper;
    bool valid() const { return !basic_cols.empty() || nonbasic_at_upper.empty(); }
};

struct SimplexOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-9;
    long iteration_limit = 50000;
};

/// Bounded-variable primal simplex, two phases. Phase 1 drives the total
/// bound infeasibility of the basic variables to zero starting from the
/// logical basis (or a caller-supplied basis), phase 2 optimizes the real
/// objective. Bland's rule takes over after 50 consecutive degenerate pivots.
class SimplexSolver {
public:
    using Options = SimplexOptions;

    explicit SimplexSolver(Options opts = Options()) : opts_(opts) {}

    LpSolution solve(const LinearProgram& lp, const SimplexBasis* warm = nullptr);

private:
    Options opts_;
};

/// One-shot solve with the default tolerances.
LpSolution solve_lp(const LinearProgram& lp, long iteration_limit = 50000);

}  // namespace relumip
