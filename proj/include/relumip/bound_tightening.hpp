#pragma once

#include <stdexcept>

#include "relumip/milp_model.hpp"

namespace relumip {

struct TightenConfig {
    double per_bound_time_limit_s = 300.0;
    bool use_milp = true;
};

/// Raised when a per-bound solve fails; carries whatever part of the table
/// was already tightened.
struct TightenAborted : std::runtime_error {
    TightenAborted(const std::string& msg, BoundsTable partial_table)
        : std::runtime_error(msg), partial(std::move(partial_table))
    {
    }
    BoundsTable partial;
};

/// Layer-by-layer bound strengthening: for each unit, the model truncated to
/// the layers below it (plus the unit itself) is maximized over the unit's x
/// and s parts, reusing already-tightened bounds from earlier layers. On a
/// time limit the solver's dual bound is kept (still a valid upper bound)
/// and tagged TimeLimitEstimate. Results never exceed the interval bounds.
/// With use_milp=false only LP relaxations are solved.
///
/// `seed` optionally restarts from a previous table (same shape); rerunning
/// on a table's own output can only keep it or tighten it further.
BoundsTable tighten_bounds(const Network& net, const TightenConfig& config = {},
                           const BoundsTable* seed = nullptr);

struct BoundDelta {
    int layer = 0;
    int unit = 0;
    double dx = 0.0;  // a.ub_x - b.ub_x
    double ds = 0.0;  // a.ub_s - b.ub_s
};

struct TableComparison {
    std::vector<BoundDelta> deltas;
    std::vector<BoundDelta> looser;  // entries where b exceeds a
    double max_tightening = 0.0;     // largest positive delta
    bool any_looser() const { return !looser.empty(); }
};

/// Entrywise comparison a vs b; flags entries where b is looser than a.
/// Throws on shape mismatch.
TableComparison compare_tables(const BoundsTable& a, const BoundsTable& b);

}  // namespace relumip
