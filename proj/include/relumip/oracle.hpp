#pragma once

#include <cstdint>
#include <vector>

#include "relumip/milp_model.hpp"

namespace relumip {

struct OracleResult {
    bool found = false;  // false: no activation pattern admits a feasible point
    double objective = 0.0;
    std::vector<double> assignment;
    std::vector<int> pattern;  // winning 0/1 assignment of the binaries
    long patterns_tried = 0;
};

/// Ground truth by exhaustion: every 0/1 assignment of the binaries is fixed
/// in turn (one-hot assignments only for max-pool selector groups) and the
/// remaining LP is solved; the best feasible objective wins, ties going to
/// the lexicographically smallest pattern. Hard cap of 20 binaries.
OracleResult brute_force_optimum(const MilpModel& model);

struct BoundViolation {
    int layer = 0;
    int unit = 0;
    bool s_side = false;  // violated bound is ub_s rather than ub_x
    double value = 0.0;
    double bound = 0.0;
};

/// Draw seeded uniform inputs in the box, forward-evaluate, and report every
/// activation or s-value that exceeds its table bound by more than 1e-7.
std::vector<BoundViolation> sample_check_bounds(const Network& net,
                                                const BoundsTable& bounds,
                                                int n_samples, std::uint64_t seed);

}  // namespace relumip
