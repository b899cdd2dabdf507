#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relumip/milp_model.hpp"
#include "relumip/simplex.hpp"

namespace relumip {

struct SolverConfig {
    double time_limit_s = 300.0;
    double rel_gap_target = 1e-6;
    double integrality_tol = 1e-6;
    std::optional<long> node_limit;
    std::string branching = "most_fractional";
    std::uint64_t rng_seed = 0;
};

enum class MilpStatus { ProvenOptimal, TimeLimit, NodeLimit, Infeasible };

const char* to_string(MilpStatus s);

/// One line of the solve log, recorded at every incumbent improvement.
struct ImprovementRecord {
    double time_s = 0.0;
    long nodes = 0;
    double objective = 0.0;
    double bound = 0.0;
};

struct MilpStats {
    long nodes = 0;
    double wall_time_s = 0.0;
    double pct_gap = 0.0;
};

struct MilpResult {
    MilpStatus status = MilpStatus::Infeasible;
    std::optional<std::vector<double>> incumbent;
    double objective = 0.0;  // incumbent objective, meaningful when incumbent set
    double dual_bound = 0.0;
    MilpStats stats;
    std::vector<ImprovementRecord> log;

    bool has_incumbent() const { return incumbent.has_value(); }
};

struct BoundOverride {
    int var = -1;
    double lb = 0.0;
    double ub = 0.0;
};

/// Open branch-and-bound node: bound overrides accumulated from the root,
/// the parent relaxation objective, and the parent basis for warm starts.
struct BranchNode {
    std::vector<BoundOverride> overrides;
    double bound = 0.0;
    int depth = 0;
    long id = 0;
    SimplexBasis basis;
};

/// Split on a fractional binary. The down child fixes z = 0 and zeroes the
/// paired s variable; the up child fixes z = 1 and zeroes the paired x
/// (max-pool selectors only fix z, their big-M row becomes exact).
/// Throws if z is already fixed at the node.
std::pair<BranchNode, BranchNode> branch(const BranchNode& node, const MilpModel& model,
                                         int z_index);

/// 100 * |incumbent - bound| / max(|incumbent|, 1e-10).
double compute_gap(double incumbent_obj, double dual_bound);

/// Forward-completion heuristic: clamp the layer-0 part of `lp_point` into
/// the node's input box, forward-evaluate, and extend to a full assignment
/// (s, z, selectors, distance variables). Returns the assignment when it is
/// integral-feasible for the node, otherwise nullopt (e.g. a fixed z
/// contradicts the forward pass).
std::optional<std::vector<double>> primal_heuristic_forward(
    const MilpModel& model, const Network& net, const std::vector<double>& lp_point,
    const LinearProgram* node_lp = nullptr);

/// Branch-and-bound over the binaries with LP relaxations: best-bound node
/// selection with depth-first plunging after each new incumbent,
/// most-fractional branching, and the forward-completion heuristic at every
/// node. Deterministic for a fixed model and config.
MilpResult solve_milp(const MilpModel& model, const SolverConfig& config = {});

}  // namespace relumip
