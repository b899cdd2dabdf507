#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "relumip/linear_program.hpp"
#include "relumip/network.hpp"

namespace relumip {

enum class BoundProvenance { Interval, LpTightened, TimeLimitEstimate };

/// Bounds on one unit's x and s parts. For ReLU units these are the upper
/// bounds of the two nonnegative variables; for linear and pooling units
/// the x variable lives in [-ub_s, ub_x].
struct UnitBounds {
    double ub_x = 0.0;
    double ub_s = 0.0;
    BoundProvenance tag_x = BoundProvenance::Interval;
    BoundProvenance tag_s = BoundProvenance::Interval;
};

/// Per-unit variable bounds for every layer, plus the layer-0 input box.
struct BoundsTable {
    std::vector<double> input_lb, input_ub;
    std::vector<std::vector<UnitBounds>> units;  // units[k-1][j] for layer k >= 1

    const UnitBounds& at(int layer, int unit) const { return units[layer - 1][unit]; }
    UnitBounds& at(int layer, int unit) { return units[layer - 1][unit]; }
    bool same_shape(const BoundsTable& other) const;
};

/// Interval (natural bound) propagation of the input box through the
/// network: per dense unit, the pre-activation range from the previous
/// layer's boxes; per pooling unit, the group max or mean of the boxes.
/// Every entry is tagged Interval. Throws on a non-finite input box.
BoundsTable derive_interval_bounds(const Network& net);

enum class VarRole { X, S, Z, D };

/// "binary = active_when  ->  var <= 0", or with a reference variable,
/// "binary = active_when  ->  var - reference <= 0" (the max-pool form).
struct IndicatorConstraint {
    int binary = -1;
    int active_when = 1;
    int var = -1;
    int reference = -1;  // -1: plain "var <= 0"
};

/// One max-pool output: its x variable, the member variables pooled over,
/// and the one-hot selector binaries (same order as members).
struct PoolGroup {
    int out_var = -1;
    std::vector<int> member_vars;
    std::vector<int> selector_vars;
};

/// L1-distance term d >= |x - reference|; registered by the adversarial
/// builder so forward completion can assign d exactly.
struct DistanceTerm {
    int d_var = -1;
    int x_var = -1;
    double reference = 0.0;
};

/// The 0-1 MILP for a network: continuous x/s (and d) variables, binary
/// activation variables z, the defining equality rows, and either indicator
/// constraints or their big-M linearization.
class MilpModel {
public:
    LinearProgram base;
    std::vector<int> binaries;
    std::vector<IndicatorConstraint> indicators;
    std::vector<PoolGroup> pools;
    std::vector<DistanceTerm> distance_terms;
    bool linearized = false;

    const Network& network() const { return net_; }
    void set_network(Network net) { net_ = std::move(net); }

    void register_var(int layer, int unit, VarRole role, int var_index);
    int var(int layer, int unit, VarRole role) const;         // throws if absent
    int find_var(int layer, int unit, VarRole role) const;    // -1 if absent
    std::optional<std::tuple<int, int, VarRole>> key_of(int var_index) const;

private:
    Network net_;
    std::map<std::tuple<int, int, int>, int> index_;
    std::map<int, std::tuple<int, int, VarRole>> reverse_;
};

/// Encode the network as the 0-1 MILP with indicator constraints. Variable
/// bounds come from `bounds`; the objective starts out all-zero.
MilpModel encode_network(const Network& net, const BoundsTable& bounds);

/// Append the max-pool constraint family for one output variable over a
/// group of member variables: sum of selectors = 1, out >= member for each
/// member, and "selector = 1 -> out <= member" indicators.
void encode_maxpool(MilpModel& model, const std::vector<int>& member_vars, int out_var);

/// Replace every indicator by its big-M rows using the variable bounds in
/// the model; the set of integral-feasible solutions is unchanged.
/// Throws if a needed bound is infinite.
void linearize_indicators(MilpModel& model);

/// Objective sum(c * x) + sum(gamma * z), coefficients keyed (layer, unit);
/// everything not referenced is zero.
void set_objective(MilpModel& model, const std::map<std::pair<int, int>, double>& x_costs,
                   const std::map<std::pair<int, int>, double>& z_costs, ObjSense sense);

/// Feasibility of a full assignment against rows, bounds, indicator
/// constraints and 0-1 integrality of the binaries.
struct MilpPointReport {
    double max_row_violation = 0.0;
    double max_bound_violation = 0.0;
    double max_indicator_violation = 0.0;
    double max_integrality_violation = 0.0;
    bool feasible = false;
};

MilpPointReport check_milp_point(const MilpModel& model, const std::vector<double>& point,
                                 double tol = 1e-7);

}  // namespace relumip
