#include "relumip/milp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace relumip {

const char* to_string(MilpStatus s)
{
    switch (s) {
        case MilpStatus::ProvenOptimal: return "proven_optimal";
        case MilpStatus::TimeLimit: return "feasible_time_limit";
        case MilpStatus::NodeLimit: return "feasible_node_limit";
        case MilpStatus::Infeasible: return "infeasible";
    }
    return "?";
}

double compute_gap(double incumbent_obj, double dual_bound)
{
    return 100.0 * std::fabs(incumbent_obj - dual_bound) /
           std::max(std::fabs(incumbent_obj), 1e-10);
}

namespace {

std::pair<double, double> node_bounds_of(const LinearProgram& base,
                                         const BranchNode& node, int var)
{
    double lb = base.variable_lb(var);
    double ub = base.variable_ub(var);
    for (const BoundOverride& o : node.overrides)
        if (o.var == var) {
            lb = o.lb;
            ub = o.ub;
        }
    return {lb, ub};
}

}  // namespace

std::pair<BranchNode, BranchNode> branch(const BranchNode& node, const MilpModel& model,
                                         int z_index)
{
    auto [zlb, zub] = node_bounds_of(model.base, node, z_index);
    if (zub - zlb <= 0.0)
        throw std::invalid_argument("branch: variable " +
                                    model.base.variable(z_index).name +
                                    " is already fixed");

    auto key = model.key_of(z_index);
    int s_var = -1, x_var = -1;
    if (key) {
        auto [layer, unit, role] = *key;
        s_var = model.find_var(layer, unit, VarRole::S);
        if (s_var >= 0)  // ReLU binary; selectors have no paired s
            x_var = model.find_var(layer, unit, VarRole::X);
    }

    BranchNode down = node;
    down.depth = node.depth + 1;
    down.bound = node.bound;
    down.overrides.push_back({z_index, 0.0, 0.0});
    if (s_var >= 0)
        down.overrides.push_back({s_var, 0.0, 0.0});

    BranchNode up = node;
    up.depth = node.depth + 1;
    up.bound = node.bound;
    up.overrides.push_back({z_index, 1.0, 1.0});
    if (x_var >= 0)
        up.overrides.push_back({x_var, 0.0, 0.0});

    return {std::move(down), std::move(up)};
}

std::optional<std::vector<double>> primal_heuristic_forward(
    const MilpModel& model, const Network& net, const std::vector<double>& lp_point,
    const LinearProgram* node_lp)
{
    const LinearProgram& lp = node_lp ? *node_lp : model.base;
    if (static_cast<int>(lp_point.size()) != lp.num_variables())
        return std::nullopt;

    std::vector<double> x0(net.input_dim);
    for (int j = 0; j < net.input_dim; ++j) {
        int v = model.var(0, j, VarRole::X);
        x0[j] = std::clamp(lp_point[v], lp.variable_lb(v), lp.variable_ub(v));
    }

    LayerActivations acts = forward_eval(net, x0);
    std::vector<double> point(lp.num_variables(), 0.0);

    for (int j = 0; j < net.input_dim; ++j)
        point[model.var(0, j, VarRole::X)] = x0[j];

    for (int k = 1; k <= net.num_layers(); ++k) {
        const Layer& l = net.layers[k - 1];
        for (int j = 0; j < l.output_size(); ++j) {
            point[model.var(k, j, VarRole::X)] = acts.outputs[k][j];
            if (l.kind == LayerKind::Dense && l.activation == Activation::ReLU) {
                double pre = acts.pre[k - 1][j];
                point[model.var(k, j, VarRole::S)] = std::max(0.0, -pre);
                int z = model.var(k, j, VarRole::Z);
                double zval;
                if (pre < 0.0) {
                    zval = 1.0;
                } else if (pre > 0.0) {
                    zval = 0.0;
                } else {
                    // zero input: either phase works, follow a fixed z if any
                    zval = lp.variable_lb(z) > 0.5 ? 1.0 : 0.0;
                }
                point[z] = zval;
            }
        }
    }

    // Max-pool selectors: pick a member attaining the maximum, preferring one
    // the node has fixed to 1, otherwise the lowest index not fixed to 0.
    for (const PoolGroup& g : model.pools) {
        double best = -kInfinity;
        for (int mv : g.member_vars)
            best = std::max(best, point[mv]);
        int hot = -1;
        for (size_t i = 0; i < g.member_vars.size(); ++i)
            if (point[g.member_vars[i]] == best && lp.variable_lb(g.selector_vars[i]) > 0.5) {
                hot = static_cast<int>(i);
                break;
            }
        if (hot < 0)
            for (size_t i = 0; i < g.member_vars.size(); ++i)
                if (point[g.member_vars[i]] == best &&
                    lp.variable_ub(g.selector_vars[i]) > 0.5) {
                    hot = static_cast<int>(i);
                    break;
                }
        if (hot < 0)
            return std::nullopt;  // every maximizing member's selector is fixed off
        for (size_t i = 0; i < g.selector_vars.size(); ++i)
            point[g.selector_vars[i]] = i == static_cast<size_t>(hot) ? 1.0 : 0.0;
    }

    for (const DistanceTerm& d : model.distance_terms)
        point[d.d_var] = std::fabs(point[d.x_var] - d.reference);

    FeasibilityReport rep = check_feasible(lp, point, 1e-7);
    if (!rep.feasible)
        return std::nullopt;
    for (const IndicatorConstraint& ind : model.indicators) {
        bool active = std::fabs(point[ind.binary] - ind.active_when) < 0.5;
        if (!active)
            continue;
        double rhs = ind.reference < 0 ? 0.0 : point[ind.reference];
        if (point[ind.var] - rhs > 1e-7)
            return std::nullopt;
    }
    return point;
}

namespace {

struct OpenNodeOrder {
    bool maximize;
    // Best-bound first; ties resolved toward the oldest node.
    bool operator()(const BranchNode& a, const BranchNode& b) const
    {
        double ba = maximize ? a.bound : -a.bound;
        double bb = maximize ? b.bound : -b.bound;
        if (ba != bb)
            return ba < bb;
        return a.id > b.id;
    }
};

class BranchAndBound {
public:
    BranchAndBound(const MilpModel& model, const SolverConfig& config)
        : model_(model),
          config_(config),
          work_(model.base),
          maximize_(model.base.sense() == ObjSense::Maximize),
          open_(OpenNodeOrder{model.base.sense() == ObjSense::Maximize})
    {
    }

    MilpResult run()
    {
        start_ = std::chrono::steady_clock::now();

        BranchNode root;
        root.id = next_id_++;
        root.bound = maximize_ ? kInfinity : -kInfinity;
        plunge_.push_back(std::move(root));

        MilpStatus final_status = MilpStatus::ProvenOptimal;
        while (!plunge_.empty() || !open_.empty()) {
            if (elapsed() >= config_.time_limit_s) {
                final_status = MilpStatus::TimeLimit;
                break;
            }
            if (config_.node_limit && nodes_ >= *config_.node_limit) {
                final_status = MilpStatus::NodeLimit;
                break;
            }
            if (incumbent_ && gap_closed(open_dual_bound())) {
                final_status = MilpStatus::ProvenOptimal;
                break;
            }

            BranchNode node = pop_node();
            if (incumbent_ && !can_improve(node.bound))
                continue;
            process(node);
        }

        return finish(final_status);
    }

private:
    const MilpModel& model_;
    SolverConfig config_;
    LinearProgram work_;
    bool maximize_;
    SimplexSolver simplex_;

    std::priority_queue<BranchNode, std::vector<BranchNode>, OpenNodeOrder> open_;
    std::vector<BranchNode> plunge_;
    long next_id_ = 0;
    long nodes_ = 0;
    std::optional<std::vector<double>> incumbent_;
    double incumbent_obj_ = 0.0;
    std::vector<ImprovementRecord> log_;
    std::chrono::steady_clock::time_point start_;

    double elapsed() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

    bool can_improve(double bound) const
    {
        double eps = 1e-9 * std::max(1.0, std::fabs(incumbent_obj_));
        return maximize_ ? bound > incumbent_obj_ + eps : bound < incumbent_obj_ - eps;
    }

    bool gap_closed(double bound) const
    {
        return std::fabs(bound - incumbent_obj_) <=
               config_.rel_gap_target * std::max(std::fabs(incumbent_obj_), 1e-10);
    }

    // Best bound over all open nodes (and the incumbent itself).
    double open_dual_bound() const
    {
        double best = incumbent_ ? incumbent_obj_ : (maximize_ ? -kInfinity : kInfinity);
        auto fold = [&](double b) { best = maximize_ ? std::max(best, b) : std::min(best, b); };
        if (!open_.empty())
            fold(open_.top().bound);
        for (const BranchNode& n : plunge_)
            fold(n.bound);
        return best;
    }

    BranchNode pop_node()
    {
        if (!plunge_.empty()) {
            BranchNode n = std::move(plunge_.back());
            plunge_.pop_back();
            return n;
        }
        BranchNode n = open_.top();
        open_.pop();
        return n;
    }

    void apply_overrides(const BranchNode& node)
    {
        for (const BoundOverride& o : node.overrides)
            work_.set_variable_bounds(o.var, o.lb, o.ub);
    }

    void restore_overrides(const BranchNode& node)
    {
        for (const BoundOverride& o : node.overrides)
            work_.set_variable_bounds(o.var, model_.base.variable_lb(o.var),
                                      model_.base.variable_ub(o.var));
    }

    bool try_incumbent(const std::vector<double>& point, double objective)
    {
        double eps = 1e-12 * std::max(1.0, std::fabs(objective));
        bool better = !incumbent_ || (maximize_ ? objective > incumbent_obj_ + eps
                                                : objective < incumbent_obj_ - eps);
        if (!better)
            return false;
        incumbent_ = point;
        incumbent_obj_ = objective;
        log_.push_back({elapsed(), nodes_, objective, open_dual_bound()});
        return true;
    }

    double point_objective(const std::vector<double>& point) const
    {
        double obj = 0.0;
        for (int j = 0; j < model_.base.num_variables(); ++j)
            obj += model_.base.objective_coeff(j) * point[j];
        return obj;
    }

    void process(BranchNode node)
    {
        apply_overrides(node);
        LpSolution lp = simplex_.solve(work_, node.basis.basic_cols.empty()
                                                  ? nullptr
                                                  : &node.basis);
        ++nodes_;

        if (lp.status == LpStatus::IterationLimit || lp.status == LpStatus::Unbounded) {
            restore_overrides(node);
            throw std::runtime_error(std::string("solve_milp: node ") +
                                     std::to_string(node.id) + " LP ended with status " +
                                     to_string(lp.status));
        }
        if (lp.status == LpStatus::Infeasible) {
            restore_overrides(node);
            return;
        }

        node.bound = lp.objective;
        bool improved = false;

        if (!incumbent_ || can_improve(node.bound)) {
            // Forward completion from the relaxation's input values.
            auto completed =
                primal_heuristic_forward(model_, model_.network(), lp.values, &work_);
            if (completed)
                improved |= try_incumbent(*completed, point_objective(*completed));

            int frac = pick_branching_variable(lp.values);
            if (frac < 0) {
                // Integral relaxation: the node is solved. Prefer the exactly
                // forward-consistent completion when it matches this point.
                if (!completed || !gap_matches(point_objective(*completed), lp.objective))
                    improved |= try_incumbent(lp.values, lp.objective);
            } else {
                auto [down, up] = branch(node, model_, frac);
                SimplexBasis basis{lp.basic_cols, lp.nonbasic_at_upper};
                down.basis = basis;
                up.basis = std::move(basis);
                down.id = next_id_++;
                up.id = next_id_++;
                // Dive while no incumbent exists yet (margin-style side
                // constraints can defeat the completion heuristic near the
                // root) and after every improvement; otherwise best-bound.
                if (improved || !incumbent_) {
                    plunge_.push_back(std::move(up));
                    plunge_.push_back(std::move(down));
                } else {
                    open_.push(std::move(down));
                    open_.push(std::move(up));
                }
            }
        }
        restore_overrides(node);
    }

    bool gap_matches(double a, double b) const
    {
        return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b));
    }

    // Most fractional binary; ties go to the earliest created (lowest layer,
    // then lowest unit). Returns -1 when all binaries are integral.
    int pick_branching_variable(const std::vector<double>& values) const
    {
        int best = -1;
        double best_frac = config_.integrality_tol;
        for (int z : model_.binaries) {
            double frac = std::fabs(values[z] - std::round(values[z]));
            if (frac > best_frac) {
                best_frac = frac;
                best = z;
            }
        }
        return best;
    }

    MilpResult finish(MilpStatus status)
    {
        MilpResult res;
        res.stats.nodes = nodes_;
        res.stats.wall_time_s = elapsed();
        res.log = std::move(log_);

        bool open_empty = plunge_.empty() && open_.empty();
        if (incumbent_) {
            res.incumbent = std::move(incumbent_);
            res.objective = incumbent_obj_;
            res.dual_bound = status == MilpStatus::ProvenOptimal && open_empty
                                 ? incumbent_obj_
                                 : open_dual_bound();
            res.status = status;
            res.stats.pct_gap = compute_gap(res.objective, res.dual_bound);
        } else {
            res.dual_bound = open_dual_bound();
            res.status = open_empty && status == MilpStatus::ProvenOptimal
                             ? MilpStatus::Infeasible
                             : status;
            res.stats.pct_gap = kInfinity;
        }
        return res;
    }
};

}  // namespace

MilpResult solve_milp(const MilpModel& model, const SolverConfig& config)
{
    if (!model.indicators.empty())
        throw std::invalid_argument(
            "solve_milp: model still carries indicator constraints; call "
            "linearize_indicators first");
    if (config.branching != "most_fractional")
        throw std::invalid_argument("solve_milp: unknown branching rule '" +
                                    config.branching + "'");
    if (config.time_limit_s <= 0 || config.rel_gap_target <= 0 ||
        config.integrality_tol <= 0)
        throw std::invalid_argument("solve_milp: limits and tolerances must be positive");
    model.base.validate();
    BranchAndBound bnb(model, config);
    return bnb.run();
}

}  // namespace relumip
