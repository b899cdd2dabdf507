#include "relumip/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace relumip {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;
constexpr int kBlandTrigger = 50;

// Rebuilding the inverse is O(m^3); spacing rebuilds ~m pivots apart keeps
// the amortized cost at one extra O(m^2) per pivot.
inline int refactor_interval(int m)
{
    return std::max(128, m / 2);
}

enum NbState : unsigned char { AtLower, AtUpper, FreeAtZero };

// Working state for one solve. The LP is converted to the computational form
//   A x_struct - x_logical = 0,  lb <= x <= ub columnwise,
// where the logical column of row i carries the row bounds.
struct Tableau {
    int n = 0;  // structural columns
    int m = 0;  // rows == logical columns
    std::vector<double> lower, upper;                       // per column
    std::vector<std::vector<std::pair<int, double>>> cols;  // structural columns, sparse
    std::vector<double> cost;                               // phase-2 cost per column

    std::vector<int> basic;     // slot -> column
    std::vector<int> pos;       // column -> slot or -1
    std::vector<NbState> nb;    // per column, meaningful when nonbasic
    std::vector<double> xb;     // basic values per slot
    std::vector<double> binv;   // dense m*m, row-major

    int total() const { return n + m; }

    double nonbasic_value(int col) const
    {
        switch (nb[col]) {
            case AtLower: return lower[col];
            case AtUpper: return upper[col];
            default: return 0.0;
        }
    }

    // w = Binv * A_col
    void ftran(int col, std::vector<double>& w) const
    {
        std::fill(w.begin(), w.end(), 0.0);
        if (col >= n) {
            int r = col - n;
            for (int i = 0; i < m; ++i)
                w[i] = -binv[i * m + r];
        } else {
            for (auto [r, a] : cols[col])
                for (int i = 0; i < m; ++i)
                    w[i] += binv[i * m + r] * a;
        }
    }

    double column_dot(int col, const std::vector<double>& y) const
    {
        if (col >= n)
            return -y[col - n];
        double v = 0.0;
        for (auto [r, a] : cols[col])
            v += y[r] * a;
        return v;
    }

    void recompute_basic_values()
    {
        std::vector<double> rhs(m, 0.0);
        for (int col = 0; col < total(); ++col) {
            if (pos[col] >= 0)
                continue;
            double v = nonbasic_value(col);
            if (v == 0.0)
                continue;
            if (col >= n) {
                rhs[col - n] -= -v;
            } else {
                for (auto [r, a] : cols[col])
                    rhs[r] -= a * v;
            }
        }
        for (int i = 0; i < m; ++i) {
            double v = 0.0;
            for (int k = 0; k < m; ++k)
                v += binv[i * m + k] * rhs[k];
            xb[i] = v;
        }
    }

    // Rebuild Binv from the current basis by Gauss-Jordan elimination.
    // Returns false if the basis matrix is singular.
    bool refactorize()
    {
        std::vector<double> B(m * m, 0.0);
        for (int slot = 0; slot < m; ++slot) {
            int col = basic[slot];
            if (col >= n) {
                B[(col - n) * m + slot] = -1.0;
            } else {
                for (auto [r, a] : cols[col])
                    B[r * m + slot] = a;
            }
        }
        std::vector<double>& inv = binv;
        std::fill(inv.begin(), inv.end(), 0.0);
        for (int i = 0; i < m; ++i)
            inv[i * m + i] = 1.0;
        for (int c = 0; c < m; ++c) {
            int piv = -1;
            double best = 1e-12;
            for (int r = c; r < m; ++r)
                if (std::fabs(B[r * m + c]) > best) {
                    best = std::fabs(B[r * m + c]);
                    piv = r;
                }
            if (piv < 0)
                return false;
            if (piv != c) {
                for (int k = 0; k < m; ++k) {
                    std::swap(B[piv * m + k], B[c * m + k]);
                    std::swap(inv[piv * m + k], inv[c * m + k]);
                }
            }
            double d = B[c * m + c];
            for (int k = 0; k < m; ++k) {
                B[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for (int r = 0; r < m; ++r) {
                if (r == c)
                    continue;
                double f = B[r * m + c];
                if (f == 0.0)
                    continue;
                for (int k = 0; k < m; ++k) {
                    B[r * m + k] -= f * B[c * m + k];
                    inv[r * m + k] -= f * inv[c * m + k];
                }
            }
        }
        return true;
    }
};

struct RatioResult {
    double step = kInfinity;
    int slot = -1;          // blocking basic slot, -1 for a bound flip
    bool to_upper = false;  // bound the leaving variable lands on
};

class Engine {
public:
    Engine(const LinearProgram& lp, SimplexSolver::Options opts) : opts_(opts)
    {
        t_.n = lp.num_variables();
        t_.m = lp.num_rows();
        int total = t_.n + t_.m;
        t_.lower.resize(total);
        t_.upper.resize(total);
        t_.cost.assign(total, 0.0);
        t_.cols.resize(t_.n);
        for (int j = 0; j < t_.n; ++j) {
            t_.lower[j] = lp.variable_lb(j);
            t_.upper[j] = lp.variable_ub(j);
        }
        sign_ = lp.sense() == ObjSense::Maximize ? -1.0 : 1.0;
        for (int j = 0; j < t_.n; ++j)
            t_.cost[j] = sign_ * lp.objective_coeff(j);
        for (int i = 0; i < t_.m; ++i) {
            t_.lower[t_.n + i] = lp.row(i).lb;
            t_.upper[t_.n + i] = lp.row(i).ub;
            for (auto [j, a] : lp.row(i).coeffs)
                if (a != 0.0)
                    t_.cols[j].push_back({i, a});
        }
        t_.basic.resize(t_.m);
        t_.pos.assign(total, -1);
        t_.nb.resize(total);
        t_.xb.resize(t_.m);
        t_.binv.resize(static_cast<size_t>(t_.m) * t_.m);
        w_.resize(t_.m);
        y_.resize(t_.m);
    }

    LpSolution run(const SimplexBasis* warm)
    {
        if (!install_basis(warm))
            install_logical_basis();

        LpSolution sol;
        bool feasible = phase1(sol);
        if (!feasible) {
            sol.objective = 0.0;
            return sol;  // status set by phase1
        }
        phase2(sol);
        extract(sol);
        return sol;
    }

private:
    SimplexSolver::Options opts_;
    Tableau t_;
    double sign_ = 1.0;
    std::vector<double> w_, y_;
    long iterations_ = 0;
    int degenerate_streak_ = 0;
    int pivots_since_refactor_ = 0;

    void install_logical_basis()
    {
        std::fill(t_.pos.begin(), t_.pos.end(), -1);
        for (int i = 0; i < t_.m; ++i) {
            t_.basic[i] = t_.n + i;
            t_.pos[t_.n + i] = i;
        }
        for (int j = 0; j < t_.total(); ++j)
            if (t_.pos[j] < 0)
                t_.nb[j] = default_state(j);
        // Binv of the all-logical basis is -I.
        std::fill(t_.binv.begin(), t_.binv.end(), 0.0);
        for (int i = 0; i < t_.m; ++i)
            t_.binv[i * t_.m + i] = -1.0;
        t_.recompute_basic_values();
    }

    NbState default_state(int col) const
    {
        if (std::isfinite(t_.lower[col]))
            return AtLower;
        if (std::isfinite(t_.upper[col]))
            return AtUpper;
        return FreeAtZero;
    }

    bool install_basis(const SimplexBasis* warm)
    {
        if (warm == nullptr || static_cast<int>(warm->basic_cols.size()) != t_.m ||
            static_cast<int>(warm->nonbasic_at_upper.size()) != t_.total())
            return false;
        std::fill(t_.pos.begin(), t_.pos.end(), -1);
        for (int i = 0; i < t_.m; ++i) {
            int col = warm->basic_cols[i];
            if (col < 0 || col >= t_.total() || t_.pos[col] >= 0)
                return false;
            t_.basic[i] = col;
            t_.pos[col] = i;
        }
        for (int j = 0; j < t_.total(); ++j) {
            if (t_.pos[j] >= 0)
                continue;
            if (warm->nonbasic_at_upper[j] && std::isfinite(t_.upper[j]))
                t_.nb[j] = AtUpper;
            else
                t_.nb[j] = default_state(j);
        }
        if (!t_.refactorize())
            return false;
        t_.recompute_basic_values();
        return true;
    }

    // Total violation of the basic variables, counting only entries beyond
    // the feasibility tolerance so it agrees with the phase-1 costs.
    double infeasibility() const
    {
        double total = 0.0;
        for (int i = 0; i < t_.m; ++i) {
            int col = t_.basic[i];
            double below = t_.lower[col] - t_.xb[i];
            double above = t_.xb[i] - t_.upper[col];
            if (below > opts_.feasibility_tol)
                total += below;
            if (above > opts_.feasibility_tol)
                total += above;
        }
        return total;
    }

    void compute_duals(const std::vector<double>& slot_cost)
    {
        for (int i = 0; i < t_.m; ++i) {
            double v = 0.0;
            for (int k = 0; k < t_.m; ++k)
                v += slot_cost[k] * t_.binv[k * t_.m + i];
            y_[i] = v;
        }
    }

    // Returns the entering column, or -1 at optimality. `phase1` selects the
    // infeasibility costs, otherwise t_.cost is priced.
    int price(bool phase1, std::vector<double>& slot_cost)
    {
        slot_cost.resize(t_.m);
        for (int i = 0; i < t_.m; ++i) {
            int col = t_.basic[i];
            if (phase1) {
                if (t_.xb[i] < t_.lower[col] - opts_.feasibility_tol)
                    slot_cost[i] = -1.0;
                else if (t_.xb[i] > t_.upper[col] + opts_.feasibility_tol)
                    slot_cost[i] = 1.0;
                else
                    slot_cost[i] = 0.0;
            } else {
                slot_cost[i] = t_.cost[col];
            }
        }
        compute_duals(slot_cost);

        bool bland = degenerate_streak_ >= kBlandTrigger;
        int best = -1;
        double best_score = opts_.optimality_tol;
        for (int j = 0; j < t_.total(); ++j) {
            if (t_.pos[j] >= 0)
                continue;
            if (t_.upper[j] - t_.lower[j] <= 0.0)
                continue;  // fixed
            double cj = phase1 ? 0.0 : t_.cost[j];
            double d = cj - t_.column_dot(j, y_);
            double score = 0.0;
            switch (t_.nb[j]) {
                case AtLower: score = -d; break;
                case AtUpper: score = d; break;
                case FreeAtZero: score = std::fabs(d); break;
            }
            if (score <= opts_.optimality_tol)
                continue;
            if (bland)
                return j;
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    // Direction of the entering variable: +1 when it increases from its bound.
    int entering_direction(int col, bool phase1, const std::vector<double>& y) const
    {
        double cj = phase1 ? 0.0 : t_.cost[col];
        double d = cj - t_.column_dot(col, y);
        if (t_.nb[col] == AtLower)
            return 1;
        if (t_.nb[col] == AtUpper)
            return -1;
        return d < 0 ? 1 : -1;
    }

    RatioResult ratio_test(int enter, int dir, bool bland) const
    {
        RatioResult res;
        double range = t_.upper[enter] - t_.lower[enter];
        if (std::isfinite(range))
            res.step = range;  // bound flip

        for (int i = 0; i < t_.m; ++i) {
            double rate = -dir * w_[i];
            if (std::fabs(rate) <= kPivotTol)
                continue;
            int col = t_.basic[i];
            double xv = t_.xb[i];
            double limit;
            bool lands_upper;
            if (rate > 0) {
                if (xv < t_.lower[col] - opts_.feasibility_tol) {
                    limit = t_.lower[col];  // infeasible below, becomes feasible at lb
                    lands_upper = false;
                } else if (xv <= t_.upper[col] + opts_.feasibility_tol) {
                    limit = t_.upper[col];
                    lands_upper = true;
                } else {
                    continue;  // infeasible above and moving further up: no block
                }
            } else {
                if (xv > t_.upper[col] + opts_.feasibility_tol) {
                    limit = t_.upper[col];
                    lands_upper = true;
                } else if (xv >= t_.lower[col] - opts_.feasibility_tol) {
                    limit = t_.lower[col];
                    lands_upper = false;
                } else {
                    continue;
                }
            }
            if (!std::isfinite(limit))
                continue;
            double step = std::max(0.0, (limit - xv) / rate);
            bool better;
            if (step < res.step - 1e-12) {
                better = true;
            } else if (step > res.step + 1e-12) {
                better = false;
            } else if (res.slot < 0) {
                better = true;  // prefer a pivot over a flip on ties
            } else if (bland) {
                better = col < t_.basic[res.slot];
            } else {
                better = std::fabs(w_[i]) > std::fabs(w_[res.slot]);
            }
            if (better) {
                res.step = step;
                res.slot = i;
                res.to_upper = lands_upper;
            }
        }
        return res;
    }

    void apply_step(int enter, int dir, const RatioResult& r)
    {
        double step = r.step;
        for (int i = 0; i < t_.m; ++i)
            t_.xb[i] += -dir * w_[i] * step;

        if (r.slot < 0) {
            // bound flip
            t_.nb[enter] = t_.nb[enter] == AtLower ? AtUpper : AtLower;
        } else {
            int leave = t_.basic[r.slot];
            double enter_value = t_.nonbasic_value(enter) + dir * step;
            double piv = w_[r.slot];
            int mm = t_.m;
            double* brow = &t_.binv[static_cast<size_t>(r.slot) * mm];
            for (int k = 0; k < mm; ++k)
                brow[k] /= piv;
            for (int i = 0; i < mm; ++i) {
                if (i == r.slot || w_[i] == 0.0)
                    continue;
                double f = w_[i];
                double* row = &t_.binv[static_cast<size_t>(i) * mm];
                for (int k = 0; k < mm; ++k)
                    row[k] -= f * brow[k];
            }
            t_.pos[leave] = -1;
            t_.nb[leave] = r.to_upper ? AtUpper : AtLower;
            t_.basic[r.slot] = enter;
            t_.pos[enter] = r.slot;
            t_.xb[r.slot] = enter_value;

            if (++pivots_since_refactor_ >= refactor_interval(t_.m)) {
                pivots_since_refactor_ = 0;
                if (!t_.refactorize())
                    throw std::runtime_error("simplex: basis became singular");
                t_.recompute_basic_values();
            }
        }
        ++iterations_;
        if (step <= kDegenerateStep)
            ++degenerate_streak_;
        else
            degenerate_streak_ = 0;
    }

    // Returns true when a feasible basis was reached.
    bool phase1(LpSolution& sol)
    {
        std::vector<double> slot_cost;
        while (true) {
            if (infeasibility() <= opts_.feasibility_tol)
                return true;
            if (iterations_ >= opts_.iteration_limit) {
                sol.status = LpStatus::IterationLimit;
                sol.iterations = iterations_;
                return false;
            }
            int enter = price(true, slot_cost);
            if (enter < 0) {
                sol.status = LpStatus::Infeasible;
                sol.iterations = iterations_;
                return false;
            }
            int dir = entering_direction(enter, true, y_);
            t_.ftran(enter, w_);
            RatioResult r = ratio_test(enter, dir, degenerate_streak_ >= kBlandTrigger);
            if (!std::isfinite(r.step))
                throw std::runtime_error("simplex: unbounded infeasibility descent");
            apply_step(enter, dir, r);
        }
    }

    void phase2(LpSolution& sol)
    {
        std::vector<double> slot_cost;
        while (true) {
            if (iterations_ >= opts_.iteration_limit) {
                sol.status = LpStatus::IterationLimit;
                return;
            }
            int enter = price(false, slot_cost);
            if (enter < 0) {
                sol.status = LpStatus::Optimal;
                return;
            }
            int dir = entering_direction(enter, false, y_);
            t_.ftran(enter, w_);
            RatioResult r = ratio_test(enter, dir, degenerate_streak_ >= kBlandTrigger);
            if (!std::isfinite(r.step)) {
                sol.status = LpStatus::Unbounded;
                return;
            }
            apply_step(enter, dir, r);
        }
    }

    void extract(LpSolution& sol)
    {
        sol.iterations = iterations_;
        if (sol.status == LpStatus::Unbounded) {
            sol.objective = sign_ < 0 ? kInfinity : -kInfinity;
            return;
        }
        // Refresh values once at the end to shed pivot drift. Short
        // warm-started solves have barely drifted; skip the O(m^3) rebuild.
        if (t_.m > 0 && pivots_since_refactor_ >= 32) {
            if (!t_.refactorize())
                throw std::runtime_error("simplex: basis became singular");
        }
        t_.recompute_basic_values();

        sol.values.resize(t_.n);
        for (int j = 0; j < t_.n; ++j)
            sol.values[j] = t_.pos[j] >= 0 ? t_.xb[t_.pos[j]] : t_.nonbasic_value(j);
        double obj = 0.0;
        for (int j = 0; j < t_.n; ++j)
            obj += t_.cost[j] * sol.values[j];
        sol.objective = sign_ * obj;

        sol.basic_cols = t_.basic;
        sol.nonbasic_at_upper.assign(t_.total(), 0);
        for (int j = 0; j < t_.total(); ++j)
            if (t_.pos[j] < 0 && t_.nb[j] == AtUpper)
                sol.nonbasic_at_upper[j] = 1;
    }
};

}  // namespace

LpSolution SimplexSolver::solve(const LinearProgram& lp, const SimplexBasis* warm)
{
    lp.validate();
    Engine engine(lp, opts_);
    return engine.run(warm);
}

LpSolution solve_lp(const LinearProgram& lp, long iteration_limit)
{
    SimplexSolver::Options opts;
    opts.iteration_limit = iteration_limit;
    return SimplexSolver(opts).solve(lp);
}

}  // namespace relumip
