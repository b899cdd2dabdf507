// Acceptance suite: runs every criterion end to end and prints one PASS/FAIL
// line each; exits nonzero if any fails. Criterion 5 runs the full 20-instance
// benchmark comparison and dominates the runtime (a few minutes).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "relumip/bench.hpp"
#include "relumip/bound_tightening.hpp"
#include "relumip/io.hpp"
#include "relumip/milp_solver.hpp"
#include "relumip/oracle.hpp"

using namespace relumip;
using namespace relumip::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolverConfig exact_config()
{
    SolverConfig config;
    config.rel_gap_target = 1e-9;  // oracle comparisons are absolute at 1e-6
    return config;
}

std::vector<double> incumbent_input(const MilpModel& model,
                                    const std::vector<double>& point)
{
    std::vector<double> x0(model.network().input_dim);
    for (int j = 0; j < model.network().input_dim; ++j)
        x0[j] = point[model.var(0, j, VarRole::X)];
    return x0;
}

// ---- criterion 1: oracle equivalence on 50 random networks ----
Outcome criterion1()
{
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> d_inputs(2, 6), d_layers(1, 3), d_out(2, 4);

    int matched = 0;
    for (int i = 0; i < 50; ++i) {
        int n0 = d_inputs(rng);
        int layers = d_layers(rng);
        std::vector<int> hidden;
        int budget = 12;
        for (int l = 0; l < layers; ++l) {
            int hi = std::uniform_int_distribution<int>(2, 6)(rng);
            hi = std::min(hi, budget - (layers - 1 - l) * 2);
            hi = std::max(hi, 2);
            hidden.push_back(hi);
            budget -= hi;
        }
        Network net = random_network(n0, hidden, d_out(rng), 5000 + i);
        BoundsTable bounds = derive_interval_bounds(net);

        int fv_layer = std::uniform_int_distribution<int>(1, net.num_layers())(rng);
        int fv_unit =
            std::uniform_int_distribution<int>(0, net.layer_output_size(fv_layer) - 1)(rng);
        MilpModel fv = build_featviz_model(net, bounds, fv_layer, fv_unit);
        linearize_indicators(fv);
        OracleResult fv_oracle = brute_force_optimum(fv);
        MilpResult fv_res = solve_milp(fv, exact_config());
        bool fv_ok = fv_oracle.found && fv_res.status == MilpStatus::ProvenOptimal &&
                     std::fabs(fv_res.objective - fv_oracle.objective) <= 1e-6;

        AdversarialSpec spec;
        spec.reference_input = random_box_point(net, rng);
        spec.true_label = classify(net, spec.reference_input).first;
        spec.target = target_label(spec.true_label, net.output_dim());
        MilpModel adv = build_adversarial_model(net, bounds, spec);
        linearize_indicators(adv);
        OracleResult adv_oracle = brute_force_optimum(adv);
        MilpResult adv_res = solve_milp(adv, exact_config());
        bool adv_ok;
        if (adv_oracle.found)
            adv_ok = adv_res.status == MilpStatus::ProvenOptimal &&
                     std::fabs(adv_res.objective - adv_oracle.objective) <= 1e-6;
        else
            adv_ok = adv_res.status == MilpStatus::Infeasible;

        if (fv_ok && adv_ok)
            ++matched;
    }
    double secs = seconds_since(t0);

    Outcome out;
    out.pass = matched == 50 && secs < 60.0;
    std::ostringstream os;
    os << matched << "/50 matched within 1e-6, " << secs << " s (< 60 s required)";
    out.detail = os.str();
    return out;
}

// ---- criterion 2: forward completions are always feasible ----
Outcome criterion2()
{
    std::mt19937_64 rng(202);
    int failures = 0;
    long checked = 0;
    std::vector<Network> fixtures{tiny_2_2_1(), cancel_2_2_1(),
                                  random_network(4, {5, 4}, 3, 2202), bench_fixture()};
    for (const Network& net : fixtures) {
        MilpModel model = encode_network(net, derive_interval_bounds(net));
        for (int i = 0; i < 1000; ++i) {
            std::vector<double> seed_point(model.base.num_variables(), 0.0);
            std::vector<double> x0 = random_box_point(net, rng);
            for (int j = 0; j < net.input_dim; ++j)
                seed_point[model.var(0, j, VarRole::X)] = x0[j];
            auto completed = primal_heuristic_forward(model, net, seed_point);
            ++checked;
            if (!completed) {
                ++failures;
                continue;
            }
            MilpPointReport rep = check_milp_point(model, *completed, 1e-7);
            if (!rep.feasible)
                ++failures;
        }
    }
    Outcome out;
    out.pass = failures == 0;
    std::ostringstream os;
    os << checked << " completions over " << fixtures.size() << " fixtures, "
       << failures << " failures (residual tolerance 1e-7)";
    out.detail = os.str();
    return out;
}

// ---- criterion 3: a pinned input box forces the forward trajectory ----
Outcome criterion3()
{
    std::mt19937_64 rng(303);
    int bad = 0;
    int total = 0;
    std::vector<Network> fixtures{cancel_2_2_1(), random_network(4, {5, 4}, 3, 3303)};
    for (const Network& net : fixtures) {
        for (int i = 0; i < 50; ++i) {
            std::vector<double> x0 = random_box_point(net, rng);
            Network pinned = net;
            pinned.input_lb = x0;
            pinned.input_ub = x0;
            MilpModel model = encode_network(pinned, derive_interval_bounds(pinned));
            set_objective(model, {{{net.num_layers(), 0}, 1.0}}, {}, ObjSense::Maximize);
            linearize_indicators(model);
            MilpResult res = solve_milp(model, exact_config());
            ++total;
            if (res.status != MilpStatus::ProvenOptimal || !res.has_incumbent()) {
                ++bad;
                continue;
            }
            LayerActivations acts = forward_eval(net, x0);
            for (int k = 0; k <= net.num_layers(); ++k)
                for (int j = 0; j < net.layer_output_size(k); ++j)
                    if (std::fabs((*res.incumbent)[model.var(k, j, VarRole::X)] -
                                  acts.outputs[k][j]) > 1e-6) {
                        ++bad;
                        goto next_input;
                    }
        next_input:;
        }
    }
    Outcome out;
    out.pass = bad == 0;
    std::ostringstream os;
    os << total << " pinned inputs, " << bad << " trajectory mismatches (tol 1e-6)";
    out.detail = os.str();
    return out;
}

// ---- criterion 4: tightened bounds are sound, dominated, and useful ----
Outcome criterion4(const Network& bench_net, const BoundsTable& bench_tightened)
{
    bool sound = true, dominated = true;
    long violations = 0;

    std::vector<std::pair<Network, BoundsTable>> tables;
    tables.push_back({cancel_2_2_1(), tighten_bounds(cancel_2_2_1())});
    Network small = random_network(4, {5, 4}, 3, 4404);
    tables.push_back({small, tighten_bounds(small)});
    tables.push_back({bench_net, bench_tightened});

    for (auto& [net, tightened] : tables) {
        auto v = sample_check_bounds(net, tightened, 10000, 404);
        violations += static_cast<long>(v.size());
        if (!v.empty())
            sound = false;
        if (compare_tables(derive_interval_bounds(net), tightened).any_looser())
            dominated = false;
    }

    const BoundsTable& cancel_t = tables[0].second;
    double interval_ub = derive_interval_bounds(cancel_2_2_1()).at(2, 0).ub_x;
    bool strict = cancel_t.at(2, 0).ub_x < interval_ub - 1e-6;

    Outcome out;
    out.pass = sound && dominated && strict;
    std::ostringstream os;
    os << violations << " sample violations over 10000 draws/table, dominance "
       << (dominated ? "holds" : "BROKEN") << ", cancellation fixture tightened "
       << interval_ub << " -> " << cancel_t.at(2, 0).ub_x;
    out.detail = os.str();
    return out;
}

// ---- criterion 5: basic vs improved benchmark trend ----
Outcome criterion5(const Network& net, const BoundsTable& interval,
                   const BoundsTable& tightened, BenchReport& report)
{
    BenchConfig config;
    config.instances = 20;
    config.seed = 11;
    config.time_limit_s = 300.0;
    report = run_bench(net, interval, tightened, config);

    Outcome out;
    out.pass = report.improved.mean_nodes < report.basic.mean_nodes &&
               report.improved.pct_solved >= report.basic.pct_solved &&
               report.improved.mean_time_s <= report.basic.mean_time_s;
    std::ostringstream os;
    os << "basic " << report.basic.mean_nodes << " nodes/" << report.basic.mean_time_s
       << " s/" << report.basic.pct_solved << "% vs improved "
       << report.improved.mean_nodes << " nodes/" << report.improved.mean_time_s
       << " s/" << report.improved.pct_solved << "%";
    out.detail = os.str();
    return out;
}

// ---- criterion 6: every SAT adversarial solve verifies ----
Outcome criterion6(const Network& net, const BoundsTable& tightened)
{
    std::mt19937_64 rng(606);
    int sat_plain = 0, sat_capped = 0, bad = 0;
    for (int i = 0; i < 6; ++i) {
        AdversarialSpec spec;
        spec.reference_input = random_box_point(net, rng);
        spec.true_label = classify(net, spec.reference_input).first;
        spec.target = target_label(spec.true_label, 10);
        spec.margin_factor = 1.2;

        for (bool capped : {false, true}) {
            spec.pixel_cap = capped ? std::optional<double>(0.2) : std::nullopt;
            MilpModel model = build_adversarial_model(net, tightened, spec);
            linearize_indicators(model);
            MilpResult res = solve_milp(model);
            if (!res.has_incumbent())
                continue;
            (capped ? sat_capped : sat_plain)++;

            AdvVerification v =
                verify_adversarial(net, incumbent_input(model, *res.incumbent), spec);
            if (!v.margin_ok || !v.box_ok || !v.cap_ok)
                ++bad;
            if (capped)
                for (const DistanceTerm& d : model.distance_terms)
                    if ((*res.incumbent)[d.d_var] > 0.2 + 1e-9)
                        ++bad;
            if (spec.target != (spec.true_label + 5) % 10)
                ++bad;
        }
    }
    Outcome out;
    out.pass = bad == 0 && sat_plain >= 1 && sat_capped >= 1;
    std::ostringstream os;
    os << sat_plain << " uncapped and " << sat_capped
       << " capped SAT solves, " << bad << " verification failures";
    out.detail = os.str();
    return out;
}

// ---- criterion 7: exact featviz dominates sampling ----
Outcome criterion7()
{
    std::mt19937_64 rng(707);
    bool dominated = true;
    bool strict_on_cancel = false;
    std::vector<Network> fixtures{tiny_2_2_1(), cancel_2_2_1(),
                                  random_network(4, {5, 4}, 3, 7707)};
    for (size_t f = 0; f < fixtures.size(); ++f) {
        const Network& net = fixtures[f];
        BoundsTable bounds = derive_interval_bounds(net);
        for (int k = 1; k <= net.num_layers(); ++k) {
            for (int j = 0; j < net.layer_output_size(k); ++j) {
                MilpModel model = build_featviz_model(net, bounds, k, j);
                linearize_indicators(model);
                MilpResult res = solve_milp(model, exact_config());
                if (res.status != MilpStatus::ProvenOptimal) {
                    dominated = false;
                    continue;
                }
                double best_sample = -kInfinity;
                for (int i = 0; i < 1000; ++i) {
                    auto acts = forward_eval(net, random_box_point(net, rng));
                    best_sample = std::max(best_sample, acts.outputs[k][j]);
                }
                if (res.objective < best_sample - 1e-9)
                    dominated = false;
                if (f == 1 && res.objective > best_sample + 1e-6)
                    strict_on_cancel = true;
            }
        }
    }
    Outcome out;
    out.pass = dominated && strict_on_cancel;
    std::ostringstream os;
    os << "exact optimum >= 1000-sample maximum on every unit"
       << (strict_on_cancel ? ", strictly better on the cancellation fixture"
                            : ", but NO strict improvement on the cancellation fixture");
    out.detail = os.str();
    return out;
}

}  // namespace

int main()
{
    int failures = 0;
    auto report = [&](int id, const char* name, const Outcome& out) {
        std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": "
                  << name << " — " << out.detail << "\n";
        std::cout.flush();
        if (!out.pass)
            ++failures;
    };
    auto guarded = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        Outcome out;
        try {
            out = fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        report(id, name, out);
    };

    guarded(1, "oracle equivalence", criterion1);
    guarded(2, "completion feasibility", criterion2);
    guarded(3, "forward uniqueness", criterion3);

    // Criteria 4-6 share the benchmark fixture and its tightened table.
    Network bench_net = bench_fixture();
    BoundsTable bench_interval = derive_interval_bounds(bench_net);
    BoundsTable bench_tightened;
    bool tighten_ok = true;
    try {
        bench_tightened = tighten_bounds(bench_net);
    } catch (const std::exception& e) {
        tighten_ok = false;
        Outcome out;
        out.detail = std::string("tightening failed: ") + e.what();
        report(4, "bound soundness and dominance", out);
        report(5, "basic vs improved trend", out);
        report(6, "adversarial verification", out);
    }
    if (tighten_ok) {
        guarded(4, "bound soundness and dominance",
                [&] { return criterion4(bench_net, bench_tightened); });
        BenchReport bench_report;
        guarded(5, "basic vs improved trend", [&] {
            return criterion5(bench_net, bench_interval, bench_tightened, bench_report);
        });
        std::cout << format_bench_table(bench_report);
        guarded(6, "adversarial verification",
                [&] { return criterion6(bench_net, bench_tightened); });
    }

    guarded(7, "feature-viz dominance", criterion7);

    // Criterion 8 declares what is deliberately NOT reproduced: any model
    // training pipeline, and absolute node/time figures of external solvers.
    // The surrogate checks are criteria 1-7 above.
    std::cout << "[PASS] criterion 8: out-of-scope items excluded by design "
                 "(training pipeline, external-solver absolute statistics)\n";

    if (failures > 0)
        std::cout << failures << " criterion(s) FAILED\n";
    else
        std::cout << "all criteria passed\n";
    return failures;
}
