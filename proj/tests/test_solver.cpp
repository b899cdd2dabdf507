#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "relumip/applications.hpp"
#include "relumip/milp_solver.hpp"
#include "relumip/oracle.hpp"

using namespace relumip;
using relumip::testing::cancel_2_2_1;
using relumip::testing::random_box_point;
using relumip::testing::random_network;
using relumip::testing::tiny_2_2_1;

namespace {

MilpModel featviz_linearized(const Network& net, int layer, int unit)
{
    MilpModel model = build_featviz_model(net, derive_interval_bounds(net), layer, unit);
    linearize_indicators(model);
    return model;
}

}  // namespace

TEST_CASE("a fully stable model solves at the root")
{
    // Both units' phases are decided by interval bounds alone.
    Network net;
    net.input_dim = 1;
    net.input_lb = {0.0};
    net.input_ub = {1.0};
    net.layers.push_back(Layer::dense({{1.0}, {1.0}}, {5.0, -6.0}, Activation::ReLU));
    net.layers.push_back(Layer::dense({{1.0, 1.0}}, {0.0}, Activation::Linear));

    MilpModel model = featviz_linearized(net, 2, 0);
    MilpResult res = solve_milp(model);
    REQUIRE(res.status == MilpStatus::ProvenOptimal);
    CHECK(res.stats.nodes == 1);
    CHECK(res.objective == doctest::Approx(6.0));
}

TEST_CASE("single ReLU unit maximization over [-1, 1]")
{
    Network net;
    net.input_dim = 1;
    net.input_lb = {-1.0};
    net.input_ub = {1.0};
    net.layers.push_back(Layer::dense({{1.0}}, {0.0}, Activation::ReLU));

    MilpModel model = featviz_linearized(net, 1, 0);
    MilpResult res = solve_milp(model);
    REQUIRE(res.status == MilpStatus::ProvenOptimal);
    CHECK(res.objective == doctest::Approx(1.0));
    REQUIRE(res.has_incumbent());
    CHECK((*res.incumbent)[model.var(0, 0, VarRole::X)] == doctest::Approx(1.0));
}

TEST_CASE("fixture optimum equals the brute-force oracle")
{
    Network net = cancel_2_2_1();
    MilpModel model = featviz_linearized(net, 2, 0);
    OracleResult oracle = brute_force_optimum(model);
    MilpResult res = solve_milp(model);
    REQUIRE(oracle.found);
    REQUIRE(res.status == MilpStatus::ProvenOptimal);
    CHECK(res.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
    CHECK(res.objective == doctest::Approx(1.0));
}

TEST_CASE("branch fixes the binary and tightens the paired variable")
{
    Network net = tiny_2_2_1();
    MilpModel model = featviz_linearized(net, 2, 0);
    int z = model.var(1, 0, VarRole::Z);
    int x = model.var(1, 0, VarRole::X);
    int s = model.var(1, 0, VarRole::S);

    BranchNode root;
    auto [down, up] = branch(root, model, z);

    REQUIRE(down.overrides.size() == 2);
    CHECK(down.overrides[0].var == z);
    CHECK(down.overrides[0].ub == 0.0);
    CHECK(down.overrides[1].var == s);
    CHECK(down.overrides[1].ub == 0.0);

    REQUIRE(up.overrides.size() == 2);
    CHECK(up.overrides[0].var == z);
    CHECK(up.overrides[0].lb == 1.0);
    CHECK(up.overrides[1].var == x);
    CHECK(up.overrides[1].ub == 0.0);

    // Branching on an already fixed variable is a caller error.
    CHECK_THROWS_AS(branch(down, model, z), std::invalid_argument);
}

TEST_CASE("branching a MaxPool selector only fixes the selector")
{
    Network net;
    net.input_dim = 2;
    net.input_lb = {0, 0};
    net.input_ub = {1, 2};
    net.layers.push_back(Layer::max_pool({{0, 1}}));
    net.layers.push_back(Layer::dense({{1.0}}, {0.0}, Activation::Linear));
    MilpModel model = encode_network(net, derive_interval_bounds(net));
    linearize_indicators(model);

    int z0 = model.pools[0].selector_vars[0];
    BranchNode root;
    auto [down, up] = branch(root, model, z0);
    CHECK(down.overrides.size() == 1);
    CHECK(up.overrides.size() == 1);
    CHECK(up.overrides[0].lb == 1.0);
}

TEST_CASE("compute_gap arithmetic")
{
    CHECK(compute_gap(10.0, 10.0) == doctest::Approx(0.0));
    CHECK(compute_gap(10.0, 11.0) == doctest::Approx(10.0));
    CHECK(compute_gap(0.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("forward completion seeds a feasible incumbent at the root")
{
    Network net = tiny_2_2_1();
    MilpModel model = featviz_linearized(net, 2, 0);

    std::vector<double> lp_point(model.base.num_variables(), 0.0);
    lp_point[model.var(0, 0, VarRole::X)] = 0.7;
    lp_point[model.var(0, 1, VarRole::X)] = 0.2;
    auto completed = primal_heuristic_forward(model, net, lp_point);
    REQUIRE(completed.has_value());

    LayerActivations acts = forward_eval(net, {0.7, 0.2});
    double obj = (*completed)[model.var(2, 0, VarRole::X)];
    CHECK(obj == doctest::Approx(acts.outputs[2][0]));
}

TEST_CASE("forward completion respects fixed binaries or bails out")
{
    Network net = tiny_2_2_1();
    MilpModel model = featviz_linearized(net, 2, 0);

    // Fix unit (1,0) inactive although the input drives it positive.
    LinearProgram node_lp = model.base;
    int z = model.var(1, 0, VarRole::Z);
    node_lp.set_variable_bounds(z, 1.0, 1.0);

    std::vector<double> lp_point(model.base.num_variables(), 0.0);
    lp_point[model.var(0, 0, VarRole::X)] = 1.5;  // x1 - x2 = 1.5 > 0
    lp_point[model.var(0, 1, VarRole::X)] = 0.0;
    CHECK_FALSE(primal_heuristic_forward(model, net, lp_point, &node_lp).has_value());

    // Out-of-box inputs are clamped before completing.
    std::vector<double> outside(model.base.num_variables(), 0.0);
    outside[model.var(0, 0, VarRole::X)] = 2.7;
    outside[model.var(0, 1, VarRole::X)] = -1.0;
    auto completed = primal_heuristic_forward(model, net, outside);
    REQUIRE(completed.has_value());
    CHECK((*completed)[model.var(0, 0, VarRole::X)] == doctest::Approx(2.0));
    CHECK((*completed)[model.var(0, 1, VarRole::X)] == doctest::Approx(0.0));
}

TEST_CASE("solver matches the oracle on random featviz and adversarial instances")
{
    std::mt19937_64 rng(404);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        std::uniform_int_distribution<int> n_in(2, 6), n_hidden(2, 6), n_out(2, 3);
        int h1 = n_hidden(rng), h2 = n_hidden(rng) % 5 + 2;
        Network net = random_network(n_in(rng), {h1, h2}, n_out(rng), 1000 + seed);
        BoundsTable bounds = derive_interval_bounds(net);

        // Feature visualization on the last hidden layer's first unit.
        MilpModel fv = build_featviz_model(net, bounds, 2, 0);
        linearize_indicators(fv);
        OracleResult fv_oracle = brute_force_optimum(fv);
        MilpResult fv_res = solve_milp(fv);
        REQUIRE(fv_oracle.found);
        REQUIRE(fv_res.status == MilpStatus::ProvenOptimal);
        CHECK(fv_res.objective == doctest::Approx(fv_oracle.objective).epsilon(1e-6));

        // Adversarial with the rotated target.
        AdversarialSpec spec;
        spec.reference_input = random_box_point(net, rng);
        spec.true_label = classify(net, spec.reference_input).first;
        spec.target = target_label(spec.true_label, net.output_dim());
        MilpModel adv = build_adversarial_model(net, bounds, spec);
        linearize_indicators(adv);
        OracleResult adv_oracle = brute_force_optimum(adv);
        MilpResult adv_res = solve_milp(adv);
        if (adv_oracle.found) {
            REQUIRE(adv_res.status == MilpStatus::ProvenOptimal);
            CHECK(adv_res.objective ==
                  doctest::Approx(adv_oracle.objective).epsilon(1e-6));
            ++checked;
        } else {
            CHECK(adv_res.status == MilpStatus::Infeasible);
        }
    }
    CHECK(checked > 5);
}

TEST_CASE("child relaxation bounds never beat the parent's")
{
    Network net = random_network(4, {5, 4}, 2, 77);
    MilpModel model = featviz_linearized(net, 3, 0);

    LpSolution root_lp = solve_lp(model.base);
    REQUIRE(root_lp.status == LpStatus::Optimal);

    // Branch on the first fractional binary and resolve both children.
    int frac = -1;
    for (int z : model.binaries)
        if (std::fabs(root_lp.values[z] - std::round(root_lp.values[z])) > 1e-6) {
            frac = z;
            break;
        }
    REQUIRE(frac >= 0);

    BranchNode root;
    auto [down, up] = branch(root, model, frac);
    for (const BranchNode* child : {&down, &up}) {
        LinearProgram lp = model.base;
        for (const BoundOverride& o : child->overrides)
            lp.set_variable_bounds(o.var, o.lb, o.ub);
        LpSolution sol = solve_lp(lp);
        if (sol.status == LpStatus::Optimal)
            CHECK(sol.objective <= root_lp.objective + 1e-9);
    }
}

TEST_CASE("incumbents are feasible and forward-consistent")
{
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Network net = random_network(3, {4, 4}, 2, 300 + seed);
        MilpModel model = featviz_linearized(net, 3, 1);
        MilpResult res = solve_milp(model);
        REQUIRE(res.status == MilpStatus::ProvenOptimal);
        REQUIRE(res.has_incumbent());

        CHECK(check_milp_point(model, *res.incumbent, 1e-6).feasible);

        std::vector<double> x0(net.input_dim);
        for (int j = 0; j < net.input_dim; ++j)
            x0[j] = (*res.incumbent)[model.var(0, j, VarRole::X)];
        LayerActivations acts = forward_eval(net, x0);
        for (int k = 1; k <= net.num_layers(); ++k)
            for (int j = 0; j < net.layer_output_size(k); ++j)
                CHECK((*res.incumbent)[model.var(k, j, VarRole::X)] ==
                      doctest::Approx(acts.outputs[k][j]).epsilon(1e-6));
    }
}

TEST_CASE("identical model and config give identical runs")
{
    Network net = random_network(4, {5, 4}, 3, 909);
    MilpModel model = featviz_linearized(net, 3, 2);
    MilpResult a = solve_milp(model);
    MilpResult b = solve_milp(model);
    CHECK(a.stats.nodes == b.stats.nodes);
    CHECK(a.objective == b.objective);
    CHECK(a.status == b.status);
}

TEST_CASE("solve_milp insists on a linearized model")
{
    Network net = tiny_2_2_1();
    MilpModel model = build_featviz_model(net, derive_interval_bounds(net), 2, 0);
    CHECK_THROWS_AS(solve_milp(model), std::invalid_argument);
}

TEST_CASE("node limit reports the partial result")
{
    Network net = random_network(5, {6, 5}, 2, 5150);
    MilpModel model = featviz_linearized(net, 3, 0);
    SolverConfig config;
    config.node_limit = 1;
    MilpResult res = solve_milp(model, config);
    CHECK((res.status == MilpStatus::NodeLimit ||
           res.status == MilpStatus::ProvenOptimal));
    CHECK(res.stats.nodes <= 2);
}

TEST_CASE("solver handles pooling layers end to end")
{
    // 3 inputs -> 3 ReLU -> MaxPool{0,1}, AvgPool-style second group via a
    // singleton, then a linear readout.
    Network net;
    net.input_dim = 3;
    net.input_lb = {0, 0, 0};
    net.input_ub = {1, 1, 1};
    net.layers.push_back(Layer::dense({{1, -1, 0}, {-1, 1, 0}, {0, 0, 1}},
                                      {0, 0, -0.25}, Activation::ReLU));
    net.layers.push_back(Layer::max_pool({{0, 1}, {2}}));
    net.layers.push_back(Layer::dense({{1.0, 2.0}}, {0.0}, Activation::Linear));

    MilpModel model = featviz_linearized(net, 3, 0);
    OracleResult oracle = brute_force_optimum(model);
    MilpResult res = solve_milp(model, SolverConfig{});
    REQUIRE(oracle.found);
    REQUIRE(res.status == MilpStatus::ProvenOptimal);
    CHECK(res.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
    // max(|a-b|) + 2 * max(0, c - 0.25) over the unit box
    CHECK(res.objective == doctest::Approx(2.5));

    // The incumbent's trajectory must still be the forward trajectory.
    std::vector<double> x0(3);
    for (int j = 0; j < 3; ++j)
        x0[j] = (*res.incumbent)[model.var(0, j, VarRole::X)];
    LayerActivations acts = forward_eval(net, x0);
    CHECK((*res.incumbent)[model.var(3, 0, VarRole::X)] ==
          doctest::Approx(acts.outputs[3][0]).epsilon(1e-6));
}

TEST_CASE("solver agrees with the oracle on an AvgPool network")
{
    Network net;
    net.input_dim = 2;
    net.input_lb = {0, 0};
    net.input_ub = {1, 1};
    net.layers.push_back(Layer::dense({{1, -1}, {-1, 1}, {1, 1}}, {0, 0, -0.5},
                                      Activation::ReLU));
    net.layers.push_back(Layer::avg_pool({{0, 1, 2}}));
    net.layers.push_back(Layer::dense({{-3.0}}, {1.0}, Activation::Linear));

    MilpModel model = featviz_linearized(net, 3, 0);
    OracleResult oracle = brute_force_optimum(model);
    MilpResult res = solve_milp(model, SolverConfig{});
    REQUIRE(oracle.found);
    REQUIRE(res.status == MilpStatus::ProvenOptimal);
    CHECK(res.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
    CHECK(res.objective == doctest::Approx(1.0));  // pool of zeros at a = b = 0
}

TEST_CASE("MaxPool directly over signed inputs keeps exact semantics")
{
    Network net;
    net.input_dim = 2;
    net.input_lb = {-1, -1};
    net.input_ub = {1, 1};
    net.layers.push_back(Layer::max_pool({{0, 1}}));
    net.layers.push_back(Layer::dense({{-1.0}}, {0.0}, Activation::Linear));

    // minimize max(a, b) happens through maximizing -max(a, b)
    MilpModel model = featviz_linearized(net, 2, 0);
    OracleResult oracle = brute_force_optimum(model);
    MilpResult res = solve_milp(model, SolverConfig{});
    REQUIRE(oracle.found);
    REQUIRE(res.status == MilpStatus::ProvenOptimal);
    CHECK(res.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
    CHECK(res.objective == doctest::Approx(1.0));  // max(-1,-1) = -1, negated
}
