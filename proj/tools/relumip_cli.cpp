// Batch CLI: encode trained ReLU networks as 0-1 MILPs and solve them for
// forward checks, bound tightening, feature visualization, adversarial
// examples, and basic-vs-improved benchmark comparisons.
//
// Exit codes: 0 success, 1 solver hit a limit without a feasible result,
// 2 usage or input-format errors.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "relumip/bench.hpp"
#include "relumip/bound_tightening.hpp"
#include "relumip/io.hpp"
#include "relumip/oracle.hpp"

using namespace relumip;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoResult = 1;
constexpr int kExitUsage = 2;

struct UnitRef {
    int layer = 0;
    int unit = 0;
};

UnitRef parse_unit(const std::string& text)
{
    auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--unit", "expected k,j (0-based unit index)");
    UnitRef ref;
    ref.layer = std::stoi(text.substr(0, comma));
    ref.unit = std::stoi(text.substr(comma + 1));
    return ref;
}

BoundsTable bounds_for(const Network& net, const std::string& bounds_path)
{
    if (bounds_path.empty())
        return derive_interval_bounds(net);
    return load_bounds(bounds_path, net);
}

int cmd_forward(const std::string& net_path, const std::string& input_path)
{
    Network net = load_network(net_path);
    GrayImage input = read_input_vector(input_path);
    LayerActivations acts = forward_eval(net, input.values);
    for (size_t k = 0; k < acts.outputs.size(); ++k) {
        std::cout << "layer " << k << ":";
        for (double v : acts.outputs[k])
            std::cout << ' ' << v;
        std::cout << "\n";
    }
    if (net.output_dim() >= 2)
        std::cout << "label " << classify(net, input.values).first << "\n";
    return kExitOk;
}

int cmd_tighten(const std::string& net_path, const std::string& out_path,
                double time_limit, bool lp_only)
{
    Network net = load_network(net_path);
    TightenConfig config;
    config.per_bound_time_limit_s = time_limit;
    config.use_milp = !lp_only;
    BoundsTable table = tighten_bounds(net, config);
    save_bounds(table, net, out_path);

    TableComparison cmp = compare_tables(derive_interval_bounds(net), table);
    std::cout << "tightened " << cmp.deltas.size() << " units, max improvement "
              << cmp.max_tightening << "\n";
    std::cout << "bounds written to " << out_path << "\n";
    return kExitOk;
}

int cmd_featviz(const std::string& net_path, const std::string& unit_text,
                const std::string& bounds_path, const std::string& out_path,
                double time_limit, int width, int height)
{
    Network net = load_network(net_path);
    UnitRef unit = parse_unit(unit_text);
    BoundsTable bounds = bounds_for(net, bounds_path);

    MilpModel model = build_featviz_model(net, bounds, unit.layer, unit.unit);
    linearize_indicators(model);
    SolverConfig config;
    config.time_limit_s = time_limit;
    MilpResult res = solve_milp(model, config);

    write_report(res, config, std::nullopt, out_path + ".report");
    if (!res.has_incumbent()) {
        std::cout << "no feasible input found (" << to_string(res.status) << ")\n";
        return kExitNoResult;
    }

    std::vector<double> image(net.input_dim);
    for (int j = 0; j < net.input_dim; ++j)
        image[j] = (*res.incumbent)[model.var(0, j, VarRole::X)];
    if (width <= 0) {
        width = net.input_dim;
        height = 1;
    } else if (height <= 0 && net.input_dim % width == 0) {
        height = net.input_dim / width;
    }
    write_image(image, width, height, out_path);
    std::cout << "activation " << res.objective << " (" << to_string(res.status)
              << ", " << res.stats.nodes << " nodes, " << res.stats.wall_time_s
              << " s)\n";
    std::cout << "input written to " << out_path << "\n";
    return kExitOk;
}

int cmd_adversarial(const std::string& net_path, const std::string& input_path,
                    int true_label, double margin, double cap,
                    const std::string& bounds_path, const std::string& out_dir,
                    double time_limit)
{
    Network net = load_network(net_path);
    GrayImage input = read_input_vector(input_path);
    BoundsTable bounds = bounds_for(net, bounds_path);

    AdversarialSpec spec;
    spec.reference_input = input.values;
    spec.true_label = true_label;
    spec.target = target_label(true_label, net.output_dim());
    spec.margin_factor = margin;
    if (cap > 0)
        spec.pixel_cap = cap;

    int classified = classify(net, input.values).first;
    if (classified != true_label)
        std::cerr << "note: the network classifies the reference as " << classified
                  << ", not " << true_label << "\n";

    MilpModel model = build_adversarial_model(net, bounds, spec);
    linearize_indicators(model);
    SolverConfig config;
    config.time_limit_s = time_limit;
    MilpResult res = solve_milp(model, config);

    std::filesystem::create_directories(out_dir);
    auto in_dir = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };

    if (!res.has_incumbent()) {
        write_report(res, config, std::nullopt, in_dir("report.txt"));
        std::cout << "status " << to_string(res.status) << ", no adversarial input\n";
        return res.status == MilpStatus::Infeasible ? kExitOk : kExitNoResult;
    }

    std::vector<double> x0(net.input_dim);
    for (int j = 0; j < net.input_dim; ++j)
        x0[j] = (*res.incumbent)[model.var(0, j, VarRole::X)];

    ReportAdversarialMeta meta{spec, verify_adversarial(net, x0, spec)};
    write_report(res, config, meta, in_dir("report.txt"));

    int w = input.width, h = input.height;
    write_image(x0, w, h, in_dir("adversarial.pgm"));
    write_image(render_perturbation(x0, spec.reference_input).rendering, w, h,
                in_dir("perturbation.pgm"));

    std::cout << "status " << to_string(res.status) << ", L1 distance "
              << res.objective << ", target " << spec.target << ", achieved "
              << meta.verification.achieved_label << ", margin "
              << (meta.verification.margin_ok ? "ok" : "VIOLATED") << "\n";
    std::cout << "outputs written to " << out_dir << "\n";
    return kExitOk;
}

int cmd_bench(const std::string& net_path, int instances, std::uint64_t seed,
              double time_limit)
{
    Network net = load_network(net_path);
    BoundsTable interval = derive_interval_bounds(net);

    std::cout << "tightening bounds (per-bound limit " << time_limit << " s)...\n";
    TightenConfig tconfig;
    tconfig.per_bound_time_limit_s = time_limit;
    BoundsTable tightened = tighten_bounds(net, tconfig);

    BenchConfig config;
    config.instances = instances;
    config.seed = seed;
    config.time_limit_s = time_limit;
    BenchReport report = run_bench(net, interval, tightened, config);
    std::cout << format_bench_table(report);
    return kExitOk;
}

int cmd_oracle(const std::string& net_path, const std::string& objective)
{
    Network net = load_network(net_path);
    auto colon = objective.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--objective", "expected x:k,j or s:k,j");
    std::string role = objective.substr(0, colon);
    UnitRef unit = parse_unit(objective.substr(colon + 1));

    MilpModel model = encode_network(net, derive_interval_bounds(net));
    VarRole var_role;
    if (role == "x")
        var_role = VarRole::X;
    else if (role == "s")
        var_role = VarRole::S;
    else
        throw CLI::ValidationError("--objective", "role must be x or s");
    model.base.set_objective_coeff(model.var(unit.layer, unit.unit, var_role), 1.0);
    model.base.set_sense(ObjSense::Maximize);

    OracleResult res = brute_force_optimum(model);
    if (!res.found) {
        std::cout << "no feasible activation pattern\n";
        return kExitNoResult;
    }
    std::cout << "optimum " << res.objective << " over " << res.patterns_tried
              << " patterns\n";
    std::cout << "pattern";
    for (int z : res.pattern)
        std::cout << ' ' << z;
    std::cout << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"0-1 MILP toolkit for trained ReLU networks"};
    app.require_subcommand(1);

    std::string net_path, input_path, bounds_path, out_path, unit_text, objective;
    int true_label = 0, instances = 20, width = 0, height = 0;
    double margin = 1.2, cap = 0.0, time_limit = 300.0;
    std::uint64_t seed = 0;
    bool lp_only = false;

    auto* forward = app.add_subcommand("forward", "Evaluate a network on an input");
    forward->add_option("net", net_path, "network file")->required();
    forward->add_option("input", input_path, "input vector or graymap")->required();

    auto* tighten = app.add_subcommand("tighten", "Compute tightened variable bounds");
    tighten->add_option("net", net_path)->required();
    tighten->add_option("--time-limit", time_limit, "seconds per bound solve");
    tighten->add_flag("--lp-only", lp_only, "solve LP relaxations only");
    tighten->add_option("-o,--output", out_path, "bounds file")->required();

    auto* featviz = app.add_subcommand("featviz", "Maximize one unit's activation");
    featviz->add_option("net", net_path)->required();
    featviz->add_option("--unit", unit_text, "unit as k,j (0-based)")->required();
    featviz->add_option("--bounds", bounds_path, "tightened bounds file");
    featviz->add_option("--time-limit", time_limit);
    featviz->add_option("--width", width, "image width for the output");
    featviz->add_option("--height", height, "image height for the output");
    featviz->add_option("-o,--output", out_path, "output image")->required();

    auto* adv = app.add_subcommand("adversarial", "Minimal L1 adversarial example");
    adv->add_option("net", net_path)->required();
    adv->add_option("--input", input_path, "reference input")->required();
    adv->add_option("--true-label", true_label, "0-based true label")->required();
    adv->add_option("--margin", margin, "required activation margin factor");
    adv->add_option("--cap", cap, "per-entry change cap (0 = none)");
    adv->add_option("--bounds", bounds_path, "tightened bounds file");
    adv->add_option("--time-limit", time_limit);
    adv->add_option("-o,--output", out_path, "output directory")->required();

    auto* bench = app.add_subcommand("bench",
                                     "Compare interval vs tightened bounds on "
                                     "random adversarial instances");
    bench->add_option("net", net_path)->required();
    bench->add_option("--instances", instances)->required();
    bench->add_option("--seed", seed);
    bench->add_option("--time-limit", time_limit);

    auto* oracle = app.add_subcommand("oracle", "Brute-force optimum for small nets");
    oracle->add_option("net", net_path)->required();
    oracle->add_option("--objective", objective, "x:k,j or s:k,j to maximize")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (forward->parsed())
            return cmd_forward(net_path, input_path);
        if (tighten->parsed())
            return cmd_tighten(net_path, out_path, time_limit, lp_only);
        if (featviz->parsed())
            return cmd_featviz(net_path, unit_text, bounds_path, out_path, time_limit,
                               width, height);
        if (adv->parsed())
            return cmd_adversarial(net_path, input_path, true_label, margin, cap,
                                   bounds_path, out_path, time_limit);
        if (bench->parsed())
            return cmd_bench(net_path, instances, seed, time_limit);
        if (oracle->parsed())
            return cmd_oracle(net_path, objective);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
