#include "relumip/applications.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relumip {

int target_label(int true_label, int num_classes)
{
    if (true_label < 0 || true_label >= num_classes)
        throw std::invalid_argument("target_label: label " + std::to_string(true_label) +
                                    " out of range for " + std::to_string(num_classes) +
                                    " classes");
    int shift = num_classes == 10 ? 5 : num_classes / 2;
    return (true_label + shift) % num_classes;
}

MilpModel build_featviz_model(const Network& net, const BoundsTable& bounds, int layer,
                              int unit)
{
    if (layer < 1 || layer > net.num_layers() || unit < 0 ||
        unit >= net.layer_output_size(layer))
        throw std::invalid_argument("build_featviz_model: no unit (" +
                                    std::to_string(layer) + "," + std::to_string(unit) +
                                    ")");
    MilpModel model = encode_network(net, bounds);
    set_objective(model, {{{layer, unit}, 1.0}}, {}, ObjSense::Maximize);
    return model;
}

namespace {

void validate_spec(const Network& net, const AdversarialSpec& spec)
{
    int classes = net.output_dim();
    if (static_cast<int>(spec.reference_input.size()) != net.input_dim)
        throw std::invalid_argument("adversarial: reference input has " +
                                    std::to_string(spec.reference_input.size()) +
                                    " entries, network takes " +
                                    std::to_string(net.input_dim));
    if (spec.true_label < 0 || spec.true_label >= classes || spec.target < 0 ||
        spec.target >= classes)
        throw std::invalid_argument("adversarial: label out of range");
    if (spec.target == spec.true_label)
        throw std::invalid_argument("adversarial: target equals the true label");
    if (!(spec.margin_factor >= 1.0))
        throw std::invalid_argument("adversarial: margin factor must be at least 1");
    if (spec.pixel_cap && !(*spec.pixel_cap > 0.0))
        throw std::invalid_argument("adversarial: pixel cap must be positive");
    for (int j = 0; j < net.input_dim; ++j)
        if (spec.reference_input[j] < net.input_lb[j] - 1e-9 ||
            spec.reference_input[j] > net.input_ub[j] + 1e-9)
            throw std::invalid_argument("adversarial: reference input leaves the box at "
                                        "entry " +
                                        std::to_string(j));
}

}  // namespace

MilpModel build_adversarial_model(const Network& net, const BoundsTable& bounds,
                                  const AdversarialSpec& spec)
{
    validate_spec(net, spec);
    MilpModel model = encode_network(net, bounds);
    int last = net.num_layers();

    for (int j = 0; j < net.input_dim; ++j) {
        double ref = spec.reference_input[j];
        double reach = std::max(net.input_ub[j] - ref, ref - net.input_lb[j]);
        if (spec.pixel_cap)
            reach = std::min(reach, *spec.pixel_cap);
        int d = model.base.add_variable("d0_" + std::to_string(j), 0.0, reach);
        model.register_var(0, j, VarRole::D, d);

        int x = model.var(0, j, VarRole::X);
        model.base.add_row({{x, 1.0}, {d, -1.0}}, -kInfinity, ref);  // x - d <= ref
        model.base.add_row({{x, 1.0}, {d, 1.0}}, ref, kInfinity);    // x + d >= ref
        model.base.set_objective_coeff(d, 1.0);
        model.distance_terms.push_back({d, x, ref});
    }
    model.base.set_sense(ObjSense::Minimize);

    int target_var = model.var(last, spec.target, VarRole::X);
    for (int j = 0; j < net.output_dim(); ++j) {
        if (j == spec.target)
            continue;
        int other = model.var(last, j, VarRole::X);
        model.base.add_row({{target_var, 1.0}, {other, -spec.margin_factor}}, 0.0,
                           kInfinity);
    }
    return model;
}

AdvVerification verify_adversarial(const Network& net, const std::vector<double>& x0,
                                   const AdversarialSpec& spec)
{
    constexpr double kMarginTol = 1e-6;
    constexpr double kCapTol = 1e-9;

    auto [label, scores] = classify(net, x0);
    AdvVerification rep;
    rep.achieved_label = label;
    rep.scores = scores;

    rep.margin_ok = true;
    for (int j = 0; j < static_cast<int>(scores.size()); ++j) {
        if (j == spec.target)
            continue;
        if (scores[spec.target] < spec.margin_factor * scores[j] - kMarginTol)
            rep.margin_ok = false;
    }

    rep.box_ok = true;
    for (int j = 0; j < net.input_dim; ++j) {
        double diff = std::fabs(x0[j] - spec.reference_input[j]);
        rep.l1_distance += diff;
        rep.linf_distance = std::max(rep.linf_distance, diff);
        if (x0[j] < net.input_lb[j] - kCapTol || x0[j] > net.input_ub[j] + kCapTol)
            rep.box_ok = false;
    }
    if (spec.pixel_cap)
        rep.cap_ok = rep.linf_distance <= *spec.pixel_cap + kCapTol;
    return rep;
}

PerturbationImage render_perturbation(const std::vector<double>& x0,
                                      const std::vector<double>& reference)
{
    if (x0.size() != reference.size())
        throw std::invalid_argument("render_perturbation: length mismatch");
    PerturbationImage img;
    img.abs_diff.resize(x0.size());
    img.rendering.resize(x0.size());
    for (size_t j = 0; j < x0.size(); ++j) {
        img.abs_diff[j] = std::fabs(x0[j] - reference[j]);
        img.rendering[j] = 1.0 - img.abs_diff[j];
    }
    return img;
}

}  // namespace relumip
