#pragma once

#include <optional>
#include <vector>

#include "relumip/milp_model.hpp"

namespace relumip {

/// Targeted adversarial instance: the reference input, its true label, the
/// label to force, the required activation margin, and an optional cap on
/// how far any single input entry may move.
struct AdversarialSpec {
    std::vector<double> reference_input;
    int true_label = 0;
    int target = 0;
    double margin_factor = 1.2;
    std::optional<double> pixel_cap;
};

/// The forced wrong label: true + 5 mod 10 for ten classes, and the half
/// rotation (true + floor(C/2)) mod C in general.
int target_label(int true_label, int num_classes);

/// Model maximizing the activation of unit (layer, unit), layer >= 1.
MilpModel build_featviz_model(const Network& net, const BoundsTable& bounds, int layer,
                              int unit);

/// The encoded network plus one distance variable per input (d >= |x - ref|,
/// capped when pixel_cap is set), margin rows forcing the target activation
/// to be margin_factor times every other one, and the objective
/// minimize sum(d).
MilpModel build_adversarial_model(const Network& net, const BoundsTable& bounds,
                                  const AdversarialSpec& spec);

struct AdvVerification {
    int achieved_label = -1;
    std::vector<double> scores;
    bool margin_ok = false;
    double l1_distance = 0.0;
    double linf_distance = 0.0;
    bool cap_ok = true;  // vacuously true without a cap
    bool box_ok = false;
    bool all_ok() const { return margin_ok && cap_ok && box_ok; }
};

/// Forward-evaluate a candidate adversarial input and report whether it
/// actually delivers the margin, respects the box, and honors the cap.
AdvVerification verify_adversarial(const Network& net, const std::vector<double>& x0,
                                   const AdversarialSpec& spec);

struct PerturbationImage {
    std::vector<double> abs_diff;   // |x0 - reference| per entry
    std::vector<double> rendering;  // 1 - |diff|: white means unchanged
};

PerturbationImage render_perturbation(const std::vector<double>& x0,
                                      const std::vector<double>& reference);

}  // namespace relumip
