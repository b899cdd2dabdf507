#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relumip/applications.hpp"
#include "relumip/milp_model.hpp"
#include "relumip/milp_solver.hpp"

namespace relumip {

/// Versioned text format for networks ("relunet 1"): input dimension, input
/// box, then each layer with explicit dimensions, row-major weights and
/// biases, or pool groups. Loaded networks are validated; findings throw.
Network load_network(const std::string& path);
void save_network(const Network& net, const std::string& path);

/// Versioned text format for bounds tables ("relubounds 1") carrying the
/// network shape fingerprint and per-entry provenance tags. Loading against
/// a network with a different fingerprint or input box throws.
void save_bounds(const BoundsTable& table, const Network& net, const std::string& path);
BoundsTable load_bounds(const std::string& path, const Network& net);

/// ASCII portable graymap, maxval 255, value v in [0,1] stored as
/// round(255 * clamp(v)). 1 renders white.
void write_image(const std::vector<double>& values, int width, int height,
                 const std::string& path);

struct GrayImage {
    std::vector<double> values;  // back in [0,1]
    int width = 0;
    int height = 0;
};

GrayImage read_image(const std::string& path);

/// Input vectors for the CLI: either a portable graymap or a plain text list
/// of numbers (whitespace separated).
GrayImage read_input_vector(const std::string& path);

/// Per-solve record: status, objective, bounds, gap, node and time counters,
/// the config echo, the incumbent-improvement log, and (for adversarial
/// runs) the verification outcome.
struct ReportAdversarialMeta {
    AdversarialSpec spec;
    AdvVerification verification;
};

void write_report(const MilpResult& result, const SolverConfig& config,
                  const std::optional<ReportAdversarialMeta>& adversarial,
                  const std::string& path);

}  // namespace relumip
