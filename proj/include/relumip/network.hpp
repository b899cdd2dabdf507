#pragma once

#include <string>
#include <vector>

namespace relumip {

enum class LayerKind { Dense, AvgPool, MaxPool };
enum class Activation { ReLU, Linear };

/// One layer of a feed-forward network. Dense layers own a weight matrix
/// (row-major, one row per output unit) and a bias vector; pooling layers
/// own one group of input indices per output unit.
struct Layer {
    LayerKind kind = LayerKind::Dense;

    // Dense
    std::vector<std::vector<double>> weights;  // [out][in]
    std::vector<double> bias;
    Activation activation = Activation::ReLU;

    // AvgPool / MaxPool
    std::vector<std::vector<int>> groups;  // [out] -> indices into previous layer

    int output_size() const
    {
        return kind == LayerKind::Dense ? static_cast<int>(weights.size())
                                        : static_cast<int>(groups.size());
    }

    static Layer dense(std::vector<std::vector<double>> w, std::vector<double> b,
                       Activation act);
    static Layer avg_pool(std::vector<std::vector<int>> groups);
    static Layer max_pool(std::vector<std::vector<int>> groups);
};

/// A trained feed-forward network together with the box the inputs live in.
/// Immutable after construction; safe to share across threads.
struct Network {
    int input_dim = 0;
    std::vector<double> input_lb;  // per-input lower bounds
    std::vector<double> input_ub;  // per-input upper bounds
    std::vector<Layer> layers;

    int num_layers() const { return static_cast<int>(layers.size()); }
    int output_dim() const { return layers.empty() ? 0 : layers.back().output_size(); }

    /// Output width of layer k, with layer 0 meaning the input itself.
    int layer_output_size(int k) const
    {
        return k == 0 ? input_dim : layers[k - 1].output_size();
    }

    /// Compact shape string ("2|d2r|d1l"); used as a fingerprint when
    /// persisting per-network data such as bounds tables.
    std::string shape_fingerprint() const;
};

struct ValidationFinding {
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;
    bool ok() const { return findings.empty(); }
};

/// Activations of every layer for one input, plus the pre-activation values
/// of dense layers (used for the s variables of the MILP encoding).
struct LayerActivations {
    std::vector<std::vector<double>> outputs;  // outputs[0] = x0, outputs[k] = layer k
    std::vector<std::vector<double>> pre;      // pre[k-1] = w*y+b for dense layer k, empty for pools
};

/// Structural checks: dimension chaining, finite entries, ordered input box,
/// nonempty in-range pool groups, linear last layer.
ValidationReport validate_network(const Network& net);

/// Exact forward semantics. Inputs outside the box are evaluated as-is so
/// that solver outputs can be verified without clamping.
LayerActivations forward_eval(const Network& net, const std::vector<double>& x0);

/// Argmax of the output layer; ties broken toward the lowest index.
std::pair<int, std::vector<double>> classify(const Network& net,
                                             const std::vector<double>& x0);

}  // namespace relumip
