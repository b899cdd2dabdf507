#include "relumip/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace relumip {

Layer Layer::dense(std::vector<std::vector<double>> w, std::vector<double> b,
                   Activation act)
{
    Layer l;
    l.kind = LayerKind::Dense;
    l.weights = std::move(w);
    l.bias = std::move(b);
    l.activation = act;
    return l;
}

Layer Layer::avg_pool(std::vector<std::vector<int>> groups)
{
    Layer l;
    l.kind = LayerKind::AvgPool;
    l.groups = std::move(groups);
    return l;
}

Layer Layer::max_pool(std::vector<std::vector<int>> groups)
{
    Layer l;
    l.kind = LayerKind::MaxPool;
    l.groups = std::move(groups);
    return l;
}

std::string Network::shape_fingerprint() const
{
    std::ostringstream out;
    out << input_dim;
    for (const Layer& l : layers) {
        out << '|';
        switch (l.kind) {
            case LayerKind::Dense:
                out << 'd' << l.output_size()
                    << (l.activation == Activation::ReLU ? 'r' : 'l');
                break;
            case LayerKind::AvgPool:
                out << 'a' << l.output_size();
                break;
            case LayerKind::MaxPool:
                out << 'm' << l.output_size();
                break;
        }
    }
    return out.str();
}

namespace {

void add_finding(ValidationReport& report, const std::string& msg)
{
    report.findings.push_back({msg});
}

std::string unit_name(int layer, int unit)
{
    std::ostringstream out;
    out << "layer " << layer << " unit " << unit;
    return out.str();
}

}  // namespace

ValidationReport validate_network(const Network& net)
{
    ValidationReport report;

    if (net.input_dim <= 0)
        add_finding(report, "input_dim must be positive");
    if (static_cast<int>(net.input_lb.size()) != net.input_dim ||
        static_cast<int>(net.input_ub.size()) != net.input_dim)
        add_finding(report, "input box size does not match input_dim");

    int nbox = std::min(net.input_lb.size(), net.input_ub.size());
    for (int j = 0; j < nbox; ++j) {
        if (!std::isfinite(net.input_lb[j]) || !std::isfinite(net.input_ub[j])) {
            add_finding(report, "input box entry " + std::to_string(j) + " is not finite");
        } else if (net.input_lb[j] > net.input_ub[j]) {
            add_finding(report, "input box entry " + std::to_string(j) +
                                    " has lb > ub");
        }
    }

    if (net.layers.empty()) {
        add_finding(report, "network has no layers");
        return report;
    }

    int prev = net.input_dim;
    for (int k = 1; k <= net.num_layers(); ++k) {
        const Layer& l = net.layers[k - 1];
        if (l.kind == LayerKind::Dense) {
            if (l.weights.size() != l.bias.size())
                add_finding(report, "layer " + std::to_string(k) +
                                        ": weight row count differs from bias length");
            for (int j = 0; j < static_cast<int>(l.weights.size()); ++j) {
                if (static_cast<int>(l.weights[j].size()) != prev)
                    add_finding(report, unit_name(k, j) + ": expects " +
                                            std::to_string(l.weights[j].size()) +
                                            " inputs, previous layer provides " +
                                            std::to_string(prev));
                for (double w : l.weights[j])
                    if (!std::isfinite(w)) {
                        add_finding(report, unit_name(k, j) + ": non-finite weight");
                        break;
                    }
            }
            for (double b : l.bias)
                if (!std::isfinite(b)) {
                    add_finding(report, "layer " + std::to_string(k) + ": non-finite bias");
                    break;
                }
        } else {
            if (l.groups.empty())
                add_finding(report, "layer " + std::to_string(k) + ": pool has no groups");
            for (int j = 0; j < static_cast<int>(l.groups.size()); ++j) {
                if (l.groups[j].empty())
                    add_finding(report, unit_name(k, j) + ": empty pool group");
                for (int idx : l.groups[j])
                    if (idx < 0 || idx >= prev)
                        add_finding(report, unit_name(k, j) + ": pool index " +
                                                std::to_string(idx) + " out of range");
            }
        }
        prev = l.output_size();
    }

    const Layer& last = net.layers.back();
    if (last.kind != LayerKind::Dense || last.activation != Activation::Linear)
        add_finding(report, "last layer must be dense with linear activation");

    return report;
}

LayerActivations forward_eval(const Network& net, const std::vector<double>& x0)
{
    if (static_cast<int>(x0.size()) != net.input_dim)
        throw std::invalid_argument("forward_eval: input has " +
                                    std::to_string(x0.size()) + " entries, expected " +
                                    std::to_string(net.input_dim));
    for (double v : x0)
        if (!std::isfinite(v))
            throw std::invalid_argument("forward_eval: non-finite input entry");

    LayerActivations acts;
    acts.outputs.reserve(net.num_layers() + 1);
    acts.outputs.push_back(x0);
    acts.pre.resize(net.num_layers());

    for (int k = 1; k <= net.num_layers(); ++k) {
        const Layer& l = net.layers[k - 1];
        const std::vector<double>& y = acts.outputs.back();
        std::vector<double> out(l.output_size());

        if (l.kind == LayerKind::Dense) {
            std::vector<double>& pre = acts.pre[k - 1];
            pre.resize(l.output_size());
            for (int j = 0; j < l.output_size(); ++j) {
                if (y.size() != l.weights[j].size())
                    throw std::invalid_argument("forward_eval: dimension mismatch at layer " +
                                                std::to_string(k));
                double v = l.bias[j];
                for (size_t i = 0; i < y.size(); ++i)
                    v += l.weights[j][i] * y[i];
                pre[j] = v;
                out[j] = l.activation == Activation::ReLU ? std::max(0.0, v) : v;
            }
        } else {
            for (int j = 0; j < l.output_size(); ++j) {
                const std::vector<int>& g = l.groups[j];
                if (l.kind == LayerKind::AvgPool) {
                    double sum = 0.0;
                    for (int idx : g)
                        sum += y[idx];
                    out[j] = sum / static_cast<double>(g.size());
                } else {
                    double best = y[g[0]];
                    for (int idx : g)
                        best = std::max(best, y[idx]);
                    out[j] = best;
                }
            }
        }
        acts.outputs.push_back(std::move(out));
    }
    return acts;
}

std::pair<int, std::vector<double>> classify(const Network& net,
                                             const std::vector<double>& x0)
{
    if (net.output_dim() < 2)
        throw std::invalid_argument("classify: output layer must have at least 2 units");
    LayerActivations acts = forward_eval(net, x0);
    const std::vector<double>& scores = acts.outputs.back();
    int label = 0;
    for (int j = 1; j < static_cast<int>(scores.size()); ++j)
        if (scores[j] > scores[label])
            label = j;
    return {label, scores};
}

}  // namespace relumip
