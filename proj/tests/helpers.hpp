#pragma once

#include <random>
#include <vector>

#include "relumip/network.hpp"

namespace relumip::testing {

// 2 -> 2 ReLU -> 1 linear, output |a - b| over the box [0, 2]^2.
inline Network tiny_2_2_1()
{
    Network net;
    net.input_dim = 2;
    net.input_lb = {0.0, 0.0};
    net.input_ub = {2.0, 2.0};
    net.layers.push_back(
        Layer::dense({{1.0, -1.0}, {-1.0, 1.0}}, {0.0, 0.0}, Activation::ReLU));
    net.layers.push_back(Layer::dense({{1.0, 1.0}}, {0.0}, Activation::Linear));
    return net;
}

// Same weights over [0, 1]^2: interval propagation sees ub 2 on the output
// unit while the true maximum is 1, so tightening must improve strictly.
inline Network cancel_2_2_1()
{
    Network net = tiny_2_2_1();
    net.input_ub = {1.0, 1.0};
    return net;
}

// Seeded dense ReLU network with a linear output layer over [0, 1] inputs.
inline Network random_network(int input_dim, const std::vector<int>& hidden,
                              int output_dim, std::uint64_t seed,
                              double weight_scale = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> wdist(-weight_scale, weight_scale);
    std::uniform_real_distribution<double> bdist(-weight_scale / 2, weight_scale / 2);

    Network net;
    net.input_dim = input_dim;
    net.input_lb.assign(input_dim, 0.0);
    net.input_ub.assign(input_dim, 1.0);

    int prev = input_dim;
    auto make_dense = [&](int out, Activation act) {
        std::vector<std::vector<double>> w(out, std::vector<double>(prev));
        std::vector<double> b(out);
        for (int j = 0; j < out; ++j) {
            for (int i = 0; i < prev; ++i)
                w[j][i] = wdist(rng);
            b[j] = bdist(rng);
        }
        net.layers.push_back(Layer::dense(std::move(w), std::move(b), act));
        prev = out;
    };
    for (int h : hidden)
        make_dense(h, Activation::ReLU);
    make_dense(output_dim, Activation::Linear);
    return net;
}

inline std::vector<double> random_box_point(const Network& net, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(net.input_dim);
    for (int j = 0; j < net.input_dim; ++j)
        x[j] = net.input_lb[j] + unit(rng) * (net.input_ub[j] - net.input_lb[j]);
    return x;
}

// Classifier-like benchmark fixture: uniform weights with biases centered so
// every unit's pre-activation has roughly zero mean over the box. Keeps the
// argmax input-dependent (uncentered random nets are dominated by per-unit
// offsets, which makes every reference classify identically and the rotated
// target unreachable). Shipped as data/bench_64_8_8_8_10.relunet.
inline Network bench_fixture(int input_dim = 64,
                             const std::vector<int>& sizes = {8, 8, 8, 10},
                             std::uint64_t seed = 20240, double weight_scale = 0.7)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> wdist(-weight_scale, weight_scale);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Network net;
    net.input_dim = input_dim;
    net.input_lb.assign(input_dim, 0.0);
    net.input_ub.assign(input_dim, 1.0);

    const int n_samples = 2000;
    std::vector<std::vector<double>> samples(n_samples, std::vector<double>(input_dim));
    std::mt19937_64 srng(seed ^ 0x9e3779b97f4a7c15ull);
    for (auto& s : samples)
        for (double& v : s)
            v = unit(srng);

    int prev = input_dim;
    for (size_t li = 0; li < sizes.size(); ++li) {
        int out = sizes[li];
        bool last = li + 1 == sizes.size();
        std::vector<std::vector<double>> w(out, std::vector<double>(prev));
        for (auto& row : w)
            for (double& v : row)
                v = wdist(rng);

        std::vector<double> mean(out, 0.0);
        for (const auto& s : samples) {
            const std::vector<double>* x = &s;
            LayerActivations acts;
            if (!net.layers.empty()) {
                acts = forward_eval(net, s);
                x = &acts.outputs.back();
            }
            for (int j = 0; j < out; ++j) {
                double p = 0.0;
                for (int i = 0; i < prev; ++i)
                    p += w[j][i] * (*x)[i];
                mean[j] += p / n_samples;
            }
        }
        std::vector<double> b(out);
        std::uniform_real_distribution<double> jitter(-0.05 * weight_scale,
                                                      0.05 * weight_scale);
        for (int j = 0; j < out; ++j)
            b[j] = -mean[j] + jitter(rng);
        net.layers.push_back(Layer::dense(std::move(w), std::move(b),
                                          last ? Activation::Linear : Activation::ReLU));
        prev = out;
    }
    return net;
}

}  // namespace relumip::testing
