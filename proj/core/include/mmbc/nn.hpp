#pragma once

#include <cstdint>
#include <vector>

#include "mmbc/matrix.hpp"
#include "mmbc/rng.hpp"

namespace mmbc {

enum class Activation { ReLU, LeakyReLU, Identity };

constexpr double kLeakyReluSlope = 0.01;

// Fully connected feed-forward network. layer_dims = {input, hidden..., output};
// weights[k] has shape layer_dims[k+1] x layer_dims[k]. The activation is
// applied after every layer except the last (linear head).
struct DenseNet {
    std::vector<int> layer_dims;
    Activation activation = Activation::ReLU;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    int layer_count() const { return static_cast<int>(weights.size()); }
};

// Per-layer activations captured during a forward pass; required by backward.
struct ForwardTrace {
    const DenseNet* net = nullptr;
    std::vector<Matrix> activations;      // activations[0] = input, [k+1] = output of layer k
    std::vector<Matrix> pre_activations;  // pre_activations[k] = affine output of layer k
};

// Gradient buffers mirroring DenseNet parameter shapes.
struct NetGrads {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    void set_zero();
};

struct AdamState {
    int64_t step_count = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<double> first_moment;   // flattened, mirrors parameter order
    std::vector<double> second_moment;
};

DenseNet init_net(const std::vector<int>& layer_dims, Activation activation, SeededRng& rng);
DenseNet zero_net(const std::vector<int>& layer_dims, Activation activation);

NetGrads make_grads(const DenseNet& net);
AdamState make_adam(const DenseNet& net, double learning_rate);

// Batched forward pass; inputs is n x input_dim, result n x output_dim.
// Pass a trace to enable backward(). Reusing the same trace object across
// steps avoids reallocation.
Matrix forward(const DenseNet& net, const Matrix& inputs, ForwardTrace* trace = nullptr);

// Single-vector convenience wrapper.
std::vector<double> forward(const DenseNet& net, const std::vector<double>& input);

// Reverse-mode pass for the scalar loss whose gradient at the network output
// is output_grad (n x output_dim). Accumulates parameter gradients into
// grads and returns the gradient with respect to the inputs.
Matrix backward(const DenseNet& net, const ForwardTrace& trace, const Matrix& output_grad, NetGrads& grads);

// Bias-corrected Adam update, applied in place.
void adam_step(DenseNet& net, const NetGrads& grads, AdamState& state);

// Flat parameter access in a fixed order (layer 0 weights row-major, layer 0
// biases, layer 1 weights, ...). Used by the serializer and by tests.
size_t param_count(const DenseNet& net);
std::vector<double> get_params(const DenseNet& net);
void set_params(DenseNet& net, const std::vector<double>& flat);
std::vector<double> get_grads_flat(const NetGrads& grads);

}  // namespace mmbc
