#include "mmbc/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace mmbc {

namespace {

double activate(double x, Activation a) {
    switch (a) {
        case Activation::ReLU: return x > 0.0 ? x : 0.0;
        case Activation::LeakyReLU: return x > 0.0 ? x : kLeakyReluSlope * x;
        case Activation::Identity: return x;
    }
    return x;
}

double activate_grad(double pre, Activation a) {
    switch (a) {
        case Activation::ReLU: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::LeakyReLU: return pre > 0.0 ? 1.0 : kLeakyReluSlope;
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

void check_dims(const std::vector<int>& dims) {
    if (dims.size() < 2) throw std::invalid_argument("DenseNet needs at least input and output dims");
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("DenseNet layer dims must be >= 1");
}

}  // namespace

void NetGrads::set_zero() {
    for (auto& w : weights) w.set_zero();
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

DenseNet zero_net(const std::vector<int>& layer_dims, Activation activation) {
    check_dims(layer_dims);
    DenseNet net;
    net.layer_dims = layer_dims;
    net.activation = activation;
    for (size_t k = 0; k + 1 < layer_dims.size(); ++k) {
        net.weights.emplace_back(layer_dims[k + 1], layer_dims[k]);
        net.biases.emplace_back(layer_dims[k + 1], 0.0);
    }
    return net;
}

DenseNet init_net(const std::vector<int>& layer_dims, Activation activation, SeededRng& rng) {
    DenseNet net = zero_net(layer_dims, activation);
    for (auto& w : net.weights) {
        const double fan_in = static_cast<double>(w.cols);
        const double s = std::sqrt(1.0 / fan_in);
        for (double& v : w.data) v = rng.uniform(-s, s);
    }
    return net;
}

NetGrads make_grads(const DenseNet& net) {
    NetGrads g;
    for (int k = 0; k < net.layer_count(); ++k) {
        g.weights.emplace_back(net.weights[k].rows, net.weights[k].cols);
        g.biases.emplace_back(net.biases[k].size(), 0.0);
    }
    return g;
}

AdamState make_adam(const DenseNet& net, double learning_rate) {
    AdamState s;
    s.learning_rate = learning_rate;
    s.first_moment.assign(param_count(net), 0.0);
    s.second_moment.assign(param_count(net), 0.0);
    return s;
}

Matrix forward(const DenseNet& net, const Matrix& inputs, ForwardTrace* trace) {
    if (inputs.cols != net.input_dim())
        throw std::invalid_argument("forward: input width does not match net input dim");
    const int layers = net.layer_count();
    if (trace) {
        trace->net = &net;
        trace->activations.resize(layers + 1);
        trace->pre_activations.resize(layers);
        trace->activations[0] = inputs;
    }
    Matrix current = inputs;
    Matrix pre;
    for (int k = 0; k < layers; ++k) {
        matmul_nt(current, net.weights[k], pre);
        const auto& b = net.biases[k];
        for (int i = 0; i < pre.rows; ++i) {
            double* row = pre.row(i);
            for (int j = 0; j < pre.cols; ++j) row[j] += b[j];
        }
        if (trace) trace->pre_activations[k] = pre;
        if (k + 1 < layers) {
            for (double& v : pre.data) v = activate(v, net.activation);
        }
        current = pre;
        if (trace) trace->activations[k + 1] = current;
    }
    return current;
}

std::vector<double> forward(const DenseNet& net, const std::vector<double>& input) {
    Matrix in(1, static_cast<int>(input.size()));
    in.data = input;
    Matrix out = forward(net, in);
    return out.data;
}

Matrix backward(const DenseNet& net, const ForwardTrace& trace, const Matrix& output_grad, NetGrads& grads) {
    const int layers = net.layer_count();
    if (trace.net != &net || static_cast<int>(trace.pre_activations.size()) != layers)
        throw std::invalid_argument("backward: no matching forward trace for this net");
    if (output_grad.rows != trace.activations[0].rows || output_grad.cols != net.output_dim())
        throw std::invalid_argument("backward: output_grad shape mismatch");

    Matrix d_pre = output_grad;
    Matrix d_act;
    for (int k = layers - 1; k >= 0; --k) {
        matmul_tn_accum(d_pre, trace.activations[k], grads.weights[k]);
        auto& gb = grads.biases[k];
        for (int i = 0; i < d_pre.rows; ++i) {
            const double* row = d_pre.row(i);
            for (int j = 0; j < d_pre.cols; ++j) gb[j] += row[j];
        }
        matmul_nn(d_pre, net.weights[k], d_act);
        if (k > 0) {
            const Matrix& pre = trace.pre_activations[k - 1];
            for (size_t i = 0; i < d_act.data.size(); ++i)
                d_act.data[i] *= activate_grad(pre.data[i], net.activation);
        }
        d_pre = d_act;
    }
    return d_pre;
}

void adam_step(DenseNet& net, const NetGrads& grads, AdamState& state) {
    state.step_count += 1;
    const double b1 = state.beta1, b2 = state.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
    size_t idx = 0;
    auto update = [&](double* p, const double* g, size_t n) {
        for (size_t i = 0; i < n; ++i, ++idx) {
            double& m = state.first_moment[idx];
            double& v = state.second_moment[idx];
            m = b1 * m + (1.0 - b1) * g[i];
            v = b2 * v + (1.0 - b2) * g[i] * g[i];
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            p[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    };
    for (int k = 0; k < net.layer_count(); ++k) {
        update(net.weights[k].data.data(), grads.weights[k].data.data(), net.weights[k].data.size());
        update(net.biases[k].data(), grads.biases[k].data(), net.biases[k].size());
    }
}

size_t param_count(const DenseNet& net) {
    size_t n = 0;
    for (int k = 0; k < net.layer_count(); ++k) n += net.weights[k].data.size() + net.biases[k].size();
    return n;
}

std::vector<double> get_params(const DenseNet& net) {
    std::vector<double> flat;
    flat.reserve(param_count(net));
    for (int k = 0; k < net.layer_count(); ++k) {
        flat.insert(flat.end(), net.weights[k].data.begin(), net.weights[k].data.end());
        flat.insert(flat.end(), net.biases[k].begin(), net.biases[k].end());
    }
    return flat;
}

void set_params(DenseNet& net, const std::vector<double>& flat) {
    if (flat.size() != param_count(net)) throw std::invalid_argument("set_params: size mismatch");
    size_t idx = 0;
    for (int k = 0; k < net.layer_count(); ++k) {
        for (double& v : net.weights[k].data) v = flat[idx++];
        for (double& v : net.biases[k]) v = flat[idx++];
    }
}

std::vector<double> get_grads_flat(const NetGrads& grads) {
    std::vector<double> flat;
    for (size_t k = 0; k < grads.weights.size(); ++k) {
        flat.insert(flat.end(), grads.weights[k].data.begin(), grads.weights[k].data.end());
        flat.insert(flat.end(), grads.biases[k].begin(), grads.biases[k].end());
    }
    return flat;
}

}  // namespace mmbc
