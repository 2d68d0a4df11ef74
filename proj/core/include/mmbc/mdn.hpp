#pragma once

#include <string>
#include <vector>

#include "mmbc/nn.hpp"
#include "mmbc/rng.hpp"

namespace mmbc {

// Noise assumption of the mixture output head.
enum class NoiseModel { Diagonal, Isotropic, IsotropicAcrossClusters, Fixed, LaplaceDiagonal };

struct NoiseSpec {
    NoiseModel kind = NoiseModel::Diagonal;
    double fixed_level = 1e-2;  // standard deviation used by Fixed
};

NoiseSpec noise_from_name(const std::string& name);
std::string noise_name(const NoiseSpec& spec);

constexpr double kScaleFloor = 1e-6;

// Mixture parameters for one condition. Scales are stored expanded to
// components x target_dim for every noise model (shared scalars repeated,
// Fixed holds the constant level) so density and sampling code is uniform.
struct GmmParams {
    std::vector<double> weights;  // simplex over components
    Matrix means;                 // components x target_dim
    Matrix scales;                // components x target_dim, >= kScaleFloor
};

// MDN generator: a DenseNet trunk over (condition ++ latent) whose linear
// output row is split into pi logits, raw means and raw scale parameters.
// pi = softmax(logits / temperature); scales = softplus(raw) + kScaleFloor.
struct MdnGenerator {
    DenseNet net;
    int cond_dim = 1;
    int latent_dim = 2;  // 0 = condition-only input (standalone MDN baseline)
    int target_dim = 1;
    int components = 2;
    NoiseSpec noise;
    double temperature = 1.0;
};

// Number of raw scale parameters emitted by the net head.
int scale_param_count(const NoiseSpec& spec, int components, int target_dim);

// Net output width: components * (1 + target_dim) + scale_param_count.
int mdn_output_dim(const MdnGenerator& gen);

MdnGenerator make_mdn(int cond_dim, int latent_dim, int target_dim, int components,
                      const std::vector<int>& hidden_dims, const NoiseSpec& noise, SeededRng& rng,
                      Activation activation = Activation::ReLU);

// Head transforms evaluated for one raw net output row.
struct MdnEval {
    GmmParams params;
    std::vector<double> raw;
    std::vector<double> log_pi;
};

MdnEval mdn_eval_raw(const MdnGenerator& gen, const double* raw);
MdnEval mdn_eval(const MdnGenerator& gen, const std::vector<double>& condition,
                 const std::vector<double>& latent);

// Mixture parameters for (condition, latent).
GmmParams mdn_forward(const MdnGenerator& gen, const std::vector<double>& condition,
                      const std::vector<double>& latent);

// One draw from the mixture: component from pi, then a Gaussian (Laplace for
// LaplaceDiagonal) draw around its mean.
std::vector<double> gmm_sample(const GmmParams& params, const NoiseSpec& noise, SeededRng& rng);

// Negative log-likelihood of x under the mixture, log-sum-exp stabilized.
double gmm_nll(const GmmParams& params, const std::vector<double>& x, const NoiseSpec& noise);

// NLL plus its gradient with respect to the raw net output row, accumulated
// into d_raw (length mdn_output_dim).
double gmm_nll_backward(const MdnGenerator& gen, const MdnEval& eval, const std::vector<double>& x,
                        double* d_raw);

// Reparameterized draw: component index sampled from pi and held fixed,
// value = mean_k + scale_k * u with u the recorded unit noise. Gradients of
// a loss on `value` reach the mean/scale heads through gmm_reparam_backward;
// the component index and pi take no gradient on this path.
struct ReparamDraw {
    int component = 0;
    std::vector<double> unit_noise;
    std::vector<double> value;
};

ReparamDraw gmm_reparam_sample(const MdnGenerator& gen, const MdnEval& eval, SeededRng& rng);
void gmm_reparam_backward(const MdnGenerator& gen, const MdnEval& eval, const ReparamDraw& draw,
                          const double* d_value, double* d_raw);

// Mean NLL over a batch with a fresh latent per sample; the full training
// loss of the standalone MDN baseline.
struct Sample;
double mdn_loss_standalone(const MdnGenerator& gen, const std::vector<Sample>& batch, SeededRng& rng);

}  // namespace mmbc
