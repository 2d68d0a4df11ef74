#include "mmbc/mdn.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "mmbc/datasets.hpp"

namespace mmbc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

NoiseSpec noise_from_name(const std::string& name) {
    NoiseSpec spec;
    if (name == "diagonal") {
        spec.kind = NoiseModel::Diagonal;
    } else if (name == "isotropic") {
        spec.kind = NoiseModel::Isotropic;
    } else if (name == "isotropic_across_clusters") {
        spec.kind = NoiseModel::IsotropicAcrossClusters;
    } else if (name == "laplace_diagonal") {
        spec.kind = NoiseModel::LaplaceDiagonal;
    } else if (name.rfind("fixed_", 0) == 0) {
        spec.kind = NoiseModel::Fixed;
        spec.fixed_level = std::strtod(name.c_str() + 6, nullptr);
        if (!(spec.fixed_level > 0.0)) throw std::invalid_argument("bad fixed noise level: " + name);
    } else {
        throw std::invalid_argument("unknown noise model: " + name);
    }
    return spec;
}

std::string noise_name(const NoiseSpec& spec) {
    switch (spec.kind) {
        case NoiseModel::Diagonal: return "diagonal";
        case NoiseModel::Isotropic: return "isotropic";
        case NoiseModel::IsotropicAcrossClusters: return "isotropic_across_clusters";
        case NoiseModel::LaplaceDiagonal: return "laplace_diagonal";
        case NoiseModel::Fixed: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "fixed_%g", spec.fixed_level);
            return buf;
        }
    }
    return "?";
}

int scale_param_count(const NoiseSpec& spec, int components, int target_dim) {
    switch (spec.kind) {
        case NoiseModel::Diagonal:
        case NoiseModel::LaplaceDiagonal: return components * target_dim;
        case NoiseModel::Isotropic: return components;
        case NoiseModel::IsotropicAcrossClusters: return 1;
        case NoiseModel::Fixed: return 0;
    }
    return 0;
}

int mdn_output_dim(const MdnGenerator& gen) {
    return gen.components * (1 + gen.target_dim) +
           scale_param_count(gen.noise, gen.components, gen.target_dim);
}

MdnGenerator make_mdn(int cond_dim, int latent_dim, int target_dim, int components,
                      const std::vector<int>& hidden_dims, const NoiseSpec& noise, SeededRng& rng,
                      Activation activation) {
    if (components < 1) throw std::invalid_argument("make_mdn: components must be >= 1");
    MdnGenerator gen;
    gen.cond_dim = cond_dim;
    gen.latent_dim = latent_dim;
    gen.target_dim = target_dim;
    gen.components = components;
    gen.noise = noise;
    std::vector<int> dims;
    dims.push_back(cond_dim + latent_dim);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(mdn_output_dim(gen));
    gen.net = init_net(dims, activation, rng);
    // Start near latent-neutral: the mixture head already carries the
    // multimodality, and the NLL optimum is latent-independent. Full-scale
    // latent columns leave the mixture parameters varying with z for longer
    // than the fixed training budget can repair.
    Matrix& w0 = gen.net.weights[0];
    for (int r = 0; r < w0.rows; ++r)
        for (int c = cond_dim; c < cond_dim + latent_dim; ++c) w0(r, c) *= 0.1;
    // Spread the mean-head biases so components start distinct; symmetric
    // tasks otherwise trap every mean in the shared center.
    auto& head_bias = gen.net.biases.back();
    for (int i = 0; i < components; ++i)
        for (int d = 0; d < target_dim; ++d)
            head_bias[components + i * target_dim + d] = rng.uniform(-1.0, 1.0);
    return gen;
}

MdnEval mdn_eval_raw(const MdnGenerator& gen, const double* raw) {
    const int I = gen.components, dx = gen.target_dim;
    MdnEval ev;
    ev.raw.assign(raw, raw + mdn_output_dim(gen));

    // pi = softmax(logits / tau)
    ev.log_pi.resize(I);
    double mx = -1e300;
    for (int i = 0; i < I; ++i) {
        ev.log_pi[i] = raw[i] / gen.temperature;
        mx = std::max(mx, ev.log_pi[i]);
    }
    double sum = 0.0;
    for (int i = 0; i < I; ++i) sum += std::exp(ev.log_pi[i] - mx);
    const double lse = mx + std::log(sum);
    ev.params.weights.resize(I);
    for (int i = 0; i < I; ++i) {
        ev.log_pi[i] -= lse;
        ev.params.weights[i] = std::exp(ev.log_pi[i]);
    }

    ev.params.means = Matrix(I, dx);
    for (int i = 0; i < I; ++i)
        for (int d = 0; d < dx; ++d) ev.params.means(i, d) = raw[I + i * dx + d];

    ev.params.scales = Matrix(I, dx);
    const double* raw_s = raw + I + I * dx;
    switch (gen.noise.kind) {
        case NoiseModel::Diagonal:
        case NoiseModel::LaplaceDiagonal:
            for (int i = 0; i < I; ++i)
                for (int d = 0; d < dx; ++d)
                    ev.params.scales(i, d) = softplus(raw_s[i * dx + d]) + kScaleFloor;
            break;
        case NoiseModel::Isotropic:
            for (int i = 0; i < I; ++i) {
                const double s = softplus(raw_s[i]) + kScaleFloor;
                for (int d = 0; d < dx; ++d) ev.params.scales(i, d) = s;
            }
            break;
        case NoiseModel::IsotropicAcrossClusters: {
            const double s = softplus(raw_s[0]) + kScaleFloor;
            for (double& v : ev.params.scales.data) v = s;
            break;
        }
        case NoiseModel::Fixed:
            for (double& v : ev.params.scales.data) v = gen.noise.fixed_level;
            break;
    }
    return ev;
}

MdnEval mdn_eval(const MdnGenerator& gen, const std::vector<double>& condition,
                 const std::vector<double>& latent) {
    if (static_cast<int>(condition.size()) != gen.cond_dim ||
        static_cast<int>(latent.size()) != gen.latent_dim)
        throw std::invalid_argument("mdn_eval: condition/latent dimension mismatch");
    std::vector<double> in;
    in.reserve(condition.size() + latent.size());
    in.insert(in.end(), condition.begin(), condition.end());
    in.insert(in.end(), latent.begin(), latent.end());
    const std::vector<double> raw = forward(gen.net, in);
    return mdn_eval_raw(gen, raw.data());
}

GmmParams mdn_forward(const MdnGenerator& gen, const std::vector<double>& condition,
                      const std::vector<double>& latent) {
    return mdn_eval(gen, condition, latent).params;
}

std::vector<double> gmm_sample(const GmmParams& params, const NoiseSpec& noise, SeededRng& rng) {
    const int I = static_cast<int>(params.weights.size());
    const int dx = params.means.cols;
    const double u = rng.uniform01();
    int k = I - 1;
    double acc = 0.0;
    for (int i = 0; i < I; ++i) {
        acc += params.weights[i];
        if (u < acc) {
            k = i;
            break;
        }
    }
    std::vector<double> x(dx);
    const bool laplace = noise.kind == NoiseModel::LaplaceDiagonal;
    for (int d = 0; d < dx; ++d) {
        const double n = laplace ? rng.laplace() : rng.normal();
        x[d] = params.means(k, d) + params.scales(k, d) * n;
    }
    return x;
}

namespace {

double component_log_density(const GmmParams& params, const std::vector<double>& x, int i,
                             bool laplace) {
    const int dx = params.means.cols;
    double lf = 0.0;
    for (int d = 0; d < dx; ++d) {
        const double s = params.scales(i, d);
        const double z = x[d] - params.means(i, d);
        if (laplace)
            lf += -std::log(2.0 * s) - std::abs(z) / s;
        else
            lf += -0.5 * kLog2Pi - std::log(s) - 0.5 * (z / s) * (z / s);
    }
    return lf;
}

}  // namespace

double gmm_nll(const GmmParams& params, const std::vector<double>& x, const NoiseSpec& noise) {
    const int I = static_cast<int>(params.weights.size());
    const bool laplace = noise.kind == NoiseModel::LaplaceDiagonal;
    double mx = -1e300;
    std::vector<double> a(I);
    for (int i = 0; i < I; ++i) {
        a[i] = std::log(params.weights[i]) + component_log_density(params, x, i, laplace);
        mx = std::max(mx, a[i]);
    }
    double sum = 0.0;
    for (int i = 0; i < I; ++i) sum += std::exp(a[i] - mx);
    return -(mx + std::log(sum));
}

double gmm_nll_backward(const MdnGenerator& gen, const MdnEval& eval, const std::vector<double>& x,
                        double* d_raw) {
    const int I = gen.components, dx = gen.target_dim;
    const bool laplace = gen.noise.kind == NoiseModel::LaplaceDiagonal;
    const GmmParams& p = eval.params;

    std::vector<double> a(I);
    double mx = -1e300;
    for (int i = 0; i < I; ++i) {
        a[i] = eval.log_pi[i] + component_log_density(p, x, i, laplace);
        mx = std::max(mx, a[i]);
    }
    double sum = 0.0;
    for (int i = 0; i < I; ++i) sum += std::exp(a[i] - mx);
    const double log_lik = mx + std::log(sum);

    // responsibilities
    std::vector<double> r(I);
    for (int i = 0; i < I; ++i) r[i] = std::exp(a[i] - log_lik);

    // d nll / d logit_j = (pi_j - r_j) / tau
    for (int j = 0; j < I; ++j) d_raw[j] += (p.weights[j] - r[j]) / gen.temperature;

    double* d_mean = d_raw + I;
    double* d_scale_raw = d_raw + I + I * dx;
    const double* raw_s = eval.raw.data() + I + I * dx;

    for (int i = 0; i < I; ++i) {
        for (int d = 0; d < dx; ++d) {
            const double s = p.scales(i, d);
            const double z = x[d] - p.means(i, d);
            double dlf_dmu, dlf_ds;
            if (laplace) {
                dlf_dmu = sign(z) / s;
                dlf_ds = -1.0 / s + std::abs(z) / (s * s);
            } else {
                dlf_dmu = z / (s * s);
                dlf_ds = -1.0 / s + z * z / (s * s * s);
            }
            d_mean[i * dx + d] += -r[i] * dlf_dmu;
            const double d_s = -r[i] * dlf_ds;
            switch (gen.noise.kind) {
                case NoiseModel::Diagonal:
                case NoiseModel::LaplaceDiagonal:
                    d_scale_raw[i * dx + d] += d_s * sigmoid(raw_s[i * dx + d]);
                    break;
                case NoiseModel::Isotropic:
                    d_scale_raw[i] += d_s * sigmoid(raw_s[i]);
                    break;
                case NoiseModel::IsotropicAcrossClusters:
                    d_scale_raw[0] += d_s * sigmoid(raw_s[0]);
                    break;
                case NoiseModel::Fixed: break;
            }
        }
    }
    return -log_lik;
}

ReparamDraw gmm_reparam_sample(const MdnGenerator& gen, const MdnEval& eval, SeededRng& rng) {
    const GmmParams& p = eval.params;
    const int I = gen.components, dx = gen.target_dim;
    ReparamDraw draw;
    const double u = rng.uniform01();
    draw.component = I - 1;
    double acc = 0.0;
    for (int i = 0; i < I; ++i) {
        acc += p.weights[i];
        if (u < acc) {
            draw.component = i;
            break;
        }
    }
    const bool laplace = gen.noise.kind == NoiseModel::LaplaceDiagonal;
    draw.unit_noise.resize(dx);
    draw.value.resize(dx);
    for (int d = 0; d < dx; ++d) {
        draw.unit_noise[d] = laplace ? rng.laplace() : rng.normal();
        draw.value[d] = p.means(draw.component, d) + p.scales(draw.component, d) * draw.unit_noise[d];
    }
    return draw;
}

void gmm_reparam_backward(const MdnGenerator& gen, const MdnEval& eval, const ReparamDraw& draw,
                          const double* d_value, double* d_raw) {
    const int I = gen.components, dx = gen.target_dim;
    const int k = draw.component;
    double* d_mean = d_raw + I;
    double* d_scale_raw = d_raw + I + I * dx;
    const double* raw_s = eval.raw.data() + I + I * dx;

    for (int d = 0; d < dx; ++d) {
        d_mean[k * dx + d] += d_value[d];
        const double d_s = d_value[d] * draw.unit_noise[d];
        switch (gen.noise.kind) {
            case NoiseModel::Diagonal:
            case NoiseModel::LaplaceDiagonal:
                d_scale_raw[k * dx + d] += d_s * sigmoid(raw_s[k * dx + d]);
                break;
            case NoiseModel::Isotropic:
                d_scale_raw[k] += d_s * sigmoid(raw_s[k]);
                break;
            case NoiseModel::IsotropicAcrossClusters:
                d_scale_raw[0] += d_s * sigmoid(raw_s[0]);
                break;
            case NoiseModel::Fixed: break;
        }
    }
}

double mdn_loss_standalone(const MdnGenerator& gen, const std::vector<Sample>& batch, SeededRng& rng) {
    if (batch.empty()) throw std::invalid_argument("mdn_loss_standalone: empty batch");
    double total = 0.0;
    std::vector<double> z(gen.latent_dim);
    for (const auto& s : batch) {
        for (double& v : z) v = rng.normal();
        const MdnEval ev = mdn_eval(gen, s.condition, z);
        total += gmm_nll(ev.params, s.target, gen.noise);
    }
    return total / static_cast<double>(batch.size());
}

}  // namespace mmbc
