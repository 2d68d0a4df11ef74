#include "mmbc/energy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mmbc {

EnergyNet make_energy(int cond_dim, int target_dim, const std::vector<int>& hidden_dims,
                      SeededRng& rng, Activation activation) {
    EnergyNet e;
    e.cond_dim = cond_dim;
    e.target_dim = target_dim;
    std::vector<int> dims;
    dims.push_back(cond_dim + target_dim);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(1);
    e.net = init_net(dims, activation, rng);
    return e;
}

double energy(const EnergyNet& e, const std::vector<double>& condition,
              const std::vector<double>& target) {
    if (static_cast<int>(condition.size()) != e.cond_dim ||
        static_cast<int>(target.size()) != e.target_dim)
        throw std::invalid_argument("energy: condition/target dimension mismatch");
    std::vector<double> in;
    in.reserve(condition.size() + target.size());
    in.insert(in.end(), condition.begin(), condition.end());
    in.insert(in.end(), target.begin(), target.end());
    return forward(e.net, in)[0];
}

InfonceMode infonce_mode_from_name(const std::string& name) {
    if (name == "no_generator") return InfonceMode::NoGenerator;
    if (name == "standard") return InfonceMode::StandardInclusion;
    if (name == "equal_ratio") return InfonceMode::EqualRatio;
    if (name == "dynamic_scaling") return InfonceMode::DynamicScaling;
    throw std::invalid_argument("unknown infonce mode: " + name);
}

std::string infonce_mode_name(InfonceMode mode) {
    switch (mode) {
        case InfonceMode::NoGenerator: return "no_generator";
        case InfonceMode::StandardInclusion: return "standard";
        case InfonceMode::EqualRatio: return "equal_ratio";
        case InfonceMode::DynamicScaling: return "dynamic_scaling";
    }
    return "?";
}

double alpha_schedule(int epoch, int total_epochs, double alpha_min) {
    return std::max(1.0 - static_cast<double>(epoch) / static_cast<double>(total_epochs), alpha_min);
}

double infonce_element(const double* energies, int n_neg, int n_gen, double alpha,
                       double* d_energies) {
    const int count = 1 + n_neg + n_gen;
    const double log_alpha = alpha > 0.0 ? std::log(alpha) : 0.0;
    const bool use_gen = alpha > 0.0 && n_gen > 0;

    // scores: s_0 = -E+, s_j = -E_j, s_k = log(alpha) - E_gk
    double mx = -energies[0];
    for (int i = 1; i <= n_neg; ++i) mx = std::max(mx, -energies[i]);
    if (use_gen)
        for (int i = 1 + n_neg; i < count; ++i) mx = std::max(mx, log_alpha - energies[i]);

    double sum = std::exp(-energies[0] - mx);
    for (int i = 1; i <= n_neg; ++i) sum += std::exp(-energies[i] - mx);
    if (use_gen)
        for (int i = 1 + n_neg; i < count; ++i) sum += std::exp(log_alpha - energies[i] - mx);
    const double lse = mx + std::log(sum);
    const double loss = energies[0] + lse;

    if (d_energies) {
        d_energies[0] = 1.0 - std::exp(-energies[0] - lse);
        for (int i = 1; i <= n_neg; ++i) d_energies[i] = -std::exp(-energies[i] - lse);
        for (int i = 1 + n_neg; i < count; ++i)
            d_energies[i] = use_gen ? -std::exp(log_alpha - energies[i] - lse) : 0.0;
    }
    return loss;
}

double infonce_loss(const EnergyNet& e, const std::vector<double>& condition,
                    const std::vector<double>& x_pos,
                    const std::vector<std::vector<double>>& negatives,
                    const std::vector<std::vector<double>>& gen_samples, double alpha) {
    if (x_pos.empty()) throw std::invalid_argument("infonce_loss: positive sample required");
    std::vector<double> energies;
    energies.reserve(1 + negatives.size() + gen_samples.size());
    energies.push_back(energy(e, condition, x_pos));
    for (const auto& x : negatives) energies.push_back(energy(e, condition, x));
    for (const auto& g : gen_samples) energies.push_back(energy(e, condition, g));
    return infonce_element(energies.data(), static_cast<int>(negatives.size()),
                           static_cast<int>(gen_samples.size()), alpha, nullptr);
}

double mi_lower_bound(double loss, int denominator_count) {
    if (denominator_count < 1) throw std::invalid_argument("mi_lower_bound: count must be >= 1");
    return std::log(static_cast<double>(denominator_count)) - loss;
}

Matrix energy_landscape_grid(const EnergyNet& e, double c_lo, double c_hi, double x_lo,
                             double x_hi, int resolution) {
    if (resolution < 2) throw std::invalid_argument("energy_landscape_grid: resolution must be >= 2");
    if (e.cond_dim != 1 || e.target_dim != 1)
        throw std::invalid_argument("energy_landscape_grid: only 1-D condition and target supported");

    Matrix inputs(resolution * resolution, 2);
    for (int i = 0; i < resolution; ++i) {
        const double c = c_lo + (c_hi - c_lo) * i / static_cast<double>(resolution - 1);
        for (int j = 0; j < resolution; ++j) {
            const double x = x_lo + (x_hi - x_lo) * j / static_cast<double>(resolution - 1);
            inputs(i * resolution + j, 0) = c;
            inputs(i * resolution + j, 1) = x;
        }
    }
    const Matrix out = forward(e.net, inputs);
    Matrix grid(resolution, resolution);
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j) grid(i, j) = out(i * resolution + j, 0);
    return grid;
}

void write_landscape_csv(const std::string& path, const Matrix& grid,
                         const std::vector<double>& c_axis, const std::vector<double>& x_axis) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    char buf[32];
    for (double x : x_axis) {
        std::snprintf(buf, sizeof buf, "%.10g", x);
        out << "," << buf;
    }
    out << "\n";
    for (int i = 0; i < grid.rows; ++i) {
        std::snprintf(buf, sizeof buf, "%.10g", c_axis[i]);
        out << buf;
        for (int j = 0; j < grid.cols; ++j) {
            std::snprintf(buf, sizeof buf, "%.10g", grid(i, j));
            out << "," << buf;
        }
        out << "\n";
    }
}

}  // namespace mmbc
