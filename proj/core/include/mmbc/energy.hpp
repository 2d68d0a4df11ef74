#pragma once

#include <string>
#include <vector>

#include "mmbc/nn.hpp"

namespace mmbc {

// Scalar energy over (condition, target) pairs; lower = more plausible.
struct EnergyNet {
    DenseNet net;  // (cond_dim + target_dim) -> ... -> 1
    int cond_dim = 1;
    int target_dim = 1;
};

EnergyNet make_energy(int cond_dim, int target_dim, const std::vector<int>& hidden_dims,
                      SeededRng& rng, Activation activation = Activation::ReLU);

double energy(const EnergyNet& e, const std::vector<double>& condition,
              const std::vector<double>& target);

// How generator samples enter the InfoNCE denominator.
enum class InfonceMode { NoGenerator, StandardInclusion, EqualRatio, DynamicScaling };

InfonceMode infonce_mode_from_name(const std::string& name);
std::string infonce_mode_name(InfonceMode mode);

struct InfonceConfig {
    InfonceMode mode = InfonceMode::StandardInclusion;
    int negatives = 32;
    double alpha_min = 0.1;
    int total_epochs = 100;

    // Generator samples contributed per element under this mode.
    int generator_samples() const {
        switch (mode) {
            case InfonceMode::NoGenerator: return 0;
            case InfonceMode::EqualRatio: return negatives;
            default: return 1;
        }
    }
};

// alpha_t = max(1 - t/T, a_min); down-weights the generator term over training.
double alpha_schedule(int epoch, int total_epochs, double alpha_min = 0.1);

// Negative log softmax probability of the positive pair:
//   E(c,x+) + log( e^{-E(c,x+)} + sum_j e^{-E(c,x_j)} + alpha * sum_k e^{-E(c,g_k)} )
// log-sum-exp stabilized. Generator samples are plain target values here;
// no gradient reaches the generator through this loss.
double infonce_loss(const EnergyNet& e, const std::vector<double>& condition,
                    const std::vector<double>& x_pos,
                    const std::vector<std::vector<double>>& negatives,
                    const std::vector<std::vector<double>>& gen_samples, double alpha);

// Loss and energy-gradient for one element given precomputed energies laid
// out as [positive, negatives..., generator samples...]. d_energies (same
// layout, may be null) receives dL/dE. Shared by the batched trainers.
double infonce_element(const double* energies, int n_neg, int n_gen, double alpha,
                       double* d_energies);

// I(C;X) >= log(count) - loss; per-epoch diagnostic.
double mi_lower_bound(double loss, int denominator_count);

// E(c, x) over the Cartesian grid of linspaces; 1-D condition and target
// only. Row i = condition value i, column j = target value j.
Matrix energy_landscape_grid(const EnergyNet& e, double c_lo, double c_hi, double x_lo,
                             double x_hi, int resolution);

// CSV layout: first row target-axis values (leading corner cell empty),
// first column condition-axis values, body = energies.
void write_landscape_csv(const std::string& path, const Matrix& grid,
                         const std::vector<double>& c_axis, const std::vector<double>& x_axis);

}  // namespace mmbc
