#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mmbc/datasets.hpp"
#include "mmbc/energy.hpp"
#include "mmbc/mdn.hpp"

namespace mmbc {

// Hyperparameters of the alternating training loop.
struct TrainConfig {
    int epochs = 100;          // T
    int energy_updates = 5;    // T_E, inner energy steps per batch
    int negatives = 32;        // N
    int batch_size = 32;
    double lr_generator = 5e-4;
    double lr_energy = 1e-3;
    InfonceMode infonce_mode = InfonceMode::StandardInclusion;
    double alpha_min = 0.1;
    NoiseSpec noise;
    int components = 2;  // I
    int latent_dim = 2;  // d_z
    std::vector<int> energy_hidden = {64, 64};
    std::vector<int> generator_hidden = {64, 64};
    Activation activation = Activation::ReLU;
    double temperature = 1.0;
};

struct EpochRecord {
    int epoch = 0;
    double em_loss = 0.0;
    double gen_energy = 0.0;
    double gen_nll = 0.0;
    double alpha = 1.0;
    double mi_bound = 0.0;
};

struct LossTrace {
    std::vector<EpochRecord> epochs;
    long energy_steps = 0;
    long generator_steps = 0;
};

// Columns: epoch,em_loss,gen_energy,gen_nll,alpha,mi_bound. NaN fields are
// written empty (baselines fill only the columns that apply to them).
void write_trace_csv(const std::string& path, const LossTrace& trace);

// Combined generator objective for one element: E(c, g) + NLL(x | mixture),
// with g = mean_k + scale_k * u reparameterized so the energy term's
// gradient reaches the generator heads. The energy net is read-only here.
struct GeneratorLossResult {
    double total = 0.0;
    double energy_term = 0.0;
    double nll_term = 0.0;
    NetGrads generator_grads;
};

// Frozen-randomness form: component index and unit noise supplied by the
// caller (finite-difference checks need the draw held fixed).
GeneratorLossResult generator_loss(const EnergyNet& e, const MdnGenerator& gen,
                                   const std::vector<double>& condition,
                                   const std::vector<double>& target,
                                   const std::vector<double>& latent, int component,
                                   const std::vector<double>& unit_noise);

// Sampling form: draws the component and unit noise from rng.
GeneratorLossResult generator_loss(const EnergyNet& e, const MdnGenerator& gen,
                                   const std::vector<double>& condition,
                                   const std::vector<double>& target,
                                   const std::vector<double>& latent, SeededRng& rng);

// Produces `count` detached generator samples for one condition.
using GenSampleFn =
    std::function<std::vector<std::vector<double>>(const std::vector<double>& condition, int count,
                                                   SeededRng& rng)>;

// Scratch buffers for the batched energy update.
struct EnergyStepWork {
    Matrix inputs;
    ForwardTrace trace;
    Matrix d_out;
    NetGrads grads;
    bool ready = false;
};

// One InfoNCE update of the energy net over a batch: per element, fresh
// generator samples (gen_count of them, detached), fresh negatives, then one
// Adam step on the mean loss. Returns the batch loss.
double energy_infonce_step(EnergyNet& e, AdamState& adam, const SyntheticTask& task,
                           const std::vector<Sample>& batch, int negatives, int gen_count,
                           double alpha, const GenSampleFn& gen_sampler, SeededRng& rng,
                           EnergyStepWork& work);

struct EbganMdnResult {
    EnergyNet energy;
    MdnGenerator generator;
    LossTrace trace;
};

// Alternating training: per batch, energy_updates InfoNCE steps on the
// energy model followed by one combined-loss step on the generator.
EbganMdnResult train_ebgan_mdn(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng);

// K independent draws from the trained generator: fresh latent per draw.
std::vector<std::vector<double>> sample_actions(const MdnGenerator& gen,
                                                const std::vector<double>& condition, int k,
                                                SeededRng& rng);

}  // namespace mmbc
