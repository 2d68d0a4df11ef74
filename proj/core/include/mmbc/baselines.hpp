#pragma once

#include <string>

#include "mmbc/trainer.hpp"

namespace mmbc {

enum class BaselineKind { ExplicitBc, Mdn, Cgan, Ebgan, Ibc };

struct BcResult {
    DenseNet net;
    LossTrace trace;
};

// Plain regressor c -> x under mean squared error.
BcResult train_explicit_bc(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng);

struct MdnBaselineResult {
    MdnGenerator generator;  // condition-only input (latent_dim 0)
    LossTrace trace;
};

// Standalone mixture density network trained on the NLL alone.
MdnBaselineResult train_mdn(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng);

struct CganResult {
    DenseNet generator;        // (c ++ z) -> x
    EnergyNet discriminator;   // raw logits over (c ++ x)
    LossTrace trace;
};

// Conditional GAN: energy_updates discriminator steps (BCE on logits) per
// non-saturating generator step.
CganResult train_cgan(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng);

struct EbganResult {
    EnergyNet energy;
    DenseNet generator;  // (c ++ z) -> x
    LossTrace trace;
};

// Same alternating loop as EBGAN-MDN but with a plain MLP generator whose
// loss is the energy term alone.
EbganResult train_ebgan(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng);

struct IbcResult {
    EnergyNet energy;
    LossTrace trace;
};

// Energy net under the generator-free InfoNCE loss; one update per batch.
IbcResult train_ibc(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng);

// Derivative-free inference over a trained energy landscape: 64 uniform
// candidates over the task's target box, three rounds of softmax-weighted
// resampling over -E plus Gaussian perturbation whose scale starts at
// 0.2 x range and halves each round (reflected back into bounds), then the
// lowest-energy candidate.
std::vector<double> ibc_infer_one(const EnergyNet& e, const std::vector<double>& condition,
                                  const SyntheticTask& task, SeededRng& rng);

// k independent repetitions of ibc_infer_one.
std::vector<std::vector<double>> ibc_infer(const EnergyNet& e, const std::vector<double>& condition,
                                           int k, const SyntheticTask& task, SeededRng& rng);

}  // namespace mmbc
