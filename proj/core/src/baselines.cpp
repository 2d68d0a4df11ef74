#include "mmbc/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace mmbc {

namespace {

constexpr int kIbcCandidates = 64;
constexpr int kIbcRounds = 3;
constexpr double kIbcInitialScale = 0.2;

void shuffle_indices(std::vector<int>& idx, SeededRng& rng) {
    for (size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
}

std::vector<std::vector<Sample>> make_batches(const std::vector<Sample>& train, int batch_size,
                                              SeededRng& rng, std::vector<int>& order) {
    shuffle_indices(order, rng);
    std::vector<std::vector<Sample>> batches;
    for (size_t start = 0; start < order.size(); start += batch_size) {
        const size_t stop = std::min(order.size(), start + batch_size);
        std::vector<Sample> b;
        b.reserve(stop - start);
        for (size_t i = start; i < stop; ++i) b.push_back(train[order[i]]);
        batches.push_back(std::move(b));
    }
    return batches;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// Numerically stable binary cross-entropy on a raw logit.
double bce_with_logits(double logit, double label) {
    return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double reflect(double v, double lo, double hi) {
    while (v < lo || v > hi) {
        if (v < lo) v = 2.0 * lo - v;
        if (v > hi) v = 2.0 * hi - v;
    }
    return v;
}

}  // namespace

BcResult train_explicit_bc(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng) {
    const int dc = data.task.condition_dim(), dx = data.task.target_dim();
    std::vector<int> dims{dc};
    dims.insert(dims.end(), config.generator_hidden.begin(), config.generator_hidden.end());
    dims.push_back(dx);

    BcResult res;
    res.net = init_net(dims, config.activation, rng);
    AdamState adam = make_adam(res.net, config.lr_generator);

    std::vector<int> order(data.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    ForwardTrace trace;
    NetGrads grads = make_grads(res.net);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        int n_batches = 0;
        for (const auto& batch : make_batches(data.train, config.batch_size, rng, order)) {
            const int b = static_cast<int>(batch.size());
            Matrix in(b, dc);
            for (int i = 0; i < b; ++i)
                for (int d = 0; d < dc; ++d) in(i, d) = batch[i].condition[d];
            const Matrix out = forward(res.net, in, &trace);
            Matrix d_out(b, dx);
            double loss = 0.0;
            const double scale = 1.0 / (b * dx);
            for (int i = 0; i < b; ++i)
                for (int d = 0; d < dx; ++d) {
                    const double err = out(i, d) - batch[i].target[d];
                    loss += err * err * scale;
                    d_out(i, d) = 2.0 * err * scale;
                }
            grads.set_zero();
            backward(res.net, trace, d_out, grads);
            adam_step(res.net, grads, adam);
            ++res.trace.generator_steps;
            loss_sum += loss;
            ++n_batches;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.em_loss = nan_value();
        rec.gen_energy = nan_value();
        rec.gen_nll = loss_sum / n_batches;  // mse logged in the nll column
        rec.alpha = nan_value();
        rec.mi_bound = nan_value();
        res.trace.epochs.push_back(rec);
    }
    return res;
}

MdnBaselineResult train_mdn(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng) {
    const int dc = data.task.condition_dim(), dx = data.task.target_dim();
    MdnBaselineResult res;
    res.generator = make_mdn(dc, /*latent_dim=*/0, dx, config.components, config.generator_hidden,
                             config.noise, rng, config.activation);
    res.generator.temperature = config.temperature;
    AdamState adam = make_adam(res.generator.net, config.lr_generator);
    const int raw_dim = mdn_output_dim(res.generator);

    std::vector<int> order(data.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    ForwardTrace trace;
    NetGrads grads = make_grads(res.generator.net);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        int n_batches = 0;
        for (const auto& batch : make_batches(data.train, config.batch_size, rng, order)) {
            const int b = static_cast<int>(batch.size());
            Matrix in(b, dc);
            for (int i = 0; i < b; ++i)
                for (int d = 0; d < dc; ++d) in(i, d) = batch[i].condition[d];
            const Matrix raw = forward(res.generator.net, in, &trace);
            Matrix d_raw(b, raw_dim);
            double loss = 0.0;
            for (int i = 0; i < b; ++i) {
                const MdnEval ev = mdn_eval_raw(res.generator, raw.row(i));
                loss += gmm_nll_backward(res.generator, ev, batch[i].target, d_raw.row(i));
                for (int j = 0; j < raw_dim; ++j) d_raw(i, j) /= b;
            }
            loss /= b;
            grads.set_zero();
            backward(res.generator.net, trace, d_raw, grads);
            adam_step(res.generator.net, grads, adam);
            ++res.trace.generator_steps;
            loss_sum += loss;
            ++n_batches;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.em_loss = nan_value();
        rec.gen_energy = nan_value();
        rec.gen_nll = loss_sum / n_batches;
        rec.alpha = nan_value();
        rec.mi_bound = nan_value();
        res.trace.epochs.push_back(rec);
    }
    return res;
}

CganResult train_cgan(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng) {
    const int dc = data.task.condition_dim(), dx = data.task.target_dim();
    const int dz = config.latent_dim;

    CganResult res;
    std::vector<int> gdims{dc + dz};
    gdims.insert(gdims.end(), config.generator_hidden.begin(), config.generator_hidden.end());
    gdims.push_back(dx);
    res.generator = init_net(gdims, config.activation, rng);
    res.discriminator = make_energy(dc, dx, config.energy_hidden, rng, config.activation);

    AdamState adam_g = make_adam(res.generator, config.lr_generator);
    AdamState adam_d = make_adam(res.discriminator.net, config.lr_energy);

    std::vector<int> order(data.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    ForwardTrace g_trace, d_trace;
    NetGrads g_grads = make_grads(res.generator);
    NetGrads d_grads = make_grads(res.discriminator.net);

    auto generate = [&](const std::vector<Sample>& batch, Matrix& fake, ForwardTrace* trace) {
        const int b = static_cast<int>(batch.size());
        Matrix gin(b, dc + dz);
        for (int i = 0; i < b; ++i) {
            double* r = gin.row(i);
            for (int d = 0; d < dc; ++d) r[d] = batch[i].condition[d];
            for (int d = 0; d < dz; ++d) r[dc + d] = rng.normal();
        }
        fake = forward(res.generator, gin, trace);
    };

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double d_sum = 0.0, g_sum = 0.0;
        int d_count = 0, g_count = 0;
        for (const auto& batch : make_batches(data.train, config.batch_size, rng, order)) {
            const int b = static_cast<int>(batch.size());

            for (int step = 0; step < config.energy_updates; ++step) {
                Matrix fake;
                generate(batch, fake, nullptr);
                Matrix din(2 * b, dc + dx);
                for (int i = 0; i < b; ++i) {
                    double* r = din.row(i);
                    for (int d = 0; d < dc; ++d) r[d] = batch[i].condition[d];
                    for (int d = 0; d < dx; ++d) r[dc + d] = batch[i].target[d];
                    double* rf = din.row(b + i);
                    for (int d = 0; d < dc; ++d) rf[d] = batch[i].condition[d];
                    for (int d = 0; d < dx; ++d) rf[dc + d] = fake(i, d);
                }
                const Matrix logits = forward(res.discriminator.net, din, &d_trace);
                Matrix d_out(2 * b, 1);
                double loss = 0.0;
                for (int i = 0; i < b; ++i) {
                    loss += bce_with_logits(logits(i, 0), 1.0) / b;
                    loss += bce_with_logits(logits(b + i, 0), 0.0) / b;
                    d_out(i, 0) = (sigmoid(logits(i, 0)) - 1.0) / b;
                    d_out(b + i, 0) = sigmoid(logits(b + i, 0)) / b;
                }
                d_grads.set_zero();
                backward(res.discriminator.net, d_trace, d_out, d_grads);
                adam_step(res.discriminator.net, d_grads, adam_d);
                ++res.trace.energy_steps;
                d_sum += loss;
                ++d_count;
            }

            // Non-saturating generator step: push D's logits on fakes to 1.
            Matrix fake;
            generate(batch, fake, &g_trace);
            Matrix din(b, dc + dx);
            for (int i = 0; i < b; ++i) {
                double* r = din.row(i);
                for (int d = 0; d < dc; ++d) r[d] = batch[i].condition[d];
                for (int d = 0; d < dx; ++d) r[dc + d] = fake(i, d);
            }
            const Matrix logits = forward(res.discriminator.net, din, &d_trace);
            Matrix d_out(b, 1);
            double loss = 0.0;
            for (int i = 0; i < b; ++i) {
                loss += bce_with_logits(logits(i, 0), 1.0) / b;
                d_out(i, 0) = (sigmoid(logits(i, 0)) - 1.0) / b;
            }
            d_grads.set_zero();  // discriminator frozen: input gradient only
            const Matrix d_in = backward(res.discriminator.net, d_trace, d_out, d_grads);
            Matrix d_fake(b, dx);
            for (int i = 0; i < b; ++i)
                for (int d = 0; d < dx; ++d) d_fake(i, d) = d_in(i, dc + d);
            g_grads.set_zero();
            backward(res.generator, g_trace, d_fake, g_grads);
            adam_step(res.generator, g_grads, adam_g);
            ++res.trace.generator_steps;
            g_sum += loss;
            ++g_count;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.em_loss = d_sum / d_count;     // discriminator loss
        rec.gen_energy = g_sum / g_count;  // generator loss
        rec.gen_nll = nan_value();
        rec.alpha = nan_value();
        rec.mi_bound = nan_value();
        res.trace.epochs.push_back(rec);
    }
    return res;
}

EbganResult train_ebgan(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng) {
    const int dc = data.task.condition_dim(), dx = data.task.target_dim();
    const int dz = config.latent_dim;
    if (config.negatives < 1 && config.infonce_mode == InfonceMode::EqualRatio)
        throw std::invalid_argument("train_ebgan: equal_ratio needs negatives >= 1");

    EbganResult res;
    res.energy = make_energy(dc, dx, config.energy_hidden, rng, config.activation);
    std::vector<int> gdims{dc + dz};
    gdims.insert(gdims.end(), config.generator_hidden.begin(), config.generator_hidden.end());
    gdims.push_back(dx);
    res.generator = init_net(gdims, config.activation, rng);

    AdamState adam_e = make_adam(res.energy.net, config.lr_energy);
    AdamState adam_g = make_adam(res.generator, config.lr_generator);

    const InfonceConfig icfg{config.infonce_mode, config.negatives, config.alpha_min, config.epochs};
    const int gen_count = icfg.generator_samples();

    GenSampleFn sampler = [&](const std::vector<double>& c, int count, SeededRng& r) {
        Matrix gin(count, dc + dz);
        for (int i = 0; i < count; ++i) {
            double* row = gin.row(i);
            for (int d = 0; d < dc; ++d) row[d] = c[d];
            for (int d = 0; d < dz; ++d) row[dc + d] = r.normal();
        }
        const Matrix out = forward(res.generator, gin);
        std::vector<std::vector<double>> samples(count);
        for (int i = 0; i < count; ++i) samples[i].assign(out.row(i), out.row(i) + dx);
        return samples;
    };

    EnergyStepWork e_work;
    ForwardTrace g_trace, e_trace;
    NetGrads g_grads = make_grads(res.generator);
    NetGrads e_scratch = make_grads(res.energy.net);

    std::vector<int> order(data.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double alpha = config.infonce_mode == InfonceMode::DynamicScaling
                                 ? alpha_schedule(epoch, config.epochs, config.alpha_min)
                                 : 1.0;
        double em_sum = 0.0, ge_sum = 0.0;
        int em_count = 0, g_count = 0;
        for (const auto& batch : make_batches(data.train, config.batch_size, rng, order)) {
            const int b = static_cast<int>(batch.size());
            for (int step = 0; step < config.energy_updates; ++step) {
                em_sum += energy_infonce_step(res.energy, adam_e, data.task, batch,
                                              config.negatives, gen_count, alpha, sampler, rng,
                                              e_work);
                ++em_count;
                ++res.trace.energy_steps;
            }

            // Generator step: minimize E(c, G(z|c)); gradient flows through
            // the frozen energy net into the generator output.
            Matrix gin(b, dc + dz);
            for (int i = 0; i < b; ++i) {
                double* r = gin.row(i);
                for (int d = 0; d < dc; ++d) r[d] = batch[i].condition[d];
                for (int d = 0; d < dz; ++d) r[dc + d] = rng.normal();
            }
            const Matrix fake = forward(res.generator, gin, &g_trace);
            Matrix ein(b, dc + dx);
            for (int i = 0; i < b; ++i) {
                double* r = ein.row(i);
                for (int d = 0; d < dc; ++d) r[d] = batch[i].condition[d];
                for (int d = 0; d < dx; ++d) r[dc + d] = fake(i, d);
            }
            const Matrix e_out = forward(res.energy.net, ein, &e_trace);
            Matrix d_e(b, 1);
            double loss = 0.0;
            for (int i = 0; i < b; ++i) {
                loss += e_out(i, 0) / b;
                d_e(i, 0) = 1.0 / b;
            }
            e_scratch.set_zero();
            const Matrix d_in = backward(res.energy.net, e_trace, d_e, e_scratch);
            Matrix d_fake(b, dx);
            for (int i = 0; i < b; ++i)
                for (int d = 0; d < dx; ++d) d_fake(i, d) = d_in(i, dc + d);
            g_grads.set_zero();
            backward(res.generator, g_trace, d_fake, g_grads);
            adam_step(res.generator, g_grads, adam_g);
            ++res.trace.generator_steps;
            ge_sum += loss;
            ++g_count;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.em_loss = em_sum / em_count;
        rec.gen_energy = ge_sum / g_count;
        rec.gen_nll = nan_value();
        rec.alpha = alpha;
        rec.mi_bound = mi_lower_bound(rec.em_loss, 1 + config.negatives + gen_count);
        res.trace.epochs.push_back(rec);
    }
    return res;
}

IbcResult train_ibc(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng) {
    IbcResult res;
    res.energy = make_energy(data.task.condition_dim(), data.task.target_dim(),
                             config.energy_hidden, rng, config.activation);
    AdamState adam = make_adam(res.energy.net, config.lr_energy);

    EnergyStepWork work;
    std::vector<int> order(data.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        int n = 0;
        for (const auto& batch : make_batches(data.train, config.batch_size, rng, order)) {
            loss_sum += energy_infonce_step(res.energy, adam, data.task, batch, config.negatives,
                                            /*gen_count=*/0, /*alpha=*/0.0, nullptr, rng, work);
            ++res.trace.energy_steps;
            ++n;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.em_loss = loss_sum / n;
        rec.gen_energy = nan_value();
        rec.gen_nll = nan_value();
        rec.alpha = nan_value();
        rec.mi_bound = mi_lower_bound(rec.em_loss, 1 + config.negatives);
        res.trace.epochs.push_back(rec);
    }
    return res;
}

std::vector<double> ibc_infer_one(const EnergyNet& e, const std::vector<double>& condition,
                                  const SyntheticTask& task, SeededRng& rng) {
    std::vector<double> lo, hi;
    task.target_bounds(lo, hi);
    const int dim = static_cast<int>(lo.size());
    for (int d = 0; d < dim; ++d)
        if (!std::isfinite(lo[d]) || !std::isfinite(hi[d]))
            throw std::invalid_argument("ibc_infer: task target bounds must be finite");

    Matrix cands(kIbcCandidates, dim);
    for (int i = 0; i < kIbcCandidates; ++i)
        for (int d = 0; d < dim; ++d) cands(i, d) = rng.uniform(lo[d], hi[d]);

    Matrix inputs(kIbcCandidates, e.cond_dim + dim);
    std::vector<double> energies(kIbcCandidates), weights(kIbcCandidates);

    auto score = [&]() {
        for (int i = 0; i < kIbcCandidates; ++i) {
            double* r = inputs.row(i);
            for (int d = 0; d < e.cond_dim; ++d) r[d] = condition[d];
            for (int d = 0; d < dim; ++d) r[e.cond_dim + d] = cands(i, d);
        }
        const Matrix out = forward(e.net, inputs);
        for (int i = 0; i < kIbcCandidates; ++i) energies[i] = out(i, 0);
    };

    for (int round = 0; round < kIbcRounds; ++round) {
        score();
        double mx = -1e300;
        for (double v : energies) mx = std::max(mx, -v);
        double sum = 0.0;
        for (int i = 0; i < kIbcCandidates; ++i) {
            weights[i] = std::exp(-energies[i] - mx);
            sum += weights[i];
        }
        // Softmax-weighted resampling with replacement, then a Gaussian
        // perturbation reflected back into bounds. Reflection keeps a flat
        // landscape's samples uniform over the box.
        Matrix next(kIbcCandidates, dim);
        for (int i = 0; i < kIbcCandidates; ++i) {
            const double u = rng.uniform01() * sum;
            int pick = kIbcCandidates - 1;
            double acc = 0.0;
            for (int j = 0; j < kIbcCandidates; ++j) {
                acc += weights[j];
                if (u < acc) {
                    pick = j;
                    break;
                }
            }
            for (int d = 0; d < dim; ++d) {
                const double scale = kIbcInitialScale * (hi[d] - lo[d]) / (1 << round);
                next(i, d) = reflect(cands(pick, d) + scale * rng.normal(), lo[d], hi[d]);
            }
        }
        cands = next;
    }
    score();
    int best = 0;
    for (int i = 1; i < kIbcCandidates; ++i)
        if (energies[i] < energies[best]) best = i;
    return std::vector<double>(cands.row(best), cands.row(best) + dim);
}

std::vector<std::vector<double>> ibc_infer(const EnergyNet& e, const std::vector<double>& condition,
                                           int k, const SyntheticTask& task, SeededRng& rng) {
    if (k < 1) throw std::invalid_argument("ibc_infer: k must be >= 1");
    std::vector<std::vector<double>> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) out.push_back(ibc_infer_one(e, condition, task, rng));
    return out;
}

}  // namespace mmbc
