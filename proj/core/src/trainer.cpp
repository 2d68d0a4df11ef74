#include "mmbc/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mmbc {

namespace {

void append_pair_row(Matrix& m, int row, const std::vector<double>& c, const double* x, int dx) {
    double* r = m.row(row);
    for (size_t i = 0; i < c.size(); ++i) r[i] = c[i];
    for (int i = 0; i < dx; ++i) r[c.size() + i] = x[i];
}

void write_cell(std::ofstream& out, double v, bool last) {
    if (std::isnan(v)) {
        out << (last ? "\n" : ",");
    } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        out << buf << (last ? "\n" : ",");
    }
}

// Deterministic Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined.
void shuffle_indices(std::vector<int>& idx, SeededRng& rng) {
    for (size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
}

}  // namespace

void write_trace_csv(const std::string& path, const LossTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "epoch,em_loss,gen_energy,gen_nll,alpha,mi_bound\n";
    for (const auto& r : trace.epochs) {
        out << r.epoch << ",";
        write_cell(out, r.em_loss, false);
        write_cell(out, r.gen_energy, false);
        write_cell(out, r.gen_nll, false);
        write_cell(out, r.alpha, false);
        write_cell(out, r.mi_bound, true);
    }
}

GeneratorLossResult generator_loss(const EnergyNet& e, const MdnGenerator& gen,
                                   const std::vector<double>& condition,
                                   const std::vector<double>& target,
                                   const std::vector<double>& latent, int component,
                                   const std::vector<double>& unit_noise) {
    const int dx = gen.target_dim;
    if (component < 0 || component >= gen.components)
        throw std::invalid_argument("generator_loss: component out of range");

    Matrix gen_in(1, gen.cond_dim + gen.latent_dim);
    for (int i = 0; i < gen.cond_dim; ++i) gen_in(0, i) = condition.at(i);
    for (int i = 0; i < gen.latent_dim; ++i) gen_in(0, gen.cond_dim + i) = latent.at(i);

    ForwardTrace gen_trace;
    const Matrix raw = forward(gen.net, gen_in, &gen_trace);
    const MdnEval eval = mdn_eval_raw(gen, raw.row(0));

    std::vector<double> value(dx);
    for (int d = 0; d < dx; ++d)
        value[d] = eval.params.means(component, d) + eval.params.scales(component, d) * unit_noise[d];

    // Energy of the reparameterized sample; theta stays frozen (its grads go
    // to a scratch buffer), only the input gradient is kept.
    Matrix e_in(1, e.cond_dim + e.target_dim);
    append_pair_row(e_in, 0, condition, value.data(), dx);
    ForwardTrace e_trace;
    const Matrix e_out = forward(e.net, e_in, &e_trace);
    Matrix d_e(1, 1);
    d_e(0, 0) = 1.0;
    NetGrads scratch = make_grads(e.net);
    const Matrix d_in = backward(e.net, e_trace, d_e, scratch);

    GeneratorLossResult res;
    res.energy_term = e_out(0, 0);

    Matrix d_raw(1, raw.cols);
    ReparamDraw draw;
    draw.component = component;
    draw.unit_noise = unit_noise;
    draw.value = value;
    gmm_reparam_backward(gen, eval, draw, d_in.row(0) + e.cond_dim, d_raw.row(0));
    res.nll_term = gmm_nll_backward(gen, eval, target, d_raw.row(0));
    res.total = res.energy_term + res.nll_term;

    res.generator_grads = make_grads(gen.net);
    backward(gen.net, gen_trace, d_raw, res.generator_grads);
    return res;
}

GeneratorLossResult generator_loss(const EnergyNet& e, const MdnGenerator& gen,
                                   const std::vector<double>& condition,
                                   const std::vector<double>& target,
                                   const std::vector<double>& latent, SeededRng& rng) {
    const MdnEval eval = mdn_eval(gen, condition, latent);
    const ReparamDraw draw = gmm_reparam_sample(gen, eval, rng);
    return generator_loss(e, gen, condition, target, latent, draw.component, draw.unit_noise);
}

double energy_infonce_step(EnergyNet& e, AdamState& adam, const SyntheticTask& task,
                           const std::vector<Sample>& batch, int negatives, int gen_count,
                           double alpha, const GenSampleFn& gen_sampler, SeededRng& rng,
                           EnergyStepWork& work) {
    const int b = static_cast<int>(batch.size());
    if (b == 0) throw std::invalid_argument("energy_infonce_step: empty batch");
    if (gen_count > 0 && !gen_sampler)
        throw std::invalid_argument("energy_infonce_step: gen_count > 0 requires a sampler");

    const int per = 1 + negatives + gen_count;
    const int in_dim = e.cond_dim + e.target_dim;
    const int dx = e.target_dim;
    work.inputs.rows = b * per;
    work.inputs.cols = in_dim;
    work.inputs.data.assign(static_cast<size_t>(b) * per * in_dim, 0.0);

    for (int i = 0; i < b; ++i) {
        const Sample& s = batch[i];
        int row = i * per;
        append_pair_row(work.inputs, row++, s.condition, s.target.data(), dx);
        // Algorithm order: generator samples first, then negatives.
        std::vector<std::vector<double>> gens;
        if (gen_count > 0) gens = gen_sampler(s.condition, gen_count, rng);
        const auto negs = sample_negatives(s.condition, negatives, task, rng);
        for (const auto& xn : negs) append_pair_row(work.inputs, row++, s.condition, xn.data(), dx);
        for (const auto& g : gens) append_pair_row(work.inputs, row++, s.condition, g.data(), dx);
    }

    const Matrix energies = forward(e.net, work.inputs, &work.trace);
    work.d_out.rows = energies.rows;
    work.d_out.cols = 1;
    work.d_out.data.assign(energies.rows, 0.0);

    double loss = 0.0;
    std::vector<double> evec(per), dvec(per);
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j < per; ++j) evec[j] = energies(i * per + j, 0);
        loss += infonce_element(evec.data(), negatives, gen_count, alpha, dvec.data());
        for (int j = 0; j < per; ++j) work.d_out(i * per + j, 0) = dvec[j] / b;
    }
    loss /= b;

    if (!work.ready) {
        work.grads = make_grads(e.net);
        work.ready = true;
    }
    work.grads.set_zero();
    backward(e.net, work.trace, work.d_out, work.grads);
    adam_step(e.net, work.grads, adam);
    return loss;
}

EbganMdnResult train_ebgan_mdn(const TrainConfig& config, const DatasetSplits& data, SeededRng& rng) {
    const SyntheticTask& task = data.task;
    const int dc = task.condition_dim(), dx = task.target_dim();
    if (config.epochs < 1 || config.energy_updates < 1 || config.batch_size < 1)
        throw std::invalid_argument("train_ebgan_mdn: epochs, energy_updates, batch_size must be >= 1");
    if (config.negatives < 1 && config.infonce_mode == InfonceMode::EqualRatio)
        throw std::invalid_argument("train_ebgan_mdn: equal_ratio needs negatives >= 1");
    if (data.train.empty()) throw std::invalid_argument("train_ebgan_mdn: empty training set");

    EbganMdnResult res;
    res.energy = make_energy(dc, dx, config.energy_hidden, rng, config.activation);
    res.generator = make_mdn(dc, config.latent_dim, dx, config.components, config.generator_hidden,
                             config.noise, rng, config.activation);
    res.generator.temperature = config.temperature;

    AdamState adam_e = make_adam(res.energy.net, config.lr_energy);
    AdamState adam_g = make_adam(res.generator.net, config.lr_generator);

    const InfonceConfig icfg{config.infonce_mode, config.negatives, config.alpha_min, config.epochs};
    const int gen_count = icfg.generator_samples();

    GenSampleFn sampler = [&](const std::vector<double>& c, int count, SeededRng& r) {
        std::vector<std::vector<double>> out;
        out.reserve(count);
        std::vector<double> z(res.generator.latent_dim);
        for (int i = 0; i < count; ++i) {
            for (double& v : z) v = r.normal();
            const MdnEval ev = mdn_eval(res.generator, c, z);
            out.push_back(gmm_sample(ev.params, res.generator.noise, r));
        }
        return out;
    };

    EnergyStepWork e_work;
    ForwardTrace gen_trace, eterm_trace;
    NetGrads gen_grads = make_grads(res.generator.net);
    NetGrads energy_scratch = make_grads(res.energy.net);

    std::vector<int> order(data.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    const int raw_dim = mdn_output_dim(res.generator);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double alpha = config.infonce_mode == InfonceMode::DynamicScaling
                                 ? alpha_schedule(epoch, config.epochs, config.alpha_min)
                                 : 1.0;
        shuffle_indices(order, rng);

        double em_sum = 0.0;
        int em_count = 0;
        double ge_sum = 0.0, gn_sum = 0.0;
        int g_count = 0;

        for (size_t start = 0; start < order.size(); start += config.batch_size) {
            const size_t stop = std::min(order.size(), start + config.batch_size);
            std::vector<Sample> batch;
            batch.reserve(stop - start);
            for (size_t i = start; i < stop; ++i) batch.push_back(data.train[order[i]]);
            const int b = static_cast<int>(batch.size());

            for (int step = 0; step < config.energy_updates; ++step) {
                em_sum += energy_infonce_step(res.energy, adam_e, task, batch, config.negatives,
                                              gen_count, alpha, sampler, rng, e_work);
                ++em_count;
                ++res.trace.energy_steps;
            }

            // Generator update: batched trunk forward, reparameterized draw
            // per element, energy backward for the input gradient only.
            Matrix gen_in(b, dc + config.latent_dim);
            for (int i = 0; i < b; ++i) {
                double* r = gen_in.row(i);
                for (int d = 0; d < dc; ++d) r[d] = batch[i].condition[d];
                for (int d = 0; d < config.latent_dim; ++d) r[dc + d] = rng.normal();
            }
            const Matrix raw = forward(res.generator.net, gen_in, &gen_trace);

            std::vector<MdnEval> evals;
            std::vector<ReparamDraw> draws;
            evals.reserve(b);
            draws.reserve(b);
            Matrix e_in(b, dc + dx);
            for (int i = 0; i < b; ++i) {
                evals.push_back(mdn_eval_raw(res.generator, raw.row(i)));
                draws.push_back(gmm_reparam_sample(res.generator, evals.back(), rng));
                append_pair_row(e_in, i, batch[i].condition, draws.back().value.data(), dx);
            }
            const Matrix e_out = forward(res.energy.net, e_in, &eterm_trace);
            Matrix d_e(b, 1);
            for (int i = 0; i < b; ++i) d_e(i, 0) = 1.0;
            energy_scratch.set_zero();
            const Matrix d_in = backward(res.energy.net, eterm_trace, d_e, energy_scratch);

            Matrix d_raw(b, raw_dim);
            double ge = 0.0, gn = 0.0;
            for (int i = 0; i < b; ++i) {
                ge += e_out(i, 0);
                gmm_reparam_backward(res.generator, evals[i], draws[i], d_in.row(i) + dc,
                                     d_raw.row(i));
                gn += gmm_nll_backward(res.generator, evals[i], batch[i].target, d_raw.row(i));
                for (int j = 0; j < raw_dim; ++j) d_raw(i, j) /= b;
            }
            gen_grads.set_zero();
            backward(res.generator.net, gen_trace, d_raw, gen_grads);
            adam_step(res.generator.net, gen_grads, adam_g);
            ++res.trace.generator_steps;

            ge_sum += ge / b;
            gn_sum += gn / b;
            ++g_count;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.em_loss = em_sum / em_count;
        rec.gen_energy = ge_sum / g_count;
        rec.gen_nll = gn_sum / g_count;
        rec.alpha = alpha;
        rec.mi_bound = mi_lower_bound(rec.em_loss, 1 + config.negatives + gen_count);
        res.trace.epochs.push_back(rec);
    }
    return res;
}

std::vector<std::vector<double>> sample_actions(const MdnGenerator& gen,
                                                const std::vector<double>& condition, int k,
                                                SeededRng& rng) {
    if (k < 1) throw std::invalid_argument("sample_actions: k must be >= 1");
    std::vector<std::vector<double>> out;
    out.reserve(k);
    std::vector<double> z(gen.latent_dim);
    for (int i = 0; i < k; ++i) {
        for (double& v : z) v = rng.normal();
        const MdnEval ev = mdn_eval(gen, condition, z);
        out.push_back(gmm_sample(ev.params, gen.noise, rng));
    }
    return out;
}

}  // namespace mmbc
