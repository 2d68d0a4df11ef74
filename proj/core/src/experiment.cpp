#include "mmbc/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace mmbc {

namespace {

constexpr uint64_t kDataStream = 1;
constexpr uint64_t kTrainStream = 2;
constexpr uint64_t kEvalStream = 3;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<int> hidden_of(int width, int layers) { return std::vector<int>(layers, width); }

void run_parallel(std::vector<std::function<void()>>& tasks, int max_threads) {
    if (max_threads <= 0) max_threads = static_cast<int>(tasks.size());
    if (max_threads <= 1 || tasks.size() <= 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                tasks[i]();
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(max_threads, static_cast<int>(tasks.size()));
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct TrainedArtifacts {
    NamedModels parts;
    LossTrace trace;
};

TrainedArtifacts train_model(const ExperimentConfig& config, const DatasetSplits& splits,
                             SeededRng& rng) {
    TrainedArtifacts out;
    const std::string& m = config.model;
    if (m == "ebgan_mdn") {
        auto res = train_ebgan_mdn(config.train, splits, rng);
        out.trace = std::move(res.trace);
        out.parts.emplace_back("energy", std::move(res.energy));
        out.parts.emplace_back("generator", std::move(res.generator));
    } else if (m == "explicit_bc") {
        auto res = train_explicit_bc(config.train, splits, rng);
        out.trace = std::move(res.trace);
        out.parts.emplace_back("regressor", std::move(res.net));
    } else if (m == "mdn") {
        auto res = train_mdn(config.train, splits, rng);
        out.trace = std::move(res.trace);
        out.parts.emplace_back("generator", std::move(res.generator));
    } else if (m == "cgan") {
        auto res = train_cgan(config.train, splits, rng);
        out.trace = std::move(res.trace);
        out.parts.emplace_back("generator", std::move(res.generator));
        out.parts.emplace_back("discriminator", std::move(res.discriminator));
    } else if (m == "ebgan") {
        auto res = train_ebgan(config.train, splits, rng);
        out.trace = std::move(res.trace);
        out.parts.emplace_back("energy", std::move(res.energy));
        out.parts.emplace_back("generator", std::move(res.generator));
    } else if (m == "ibc") {
        auto res = train_ibc(config.train, splits, rng);
        out.trace = std::move(res.trace);
        out.parts.emplace_back("energy", std::move(res.energy));
    } else {
        throw std::invalid_argument("unknown model: " + m);
    }
    return out;
}

// The net whose (c, x) landscape gets exported, if the model has one.
const EnergyNet* landscape_net(const std::string& model, const NamedModels& parts) {
    if (model == "cgan") return find_energy(parts, "discriminator");
    return find_energy(parts, "energy");
}

std::vector<double> mlp_latent_sample(const DenseNet& net, const std::vector<double>& condition,
                                      int latent_dim, SeededRng& rng) {
    std::vector<double> in(condition);
    for (int i = 0; i < latent_dim; ++i) in.push_back(rng.normal());
    return forward(net, in);
}

std::string scatter_path(const ExperimentConfig& c) {
    return c.out_dir + "/scatter_" + c.model + ".csv";
}
std::string landscape_path(const ExperimentConfig& c) {
    return c.out_dir + "/landscape_" + c.model + ".csv";
}

void write_scatter_csv(const std::string& path, const std::vector<GridPoint>& grid,
                       const SampleSet& samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const size_t dc = grid.front().condition.size();
    const size_t dx = grid.front().modes.front().size();
    for (size_t i = 0; i < dc; ++i) out << "c_" << i << ",";
    out << "kind";
    for (size_t i = 0; i < dx; ++i) out << ",x_" << i;
    out << "\n";
    auto row = [&](const std::vector<double>& c, const char* kind, const std::vector<double>& x) {
        for (double v : c) out << fmt(v) << ",";
        out << kind;
        for (double v : x) out << "," << fmt(v);
        out << "\n";
    };
    for (size_t i = 0; i < grid.size(); ++i) {
        for (const auto& m : grid[i].modes) row(grid[i].condition, "mode", m);
        for (const auto& s : samples[i]) row(grid[i].condition, "sample", s);
    }
}

void write_landscape(const ExperimentConfig& config, const SyntheticTask& task,
                     const EnergyNet& net) {
    const int res = config.landscape_resolution;
    std::vector<double> lo, hi;
    task.target_bounds(lo, hi);
    const Matrix grid =
        energy_landscape_grid(net, task.condition_lo(), task.condition_hi(), lo[0], hi[0], res);
    std::vector<double> c_axis(res), x_axis(res);
    for (int i = 0; i < res; ++i) {
        c_axis[i] = task.condition_lo() +
                    (task.condition_hi() - task.condition_lo()) * i / static_cast<double>(res - 1);
        x_axis[i] = lo[0] + (hi[0] - lo[0]) * i / static_cast<double>(res - 1);
    }
    write_landscape_csv(landscape_path(config), grid, c_axis, x_axis);
}

MetricsReport evaluate_policy(const ExperimentConfig& config, const SyntheticTask& task,
                              const PolicySampler& policy, const std::vector<GridPoint>& grid,
                              SeededRng& rng, SampleSet* samples_out) {
    MetricsReport report;
    if (task.kind == TaskKind::Ik2Link) {
        auto [best, mean] = ik_success_rates(policy, task, grid, config.eval_samples,
                                             config.ik_tolerance, rng);
        report.success_best = best;
        report.success_mean = mean;
        return report;
    }
    const SampleSet samples = collect_policy_samples(policy, grid, config.eval_samples, rng);
    SampleSet modes;
    modes.reserve(grid.size());
    for (const auto& g : grid) modes.push_back(g.modes);

    report.tmc_percent = total_mode_coverage(samples, modes, config.epsilon);
    report.amc = avg_modes_captured(samples, modes, config.epsilon);

    // Distribution metrics use a larger pooled draw; at K per-condition
    // draws the binomial branch imbalance alone floors W above the
    // paper's scale.
    const SampleSet dist = collect_policy_samples(policy, grid, config.dist_samples, rng);
    std::vector<double> pooled_true, pooled_gen;
    for (const auto& g : grid)
        for (const auto& m : g.modes) pooled_true.push_back(m[0]);
    for (const auto& per_cond : dist)
        for (const auto& s : per_cond) pooled_gen.push_back(s[0]);
    report.kl = kl_divergence_hist(pooled_true, pooled_gen, config.histogram_bins);
    report.wasserstein = wasserstein_hist(pooled_true, pooled_gen, config.histogram_bins);

    if (samples_out) *samples_out = samples;
    return report;
}

struct SuiteCell {
    std::string label;
    ExperimentConfig config;
};

std::vector<SuiteCell> suite_cells(const std::string& suite, const std::string& out_dir) {
    const std::vector<std::string> model_order = {"explicit_bc", "mdn",   "cgan",
                                                  "ibc",         "ebgan", "ebgan_mdn"};
    std::vector<SuiteCell> cells;
    auto add = [&](const std::string& label, ExperimentConfig cfg) {
        cfg.out_dir = out_dir + "/" + label;
        cells.push_back({label, std::move(cfg)});
    };
    if (suite == "bench1_hyperbola" || suite == "bench1_lines" || suite == "ik2link") {
        const std::string task = suite == "bench1_hyperbola" ? "hyperbola"
                                 : suite == "bench1_lines"   ? "lines"
                                                             : "ik2link";
        for (const auto& m : model_order) add(m, default_config(task, m));
    } else if (suite == "noise_ablation") {
        for (const std::string n : {"diagonal", "isotropic", "isotropic_across_clusters",
                                    "fixed_1e-3", "fixed_1e-2", "fixed_1e-1", "laplace_diagonal"}) {
            ExperimentConfig cfg = default_config("hyperbola", "ebgan_mdn");
            cfg.train.noise = noise_from_name(n);
            add(n, cfg);
        }
    } else if (suite == "generator_config_ablation") {
        for (const std::string m : {"no_generator", "standard", "equal_ratio", "dynamic_scaling"}) {
            ExperimentConfig cfg = default_config("hyperbola", "ebgan_mdn");
            cfg.train.infonce_mode = infonce_mode_from_name(m);
            add(m, cfg);
        }
    } else {
        throw std::invalid_argument("unknown suite: " + suite);
    }
    return cells;
}

void write_suite_tables(const std::string& out_dir, const std::string& suite,
                        const std::vector<SuiteCell>& cells,
                        const std::vector<RunRecord>& records) {
    const bool ik = suite == "ik2link";
    std::ofstream csv(out_dir + "/table.csv");
    std::ofstream txt(out_dir + "/table.txt");
    if (!csv || !txt) throw std::runtime_error("cannot write suite tables under " + out_dir);

    if (ik) {
        csv << "label,success_best_mean,success_best_std,success_mean_mean,success_mean_std\n";
        txt << "Suite: " << suite << "\n";
        char line[160];
        std::snprintf(line, sizeof line, "%-28s %-19s %-19s\n", "Model", "Best", "Mean");
        txt << line;
        for (size_t i = 0; i < cells.size(); ++i) {
            const auto& m = records[i].mean;
            const auto& s = records[i].stddev;
            csv << cells[i].label << "," << fmt(m.success_best) << "," << fmt(s.success_best) << ","
                << fmt(m.success_mean) << "," << fmt(s.success_mean) << "\n";
            std::snprintf(line, sizeof line, "%-28s %6.3f +- %-8.3f %6.3f +- %-8.3f\n",
                          cells[i].label.c_str(), m.success_best, s.success_best, m.success_mean,
                          s.success_mean);
            txt << line;
        }
        return;
    }

    csv << "label,kl_mean,kl_std,w_mean,w_std,tmc_mean,tmc_std,amc_mean,amc_std\n";
    txt << "Suite: " << suite << "\n";
    char line[200];
    std::snprintf(line, sizeof line, "%-28s %-19s %-19s %-19s %-19s\n", "Model", "KL", "W",
                  "TMC (%)", "AMC");
    txt << line;
    for (size_t i = 0; i < cells.size(); ++i) {
        const auto& m = records[i].mean;
        const auto& s = records[i].stddev;
        csv << cells[i].label << "," << fmt(m.kl) << "," << fmt(s.kl) << "," << fmt(m.wasserstein)
            << "," << fmt(s.wasserstein) << "," << fmt(m.tmc_percent) << "," << fmt(s.tmc_percent)
            << "," << fmt(m.amc) << "," << fmt(s.amc) << "\n";
        std::snprintf(line, sizeof line,
                      "%-28s %6.2f +- %-8.2f %6.4f +- %-8.4f %6.2f +- %-8.2f %6.3f +- %-8.3f\n",
                      cells[i].label.c_str(), m.kl, s.kl, m.wasserstein, s.wasserstein,
                      m.tmc_percent, s.tmc_percent, m.amc, s.amc);
        txt << line;
    }
}

}  // namespace

const std::vector<std::string>& known_models() {
    static const std::vector<std::string> models = {"ebgan_mdn", "explicit_bc", "mdn",
                                                    "cgan",      "ebgan",       "ibc"};
    return models;
}

const std::vector<std::string>& known_suites() {
    static const std::vector<std::string> suites = {"bench1_hyperbola", "bench1_lines",
                                                    "noise_ablation", "generator_config_ablation",
                                                    "ik2link"};
    return suites;
}

ExperimentConfig default_config(const std::string& task, const std::string& model) {
    bool known = false;
    for (const auto& m : known_models()) known = known || m == model;
    if (!known) throw std::invalid_argument("unknown model: " + model);
    const TaskKind kind = task_from_name(task);

    ExperimentConfig cfg;
    cfg.task = task;
    cfg.model = model;
    TrainConfig& t = cfg.train;

    const bool bench2 = kind == TaskKind::Ik2Link;
    // 2-link arm overrides: hidden width 64 with 2 layers for every model.
    const int width = 64;
    t.epochs = 100;
    t.batch_size = 32;
    t.latent_dim = bench2 ? 8 : 2;
    t.components = bench2 ? 10 : (kind == TaskKind::Lines ? 4 : 2);
    t.negatives = bench2 ? 256 : 32;
    t.energy_updates = 5;
    t.energy_hidden = hidden_of(width, 2);
    t.generator_hidden = hidden_of(width, 2);
    t.noise = noise_from_name("diagonal");
    t.infonce_mode = InfonceMode::StandardInclusion;

    if (model == "ebgan_mdn") {
        t.lr_generator = 0.0005;
        t.lr_energy = 0.001;
    } else if (model == "explicit_bc") {
        t.lr_generator = 0.001;
        t.generator_hidden = hidden_of(width, 5);
    } else if (model == "mdn") {
        t.lr_generator = 0.001;
        t.noise = noise_from_name("isotropic");
        t.latent_dim = 0;
    } else if (model == "cgan") {
        t.lr_generator = bench2 ? 0.0005 : 0.0002;
        t.lr_energy = bench2 ? 0.001 : 0.002;
        if (bench2) t.activation = Activation::LeakyReLU;
    } else if (model == "ebgan") {
        t.lr_generator = 0.0005;
        t.lr_energy = 0.001;
    } else if (model == "ibc") {
        t.lr_energy = 0.001;
        t.negatives = bench2 ? 256 : 64;
        t.energy_hidden = hidden_of(width, 4);
        if (bench2) t.energy_hidden = hidden_of(width, 2);
    }
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    json j;
    j["task"] = c.task;
    j["model"] = c.model;
    j["seeds"] = c.seeds;
    j["out"] = c.out_dir;
    j["epochs"] = c.train.epochs;
    j["energy_updates"] = c.train.energy_updates;
    j["negatives"] = c.train.negatives;
    j["batch_size"] = c.train.batch_size;
    j["lr_generator"] = c.train.lr_generator;
    j["lr_energy"] = c.train.lr_energy;
    j["infonce_mode"] = infonce_mode_name(c.train.infonce_mode);
    j["alpha_min"] = c.train.alpha_min;
    j["noise"] = noise_name(c.train.noise);
    j["components"] = c.train.components;
    j["latent_dim"] = c.train.latent_dim;
    j["energy_hidden"] = c.train.energy_hidden;
    j["generator_hidden"] = c.train.generator_hidden;
    j["activation"] = c.train.activation == Activation::ReLU        ? "relu"
                      : c.train.activation == Activation::LeakyReLU ? "leaky_relu"
                                                                    : "identity";
    j["temperature"] = c.train.temperature;
    j["eval_samples"] = c.eval_samples;
    j["dist_samples"] = c.dist_samples;
    j["epsilon"] = c.epsilon;
    j["histogram_bins"] = c.histogram_bins;
    j["ik_tolerance"] = c.ik_tolerance;
    j["landscape_resolution"] = c.landscape_resolution;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& fallback_task,
                                  const std::string& fallback_model) {
    const std::string task = j.value("task", fallback_task);
    const std::string model = j.value("model", fallback_model);
    if (task.empty() || model.empty())
        throw std::invalid_argument("config needs both task and model");
    ExperimentConfig c = default_config(task, model);
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<uint64_t>>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    TrainConfig& t = c.train;
    if (j.contains("epochs")) t.epochs = j["epochs"];
    if (j.contains("energy_updates")) t.energy_updates = j["energy_updates"];
    if (j.contains("negatives")) t.negatives = j["negatives"];
    if (j.contains("batch_size")) t.batch_size = j["batch_size"];
    if (j.contains("lr_generator")) t.lr_generator = j["lr_generator"];
    if (j.contains("lr_energy")) t.lr_energy = j["lr_energy"];
    if (j.contains("infonce_mode")) t.infonce_mode = infonce_mode_from_name(j["infonce_mode"]);
    if (j.contains("alpha_min")) t.alpha_min = j["alpha_min"];
    if (j.contains("noise")) t.noise = noise_from_name(j["noise"]);
    if (j.contains("components")) t.components = j["components"];
    if (j.contains("latent_dim")) t.latent_dim = j["latent_dim"];
    if (j.contains("energy_hidden")) t.energy_hidden = j["energy_hidden"].get<std::vector<int>>();
    if (j.contains("generator_hidden"))
        t.generator_hidden = j["generator_hidden"].get<std::vector<int>>();
    if (j.contains("activation")) {
        const std::string a = j["activation"];
        t.activation = a == "relu"         ? Activation::ReLU
                       : a == "leaky_relu" ? Activation::LeakyReLU
                                           : Activation::Identity;
    }
    if (j.contains("temperature")) t.temperature = j["temperature"];
    if (j.contains("eval_samples")) c.eval_samples = j["eval_samples"];
    if (j.contains("dist_samples")) c.dist_samples = j["dist_samples"];
    if (j.contains("epsilon")) c.epsilon = j["epsilon"];
    if (j.contains("histogram_bins")) c.histogram_bins = j["histogram_bins"];
    if (j.contains("ik_tolerance")) c.ik_tolerance = j["ik_tolerance"];
    if (j.contains("landscape_resolution")) c.landscape_resolution = j["landscape_resolution"];
    return c;
}

SampleSet collect_policy_samples(const PolicySampler& policy, const std::vector<GridPoint>& grid,
                                 int k, SeededRng& rng) {
    SampleSet samples;
    samples.reserve(grid.size());
    for (const auto& g : grid) samples.push_back(policy(g.condition, k, rng));
    return samples;
}

PolicySampler make_policy(const std::string& model, const NamedModels& parts,
                          const SyntheticTask& task) {
    if (model == "ebgan_mdn" || model == "mdn") {
        const MdnGenerator* gen = find_mdn(parts, "generator");
        if (!gen) throw std::runtime_error("model bundle missing mdn generator");
        MdnGenerator copy = *gen;
        return [copy](const std::vector<double>& c, int k, SeededRng& rng) {
            return sample_actions(copy, c, k, rng);
        };
    }
    if (model == "explicit_bc") {
        const DenseNet* net = find_net(parts, "regressor");
        if (!net) throw std::runtime_error("model bundle missing regressor");
        DenseNet copy = *net;
        return [copy](const std::vector<double>& c, int k, SeededRng&) {
            const auto y = forward(copy, c);
            return std::vector<std::vector<double>>(k, y);
        };
    }
    if (model == "cgan" || model == "ebgan") {
        const DenseNet* net = find_net(parts, "generator");
        if (!net) throw std::runtime_error("model bundle missing generator");
        DenseNet copy = *net;
        const int latent = copy.input_dim() - task.condition_dim();
        return [copy, latent](const std::vector<double>& c, int k, SeededRng& rng) {
            std::vector<std::vector<double>> out;
            out.reserve(k);
            for (int i = 0; i < k; ++i) out.push_back(mlp_latent_sample(copy, c, latent, rng));
            return out;
        };
    }
    if (model == "ibc") {
        const EnergyNet* e = find_energy(parts, "energy");
        if (!e) throw std::runtime_error("model bundle missing energy net");
        EnergyNet copy = *e;
        return [copy, task](const std::vector<double>& c, int k, SeededRng& rng) {
            return ibc_infer(copy, c, k, task, rng);
        };
    }
    throw std::invalid_argument("unknown model: " + model);
}

RunRecord run_experiment(const ExperimentConfig& config, int max_threads) {
    const auto t0 = std::chrono::steady_clock::now();
    if (config.seeds.empty()) throw std::invalid_argument("run_experiment: no seeds");
    (void)task_from_name(config.task);
    (void)default_config(config.task, config.model);  // validates the model name

    fs::create_directories(config.out_dir);
    const SyntheticTask task = make_task(task_from_name(config.task));

    RunRecord record;
    record.config = config;
    record.per_seed.resize(config.seeds.size());
    record.trace_paths.resize(config.seeds.size());

    std::vector<std::function<void()>> jobs;
    for (size_t si = 0; si < config.seeds.size(); ++si) {
        jobs.push_back([&, si]() {
            const uint64_t seed = config.seeds[si];
            SeededRng base(seed);
            SeededRng rng_data = base.child(kDataStream);
            SeededRng rng_train = base.child(kTrainStream);
            SeededRng rng_eval = base.child(kEvalStream);

            const DatasetSplits splits = make_splits(task, rng_data);
            const TrainedArtifacts trained = train_model(config, splits, rng_train);

            const std::string trace_path = config.out_dir + "/trace_" + config.model + "_" +
                                           std::to_string(seed) + ".csv";
            write_trace_csv(trace_path, trained.trace);
            record.trace_paths[si] = trace_path;

            save_models(config.out_dir + "/model_" + config.model + "_seed" +
                            std::to_string(seed) + ".params",
                        trained.parts);

            const PolicySampler policy = make_policy(config.model, trained.parts, task);
            SampleSet samples;
            record.per_seed[si] = evaluate_policy(config, task, policy, splits.test, rng_eval,
                                                  si == 0 ? &samples : nullptr);

            if (si == 0 && task.kind != TaskKind::Ik2Link) {
                write_scatter_csv(scatter_path(config), splits.test, samples);
                if (const EnergyNet* e = landscape_net(config.model, trained.parts))
                    write_landscape(config, task, *e);
            }
        });
    }
    run_parallel(jobs, max_threads);

    auto [mean, stddev] = aggregate_reports(record.per_seed);
    record.mean = mean;
    record.stddev = stddev;

    {
        std::ofstream out(config.out_dir + "/metrics.csv");
        if (!out) throw std::runtime_error("cannot write metrics.csv");
        out << metrics_csv_header() << "\n";
        for (size_t si = 0; si < config.seeds.size(); ++si)
            out << metrics_csv_row("seed_" + std::to_string(config.seeds[si]),
                                   record.per_seed[si])
                << "\n";
        out << metrics_csv_row("mean", record.mean) << "\n";
        out << metrics_csv_row("std", record.stddev) << "\n";
    }
    {
        std::ofstream out(config.out_dir + "/config.json");
        out << config_to_json(config).dump(2) << "\n";
    }

    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        std::ofstream out(config.out_dir + "/runinfo.json");
        out << "{\"wall_seconds\": " << fmt(record.wall_seconds) << "}\n";
    }
    return record;
}

std::vector<RunRecord> run_suite(const std::string& suite, const std::string& out_dir,
                                 int max_threads, const nlohmann::json& overrides) {
    std::vector<SuiteCell> cells = suite_cells(suite, out_dir);
    if (!overrides.empty()) {
        for (auto& cell : cells) {
            json merged = config_to_json(cell.config);
            merged.update(overrides);
            merged["out"] = cell.config.out_dir;  // cell directories stay disjoint
            cell.config = config_from_json(merged);
        }
    }
    fs::create_directories(out_dir);

    std::vector<RunRecord> records(cells.size());
    std::vector<std::function<void()>> jobs;
    for (size_t i = 0; i < cells.size(); ++i)
        jobs.push_back([&, i]() { records[i] = run_experiment(cells[i].config, 1); });
    run_parallel(jobs, max_threads);

    write_suite_tables(out_dir, suite, cells, records);
    return records;
}

void export_plot_data(const std::string& run_dir) {
    std::ifstream in(run_dir + "/config.json");
    if (!in) throw std::runtime_error("no config.json under " + run_dir);
    json j;
    in >> j;
    ExperimentConfig config = config_from_json(j);
    config.out_dir = run_dir;

    const SyntheticTask task = make_task(task_from_name(config.task));
    if (task.kind == TaskKind::Ik2Link) return;  // no 1-D plot data for the arm task

    const uint64_t seed = config.seeds.front();
    const NamedModels parts =
        load_models(run_dir + "/model_" + config.model + "_seed" + std::to_string(seed) +
                    ".params");

    SeededRng base(seed);
    SeededRng rng_data = base.child(kDataStream);
    SeededRng rng_eval = base.child(kEvalStream);
    const DatasetSplits splits = make_splits(task, rng_data);

    const PolicySampler policy = make_policy(config.model, parts, task);
    const SampleSet samples =
        collect_policy_samples(policy, splits.test, config.eval_samples, rng_eval);
    write_scatter_csv(scatter_path(config), splits.test, samples);
    if (const EnergyNet* e = landscape_net(config.model, parts)) write_landscape(config, task, *e);
}

}  // namespace mmbc
