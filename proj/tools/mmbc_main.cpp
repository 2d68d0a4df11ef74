#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmbc/experiment.hpp"

using nlohmann::json;

namespace {

int env_threads() {
    const char* v = std::getenv("MMBC_THREADS");
    if (!v) return 0;
    const int n = std::atoi(v);
    return n > 0 ? n : 0;
}

void print_record(const mmbc::RunRecord& rec) {
    std::printf("%s x %s  (%zu seeds, %.1fs)\n", rec.config.task.c_str(), rec.config.model.c_str(),
                rec.config.seeds.size(), rec.wall_seconds);
    const auto& m = rec.mean;
    const auto& s = rec.stddev;
    if (rec.config.task == "ik2link") {
        std::printf("  success best %.3f +- %.3f   mean %.3f +- %.3f\n", m.success_best,
                    s.success_best, m.success_mean, s.success_mean);
    } else {
        std::printf("  KL %.4f +- %.4f   W %.4f +- %.4f   TMC %.2f +- %.2f   AMC %.3f +- %.3f\n",
                    m.kl, s.kl, m.wasserstein, s.wasserstein, m.tmc_percent, s.tmc_percent, m.amc,
                    s.amc);
    }
    std::printf("  outputs: %s\n", rec.config.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-modal behavior cloning benchmarks: energy-adversarial MDN and baselines"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run = app.add_subcommand("run", "Train and evaluate one task x model experiment");
    std::string config_path, task, model, out_dir, noise, infonce_mode;
    std::vector<uint64_t> seeds;
    int epochs = -1, negatives = -1, batch_size = -1, components = -1, latent_dim = -1;
    int energy_updates = -1, eval_samples = -1, threads = 0;
    double lr_generator = -1.0, lr_energy = -1.0;
    run->add_option("--config", config_path, "JSON config file (flags override file values)");
    run->add_option("--task", task, "hyperbola | lines | ik2link");
    run->add_option("--model", model, "ebgan_mdn | explicit_bc | mdn | cgan | ebgan | ibc");
    run->add_option("--seeds", seeds, "Seeds (default 0..4)");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--noise", noise,
                    "diagonal | isotropic | isotropic_across_clusters | fixed_<level> | "
                    "laplace_diagonal");
    run->add_option("--infonce-mode", infonce_mode,
                    "no_generator | standard | equal_ratio | dynamic_scaling");
    run->add_option("--epochs", epochs, "Training epochs");
    run->add_option("--negatives", negatives, "Negative samples per element");
    run->add_option("--batch-size", batch_size, "Batch size");
    run->add_option("--components", components, "Mixture components");
    run->add_option("--latent-dim", latent_dim, "Latent dimension");
    run->add_option("--energy-updates", energy_updates, "Inner energy/discriminator steps");
    run->add_option("--eval-samples", eval_samples, "Samples per test condition (K)");
    run->add_option("--lr-generator", lr_generator, "Generator learning rate");
    run->add_option("--lr-energy", lr_energy, "Energy/discriminator learning rate");
    run->add_option("--threads", threads, "Concurrent seed runs (default MMBC_THREADS or #seeds)");

    // ---- suite ----
    auto* suite = app.add_subcommand("suite", "Run a full comparison table");
    std::string suite_name, suite_out = "out";
    int suite_threads = 0, suite_epochs = -1;
    std::vector<uint64_t> suite_seeds;
    suite->add_option("name", suite_name,
                      "bench1_hyperbola | bench1_lines | noise_ablation | "
                      "generator_config_ablation | ik2link")
        ->required();
    suite->add_option("--out", suite_out, "Output directory");
    suite->add_option("--threads", suite_threads,
                      "Concurrent cells (default MMBC_THREADS or #cells)");
    suite->add_option("--epochs", suite_epochs, "Override training epochs for every cell");
    suite->add_option("--seeds", suite_seeds, "Override seeds for every cell");

    // ---- export ----
    auto* exp = app.add_subcommand("export", "Regenerate plot data for a completed run");
    std::string export_dir;
    exp->add_option("--run", export_dir, "Run directory (holds config.json)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            json j = json::object();
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw std::runtime_error("cannot open config file " + config_path);
                in >> j;
            }
            if (!task.empty()) j["task"] = task;
            if (!model.empty()) j["model"] = model;
            if (!seeds.empty()) j["seeds"] = seeds;
            if (!out_dir.empty()) j["out"] = out_dir;
            if (!noise.empty()) j["noise"] = noise;
            if (!infonce_mode.empty()) j["infonce_mode"] = infonce_mode;
            if (epochs >= 0) j["epochs"] = epochs;
            if (negatives >= 0) j["negatives"] = negatives;
            if (batch_size >= 0) j["batch_size"] = batch_size;
            if (components >= 0) j["components"] = components;
            if (latent_dim >= 0) j["latent_dim"] = latent_dim;
            if (energy_updates >= 0) j["energy_updates"] = energy_updates;
            if (eval_samples >= 0) j["eval_samples"] = eval_samples;
            if (lr_generator >= 0) j["lr_generator"] = lr_generator;
            if (lr_energy >= 0) j["lr_energy"] = lr_energy;

            const mmbc::ExperimentConfig cfg = mmbc::config_from_json(j);
            int t = threads > 0 ? threads : env_threads();
            if (t <= 0) t = static_cast<int>(cfg.seeds.size());
            print_record(mmbc::run_experiment(cfg, t));
        } else if (suite->parsed()) {
            json overrides = json::object();
            if (suite_epochs >= 0) overrides["epochs"] = suite_epochs;
            if (!suite_seeds.empty()) overrides["seeds"] = suite_seeds;
            int t = suite_threads > 0 ? suite_threads : env_threads();
            const auto records = mmbc::run_suite(suite_name, suite_out, t, overrides);
            for (const auto& rec : records) print_record(rec);
            std::printf("table: %s/table.txt\n", suite_out.c_str());
        } else if (exp->parsed()) {
            mmbc::export_plot_data(export_dir);
            std::printf("plot data regenerated under %s\n", export_dir.c_str());
        }
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
