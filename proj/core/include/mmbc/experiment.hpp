#pragma once

#include <string>
#include <vector>

#include "mmbc/baselines.hpp"
#include "mmbc/metrics.hpp"
#include "mmbc/serialize.hpp"
#include "mmbc/trainer.hpp"

#include <json.hpp>

namespace mmbc {

// Fully resolved experiment: task x model plus every training and evaluation
// knob. Unspecified fields fall back to the per-(task, model) table defaults.
struct ExperimentConfig {
    std::string task = "hyperbola";
    std::string model = "ebgan_mdn";
    TrainConfig train;
    std::vector<uint64_t> seeds = {0, 1, 2, 3, 4};
    std::string out_dir = "out";
    int eval_samples = 10;      // K draws per test condition for TMC/AMC
    int dist_samples = 200;     // per-condition draws pooled for KL/W
    double epsilon = 0.07;      // mode-match tolerance
    int histogram_bins = 50;    // B
    double ik_tolerance = 0.2;  // meters
    int landscape_resolution = 100;
};

const std::vector<std::string>& known_models();

// Paper-table defaults for a (task, model) cell.
ExperimentConfig default_config(const std::string& task, const std::string& model);

nlohmann::json config_to_json(const ExperimentConfig& config);

// Builds defaults from json["task"]/json["model"] (falling back to the given
// ones), then applies any overriding keys present in the document.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& fallback_task = "",
                                  const std::string& fallback_model = "");

struct RunRecord {
    ExperimentConfig config;
    std::vector<MetricsReport> per_seed;
    MetricsReport mean;
    MetricsReport stddev;
    double wall_seconds = 0.0;
    std::vector<std::string> trace_paths;
};

// Trains and evaluates every seed, writing under config.out_dir:
//   config.json, metrics.csv, trace_<model>_<seed>.csv,
//   model_<model>_seed<seed>.params, scatter_<model>.csv and (for
//   energy-bearing 1-D models) landscape_<model>.csv, runinfo.json.
// max_threads > 1 runs seeds concurrently.
RunRecord run_experiment(const ExperimentConfig& config, int max_threads = 1);

const std::vector<std::string>& known_suites();

// Runs every cell of a named suite and writes <out_dir>/table.csv and
// table.txt next to the per-cell run directories. max_threads <= 0 defaults
// to the number of cells. overrides (optional) patch every cell's config.
std::vector<RunRecord> run_suite(const std::string& suite, const std::string& out_dir,
                                 int max_threads = 0,
                                 const nlohmann::json& overrides = nlohmann::json::object());

// Regenerates plot data (prediction scatter, landscape grid) for a completed
// run directory from its config echo and serialized first-seed model.
void export_plot_data(const std::string& run_dir);

// Test-grid samples drawn by one policy; reused by evaluation and the
// scatter export so both see identical draws.
SampleSet collect_policy_samples(const PolicySampler& policy, const std::vector<GridPoint>& grid,
                                 int k, SeededRng& rng);

// Policy over a serialized model bundle (shared by run and export paths).
PolicySampler make_policy(const std::string& model, const NamedModels& parts,
                          const SyntheticTask& task);

}  // namespace mmbc
