#pragma once

#include <string>
#include <vector>

#include "mmbc/rng.hpp"

namespace mmbc {

// One (condition, target) pair.
struct Sample {
    std::vector<double> condition;
    std::vector<double> target;
};

enum class TaskKind { Hyperbola, Lines, Ik2Link };

// Synthetic task with an exact mode oracle. The oracle is the ground truth
// used for data synthesis, negative-sample rejection and mode-coverage
// scoring.
struct SyntheticTask {
    TaskKind kind = TaskKind::Hyperbola;
    double noise_std = 0.02;

    // hyperbola: modes +-sqrt(a^2 + b^2 c^2)
    double hyperbola_a = 0.1;
    double hyperbola_b = 1.0;
    // lines: modes {m c, -m c, 0}
    double lines_slope = 1.0;
    // 2-link arm
    double link1 = 3.0;
    double link2 = 3.0;

    int condition_dim() const { return kind == TaskKind::Ik2Link ? 2 : 1; }
    int target_dim() const { return kind == TaskKind::Ik2Link ? 2 : 1; }

    // Exact target modes for a condition (noiseless).
    std::vector<std::vector<double>> modes(const std::vector<double>& condition) const;

    // Per-dimension target box; negatives and derivative-free inference draw
    // from it. Benchmark-1 tasks: [-1.05, 1.05] (max |mode| plus noise
    // margin); 2-link arm: joint angles in [-pi, pi].
    void target_bounds(std::vector<double>& lo, std::vector<double>& hi) const;

    // Condition range for the 1-D tasks (training draws and plot grids).
    double condition_lo() const { return -1.0; }
    double condition_hi() const { return 1.0; }
};

SyntheticTask make_task(TaskKind kind);
TaskKind task_from_name(const std::string& name);
std::string task_name(TaskKind kind);

// Training-sample generators. Conditions are drawn uniformly over the task's
// condition domain; each target is one oracle mode chosen uniformly, plus
// N(0, noise_std^2) noise for the 1-D tasks. The arm task carries no noise:
// targets are exact inverse-kinematics solutions.
std::vector<Sample> generate_samples(const SyntheticTask& task, int n, SeededRng& rng);
std::vector<Sample> generate_hyperbola(int n, SeededRng& rng);
std::vector<Sample> generate_lines(int n, SeededRng& rng);
std::vector<Sample> generate_ik2link(SeededRng& rng, int n = 512);

// Forward kinematics of the planar 2-link arm.
std::vector<double> ik2link_fk(const SyntheticTask& task, const std::vector<double>& joint_angles);

// Analytic inverse kinematics: elbow-up / elbow-down joint angles for a
// reachable target, one solution where the branches coincide (workspace
// boundary). Throws std::domain_error for unreachable targets.
std::vector<std::vector<double>> ik2link_solve(const SyntheticTask& task, const std::vector<double>& target);

// Uniform draws over the target box, redrawn while within eps_neg = 0.05 of
// a true mode of c (at most 100 retries per draw, then kept as-is).
std::vector<std::vector<double>> sample_negatives(const std::vector<double>& condition, int n,
                                                  const SyntheticTask& task, SeededRng& rng);

struct GridPoint {
    std::vector<double> condition;
    std::vector<std::vector<double>> modes;
};

// Fixed evaluation grid: conditions equally spaced over [-1, 1] inclusive
// with noiseless oracle modes. 1-D-condition tasks only.
std::vector<GridPoint> make_test_grid(const SyntheticTask& task, int count = 100);

// Fixed arm-task evaluation targets, identical across models and runs
// (drawn from a constant internal seed).
std::vector<GridPoint> make_ik_test_targets(const SyntheticTask& task, int count = 50);

struct DatasetSplits {
    SyntheticTask task;
    std::vector<Sample> train;
    std::vector<Sample> validation;
    std::vector<GridPoint> test;
};

// Task-default splits: 500/100/100-grid for the 1-D tasks, 512/100/50-targets
// for the arm. The test grid does not consume rng draws.
DatasetSplits make_splits(const SyntheticTask& task, SeededRng& rng);

// CSV export with header c_0,...,c_{dc-1},x_0,...,x_{dx-1}.
void write_samples_csv(const std::string& path, const std::vector<Sample>& samples);

}  // namespace mmbc
