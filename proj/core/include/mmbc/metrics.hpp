#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mmbc/datasets.hpp"

namespace mmbc {

// Fixed-binning histogram over a shared range; densities normalized so
// sum(density) * binwidth = 1.
struct Histogram {
    int bins = 50;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> densities;

    double binwidth() const { return (hi - lo) / bins; }
    // Probability mass of bin b.
    double mass(int b) const { return densities[b] * binwidth(); }
};

Histogram build_histogram(const std::vector<double>& values, double lo, double hi, int bins);

using SampleSet = std::vector<std::vector<std::vector<double>>>;  // condition -> draws -> dims

// Percentage of conditions for which every true mode is matched by at least
// one sample within epsilon (Euclidean distance).
double total_mode_coverage(const SampleSet& samples_per_condition,
                           const SampleSet& modes_per_condition, double epsilon = 0.07);

// Mean over conditions of the number of modes matched by >= 1 sample.
double avg_modes_captured(const SampleSet& samples_per_condition,
                          const SampleSet& modes_per_condition, double epsilon = 0.07);

// Histogram KL over the hull of both 1-D sample sets; delta stabilizes the
// ratios. Natural log.
double kl_divergence_hist(const std::vector<double>& true_targets,
                          const std::vector<double>& generated_targets, int bins = 50,
                          double delta = 1e-10);

// 1-D W1 via cumulative histograms: sum_b |CDF_p - CDF_q| * binwidth.
double wasserstein_hist(const std::vector<double>& true_targets,
                        const std::vector<double>& generated_targets, int bins = 50);

// Draws k actions for a condition.
using PolicySampler = std::function<std::vector<std::vector<double>>(
    const std::vector<double>& condition, int k, SeededRng& rng)>;

// Arm-task success: per target, k sampled actions pass through forward
// kinematics; a target succeeds when any action lands within tolerance.
// Returns {best, mean}: fraction of targets with >= 1 success, and the mean
// per-target success fraction.
std::pair<double, double> ik_success_rates(const PolicySampler& sampler, const SyntheticTask& task,
                                           const std::vector<GridPoint>& targets, int k,
                                           double tolerance, SeededRng& rng);

// One run's scores; NaN = not applicable for the task.
struct MetricsReport {
    double tmc_percent = std::numeric_limits<double>::quiet_NaN();
    double amc = std::numeric_limits<double>::quiet_NaN();
    double kl = std::numeric_limits<double>::quiet_NaN();
    double wasserstein = std::numeric_limits<double>::quiet_NaN();
    double success_best = std::numeric_limits<double>::quiet_NaN();
    double success_mean = std::numeric_limits<double>::quiet_NaN();
};

// Elementwise mean and population standard deviation (denominator n).
std::pair<MetricsReport, MetricsReport> aggregate_reports(const std::vector<MetricsReport>& runs);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& label, const MetricsReport& r);
std::string metrics_json(const MetricsReport& r);

}  // namespace mmbc
