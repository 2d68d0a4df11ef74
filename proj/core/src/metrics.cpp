#include "mmbc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mmbc {

namespace {

double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

int modes_matched(const std::vector<std::vector<double>>& samples,
                  const std::vector<std::vector<double>>& modes, double epsilon) {
    int matched = 0;
    for (const auto& m : modes) {
        for (const auto& s : samples) {
            if (dist(s, m) <= epsilon) {
                ++matched;
                break;
            }
        }
    }
    return matched;
}

void shared_range(const std::vector<double>& a, const std::vector<double>& b, double& lo,
                  double& hi) {
    lo = 1e300;
    hi = -1e300;
    for (double v : a) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : b) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12) hi = lo + 1e-12;  // degenerate hull: everything lands in bin 0
}

std::string format_cell(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

Histogram build_histogram(const std::vector<double>& values, double lo, double hi, int bins) {
    if (bins < 1) throw std::invalid_argument("build_histogram: bins must be >= 1");
    if (values.empty()) throw std::invalid_argument("build_histogram: empty value set");
    Histogram h;
    h.bins = bins;
    h.lo = lo;
    h.hi = hi;
    h.densities.assign(bins, 0.0);
    const double w = h.binwidth();
    for (double v : values) {
        int b = static_cast<int>((v - lo) / w);
        b = std::clamp(b, 0, bins - 1);
        h.densities[b] += 1.0;
    }
    const double total = static_cast<double>(values.size());
    for (double& d : h.densities) d /= total * w;
    return h;
}

double total_mode_coverage(const SampleSet& samples_per_condition,
                           const SampleSet& modes_per_condition, double epsilon) {
    const size_t n = samples_per_condition.size();
    if (n == 0 || modes_per_condition.size() != n)
        throw std::invalid_argument("total_mode_coverage: empty or mismatched test set");
    int covered = 0;
    for (size_t i = 0; i < n; ++i) {
        const auto& modes = modes_per_condition[i];
        if (modes_matched(samples_per_condition[i], modes, epsilon) ==
            static_cast<int>(modes.size()))
            ++covered;
    }
    return 100.0 * covered / static_cast<double>(n);
}

double avg_modes_captured(const SampleSet& samples_per_condition,
                          const SampleSet& modes_per_condition, double epsilon) {
    const size_t n = samples_per_condition.size();
    if (n == 0 || modes_per_condition.size() != n)
        throw std::invalid_argument("avg_modes_captured: empty or mismatched test set");
    double total = 0.0;
    for (size_t i = 0; i < n; ++i)
        total += modes_matched(samples_per_condition[i], modes_per_condition[i], epsilon);
    return total / static_cast<double>(n);
}

double kl_divergence_hist(const std::vector<double>& true_targets,
                          const std::vector<double>& generated_targets, int bins, double delta) {
    if (true_targets.empty() || generated_targets.empty())
        throw std::invalid_argument("kl_divergence_hist: empty sample set");
    double lo, hi;
    shared_range(true_targets, generated_targets, lo, hi);
    const Histogram p = build_histogram(true_targets, lo, hi, bins);
    const Histogram q = build_histogram(generated_targets, lo, hi, bins);
    double kl = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double pb = p.mass(b) + delta;
        const double qb = q.mass(b) + delta;
        kl += pb * std::log(pb / qb);
    }
    return kl;
}

double wasserstein_hist(const std::vector<double>& true_targets,
                        const std::vector<double>& generated_targets, int bins) {
    if (true_targets.empty() || generated_targets.empty())
        throw std::invalid_argument("wasserstein_hist: empty sample set");
    double lo, hi;
    shared_range(true_targets, generated_targets, lo, hi);
    const Histogram p = build_histogram(true_targets, lo, hi, bins);
    const Histogram q = build_histogram(generated_targets, lo, hi, bins);
    const double w = p.binwidth();
    double cdf_p = 0.0, cdf_q = 0.0, dist1 = 0.0;
    for (int b = 0; b < bins; ++b) {
        cdf_p += p.mass(b);
        cdf_q += q.mass(b);
        dist1 += std::abs(cdf_p - cdf_q) * w;
    }
    return dist1;
}

std::pair<double, double> ik_success_rates(const PolicySampler& sampler, const SyntheticTask& task,
                                           const std::vector<GridPoint>& targets, int k,
                                           double tolerance, SeededRng& rng) {
    if (targets.empty()) throw std::invalid_argument("ik_success_rates: no targets");
    int any_hit = 0;
    double frac_sum = 0.0;
    for (const auto& t : targets) {
        const auto actions = sampler(t.condition, k, rng);
        int hits = 0;
        for (const auto& a : actions) {
            const auto pos = ik2link_fk(task, a);
            if (dist(pos, t.condition) <= tolerance) ++hits;
        }
        if (hits > 0) ++any_hit;
        frac_sum += static_cast<double>(hits) / static_cast<double>(actions.size());
    }
    const double n = static_cast<double>(targets.size());
    return {any_hit / n, frac_sum / n};
}

std::pair<MetricsReport, MetricsReport> aggregate_reports(const std::vector<MetricsReport>& runs) {
    if (runs.empty()) throw std::invalid_argument("aggregate_reports: no runs");
    auto fields = [](const MetricsReport& r) {
        return std::vector<double>{r.tmc_percent, r.amc, r.kl, r.wasserstein, r.success_best, r.success_mean};
    };
    const size_t nf = 6;
    std::vector<double> mean(nf, 0.0), var(nf, 0.0);
    for (const auto& r : runs) {
        const auto f = fields(r);
        for (size_t i = 0; i < nf; ++i) mean[i] += f[i];
    }
    for (size_t i = 0; i < nf; ++i) mean[i] /= runs.size();
    for (const auto& r : runs) {
        const auto f = fields(r);
        for (size_t i = 0; i < nf; ++i) {
            const double d = f[i] - mean[i];
            var[i] += d * d;
        }
    }
    for (size_t i = 0; i < nf; ++i) var[i] = std::sqrt(var[i] / runs.size());

    auto unpack = [](const std::vector<double>& f) {
        MetricsReport r;
        r.tmc_percent = f[0];
        r.amc = f[1];
        r.kl = f[2];
        r.wasserstein = f[3];
        r.success_best = f[4];
        r.success_mean = f[5];
        return r;
    };
    return {unpack(mean), unpack(var)};
}

std::string metrics_csv_header() {
    return "label,tmc_percent,amc,kl,wasserstein,success_best,success_mean";
}

std::string metrics_csv_row(const std::string& label, const MetricsReport& r) {
    std::string row = label;
    for (double v : {r.tmc_percent, r.amc, r.kl, r.wasserstein, r.success_best, r.success_mean}) {
        row += ",";
        row += format_cell(v);
    }
    return row;
}

std::string metrics_json(const MetricsReport& r) {
    std::string out = "{";
    const char* names[] = {"tmc_percent", "amc", "kl", "wasserstein", "success_best", "success_mean"};
    const double vals[] = {r.tmc_percent, r.amc, r.kl, r.wasserstein, r.success_best, r.success_mean};
    for (int i = 0; i < 6; ++i) {
        out += "\"";
        out += names[i];
        out += "\":";
        out += std::isnan(vals[i]) ? "null" : format_cell(vals[i]);
        if (i < 5) out += ",";
    }
    out += "}";
    return out;
}

}  // namespace mmbc
