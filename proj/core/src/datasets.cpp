#include "mmbc/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mmbc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNegativeRejectRadius = 0.05;
constexpr int kNegativeMaxRetries = 100;
constexpr uint64_t kIkTestTargetSeed = 0x6d6d62632d696bULL;

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<double> sample_reachable_position(const SyntheticTask& task, SeededRng& rng) {
    const double reach = task.link1 + task.link2;
    for (;;) {
        const double x = rng.uniform(-reach, reach);
        const double y = rng.uniform(-reach, reach);
        if (x * x + y * y <= reach * reach) return {x, y};
    }
}

}  // namespace

SyntheticTask make_task(TaskKind kind) {
    SyntheticTask t;
    t.kind = kind;
    if (kind == TaskKind::Ik2Link) t.noise_std = 0.0;
    return t;
}

TaskKind task_from_name(const std::string& name) {
    if (name == "hyperbola") return TaskKind::Hyperbola;
    if (name == "lines") return TaskKind::Lines;
    if (name == "ik2link") return TaskKind::Ik2Link;
    throw std::invalid_argument("unknown task: " + name);
}

std::string task_name(TaskKind kind) {
    switch (kind) {
        case TaskKind::Hyperbola: return "hyperbola";
        case TaskKind::Lines: return "lines";
        case TaskKind::Ik2Link: return "ik2link";
    }
    return "?";
}

std::vector<std::vector<double>> SyntheticTask::modes(const std::vector<double>& condition) const {
    switch (kind) {
        case TaskKind::Hyperbola: {
            const double c = condition.at(0);
            const double m = std::sqrt(hyperbola_a * hyperbola_a + hyperbola_b * hyperbola_b * c * c);
            return {{m}, {-m}};
        }
        case TaskKind::Lines: {
            const double c = condition.at(0);
            return {{lines_slope * c}, {-lines_slope * c}, {0.0}};
        }
        case TaskKind::Ik2Link:
            return ik2link_solve(*this, condition);
    }
    return {};
}

void SyntheticTask::target_bounds(std::vector<double>& lo, std::vector<double>& hi) const {
    if (kind == TaskKind::Ik2Link) {
        lo.assign(2, -kPi);
        hi.assign(2, kPi);
    } else {
        lo.assign(1, -1.05);
        hi.assign(1, 1.05);
    }
}

std::vector<Sample> generate_samples(const SyntheticTask& task, int n, SeededRng& rng) {
    if (n < 1) throw std::invalid_argument("generate_samples: n must be >= 1");
    std::vector<Sample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Sample s;
        if (task.kind == TaskKind::Ik2Link) {
            s.condition = sample_reachable_position(task, rng);
            const auto sols = ik2link_solve(task, s.condition);
            s.target = sols[rng.index(sols.size())];
        } else {
            s.condition = {rng.uniform(task.condition_lo(), task.condition_hi())};
            const auto ms = task.modes(s.condition);
            s.target = ms[rng.index(ms.size())];
            for (double& v : s.target) v += task.noise_std * rng.normal();
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Sample> generate_hyperbola(int n, SeededRng& rng) {
    return generate_samples(make_task(TaskKind::Hyperbola), n, rng);
}

std::vector<Sample> generate_lines(int n, SeededRng& rng) {
    return generate_samples(make_task(TaskKind::Lines), n, rng);
}

std::vector<Sample> generate_ik2link(SeededRng& rng, int n) {
    return generate_samples(make_task(TaskKind::Ik2Link), n, rng);
}

std::vector<double> ik2link_fk(const SyntheticTask& task, const std::vector<double>& joint_angles) {
    const double t1 = joint_angles.at(0);
    const double t12 = t1 + joint_angles.at(1);
    return {task.link1 * std::cos(t1) + task.link2 * std::cos(t12),
            task.link1 * std::sin(t1) + task.link2 * std::sin(t12)};
}

std::vector<std::vector<double>> ik2link_solve(const SyntheticTask& task, const std::vector<double>& target) {
    const double px = target.at(0), py = target.at(1);
    const double l1 = task.link1, l2 = task.link2;
    const double r2 = px * px + py * py;
    const double r = std::sqrt(r2);
    if (r > l1 + l2 + 1e-12 || r < std::abs(l1 - l2) - 1e-12)
        throw std::domain_error("ik2link_solve: target outside reachable workspace");

    double cos_t2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    cos_t2 = std::clamp(cos_t2, -1.0, 1.0);
    const double t2 = std::acos(cos_t2);
    const double bearing = std::atan2(py, px);

    auto solution = [&](double theta2) {
        const double t1 = bearing - std::atan2(l2 * std::sin(theta2), l1 + l2 * std::cos(theta2));
        return std::vector<double>{wrap_angle(t1), wrap_angle(theta2)};
    };

    if (t2 < 1e-12) return {solution(0.0)};  // fully extended: branches coincide
    return {solution(t2), solution(-t2)};
}

std::vector<std::vector<double>> sample_negatives(const std::vector<double>& condition, int n,
                                                  const SyntheticTask& task, SeededRng& rng) {
    if (n < 1) throw std::invalid_argument("sample_negatives: n must be >= 1");
    std::vector<double> lo, hi;
    task.target_bounds(lo, hi);
    const auto ms = task.modes(condition);
    const double r2 = kNegativeRejectRadius * kNegativeRejectRadius;
    const int dim = static_cast<int>(lo.size());

    std::vector<std::vector<double>> out;
    out.reserve(n);
    std::vector<double> draw(dim);
    for (int i = 0; i < n; ++i) {
        for (int attempt = 0; attempt < kNegativeMaxRetries; ++attempt) {
            for (int d = 0; d < dim; ++d) draw[d] = rng.uniform(lo[d], hi[d]);
            bool near_mode = false;
            for (const auto& m : ms)
                if (sq_dist(draw, m) <= r2) {
                    near_mode = true;
                    break;
                }
            if (!near_mode) break;
        }
        out.push_back(draw);
    }
    return out;
}

std::vector<GridPoint> make_test_grid(const SyntheticTask& task, int count) {
    if (count < 2) throw std::invalid_argument("make_test_grid: count must be >= 2");
    if (task.condition_dim() != 1)
        throw std::invalid_argument("make_test_grid: 1-D condition tasks only");
    std::vector<GridPoint> grid;
    grid.reserve(count);
    const double lo = task.condition_lo(), hi = task.condition_hi();
    for (int i = 0; i < count; ++i) {
        GridPoint g;
        g.condition = {lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1)};
        g.modes = task.modes(g.condition);
        grid.push_back(std::move(g));
    }
    return grid;
}

std::vector<GridPoint> make_ik_test_targets(const SyntheticTask& task, int count) {
    SeededRng rng(kIkTestTargetSeed);
    std::vector<GridPoint> grid;
    grid.reserve(count);
    for (int i = 0; i < count; ++i) {
        GridPoint g;
        g.condition = sample_reachable_position(task, rng);
        g.modes = ik2link_solve(task, g.condition);
        grid.push_back(std::move(g));
    }
    return grid;
}

DatasetSplits make_splits(const SyntheticTask& task, SeededRng& rng) {
    DatasetSplits splits;
    splits.task = task;
    if (task.kind == TaskKind::Ik2Link) {
        splits.train = generate_samples(task, 512, rng);
        splits.validation = generate_samples(task, 100, rng);
        splits.test = make_ik_test_targets(task, 50);
    } else {
        splits.train = generate_samples(task, 500, rng);
        splits.validation = generate_samples(task, 100, rng);
        splits.test = make_test_grid(task, 100);
    }
    return splits;
}

void write_samples_csv(const std::string& path, const std::vector<Sample>& samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    if (samples.empty()) return;
    const size_t dc = samples.front().condition.size();
    const size_t dx = samples.front().target.size();
    for (size_t i = 0; i < dc; ++i) out << "c_" << i << ",";
    for (size_t i = 0; i < dx; ++i) out << "x_" << i << (i + 1 < dx ? "," : "\n");
    char buf[32];
    for (const auto& s : samples) {
        for (double v : s.condition) {
            std::snprintf(buf, sizeof buf, "%.10g", v);
            out << buf << ",";
        }
        for (size_t i = 0; i < dx; ++i) {
            std::snprintf(buf, sizeof buf, "%.10g", s.target[i]);
            out << buf << (i + 1 < dx ? "," : "\n");
        }
    }
}

}  // namespace mmbc
