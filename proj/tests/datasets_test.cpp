#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "mmbc/datasets.hpp"

using namespace mmbc;

namespace {
double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}
}  // namespace

TEST_CASE("hyperbola oracle: closed-form modes") {
    const SyntheticTask task = make_task(TaskKind::Hyperbola);
    auto m0 = task.modes({0.0});
    REQUIRE(m0.size() == 2);
    CHECK(m0[0][0] == doctest::Approx(0.1));
    CHECK(m0[1][0] == doctest::Approx(-0.1));
    auto m1 = task.modes({1.0});
    CHECK(m1[0][0] == doctest::Approx(std::sqrt(1.01)));
    CHECK(m1[1][0] == doctest::Approx(-std::sqrt(1.01)));
}

TEST_CASE("hyperbola generator: branch balance over 10^4 samples") {
    SeededRng rng(2024);
    const auto samples = generate_hyperbola(10000, rng);
    int upper = 0;
    for (const auto& s : samples)
        if (s.target[0] > 0) ++upper;
    const double frac = upper / 10000.0;
    CHECK(frac >= 0.47);
    CHECK(frac <= 0.53);
}

TEST_CASE("oracle soundness: zero-noise samples land exactly on modes") {
    SyntheticTask task = make_task(TaskKind::Lines);
    task.noise_std = 0.0;
    SeededRng rng(5);
    for (const auto& s : generate_samples(task, 500, rng)) {
        bool hit = false;
        for (const auto& m : task.modes(s.condition)) hit = hit || s.target[0] == m[0];
        CHECK(hit);
    }
}

TEST_CASE("lines oracle: star geometry") {
    const SyntheticTask task = make_task(TaskKind::Lines);
    auto m0 = task.modes({0.0});
    REQUIRE(m0.size() == 3);
    CHECK(m0[0][0] == 0.0);
    CHECK(m0[1][0] == 0.0);
    CHECK(m0[2][0] == 0.0);
    auto mh = task.modes({0.5});
    CHECK(mh[0][0] == doctest::Approx(0.5));
    CHECK(mh[1][0] == doctest::Approx(-0.5));
    CHECK(mh[2][0] == doctest::Approx(0.0));
}

TEST_CASE("lines generator: mode-choice frequencies near 1/3") {
    SeededRng rng(77);
    const auto samples = generate_lines(10000, rng);
    int counts[3] = {0, 0, 0};
    const SyntheticTask task = make_task(TaskKind::Lines);
    for (const auto& s : samples) {
        const auto ms = task.modes(s.condition);
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(s.target[0] - ms[i][0]) < std::abs(s.target[0] - ms[best][0])) best = i;
        ++counts[best];
    }
    // near c=0 the three modes collapse, so assignment there is arbitrary but
    // still roughly equiprobable
    for (int c : counts) {
        CHECK(c / 10000.0 >= 0.30);
        CHECK(c / 10000.0 <= 0.37);
    }
}

TEST_CASE("ik2link solver: fully extended boundary gives one solution") {
    const SyntheticTask task = make_task(TaskKind::Ik2Link);
    const auto sols = ik2link_solve(task, {6.0, 0.0});
    REQUIRE(sols.size() == 1);
    CHECK(sols[0][0] == doctest::Approx(0.0));
    CHECK(sols[0][1] == doctest::Approx(0.0));
}

TEST_CASE("ik2link solver: (3,3) elbow pair round-trips") {
    const SyntheticTask task = make_task(TaskKind::Ik2Link);
    const auto sols = ik2link_solve(task, {3.0, 3.0});
    REQUIRE(sols.size() == 2);
    std::set<std::string> found;
    for (const auto& s : sols) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f,%.4f", s[0], s[1]);
        found.insert(buf);
        const auto p = ik2link_fk(task, s);
        CHECK(dist2(p, {3.0, 3.0}) < 1e-18);
    }
    CHECK(found.count("0.0000,1.5708") == 1);
    CHECK(found.count("1.5708,-1.5708") == 1);
}

TEST_CASE("ik2link solver: unreachable target is a domain error") {
    const SyntheticTask task = make_task(TaskKind::Ik2Link);
    CHECK_THROWS_AS(ik2link_solve(task, {7.0, 0.0}), std::domain_error);
}

TEST_CASE("ik2link solver: 10^3 random reachable targets round-trip within 1e-9") {
    const SyntheticTask task = make_task(TaskKind::Ik2Link);
    SeededRng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const double r = 0.05 + 5.9 * rng.uniform01();
        const double a = rng.uniform(-3.14159, 3.14159);
        const std::vector<double> target{r * std::cos(a), r * std::sin(a)};
        const auto sols = ik2link_solve(task, target);
        for (const auto& s : sols) CHECK(dist2(ik2link_fk(task, s), target) <= 1e-18);
        if (r < 5.99) {  // interior: exactly two distinct branches
            REQUIRE(sols.size() == 2);
            CHECK(dist2(sols[0], sols[1]) > 1e-12);
        }
    }
}

TEST_CASE("ik2link dataset: construction invariants") {
    SeededRng rng(8);
    const auto samples = generate_ik2link(rng);
    CHECK(samples.size() == 512);
    const SyntheticTask task = make_task(TaskKind::Ik2Link);
    int elbow_up = 0;
    for (const auto& s : samples) {
        CHECK(dist2(ik2link_fk(task, s.target), s.condition) <= 1e-18);
        if (s.target[1] >= 0) ++elbow_up;
    }
    CHECK(elbow_up >= 0.30 * 512);
    CHECK(512 - elbow_up >= 0.30 * 512);
}

TEST_CASE("negative sampling: bounds, rejection radius, count") {
    const SyntheticTask task = make_task(TaskKind::Hyperbola);
    SeededRng rng(12);
    const std::vector<double> c{0.4};
    const auto ms = task.modes(c);
    const auto negs = sample_negatives(c, 32, task, rng);
    CHECK(negs.size() == 32);
    for (const auto& n : negs) {
        CHECK(n[0] >= -1.05);
        CHECK(n[0] <= 1.05);
        for (const auto& m : ms) CHECK(dist2(n, m) > 0.05 * 0.05);
    }
}

TEST_CASE("test grid: linspace endpoints and spacing") {
    const SyntheticTask task = make_task(TaskKind::Hyperbola);
    const auto grid = make_test_grid(task, 100);
    REQUIRE(grid.size() == 100);
    CHECK(grid.front().condition[0] == doctest::Approx(-1.0));
    CHECK(grid.back().condition[0] == doctest::Approx(1.0));
    CHECK(grid[1].condition[0] - grid[0].condition[0] == doctest::Approx(2.0 / 99.0));
    CHECK(grid.front().modes[0][0] == doctest::Approx(std::sqrt(1.01)));

    const auto lines_grid = make_test_grid(make_task(TaskKind::Lines), 100);
    for (const auto& g : lines_grid) CHECK(g.modes.size() == 3);
}

TEST_CASE("test grid: pure function of task and count") {
    const SyntheticTask task = make_task(TaskKind::Lines);
    const auto a = make_test_grid(task, 50);
    const auto b = make_test_grid(task, 50);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].condition == b[i].condition);
    CHECK_THROWS_AS(make_test_grid(task, 1), std::invalid_argument);
}

TEST_CASE("ik test targets: fixed across calls") {
    const SyntheticTask task = make_task(TaskKind::Ik2Link);
    const auto a = make_ik_test_targets(task, 50);
    const auto b = make_ik_test_targets(task, 50);
    REQUIRE(a.size() == 50);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].condition == b[i].condition);
}

TEST_CASE("dataset csv export: header and row count") {
    SeededRng rng(3);
    const auto samples = generate_hyperbola(20, rng);
    const std::string path = "/tmp/mmbc_test_samples.csv";
    write_samples_csv(path, samples);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "c_0,x_0");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 20);
}
