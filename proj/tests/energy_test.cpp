#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "fd_check.hpp"
#include "mmbc/energy.hpp"

using namespace mmbc;

namespace {

std::vector<std::vector<double>> constant_targets(int n, double v) {
    return std::vector<std::vector<double>>(n, std::vector<double>{v});
}

// Net rigged so E(c, x) = x (selects the target coordinate).
EnergyNet passthrough_energy() {
    EnergyNet e;
    e.cond_dim = 1;
    e.target_dim = 1;
    e.net = zero_net({2, 1}, Activation::ReLU);
    e.net.weights[0](0, 1) = 1.0;
    return e;
}

}  // namespace

TEST_CASE("energy: zero net scores zero, evaluation deterministic") {
    EnergyNet e;
    e.net = zero_net({2, 4, 1}, Activation::ReLU);
    CHECK(energy(e, {0.5}, {-0.3}) == 0.0);
    SeededRng rng(3);
    EnergyNet e2 = make_energy(1, 1, {8, 8}, rng);
    CHECK(energy(e2, {0.2}, {0.9}) == energy(e2, {0.2}, {0.9}));
}

TEST_CASE("energy: matches straight-line MLP evaluation") {
    SeededRng rng(8);
    EnergyNet e = make_energy(1, 1, {4}, rng);
    const double c = 0.3, x = -0.8;
    std::vector<double> h(4);
    for (int i = 0; i < 4; ++i) {
        double s = e.net.biases[0][i] + e.net.weights[0](i, 0) * c + e.net.weights[0](i, 1) * x;
        h[i] = s > 0 ? s : 0.0;
    }
    double out = e.net.biases[1][0];
    for (int i = 0; i < 4; ++i) out += e.net.weights[1](0, i) * h[i];
    CHECK(energy(e, {c}, {x}) == doctest::Approx(out).epsilon(1e-12));
}

TEST_CASE("alpha schedule: exact values and clamping") {
    CHECK(alpha_schedule(0, 100) == doctest::Approx(1.0));
    CHECK(alpha_schedule(50, 100) == doctest::Approx(0.5));
    CHECK(alpha_schedule(95, 100) == doctest::Approx(0.1));  // max(0.05, 0.1)
    CHECK(alpha_schedule(100, 100) == doctest::Approx(0.1));
    double prev = 2.0;
    for (int t = 0; t <= 100; ++t) {
        const double a = alpha_schedule(t, 100);
        CHECK(a <= prev);
        CHECK(a >= 0.1);
        CHECK(a <= 1.0);
        prev = a;
    }
}

TEST_CASE("infonce: uniform softmax identities") {
    EnergyNet e;
    e.net = zero_net({2, 4, 1}, Activation::ReLU);  // all energies equal (zero)

    // counts {2, 32, 34, 65}: 1 positive + n negatives (+ maybe 1 generator)
    CHECK(infonce_loss(e, {0.1}, {0.2}, constant_targets(1, 0.5), {}, 0.0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(infonce_loss(e, {0.1}, {0.2}, constant_targets(31, 0.5), {}, 0.0) ==
          doctest::Approx(std::log(32.0)).epsilon(1e-12));
    CHECK(infonce_loss(e, {0.1}, {0.2}, constant_targets(32, 0.5), constant_targets(1, -0.5), 1.0) ==
          doctest::Approx(std::log(34.0)).epsilon(1e-12));
    CHECK(infonce_loss(e, {0.1}, {0.2}, constant_targets(64, 0.5), {}, 0.0) ==
          doctest::Approx(std::log(65.0)).epsilon(1e-12));

    // ln(N+2) with one generator sample at alpha=1
    const int n = 7;
    CHECK(infonce_loss(e, {0.1}, {0.2}, constant_targets(n, 0.5), constant_targets(1, -0.5), 1.0) ==
          doctest::Approx(std::log(n + 2.0)).epsilon(1e-12));
}

TEST_CASE("infonce: single-entry softmax is zero loss") {
    SeededRng rng(14);
    EnergyNet e = make_energy(1, 1, {8}, rng);
    CHECK(infonce_loss(e, {0.4}, {0.1}, {}, {}, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("infonce: missing positive is a usage error") {
    EnergyNet e;
    e.net = zero_net({2, 1}, Activation::ReLU);
    CHECK_THROWS_AS(infonce_loss(e, {0.1}, {}, constant_targets(3, 0.5), {}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("infonce: shift invariance under a constant energy offset") {
    SeededRng rng(2);
    std::vector<double> energies = {0.3, -1.2, 0.7, 2.5, -0.4};
    const double base = infonce_element(energies.data(), 2, 2, 0.7, nullptr);
    for (double& v : energies) v += 17.3;
    const double shifted = infonce_element(energies.data(), 2, 2, 0.7, nullptr);
    CHECK(std::abs(base - shifted) < 1e-9);
}

TEST_CASE("infonce: loss nonnegative, monotone in the positive and negatives") {
    std::vector<double> energies = {0.0, 1.0, -0.5, 0.3};
    const double base = infonce_element(energies.data(), 3, 0, 0.0, nullptr);
    CHECK(base >= 0.0);

    auto with_pos = energies;
    with_pos[0] += 0.5;  // raising the positive increases the loss
    CHECK(infonce_element(with_pos.data(), 3, 0, 0.0, nullptr) > base);

    auto with_neg = energies;
    with_neg[1] += 0.5;  // raising a negative decreases it
    CHECK(infonce_element(with_neg.data(), 3, 0, 0.0, nullptr) < base);
}

TEST_CASE("infonce: continuous and non-decreasing in alpha") {
    std::vector<double> energies = {0.2, 0.9, -0.3, -1.0, 0.5};
    double prev = infonce_element(energies.data(), 2, 2, 0.0, nullptr);
    for (double alpha = 0.05; alpha <= 1.0; alpha += 0.05) {
        const double cur = infonce_element(energies.data(), 2, 2, alpha, nullptr);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
    }
    // continuity near 0
    const double at0 = infonce_element(energies.data(), 2, 2, 0.0, nullptr);
    const double at_eps = infonce_element(energies.data(), 2, 2, 1e-9, nullptr);
    CHECK(at_eps - at0 < 1e-6);
}

TEST_CASE("infonce gradients match finite differences in all four modes") {
    int seed = 300;
    struct ModeSpec {
        int negatives;
        int gens;
        double alpha;
    };
    for (const auto& m : {ModeSpec{6, 0, 0.0}, ModeSpec{6, 1, 1.0}, ModeSpec{6, 6, 1.0},
                          ModeSpec{6, 1, 0.35}}) {
        for (int rep = 0; rep < 5; ++rep) {
            SeededRng rng(seed++);
            EnergyNet e = make_energy(1, 1, {6, 6}, rng);
            const std::vector<double> c{rng.uniform(-1, 1)};
            const std::vector<double> xp{rng.uniform(-1, 1)};
            std::vector<std::vector<double>> negs, gens;
            for (int i = 0; i < m.negatives; ++i) negs.push_back({rng.uniform(-1, 1)});
            for (int i = 0; i < m.gens; ++i) gens.push_back({rng.uniform(-1, 1)});

            // analytic: assemble per-pair energies, backprop the softmax grad
            const int per = 1 + m.negatives + m.gens;
            Matrix inputs(per, 2);
            inputs(0, 0) = c[0];
            inputs(0, 1) = xp[0];
            for (int i = 0; i < m.negatives; ++i) {
                inputs(1 + i, 0) = c[0];
                inputs(1 + i, 1) = negs[i][0];
            }
            for (int i = 0; i < m.gens; ++i) {
                inputs(1 + m.negatives + i, 0) = c[0];
                inputs(1 + m.negatives + i, 1) = gens[i][0];
            }
            ForwardTrace trace;
            const Matrix out = forward(e.net, inputs, &trace);
            std::vector<double> evec(per), dvec(per);
            for (int i = 0; i < per; ++i) evec[i] = out(i, 0);
            infonce_element(evec.data(), m.negatives, m.gens, m.alpha, dvec.data());
            Matrix d_out(per, 1);
            for (int i = 0; i < per; ++i) d_out(i, 0) = dvec[i];
            NetGrads grads = make_grads(e.net);
            backward(e.net, trace, d_out, grads);
            const auto analytic = get_grads_flat(grads);

            EnergyNet probe = e;
            auto loss = [&](const std::vector<double>& params) {
                set_params(probe.net, params);
                return infonce_loss(probe, c, xp, negs, gens, m.alpha);
            };
            const auto numeric = fd::gradient(loss, get_params(e.net));
            CHECK(fd::max_rel_err(analytic, numeric) < 1e-4);
        }
    }
}

TEST_CASE("mi lower bound") {
    CHECK(mi_lower_bound(std::log(32.0), 32) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mi_lower_bound(0.0, 32) == doctest::Approx(std::log(32.0)).epsilon(1e-12));
    for (double loss : {0.0, 0.5, 3.0})
        CHECK(mi_lower_bound(loss, 20) <= std::log(20.0) + 1e-12);
    CHECK_THROWS_AS(mi_lower_bound(1.0, 0), std::invalid_argument);
}

TEST_CASE("landscape grid: zero net, shape, pointwise agreement") {
    EnergyNet zero;
    zero.net = zero_net({2, 3, 1}, Activation::ReLU);
    const Matrix grid = energy_landscape_grid(zero, -1, 1, -2, 2, 5);
    CHECK(grid.rows == 5);
    CHECK(grid.cols == 5);
    for (double v : grid.data) CHECK(v == 0.0);

    SeededRng rng(77);
    EnergyNet e = make_energy(1, 1, {8}, rng);
    const int res = 7;
    const Matrix g = energy_landscape_grid(e, -1, 1, -1.05, 1.05, res);
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
            const double c = -1.0 + 2.0 * i / (res - 1);
            const double x = -1.05 + 2.1 * j / (res - 1);
            CHECK(g(i, j) == doctest::Approx(energy(e, {c}, {x})).epsilon(1e-12));
        }
}

TEST_CASE("landscape grid: multi-dimensional nets rejected") {
    SeededRng rng(1);
    EnergyNet e = make_energy(2, 2, {8}, rng);
    CHECK_THROWS_AS(energy_landscape_grid(e, -1, 1, -1, 1, 10), std::invalid_argument);
    EnergyNet ok = make_energy(1, 1, {8}, rng);
    CHECK_THROWS_AS(energy_landscape_grid(ok, -1, 1, -1, 1, 1), std::invalid_argument);
}

TEST_CASE("passthrough energy selects the target coordinate") {
    EnergyNet e = passthrough_energy();
    CHECK(energy(e, {0.9}, {0.25}) == doctest::Approx(0.25));
    CHECK(energy(e, {-0.9}, {0.7}) == doctest::Approx(0.7));
}
