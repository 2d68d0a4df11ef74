#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "fd_check.hpp"
#include "mmbc/datasets.hpp"
#include "mmbc/mdn.hpp"

using namespace mmbc;

namespace {

MdnGenerator tiny_mdn(const NoiseSpec& noise, int components = 2, int latent = 2, SeededRng* rng = nullptr) {
    SeededRng fallback(100);
    return make_mdn(1, latent, 1, components, {8, 8}, noise, rng ? *rng : fallback);
}

void zero_params(MdnGenerator& gen) {
    set_params(gen.net, std::vector<double>(param_count(gen.net), 0.0));
}

}  // namespace

TEST_CASE("mdn_forward: zero-initialized heads give the symmetric mixture") {
    MdnGenerator gen = tiny_mdn({NoiseModel::Diagonal, 0.0});
    zero_params(gen);
    const GmmParams p = mdn_forward(gen, {0.3}, {0.1, -0.2});
    CHECK(p.weights[0] == doctest::Approx(0.5));
    CHECK(p.weights[1] == doctest::Approx(0.5));
    CHECK(p.means(0, 0) == 0.0);
    CHECK(p.means(1, 0) == 0.0);
    CHECK(p.scales(0, 0) == doctest::Approx(std::log(2.0) + kScaleFloor));
}

TEST_CASE("mdn_forward: simplex and scale-floor invariants over random nets") {
    SeededRng rng(21);
    for (int trial = 0; trial < 1000; ++trial) {
        const int noise_pick = trial % 5;
        NoiseSpec spec;
        spec.kind = static_cast<NoiseModel>(noise_pick);
        spec.fixed_level = 1e-2;
        MdnGenerator gen = tiny_mdn(spec, 3, 2, &rng);
        const GmmParams p = mdn_forward(gen, {rng.uniform(-1, 1)}, {rng.normal(), rng.normal()});
        double sum = 0.0;
        for (double w : p.weights) {
            CHECK(w >= 0.0);
            sum += w;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        for (double s : p.scales.data) CHECK(s >= kScaleFloor);
    }
}

TEST_CASE("mdn_forward: large temperature flattens pi") {
    SeededRng rng(33);
    MdnGenerator gen = tiny_mdn({NoiseModel::Diagonal, 0.0}, 4, 2, &rng);
    gen.temperature = 1e3;
    const GmmParams p = mdn_forward(gen, {0.7}, {1.0, 1.0});
    double lo = 1.0, hi = 0.0;
    for (double w : p.weights) {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    CHECK(hi - lo < 1e-3);
}

TEST_CASE("gmm_sample: degenerate mixture concentrates at its mean") {
    GmmParams p;
    p.weights = {1.0, 0.0};
    p.means = Matrix(2, 1);
    p.means(0, 0) = 0.37;
    p.means(1, 0) = -5.0;
    p.scales = Matrix(2, 1, kScaleFloor);
    SeededRng rng(4);
    for (int i = 0; i < 100; ++i) {
        const auto x = gmm_sample(p, {NoiseModel::Diagonal, 0.0}, rng);
        CHECK(std::abs(x[0] - 0.37) <= 6 * kScaleFloor);
    }
}

TEST_CASE("gmm_sample: two-cluster frequencies and means") {
    GmmParams p;
    p.weights = {0.5, 0.5};
    p.means = Matrix(2, 1);
    p.means(0, 0) = -1.0;
    p.means(1, 0) = 1.0;
    p.scales = Matrix(2, 1, 0.01);
    SeededRng rng(99);
    int upper = 0;
    double upper_sum = 0.0, lower_sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double x = gmm_sample(p, {NoiseModel::Diagonal, 0.0}, rng)[0];
        if (x > 0) {
            ++upper;
            upper_sum += x;
        } else {
            lower_sum += x;
        }
    }
    const double frac = upper / static_cast<double>(n);
    CHECK(frac >= 0.47);
    CHECK(frac <= 0.53);
    CHECK(upper_sum / upper == doctest::Approx(1.0).epsilon(0.01));
    CHECK(lower_sum / (n - upper) == doctest::Approx(-1.0).epsilon(0.01));
}

TEST_CASE("gmm_sample: Laplace scale b gives variance 2 b^2") {
    GmmParams p;
    p.weights = {1.0};
    p.means = Matrix(1, 1, 0.0);
    const double b = 0.3;
    p.scales = Matrix(1, 1, b);
    SeededRng rng(7);
    const int n = 100000;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = gmm_sample(p, {NoiseModel::LaplaceDiagonal, 0.0}, rng)[0];
        var += x * x;
    }
    var /= n;
    CHECK(var == doctest::Approx(2.0 * b * b).epsilon(0.10));
}

TEST_CASE("gmm_nll: single Gaussian at its mean is the closed-form density") {
    GmmParams p;
    p.weights = {1.0};
    p.means = Matrix(1, 1, 0.4);
    p.scales = Matrix(1, 1, 1.0);
    const double nll = gmm_nll(p, {0.4}, {NoiseModel::Diagonal, 0.0});
    CHECK(nll == doctest::Approx(0.9189385332).epsilon(1e-9));
}

TEST_CASE("gmm_nll: identical components collapse to one") {
    GmmParams one;
    one.weights = {1.0};
    one.means = Matrix(1, 1, 0.2);
    one.scales = Matrix(1, 1, 0.5);
    GmmParams two;
    two.weights = {0.3, 0.7};
    two.means = Matrix(2, 1, 0.2);
    two.scales = Matrix(2, 1, 0.5);
    const NoiseSpec spec{NoiseModel::Diagonal, 0.0};
    CHECK(gmm_nll(two, {-0.9}, spec) == doctest::Approx(gmm_nll(one, {-0.9}, spec)).epsilon(1e-12));
}

TEST_CASE("gmm_nll: Laplace density closed form") {
    GmmParams p;
    p.weights = {1.0};
    p.means = Matrix(1, 1, 0.0);
    p.scales = Matrix(1, 1, 0.25);
    // -log( 1/(2b) exp(-|x|/b) ), x=0.5, b=0.25
    const double expected = std::log(2.0 * 0.25) + 0.5 / 0.25;
    CHECK(gmm_nll(p, {0.5}, {NoiseModel::LaplaceDiagonal, 0.0}) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("gmm_nll gradients match finite differences for every noise model") {
    int seed = 50;
    for (auto kind : {NoiseModel::Diagonal, NoiseModel::Isotropic,
                      NoiseModel::IsotropicAcrossClusters, NoiseModel::Fixed,
                      NoiseModel::LaplaceDiagonal}) {
        for (int rep = 0; rep < 4; ++rep) {
            SeededRng rng(seed++);
            NoiseSpec spec{kind, 1e-2};
            MdnGenerator gen = tiny_mdn(spec, 3, 2, &rng);
            const std::vector<double> c{rng.uniform(-1, 1)};
            const std::vector<double> z{rng.normal(), rng.normal()};
            const std::vector<double> x{rng.uniform(-1, 1)};

            const MdnEval ev = mdn_eval(gen, c, z);
            Matrix d_raw(1, mdn_output_dim(gen));
            gmm_nll_backward(gen, ev, x, d_raw.row(0));

            // push the raw-head gradient through the net and compare against
            // finite differences on the full parameter vector
            Matrix in(1, 3);
            in.data = {c[0], z[0], z[1]};
            ForwardTrace trace;
            forward(gen.net, in, &trace);
            NetGrads grads = make_grads(gen.net);
            backward(gen.net, trace, d_raw, grads);
            const auto analytic = get_grads_flat(grads);

            MdnGenerator probe = gen;
            auto loss = [&](const std::vector<double>& params) {
                set_params(probe.net, params);
                return gmm_nll(mdn_forward(probe, c, z), x, spec);
            };
            const auto numeric = fd::gradient(loss, get_params(gen.net));
            CHECK(fd::max_rel_err(analytic, numeric) < 1e-4);
        }
    }
}

TEST_CASE("mdn_loss_standalone: perfect one-component fit and batch symmetry") {
    SeededRng rng(42);
    NoiseSpec spec{NoiseModel::Diagonal, 0.0};
    MdnGenerator gen = make_mdn(1, 0, 1, 1, {4}, spec, rng);
    zero_params(gen);
    // raw scale such that softplus(raw) + floor = 1: raw = log(e^1 - 1) - adjustment
    const double raw_scale = std::log(std::exp(1.0 - kScaleFloor) - 1.0);
    gen.net.biases[1] = {0.0, 0.0, raw_scale};  // logit, mean, scale heads

    Sample s;
    s.condition = {0.5};
    s.target = {0.0};
    SeededRng r1(1);
    CHECK(mdn_loss_standalone(gen, {s}, r1) == doctest::Approx(0.9189385332).epsilon(1e-9));

    // permutation invariance
    SeededRng gen_rng(9);
    MdnGenerator g2 = make_mdn(1, 0, 1, 2, {8}, spec, gen_rng);
    std::vector<Sample> batch;
    for (int i = 0; i < 6; ++i) {
        Sample b;
        b.condition = {0.1 * i};
        b.target = {0.2 * i - 0.5};
        batch.push_back(b);
    }
    std::vector<Sample> reversed(batch.rbegin(), batch.rend());
    SeededRng ra(3), rb(3);
    CHECK(mdn_loss_standalone(g2, batch, ra) ==
          doctest::Approx(mdn_loss_standalone(g2, reversed, rb)).epsilon(1e-12));
}

TEST_CASE("mdn_loss_standalone: decreases under Adam on a tiny fixed batch") {
    SeededRng rng(5);
    NoiseSpec spec{NoiseModel::Isotropic, 0.0};
    MdnGenerator gen = make_mdn(1, 0, 1, 2, {16}, spec, rng);
    AdamState adam = make_adam(gen.net, 1e-2);

    std::vector<Sample> batch;
    for (int i = 0; i < 8; ++i) {
        Sample s;
        s.condition = {-1.0 + 0.25 * i};
        s.target = {i % 2 == 0 ? 0.5 : -0.5};
        batch.push_back(s);
    }

    SeededRng r0(1);
    const double initial = mdn_loss_standalone(gen, batch, r0);

    ForwardTrace trace;
    NetGrads grads = make_grads(gen.net);
    const int raw_dim = mdn_output_dim(gen);
    for (int step = 0; step < 100; ++step) {
        Matrix in(8, 1);
        for (int i = 0; i < 8; ++i) in(i, 0) = batch[i].condition[0];
        const Matrix raw = forward(gen.net, in, &trace);
        Matrix d_raw(8, raw_dim);
        for (int i = 0; i < 8; ++i) {
            const MdnEval ev = mdn_eval_raw(gen, raw.row(i));
            gmm_nll_backward(gen, ev, batch[i].target, d_raw.row(i));
            for (int j = 0; j < raw_dim; ++j) d_raw(i, j) /= 8;
        }
        grads.set_zero();
        backward(gen.net, trace, d_raw, grads);
        adam_step(gen.net, grads, adam);
    }
    SeededRng r1(1);
    CHECK(mdn_loss_standalone(gen, batch, r1) < initial);
}

TEST_CASE("mdn_loss_standalone: empty batch rejected") {
    MdnGenerator gen = tiny_mdn({NoiseModel::Diagonal, 0.0});
    SeededRng rng(1);
    CHECK_THROWS_AS(mdn_loss_standalone(gen, {}, rng), std::invalid_argument);
}

TEST_CASE("noise names round-trip") {
    for (const char* name : {"diagonal", "isotropic", "isotropic_across_clusters", "fixed_0.01",
                             "laplace_diagonal"}) {
        CHECK(noise_name(noise_from_name(name)) == name);
    }
    CHECK(noise_from_name("fixed_1e-3").fixed_level == doctest::Approx(1e-3));
    CHECK_THROWS_AS(noise_from_name("gaussian"), std::invalid_argument);
}
