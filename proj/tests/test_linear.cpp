#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "recloss/linear.hpp"
#include "recloss/rng.hpp"

using namespace recloss;

namespace {

InteractionDataset random_dataset(int n_users, int n_items, double density, std::uint64_t seed) {
    auto rng = make_rng(seed, "ds");
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < n_users; ++u)
        for (int i = 0; i < n_items; ++i)
            if (coin(rng) < density) pairs.emplace_back(u, i);
    // make sure every user and item shows up at least once
    for (int u = 0; u < n_users; ++u) pairs.emplace_back(u, u % n_items);
    for (int i = 0; i < n_items; ++i) pairs.emplace_back(i % n_users, i);
    return InteractionDataset::from_pairs(n_users, n_items, std::move(pairs));
}

Eigen::MatrixXd dense_x(const InteractionDataset& ds) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(ds.n_users, ds.n_items);
    for (int u = 0; u < ds.n_users; ++u)
        for (int i : ds.pos_by_user[u]) x(u, i) = 1.0;
    return x;
}

// From-scratch constrained ridge solve in long double: one KKT system per
// column, full-pivot LU. Independent of the closed-form route in ease_fit.
Eigen::MatrixXd ease_kkt_oracle(const Eigen::MatrixXd& x, double lambda) {
    using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const int n = static_cast<int>(x.cols());
    const LongMatrix g = (x.transpose() * x).cast<long double>();
    LongMatrix w(n, n);
    for (int j = 0; j < n; ++j) {
        LongMatrix kkt = LongMatrix::Zero(n + 1, n + 1);
        kkt.topLeftCorner(n, n) = g;
        for (int i = 0; i < n; ++i) kkt(i, i) += lambda;
        kkt(j, n) = 1.0L;
        kkt(n, j) = 1.0L;
        LongVector rhs = LongVector::Zero(n + 1);
        rhs.head(n) = g.col(j);
        const LongVector sol = Eigen::FullPivLU<LongMatrix>(kkt).solve(rhs);
        w.col(j) = sol.head(n);
    }
    return w.cast<double>();
}

}  // namespace

TEST_CASE("ials 1x1 hand algebra") {
    auto ds = InteractionDataset::from_pairs(1, 1, {{0, 0}});
    IalsConfig cfg;
    cfg.d = 1;
    cfg.alpha0 = 0.1;
    cfg.lambda = 0.01;
    cfg.nu = 0.0;
    cfg.c = 1.0;
    cfg.debiased = true;
    Eigen::MatrixXd h(1, 1), w(1, 1);
    h << 0.7;
    w << 0.0;
    ials_half_step_users(ds, cfg, h, w);
    const double hv = 0.7;
    const double expected = hv / ((1.0 - 0.1) * hv * hv + 0.1 * hv * hv + 0.01);
    CHECK(w(0, 0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("ials half-sweeps never increase their own objective") {
    auto ds = random_dataset(50, 40, 0.06, 3);

    SUBCASE("original objective") {
        IalsConfig cfg;
        cfg.d = 8;
        cfg.alpha0 = 0.2;
        cfg.lambda = 0.05;
        cfg.nu = 1.0;
        cfg.seed = 5;
        Eigen::MatrixXd w = Eigen::MatrixXd::Random(50, 8) * 0.1;
        Eigen::MatrixXd h = Eigen::MatrixXd::Random(40, 8) * 0.1;
        double prev = ials_objective(ds, cfg, w, h);
        for (int sweep = 0; sweep < 6; ++sweep) {
            ials_half_step_users(ds, cfg, h, w);
            const double after_users = ials_objective(ds, cfg, w, h);
            CHECK(after_users <= prev + 1e-9);
            ials_half_step_items(ds, cfg, w, h);
            const double after_items = ials_objective(ds, cfg, w, h);
            CHECK(after_items <= after_users + 1e-9);
            prev = after_items;
        }
    }

    SUBCASE("debiased objective at c = 1.5") {
        IalsConfig cfg;
        cfg.d = 8;
        cfg.alpha0 = 0.2;
        cfg.lambda = 0.05;
        cfg.nu = 0.0;
        cfg.c = 1.5;
        cfg.debiased = true;
        Eigen::MatrixXd w = Eigen::MatrixXd::Random(50, 8) * 0.1;
        Eigen::MatrixXd h = Eigen::MatrixXd::Random(40, 8) * 0.1;
        double prev = ials_objective(ds, cfg, w, h);
        for (int sweep = 0; sweep < 6; ++sweep) {
            ials_half_step_users(ds, cfg, h, w);
            const double after_users = ials_objective(ds, cfg, w, h);
            CHECK(after_users <= prev + 1e-9);
            ials_half_step_items(ds, cfg, w, h);
            const double after_items = ials_objective(ds, cfg, w, h);
            CHECK(after_items <= after_users + 1e-9);
            prev = after_items;
        }
    }
}

TEST_CASE("ials_fit determinism") {
    auto ds = random_dataset(20, 15, 0.1, 7);
    IalsConfig cfg;
    cfg.d = 4;
    cfg.iters = 3;
    cfg.seed = 13;
    auto a = ials_fit(ds, cfg);
    auto b = ials_fit(ds, cfg);
    CHECK(a.user_factors == b.user_factors);
    CHECK(a.item_factors == b.item_factors);
}

TEST_CASE("remap arithmetic") {
    auto [a1, l1] = remap_ials_params(0.1, 1e-3, 1.5);
    CHECK(a1 == doctest::Approx(0.1 / 1.35).epsilon(1e-12));
    CHECK(l1 == doctest::Approx(1e-3 / 1.35).epsilon(1e-12));

    // identity limit: c = 1, alpha0 -> 0
    auto [a2, l2] = remap_ials_params(1e-9, 0.5, 1.0);
    CHECK(a2 == doctest::Approx(1e-9).epsilon(1e-6));
    CHECK(l2 == doctest::Approx(0.5).epsilon(1e-6));

    auto [a3, l3] = remap_ials_params(0.5, 0.3, 2.0);
    CHECK(a3 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(l3 == doctest::Approx(0.3).epsilon(1e-12));

    CHECK_THROWS(remap_ials_params(1.0, 0.1, 1.0));
    CHECK_THROWS(remap_ials_params(0.5, 0.1, 0.0));
}

TEST_CASE("theorem 1 certification on a small instance") {
    auto ds = random_dataset(60, 45, 0.05, 21);
    auto report = verify_theorem1(ds, 6, 0.15, 1e-2, 1.5, 17, 5, 10);
    CHECK(report.max_cosine_deviation_users < 1e-10);
    CHECK(report.max_cosine_deviation_items < 1e-10);
    CHECK(report.max_k_rel_deviation_users < 1e-9);
    CHECK(report.max_k_rel_deviation_items < 1e-9);
    CHECK(report.max_sweep_cosine_deviation < 1e-10);
    CHECK(report.topk_identical);
    CHECK(report.topk_total_users == 60);

    // c = 1: still exactly proportional; the runs differ only by the
    // (1 - alpha0) rescaling absorbed into the remapped parameters.
    auto identity = verify_theorem1(ds, 6, 0.15, 1e-2, 1.0, 17, 3, 10);
    CHECK(identity.max_cosine_deviation_users < 1e-10);
    CHECK(identity.topk_identical);
}

TEST_CASE("ease closed form on the identity matrix") {
    auto ds = InteractionDataset::from_pairs(3, 3, {{0, 0}, {1, 1}, {2, 2}});
    EaseConfig cfg;
    cfg.lambda = 1.0;
    auto m = ease_fit(ds, cfg);
    CHECK(m.weights.isZero(1e-14));
    for (int u = 0; u < 3; ++u) CHECK(linear_scores(m, ds, u).isZero(1e-14));
}

TEST_CASE("ease matches the constrained ridge oracle") {
    auto ds = random_dataset(20, 15, 0.15, 31);
    EaseConfig cfg;
    cfg.lambda = 0.7;
    auto m = ease_fit(ds, cfg);
    const Eigen::MatrixXd w_oracle = ease_kkt_oracle(dense_x(ds), 0.7);
    CHECK((m.weights - w_oracle).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("debiased ease satisfies its stationarity conditions") {
    auto ds = random_dataset(25, 12, 0.2, 33);
    EaseConfig cfg;
    cfg.lambda = 0.4;
    cfg.alpha = 0.35;
    cfg.debiased = true;
    auto m = ease_fit(ds, cfg);
    // [(1 - alpha) G + lambda I] W - G must be diagonal (Lagrange multipliers
    // on the zero-diagonal constraint).
    const Eigen::MatrixXd x = dense_x(ds);
    const Eigen::MatrixXd g = x.transpose() * x;
    Eigen::MatrixXd resid =
        ((1.0 - cfg.alpha) * g + cfg.lambda * Eigen::MatrixXd::Identity(12, 12)) * m.weights - g;
    resid.diagonal().setZero();
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-8);
    CHECK(m.weights.diagonal().cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("ease alpha = 0 reduces to the original") {
    auto ds = random_dataset(18, 10, 0.2, 35);
    EaseConfig orig;
    orig.lambda = 0.9;
    EaseConfig deb;
    deb.lambda = 0.9;
    deb.alpha = 0.0;
    deb.debiased = true;
    auto a = ease_fit(ds, orig);
    auto b = ease_fit(ds, deb);
    CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("theorem 2 certification") {
    auto ds = random_dataset(30, 20, 0.12, 41);

    auto report = verify_theorem2(ds, 0.5, 0.3, 10);
    CHECK(report.max_rel_deviation < 1e-10);
    CHECK(report.topk_identical);

    auto extreme = verify_theorem2(ds, 0.5, 0.9, 10);
    CHECK(extreme.max_rel_deviation < 1e-10);

    EaseConfig bad;
    bad.lambda = 0.5;
    bad.alpha = 1.0;
    bad.debiased = true;
    CHECK_THROWS(bad.validate());
    CHECK_THROWS(ease_lambda_remap(0.5, 1.0));
}

TEST_CASE("ease diagonal invariant on random fits") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto ds = random_dataset(22, 14, 0.15, seed);
        EaseConfig cfg;
        cfg.lambda = 0.2 + 0.3 * seed;
        auto m = ease_fit(ds, cfg);
        CHECK(m.weights.diagonal().cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("unconstrained debiased closed form is stationary") {
    // W = ((1 - alpha) X'X)^-1 X'X solves min ||X - XW||^2 - alpha ||XW||^2
    // when X'X is invertible; used as an oracle only, never as a model.
    auto rng = make_rng(55, "unconstrained");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd x(8, 4);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 4; ++c) x(r, c) = gauss(rng);
    const double alpha = 0.3;
    const Eigen::MatrixXd g = x.transpose() * x;
    const Eigen::MatrixXd w = ((1.0 - alpha) * g).ldlt().solve(g);
    const Eigen::MatrixXd grad = 2.0 * ((1.0 - alpha) * g * w - g);
    CHECK(grad.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("linear scores and persistence") {
    auto ds = random_dataset(12, 9, 0.2, 61);

    IalsConfig icfg;
    icfg.d = 3;
    icfg.iters = 2;
    auto ials = ials_fit(ds, icfg);
    for (int u : {0, 5, 11}) {
        auto s = linear_scores(ials, ds, u);
        for (int i = 0; i < 9; ++i)
            CHECK(s(i) == doctest::Approx(ials.user_factors.row(u).dot(
                              ials.item_factors.row(i))));
    }

    EaseConfig ecfg;
    ecfg.lambda = 0.8;
    auto ease = ease_fit(ds, ecfg);

    save_linear(ials, "/tmp/recloss_test_ials");
    auto ials_back = load_linear("/tmp/recloss_test_ials");
    CHECK(ials_back.user_factors == ials.user_factors);
    save_linear(ease, "/tmp/recloss_test_ease");
    auto ease_back = load_linear("/tmp/recloss_test_ease");
    CHECK(ease_back.weights == ease.weights);
    for (const char* f : {"/tmp/recloss_test_ials.meta", "/tmp/recloss_test_ials.user.bin",
                          "/tmp/recloss_test_ials.item.bin", "/tmp/recloss_test_ease.meta",
                          "/tmp/recloss_test_ease.weights.bin"})
        std::remove(f);
}

TEST_CASE("config validation") {
    IalsConfig cfg;
    cfg.alpha0 = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg.alpha0 = 0.1;
    cfg.lambda = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg.lambda = 0.1;
    cfg.c = -1.0;
    CHECK_THROWS(cfg.validate());
}
