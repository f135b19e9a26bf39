#include <doctest.h>

#include <cmath>

#include "crossimpact/signals.hpp"
#include "test_helpers.hpp"

using namespace crossimpact;
using namespace crossimpact::testing;

namespace {

MarketParams liquidation_market() {
    MarketParams m;
    m.N = 2;
    m.T = 10.0;
    m.Lambda = 0.03 * Matrix::Identity(2, 2);
    m.Sigma = Matrix::Zero(2, 2);
    m.gamma = 0.0;
    m.varrho = 4.0;
    m.Pi = Matrix::Identity(2, 2);
    m.X0 = (Vector(2) << 10.0, 0.0).finished();
    return m;
}

}  // namespace

TEST_CASE("simulate_ou_path: zero noise tracks the exact exponential decay") {
    Vector beta(2), I0(2);
    beta << 0.9, 0.3;
    I0 << 0.5, 0.5;
    const auto model = SignalModel::ou(beta, I0, Matrix::Zero(2, 2));
    const Grid grid(1000, 10.0);
    const auto path = simulate_ou_path(model, grid, 7);
    for (int k = 0; k <= grid.n; ++k) {
        const double t = grid.node(k);
        for (int i = 0; i < 2; ++i) {
            const double exact = I0[i] * std::exp(-beta[i] * t);
            // Euler error is O(dt) relative on this horizon
            CHECK(std::abs(path.I(k, i) - exact) <= 0.05 * std::abs(exact) + 1e-12);
        }
    }
}

TEST_CASE("simulate_ou_path: beta = 0 and zero noise keeps the path constant") {
    const auto model =
        SignalModel::ou(Vector::Zero(2), (Vector(2) << 0.4, -0.2).finished(), Matrix::Zero(2, 2));
    const auto path = simulate_ou_path(model, Grid(50, 5.0), 3);
    for (int k = 0; k <= 50; ++k) {
        CHECK(path.I(k, 0) == doctest::Approx(0.4).epsilon(1e-15));
        CHECK(path.I(k, 1) == doctest::Approx(-0.2).epsilon(1e-15));
    }
}

TEST_CASE("simulate_ou_path: deterministic given the seed") {
    Vector beta(2), I0(2);
    beta << 0.9, 0.3;
    I0 << 0.5, 0.5;
    const auto model = SignalModel::ou(beta, I0, 0.3 * Matrix::Identity(2, 2));
    const Grid grid(64, 10.0);
    const auto p1 = simulate_ou_path(model, grid, 123);
    const auto p2 = simulate_ou_path(model, grid, 123);
    CHECK((p1.I - p2.I).norm() == 0.0);
    const auto p3 = simulate_ou_path(model, grid, 124);
    CHECK((p1.I - p3.I).norm() > 0.0);
}

TEST_CASE("conditional_future_drift: closed form and degenerate cases") {
    Vector beta(2), I(2);
    beta << 0.9, 0.3;
    I << 0.5, 0.5;
    const auto model = SignalModel::ou(beta, I, Matrix::Zero(2, 2));

    const Vector one_ahead = conditional_future_drift(model, I, 1.0, 2.0);
    CHECK(one_ahead[0] == doctest::Approx(0.5 * std::exp(-0.9)).epsilon(1e-14));
    CHECK(one_ahead[1] == doctest::Approx(0.5 * std::exp(-0.3)).epsilon(1e-14));
    CHECK(one_ahead[0] == doctest::Approx(0.203285).epsilon(1e-5));
    CHECK(one_ahead[1] == doctest::Approx(0.370409).epsilon(1e-5));

    const auto flat = SignalModel::ou(Vector::Zero(2), I, Matrix::Zero(2, 2));
    CHECK(conditional_future_drift(flat, I, 0.0, 3.0).isApprox(I, 1e-15));
    CHECK(conditional_future_drift(model, I, 2.0, 2.0).isApprox(I, 1e-15));

    CHECK_THROWS_AS((void)conditional_future_drift(model, I, 2.0, 1.0), TimeOrderError);
    const auto det = SignalModel::none(2);
    CHECK_THROWS_AS((void)conditional_future_drift(det, I, 0.0, 1.0), WrongKindError);
}

TEST_CASE("conditional_future_drift: tower consistency") {
    NormalSampler rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        Vector beta(3), I(3);
        for (int i = 0; i < 3; ++i) {
            beta[i] = std::abs(rng());
            I[i] = rng();
        }
        const auto model = SignalModel::ou(beta, I, Matrix::Zero(3, 3));
        const double s = 0.3, t = s + std::abs(rng()), r = t + std::abs(rng());
        const Vector two_step =
            conditional_future_drift(model, conditional_future_drift(model, I, s, t), t, r);
        const Vector one_step = conditional_future_drift(model, I, s, r);
        CHECK((two_step - one_step).lpNorm<Eigen::Infinity>() <= 1e-14);
    }
}

TEST_CASE("g_profile: zero drift with zero penalties vanishes") {
    auto market = liquidation_market();
    market.varrho = 0.0;
    const auto model = SignalModel::none(2);
    const Grid grid(20, 10.0);
    CHECK(g_profile(market, model, Vector::Zero(2), 0, grid).isZero(0.0));
}

TEST_CASE("g_profile: terminal penalty term alone") {
    const auto market = liquidation_market();  // varrho = 4, Pi = I, X0 = (10, 0)
    const auto model = SignalModel::none(2);
    const Grid grid(25, 10.0);
    const Matrix prof = g_profile(market, model, Vector::Zero(2), 0, grid);
    for (int j = 0; j <= grid.n; ++j) {
        CHECK(prof(j, 0) == doctest::Approx(-40.0).epsilon(1e-14));
        CHECK(prof(j, 1) == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("g_profile: OU with beta = 0 degenerates to (T - r) I_t") {
    auto market = liquidation_market();
    market.varrho = 0.0;
    Vector beta(2), I(2);
    beta << 0.0, 0.5;
    I << 0.4, 1.0;
    const auto model = SignalModel::ou(beta, I, Matrix::Zero(2, 2));
    const Grid grid(10, 10.0);
    const Matrix prof = g_profile(market, model, I, 0, grid);
    for (int j = 0; j <= grid.n; ++j) {
        const double r = grid.node(j);
        CHECK(prof(j, 0) == doctest::Approx((10.0 - r) * 0.4).epsilon(1e-13));
        const double expected = (std::exp(-0.5 * r) - std::exp(-0.5 * 10.0)) / 0.5;
        CHECK(prof(j, 1) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("g_profile: deterministic profile is independent of the evaluation time") {
    auto market = liquidation_market();
    const auto model = SignalModel::deterministic(
        2, [](double t) { return (Vector(2) << std::sin(0.2 * t), 0.1 * t).finished(); });
    const Grid grid(40, 10.0);
    const Matrix at0 = g_profile(market, model, Vector::Zero(2), 0, grid);
    const int kp = 13;
    const Matrix atk = g_profile(market, model, Vector::Zero(2), kp, grid);
    // restriction property: exact agreement on the overlap, row for row
    CHECK((at0.bottomRows(grid.n - kp + 1) - atk).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("g_profile: OU expected profile is consistent across re-anchoring") {
    auto market = liquidation_market();
    market.varrho = 1.0;
    Vector beta(2), I0(2);
    beta << 0.9, 0.3;
    I0 << 0.5, 0.5;
    const auto model = SignalModel::ou(beta, I0, Matrix::Zero(2, 2));
    const Grid grid(16, 8.0);
    const int kp = 5;
    const Vector Ikp = conditional_future_drift(model, I0, 0.0, grid.node(kp));
    const Matrix at0 = g_profile(market, model, I0, 0, grid);
    const Matrix atk = g_profile(market, model, Ikp, kp, grid);
    CHECK((at0.bottomRows(grid.n - kp + 1) - atk).lpNorm<Eigen::Infinity>() <= 1e-13);
}

TEST_CASE("g_profile: martingale noise never enters") {
    auto market = liquidation_market();
    Vector beta(2), I0(2);
    beta << 0.9, 0.3;
    I0 << 0.5, 0.5;
    const auto quiet = SignalModel::ou(beta, I0, Matrix::Zero(2, 2));
    const auto noisy = SignalModel::ou(beta, I0, 5.0 * Matrix::Identity(2, 2));
    const Grid grid(12, 6.0);
    CHECK((g_profile(market, quiet, I0, 2, grid) - g_profile(market, noisy, I0, 2, grid))
              .lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("deterministic drift integration matches an independent oracle") {
    auto market = liquidation_market();
    market.varrho = 0.0;
    const auto model = SignalModel::deterministic(
        2, [](double t) { return (Vector(2) << std::exp(-0.3 * t), std::cos(t)).finished(); });
    const Grid grid(50, 10.0);
    const Matrix prof = g_profile(market, model, Vector::Zero(2), 0, grid);
    for (int j = 0; j <= grid.n; j += 7) {
        const double r = grid.node(j);
        const double o0 =
            simpson_oracle([](double s) { return std::exp(-0.3 * s); }, r, grid.T);
        const double o1 = simpson_oracle([](double s) { return std::cos(s); }, r, grid.T);
        CHECK(prof(j, 0) == doctest::Approx(o0).epsilon(1e-9));
        CHECK(prof(j, 1) == doctest::Approx(o1).epsilon(1e-9));
    }
}
