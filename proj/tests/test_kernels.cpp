#include <doctest.h>

#include <cmath>

#include "crossimpact/kernels.hpp"
#include "test_helpers.hpp"

using namespace crossimpact;
using namespace crossimpact::testing;

namespace {

Matrix afull() {
    Matrix C(2, 2);
    C << 0.06, 0.05, 0.05, 0.06;
    return C;
}

}  // namespace

TEST_CASE("eval_propagator: factorized exponential value") {
    const auto spec = PropagatorSpec::factorized_exp(Matrix::Identity(2, 2), 0.5);
    const Matrix G = eval_propagator(spec, 2.0, 1.0);
    const double expected = std::exp(-0.5);  // 0.606531...
    CHECK(G.isApprox(expected * Matrix::Identity(2, 2), 1e-14));
    CHECK(expected == doctest::Approx(0.606531).epsilon(1e-5));
}

TEST_CASE("eval_propagator: Volterra property below the diagonal") {
    NormalSampler rng(1);
    const std::vector<PropagatorSpec> specs = {
        PropagatorSpec::factorized_exp(afull(), 0.5),
        PropagatorSpec::factorized_fractional(afull(), 0.25),
        PropagatorSpec::factorized_power_law(afull(), 0.6, 1.0),
        PropagatorSpec::permanent(afull()),
        PropagatorSpec::matrix_exp(afull()),
        PropagatorSpec::bond(afull(), 0.2, ScalarDecay::exponential(1.0, 0.5), 10.0),
        PropagatorSpec::zero(2),
    };
    for (const auto& spec : specs) {
        CHECK(eval_propagator(spec, 1.0, 2.0).isZero(0.0));
        for (int i = 0; i < 20; ++i) {
            const double s = std::abs(rng()) + 0.1;
            const double t = s - std::abs(rng()) - 1e-3;
            if (t < 0) continue;
            CHECK(eval_propagator(spec, t, s).isZero(0.0));
        }
    }
}

TEST_CASE("eval_propagator: permanent kernel returns C") {
    const auto spec = PropagatorSpec::permanent(afull());
    CHECK(eval_propagator(spec, 3.0, 1.0).isApprox(afull(), 1e-15));
}

TEST_CASE("eval_propagator: singular kind errors on the diagonal") {
    const auto spec = PropagatorSpec::factorized_fractional(afull(), 0.25);
    CHECK_THROWS_AS((void)eval_propagator(spec, 1.0, 1.0), SingularityAtDiagonalError);
    CHECK_THROWS_AS((void)mirrored_eval(spec, 1.0, 1.0), SingularityAtDiagonalError);
}

TEST_CASE("eval_propagator: matrix exponential matches per-eigenvalue form") {
    Matrix Cmat(2, 2);
    Cmat << 0.8, 0.3, 0.3, 0.4;
    const auto spec = PropagatorSpec::matrix_exp(Cmat);
    const double tau = 0.7;
    const Matrix G = eval_propagator(spec, 1.0 + tau, 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Cmat);
    const Matrix expected = eig.eigenvectors() *
                            (-tau * eig.eigenvalues().array()).exp().matrix().asDiagonal() *
                            eig.eigenvectors().transpose();
    CHECK((G - expected).norm() <= 1e-13);
}

TEST_CASE("mirrored_eval: reflection and diagonal symmetrization") {
    const auto exp_spec = PropagatorSpec::factorized_exp(afull(), 0.5);
    const Matrix below = mirrored_eval(exp_spec, 1.0, 2.0);
    CHECK(below.isApprox(std::exp(-0.5) * afull().transpose(), 1e-14));

    const auto zero_spec = PropagatorSpec::zero(2);
    CHECK(mirrored_eval(zero_spec, 0.3, 0.9).isZero(0.0));

    const auto perm = PropagatorSpec::permanent(afull());
    CHECK(mirrored_eval(perm, 1.5, 1.5).isApprox(afull(), 1e-15));
}

TEST_CASE("integrate_phi_block: exponential closed form vs quadrature oracle") {
    const auto spec = PropagatorSpec::factorized_exp(Matrix::Identity(1, 1), 0.5);
    const double v = integrate_phi_block(spec, 5, 4, 1.0, BlockSide::Lower);
    // int_{t_4}^{t_5} e^{-0.5 (t_5 - s)} ds
    const double oracle =
        simpson_oracle([](double s) { return std::exp(-0.5 * (5.0 - s)); }, 4.0, 5.0);
    CHECK(v == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(v == doctest::Approx(0.786939).epsilon(1e-5));
}

TEST_CASE("integrate_phi_block: fractional closed form through the singularity") {
    const auto spec = PropagatorSpec::factorized_fractional(Matrix::Identity(1, 1), 0.25);
    const double v = integrate_phi_block(spec, 5, 4, 1.0, BlockSide::Lower);
    CHECK(v == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    const double oracle =
        tanh_sinh_oracle([](double s) { return std::pow(5.0 - s, -0.25); }, 4.0, 5.0);
    CHECK(v == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("integrate_phi_block: zero kernel and index ranges") {
    const auto spec = PropagatorSpec::zero(1);
    CHECK(integrate_phi_block(spec, 3, 1, 0.5, BlockSide::Lower) == 0.0);
    CHECK(integrate_phi_block(spec, 3, 5, 0.5, BlockSide::Upper, 10) == 0.0);
    CHECK_THROWS_AS((void)integrate_phi_block(spec, 3, 3, 0.5, BlockSide::Lower),
                    IndexOutOfRangeError);
    CHECK_THROWS_AS((void)integrate_phi_block(spec, 3, 2, 0.5, BlockSide::Upper),
                    IndexOutOfRangeError);
    CHECK_THROWS_AS((void)integrate_phi_block(spec, 3, 10, 0.5, BlockSide::Upper, 10),
                    IndexOutOfRangeError);
}

TEST_CASE("closed forms agree with quadrature over random windows") {
    NormalSampler rng(42);
    const auto exp_spec = PropagatorSpec::factorized_exp(Matrix::Identity(1, 1), 0.5);
    const auto frac_spec = PropagatorSpec::factorized_fractional(Matrix::Identity(1, 1), 0.25);
    for (int trial = 0; trial < 100; ++trial) {
        const double dt = 0.02 + std::abs(rng()) * 0.3;
        const int m = 1 + static_cast<int>(std::abs(rng()) * 10);
        const double a = (m - 1) * dt, b = m * dt;

        const double ve = phi_window_integral(exp_spec, m, dt);
        const double oe = simpson_oracle([&](double s) { return std::exp(-0.5 * s); }, a, b);
        CHECK(std::abs(ve - oe) <= 1e-9 * (1.0 + std::abs(ve)));

        const double vf = phi_window_integral(frac_spec, m, dt);
        const double of =
            m == 1 ? tanh_sinh_oracle([&](double s) { return std::pow(s, -0.25); }, a, b)
                   : simpson_oracle([&](double s) { return std::pow(s, -0.25); }, a, b);
        CHECK(std::abs(vf - of) <= 1e-9 * (1.0 + std::abs(vf)));
    }
}

TEST_CASE("square-integrability proxy: discrete L2 mass stays bounded under refinement") {
    const auto spec = PropagatorSpec::factorized_fractional(Matrix::Identity(1, 1), 0.25);
    auto mass = [&](int n) {
        const double dt = 10.0 / n;
        double acc = 0.0;
        for (int k = 0; k <= n; ++k)
            for (int j = 0; j < k; ++j) {
                const double L = phi_window_integral(spec, k - j, dt);
                acc += L * L;
            }
        return acc;
    };
    const double m100 = mass(100), m200 = mass(200);
    CHECK(m200 / m100 <= 1.1);
    CHECK(m200 / m100 >= 1.0 / 1.1);
}

TEST_CASE("bond blocks: quadrature path and row-frozen time factor") {
    const auto H = ScalarDecay::exponential(1.0, 0.5);
    const auto spec = PropagatorSpec::bond(afull(), 0.2, H, 10.0);
    const Grid grid(10, 10.0);
    const Matrix B = integrate_matrix_block(spec, grid, 4, 2, BlockSide::Lower);
    const double w = simpson_oracle([](double s) { return std::exp(-0.5 * (4.0 - s)); }, 2.0, 3.0);
    CHECK(B.isApprox(0.2 * (10.0 - 4.0) * w * afull(), 1e-9));
    CHECK_THROWS_AS((void)matrix_window_integral(spec, 1, 1.0), WrongKindError);
}

TEST_CASE("constructed kernel: channel integrals through Q congruence") {
    Matrix Q(2, 2);
    Q << 1.0, 0.5, -0.3, 0.9;
    const auto spec = PropagatorSpec::constructed(
        Q, {ScalarDecay::exponential(1.0, 0.4), ScalarDecay::constant(0.2)});
    const double dt = 0.5;
    const Matrix W = matrix_window_integral(spec, 2, dt);
    Vector d(2);
    d << (std::exp(-0.4 * dt) - std::exp(-0.4 * 2 * dt)) / 0.4, 0.2 * dt;
    CHECK(W.isApprox(Q.transpose() * d.asDiagonal() * Q, 1e-13));
}

TEST_CASE("spec validation rejects out-of-range parameters") {
    CHECK_THROWS_AS((void)PropagatorSpec::factorized_fractional(afull(), 0.5), InvalidSpecError);
    CHECK_THROWS_AS((void)PropagatorSpec::factorized_fractional(afull(), -0.1), InvalidSpecError);
    CHECK_THROWS_AS((void)PropagatorSpec::factorized_exp(afull(), 0.0), InvalidSpecError);
    CHECK_THROWS_AS((void)PropagatorSpec::factorized_power_law(afull(), 1.2, 1.0),
                    InvalidSpecError);
    CHECK_THROWS_AS((void)PropagatorSpec::factorized_power_law(afull(), 0.5, 0.0),
                    InvalidSpecError);
    CHECK_THROWS_AS((void)PropagatorSpec::constructed(Matrix::Zero(2, 2),
                                                      {ScalarDecay::constant(1.0),
                                                       ScalarDecay::constant(1.0)}),
                    InvalidSpecError);
    Matrix nonsym(2, 2);
    nonsym << 1.0, 0.2, -0.2, 1.0;
    CHECK_THROWS_AS((void)PropagatorSpec::matrix_exp(nonsym), InvalidSpecError);
}

TEST_CASE("adaptive quadrature reaches tight tolerance") {
    const double v = adaptive_quadrature([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    const double w = adaptive_quadrature([](double x) { return std::exp(-2.0 * x); }, 0.0, 3.0);
    CHECK(w == doctest::Approx((1.0 - std::exp(-6.0)) / 2.0).epsilon(1e-11));
}
