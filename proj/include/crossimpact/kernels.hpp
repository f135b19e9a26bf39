#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "crossimpact/types.hpp"

namespace crossimpact {

enum class KernelKind {
    Zero,
    FactorizedExp,
    FactorizedFractionalSingular,
    FactorizedPowerLawShifted,
    MatrixExp,
    Permanent,
    Constructed,
    Bond,
};

const char* kernel_kind_name(KernelKind kind);

// Scalar decay profiles used as Constructed channel kernels g_i and as the
// bond kernel's inner factor H. All variants integrate in closed form; the
// tabulated variant is piecewise linear in t.
struct ScalarDecay {
    enum class Kind { Const, Exp, PowerLawShifted, Tabulated };

    Kind kind = Kind::Const;
    double c = 1.0;
    double rho = 0.0;       // Exp
    double beta = 0.0;      // PowerLawShifted
    double t0 = 0.0;        // PowerLawShifted
    std::vector<std::pair<double, double>> table;  // Tabulated: (t, value), t increasing

    static ScalarDecay constant(double c);
    static ScalarDecay exponential(double c, double rho);
    static ScalarDecay power_law(double c, double beta, double t0);
    static ScalarDecay tabulated(std::vector<std::pair<double, double>> pts);

    double value(double t) const;
    double integrate(double a, double b) const;
    void validate() const;
};

// Declarative description of the matrix-valued Volterra propagator G(t,s).
// Factorized kinds store the scalar profile parameters and the matrix C
// separately; the kernel value is C * phi(t - s).
struct PropagatorSpec {
    KernelKind kind = KernelKind::Zero;
    int N = 1;

    Matrix C;            // factorized / permanent / bond impact magnitudes
    double rho_decay = 0.0;   // FactorizedExp
    double alpha = 0.0;       // FactorizedFractionalSingular, in (0, 1/2)
    double beta_pl = 0.0;     // FactorizedPowerLawShifted, in (0,1)
    double t0 = 0.0;          // FactorizedPowerLawShifted, > 0

    Matrix Cmat;              // MatrixExp generator (symmetric nonneg definite)

    Matrix Q;                           // Constructed: invertible
    std::vector<ScalarDecay> g_list;    // Constructed: N channel kernels

    double alpha_bond = 0.0;  // Bond scale, > 0
    ScalarDecay H_inner;      // Bond inner decay
    double horizon = 0.0;     // Bond needs T for the (T - t) factor

    static PropagatorSpec zero(int N);
    static PropagatorSpec factorized_exp(Matrix C, double rho);
    static PropagatorSpec factorized_fractional(Matrix C, double alpha);
    static PropagatorSpec factorized_power_law(Matrix C, double beta, double t0);
    static PropagatorSpec matrix_exp(Matrix Cmat);
    static PropagatorSpec permanent(Matrix C);
    static PropagatorSpec constructed(Matrix Q, std::vector<ScalarDecay> g_list);
    static PropagatorSpec bond(Matrix C, double alpha_bond, ScalarDecay H, double T);

    bool is_factorized() const {
        return kind == KernelKind::Zero || kind == KernelKind::FactorizedExp ||
               kind == KernelKind::FactorizedFractionalSingular ||
               kind == KernelKind::FactorizedPowerLawShifted || kind == KernelKind::Permanent;
    }
    bool is_convolution() const { return kind != KernelKind::Bond; }
    bool is_singular() const { return kind == KernelKind::FactorizedFractionalSingular; }

    // Parameter-range validation (alpha in (0,1/2), rho > 0, ...). Symmetry and
    // positive semidefiniteness of C are admissibility questions, not
    // construction errors; `admissibility::check_structural` reports on them.
    void validate() const;

    // phi(tau) for factorized kinds, tau > 0 (tau == 0 throws for the singular
    // kind). Throws WrongKind for non-factorized kinds.
    double phi(double tau) const;

    // Eigendecomposition of Cmat, computed once per spec (MatrixExp only).
    const Eigen::SelfAdjointEigenSolver<Matrix>& cmat_eig() const;

  private:
    mutable std::optional<Eigen::SelfAdjointEigenSolver<Matrix>> cmat_eig_;
};

enum class BlockSide { Lower, Upper };

// G(t,s): zero matrix for t < s, kernel value for t >= s. The singular
// fractional kind throws SingularityAtDiagonal at t == s.
Matrix eval_propagator(const PropagatorSpec& spec, double t, double s);

// Mirrored kernel: G(t,s) for t > s, G(s,t)^T for t < s, symmetrized value on
// the diagonal.
Matrix mirrored_eval(const PropagatorSpec& spec, double t, double s);

// Exact subinterval integral of the scalar profile phi over one grid cell:
//   Lower: int_{t_j}^{t_{j+1}} phi(t_k - s) ds   (0 <= j <= k-1)
//   Upper: int_{t_j}^{t_{j+1}} phi(s - t_k) ds   (k <= j <= n-1)
// Closed forms for the zero/exp/fractional rows; elementary antiderivative for
// the shifted power law; throws WrongKind for non-factorized kinds.
double integrate_phi_block(const PropagatorSpec& spec, int k, int j, double dt, BlockSide side,
                           int n = -1);

// Cell integral int_{(m-1)dt}^{m dt} phi, m >= 1. Both block sides reduce to
// this window form for convolution kernels.
double phi_window_integral(const PropagatorSpec& spec, int m, double dt);

// N x N block version of the subinterval integral, defined for every kind:
// factorized kinds give phi-integral * C, MatrixExp integrates each eigenvalue
// channel in closed form, Constructed integrates the g_i channels, Bond uses
// adaptive quadrature of the (t,s) integrand with t fixed at the row node t_k.
Matrix integrate_matrix_block(const PropagatorSpec& spec, const Grid& grid, int k, int j,
                              BlockSide side);

// Matrix-valued window integral int_{(m-1)dt}^{m dt} of the convolution part
// (throws WrongKind for the non-convolution Bond kind).
Matrix matrix_window_integral(const PropagatorSpec& spec, int m, double dt);

// Adaptive Simpson quadrature, relative tolerance 1e-10; throws
// QuadratureFailure when the refinement limit is reached.
double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-10);

}  // namespace crossimpact
