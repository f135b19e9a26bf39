#pragma once

#include <tuple>

#include "crossimpact/kernels.hpp"
#include "crossimpact/types.hpp"

namespace crossimpact {

// Two assemblies of the N(n+1) x N(n+1) operator matrix are provided.
//
// PaperCollocation is the literal Step-2 sum
//   I (x) Lbar + L (x) C + U (x) C + gamma (L1+U1) (x) Sigma + rho (L2+U2) (x) Pi
// with the Table-1 cell integrals. Its rows are the exact collocation
// equations, but the matrix is asymmetric at the half-cell level (U != L^T)
// and its symmetric part is indefinite once the terminal penalty is active, so
// the solve is not the stationary point of any discrete quadratic.
//
// SymmetricQp (default) keeps the same cell integrals but pairs them
// symmetrically:
//   kernel   Toeplitz blocks  B_0 = W(1), B_m = (W(m) + W(m+1))/2,
//            W(m) = int_{(m-1)dt}^{m dt} of the convolution profile
//   risk     gamma (L1+U1) (x) Sigma  -- already symmetric as printed
//   penalty  rho * T/(n+1) * ones (x) Pi  -- exact gradient of the penalty on
//            X = X0 + T/(n+1) sum_j u_j
// This matrix is symmetric with min eigenvalue >= lambda_min(Lbar) for
// admissible kernels, and D u = g is exactly the first-order condition of the
// discrete quadratic objective in `objective`. Both assemblies agree to O(dt).
enum class AssemblyConvention { SymmetricQp, PaperCollocation };

struct DiscreteSystem {
    Matrix D;                    // N(n+1) x N(n+1), time-major blocks
    Matrix kernel_lower;         // Step-1 L ((n+1)^2 scalar, or block for non-factorized kinds)
    Matrix kernel_upper;         // Step-1 U
    Matrix F1_lower, F1_upper;   // (T - t) part
    Matrix F2_lower, F2_upper;   // terminal-penalty part
    bool scalar_kernel_blocks = true;
    AssemblyConvention convention = AssemblyConvention::SymmetricQp;
    // time-major: components [kN, (k+1)N) of a stacked vector belong to node k
    std::string block_layout = "time-major";
};

// Step-1 kernel matrices L, U. Scalar (n+1)x(n+1) for factorized kinds,
// N(n+1) x N(n+1) block matrices otherwise.
std::pair<Matrix, Matrix> build_kernel_blocks(const PropagatorSpec& spec, const Grid& grid);

// Step-1 F matrices (L1, U1, L2, U2), scalar (n+1)x(n+1). U1 defaults to the
// scheme's stated approximation (T - t_j) dt; exact_u1 switches to the exact
// cell integral (T - t_j - dt/2) dt, an O(dt)-equivalent variant.
std::tuple<Matrix, Matrix, Matrix, Matrix> build_F_blocks(const Grid& grid,
                                                          bool exact_u1 = false);

DiscreteSystem assemble_D(const MarketParams& market, const PropagatorSpec& spec, const Grid& grid,
                          AssemblyConvention convention = AssemblyConvention::SymmetricQp);

// Trailing principal block over grid indices k..n, constructed directly
// (valid because the truncated operator is only ever applied to functions
// supported on [t_k, T]).
Matrix assemble_trailing(const MarketParams& market, const PropagatorSpec& spec, const Grid& grid,
                         int k, AssemblyConvention convention = AssemblyConvention::SymmetricQp);

namespace detail {

// Precomputed kernel cell integrals shared by both assemblies: W[m-1] holds
// the matrix window integral over [(m-1)dt, m dt] for m = 1..n+1 (convolution
// kinds), or the scalar H windows for the bond kind.
struct KernelWindows {
    bool convolution = true;
    std::vector<Matrix> W;
    std::vector<double> h;
};

KernelWindows precompute_windows(const PropagatorSpec& spec, const Grid& grid);

// (k, j) block of the chosen assembly, N x N.
Matrix system_block(const MarketParams& market, const PropagatorSpec& spec, const Grid& grid,
                    const KernelWindows& win, AssemblyConvention convention, int k, int j);

}  // namespace detail

}  // namespace crossimpact
