#include "crossimpact/discretization.hpp"

#include <cmath>

namespace crossimpact {

std::pair<Matrix, Matrix> build_kernel_blocks(const PropagatorSpec& spec, const Grid& grid) {
    const int n = grid.n;
    const double dt = grid.dt();
    if (spec.is_factorized()) {
        Matrix L = Matrix::Zero(n + 1, n + 1), U = Matrix::Zero(n + 1, n + 1);
        for (int k = 0; k <= n; ++k) {
            for (int j = 0; j < k; ++j) L(k, j) = phi_window_integral(spec, k - j, dt);
            for (int j = k; j < n; ++j) U(k, j) = phi_window_integral(spec, j - k + 1, dt);
        }
        return {L, U};
    }
    const int N = spec.N;
    Matrix L = Matrix::Zero(N * (n + 1), N * (n + 1)), U = Matrix::Zero(N * (n + 1), N * (n + 1));
    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j < k; ++j)
            L.block(k * N, j * N, N, N) = integrate_matrix_block(spec, grid, k, j, BlockSide::Lower);
        for (int j = k; j < n; ++j)
            U.block(k * N, j * N, N, N) = integrate_matrix_block(spec, grid, k, j, BlockSide::Upper);
    }
    return {L, U};
}

std::tuple<Matrix, Matrix, Matrix, Matrix> build_F_blocks(const Grid& grid, bool exact_u1) {
    const int n = grid.n;
    const double dt = grid.dt();
    Matrix L1 = Matrix::Zero(n + 1, n + 1), U1 = Matrix::Zero(n + 1, n + 1);
    Matrix L2 = Matrix::Zero(n + 1, n + 1), U2 = Matrix::Zero(n + 1, n + 1);
    const double u1_shift = exact_u1 ? 0.5 * dt : 0.0;
    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j < k; ++j) {
            L1(k, j) = (grid.T - grid.node(k)) * dt;
            L2(k, j) = dt;
        }
        for (int j = k; j < n; ++j) {
            U1(k, j) = (grid.T - grid.node(j) - u1_shift) * dt;
            U2(k, j) = dt;
        }
    }
    return {L1, U1, L2, U2};
}

namespace detail {

KernelWindows precompute_windows(const PropagatorSpec& spec, const Grid& grid) {
    KernelWindows win;
    const double dt = grid.dt();
    if (spec.kind == KernelKind::Bond) {
        win.convolution = false;
        win.h.resize(grid.n + 2);
        for (int m = 1; m <= grid.n + 1; ++m)
            win.h[m] = adaptive_quadrature([&](double tau) { return spec.H_inner.value(tau); },
                                           (m - 1) * dt, m * dt);
        return win;
    }
    win.W.reserve(grid.n + 1);
    for (int m = 1; m <= grid.n + 1; ++m) win.W.push_back(matrix_window_integral(spec, m, dt));
    return win;
}

namespace {

// Mirrored pairing that stays symmetric even for asymmetric C: below the
// diagonal the kernel value, above it the transpose.
Matrix oriented(const Matrix& B, int k, int j) {
    if (k > j) return B;
    if (k < j) return B.transpose();
    return 0.5 * (B + B.transpose());
}

Matrix qp_kernel_block(const PropagatorSpec& spec, const Grid& grid, const KernelWindows& win,
                       int k, int j) {
    const int m = std::abs(k - j);
    if (!win.convolution) {
        // bond: alpha (T - t_{k v j}) H-window C, Schur-type mirrored form
        const double h = m == 0 ? win.h[1] : 0.5 * (win.h[m] + win.h[m + 1]);
        const double scale = spec.alpha_bond * (spec.horizon - grid.node(std::max(k, j)));
        return scale * h * oriented(spec.C, k, j);
    }
    if (m == 0) return oriented(win.W[0], k, j);
    const Matrix B = 0.5 * (win.W[m - 1] + win.W[m]);
    return oriented(B, k, j);
}

Matrix paper_kernel_block(const PropagatorSpec& spec, const Grid& grid, const KernelWindows& win,
                          int k, int j, int n) {
    const int N = spec.N;
    if (!win.convolution) {
        if (j < k)
            return spec.alpha_bond * (spec.horizon - grid.node(k)) * win.h[k - j] * spec.C;
        if (j <= n - 1)
            return spec.alpha_bond * (spec.horizon - grid.node(j)) * win.h[j - k + 1] *
                   spec.C.transpose();
        return Matrix::Zero(N, N);
    }
    if (j < k) return win.W[k - j - 1];
    if (j <= n - 1) return win.W[j - k].transpose();
    return Matrix::Zero(N, N);
}

}  // namespace

Matrix system_block(const MarketParams& market, const PropagatorSpec& spec, const Grid& grid,
                    const KernelWindows& win, AssemblyConvention convention, int k, int j) {
    const int n = grid.n;
    const double dt = grid.dt();
    Matrix block = Matrix::Zero(market.N, market.N);

    if (convention == AssemblyConvention::SymmetricQp) {
        block += qp_kernel_block(spec, grid, win, k, j);
        const int kv = std::max(k, j);
        block += market.gamma * (grid.T - grid.node(kv)) * dt * market.Sigma;
        block += market.varrho * (grid.T / (n + 1)) * market.Pi;
    } else {
        block += paper_kernel_block(spec, grid, win, k, j, n);
        if (j < k) {
            block += market.gamma * (grid.T - grid.node(k)) * dt * market.Sigma;
            block += market.varrho * dt * market.Pi;
        } else if (j <= n - 1) {
            block += market.gamma * (grid.T - grid.node(j)) * dt * market.Sigma;
            block += market.varrho * dt * market.Pi;
        }
    }
    if (k == j) block += market.lambda_bar();
    return block;
}

}  // namespace detail

DiscreteSystem assemble_D(const MarketParams& market, const PropagatorSpec& spec, const Grid& grid,
                          AssemblyConvention convention) {
    market.validate();
    spec.validate();
    if (spec.N != market.N)
        throw DimensionMismatchError("assemble_D: spec and market dimensions differ");
    const int n = grid.n, N = market.N;

    DiscreteSystem sys;
    sys.convention = convention;
    sys.scalar_kernel_blocks = spec.is_factorized();
    std::tie(sys.kernel_lower, sys.kernel_upper) = build_kernel_blocks(spec, grid);
    std::tie(sys.F1_lower, sys.F1_upper, sys.F2_lower, sys.F2_upper) = build_F_blocks(grid);

    const auto win = detail::precompute_windows(spec, grid);
    sys.D = Matrix::Zero(N * (n + 1), N * (n + 1));
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n; ++j)
            sys.D.block(k * N, j * N, N, N) =
                detail::system_block(market, spec, grid, win, convention, k, j);
    return sys;
}

Matrix assemble_trailing(const MarketParams& market, const PropagatorSpec& spec, const Grid& grid,
                         int k, AssemblyConvention convention) {
    if (k < 0 || k > grid.n)
        throw IndexOutOfRangeError("assemble_trailing: start index out of range");
    const int n = grid.n, N = market.N;
    const int m = n - k + 1;
    const auto win = detail::precompute_windows(spec, grid);
    Matrix T = Matrix::Zero(N * m, N * m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            T.block(a * N, b * N, N, N) =
                detail::system_block(market, spec, grid, win, convention, k + a, k + b);
    return T;
}

}  // namespace crossimpact
