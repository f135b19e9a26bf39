#include "crossimpact/solver.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

namespace crossimpact {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void gate_admissibility(const MarketParams& market, const PropagatorSpec& spec, const Grid& grid,
                        const SolveOptions& opts) {
    if (!opts.check_admissibility) return;
    const auto structural = check_structural(spec);
    if (structural.verdict == StructuralVerdict::Admissible) return;
    const auto psd = check_grid_psd(spec, grid, opts.admissibility_tol);
    if (psd.verdict == GridVerdict::PassedPSD) return;
    if (opts.force) {
        std::cerr << "warning: kernel failed admissibility checks (" << structural.reason
                  << "; grid min eigenvalue " << psd.min_eigenvalue
                  << "). A propagator outside the admissible class permits price manipulation "
                     "(round trips with negative expected cost) and the first-order condition "
                     "may not characterize a maximizer. Proceeding because --force-inadmissible "
                     "was given.\n";
        return;
    }
    (void)market;
    throw InadmissibleKernelError("kernel rejected: " + structural.reason +
                                  " and grid PSD check failed (min eigenvalue " +
                                  std::to_string(psd.min_eigenvalue) + ")");
}

SolveReport finish_report(const MarketParams& market, const PropagatorSpec& spec, const Grid& grid,
                          const SolveOptions& opts, Matrix u_nodes, const Matrix& drift_to_go,
                          double residual_abs, double g_scale, Clock::time_point t0) {
    SolveReport rep;
    rep.strategy = Strategy{grid, std::move(u_nodes)};
    std::tie(rep.inventory, rep.distortion) =
        inventory_and_distortion(spec, market.X0, rep.strategy.u, grid, opts.convention);
    rep.foc_residual_abs = residual_abs;
    rep.foc_residual_rel = residual_abs / std::max(g_scale, 1e-300);
    rep.objective =
        evaluate_objective(market, spec, grid, rep.strategy.u, drift_to_go, opts.convention);
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

}  // namespace

std::pair<Matrix, Matrix> inventory_and_distortion(const PropagatorSpec& spec, const Vector& X0,
                                                   const Matrix& u_nodes, const Grid& grid,
                                                   AssemblyConvention convention) {
    const int n = grid.n, N = spec.N;
    if (u_nodes.rows() != n + 1 || u_nodes.cols() != N)
        throw GridMismatchError("inventory_and_distortion: u must be (n+1) x N");
    const double dt = grid.dt();

    Matrix X = Matrix::Zero(n + 1, N);
    X.row(0) = X0.transpose();
    for (int k = 0; k < n; ++k) X.row(k + 1) = X.row(k) + u_nodes.row(k) * dt;

    Matrix D = Matrix::Zero(n + 1, N);
    const auto win = detail::precompute_windows(spec, grid);
    MarketParams kernel_only;
    kernel_only.N = N;
    kernel_only.T = grid.T;
    kernel_only.Lambda = Matrix::Identity(N, N);
    kernel_only.Sigma = Matrix::Zero(N, N);
    kernel_only.Pi = Matrix::Zero(N, N);
    kernel_only.X0 = Vector::Zero(N);
    for (int k = 1; k <= n; ++k) {
        Vector acc = Vector::Zero(N);
        for (int j = 0; j < k; ++j) {
            const Matrix B =
                detail::system_block(kernel_only, spec, grid, win, convention, k, j);
            acc += B * u_nodes.row(j).transpose();
        }
        D.row(k) = acc.transpose();
    }
    return {X, D};
}

SolveReport solve_deterministic(const MarketParams& market, const PropagatorSpec& spec,
                                const Matrix& g_nodes, const Grid& grid,
                                const SolveOptions& opts) {
    const auto t0 = Clock::now();
    market.validate();
    if (g_nodes.rows() != grid.num_nodes() || g_nodes.cols() != market.N)
        throw GridMismatchError("solve_deterministic: g must be (n+1) x N");
    if (!g_nodes.allFinite()) throw InvalidSpecError("solve_deterministic: g must be finite");
    gate_admissibility(market, spec, grid, opts);

    const auto sys = assemble_D(market, spec, grid, opts.convention);
    const Vector g = stack_time_major(g_nodes);
    Eigen::PartialPivLU<Matrix> lu(sys.D);
    Vector u = lu.solve(g);
    u += lu.solve(g - sys.D * u);  // one step of iterative refinement
    if (!u.allFinite()) throw SingularSystemError("solve_deterministic: system solve failed");

    const double residual = (sys.D * u - g).lpNorm<Eigen::Infinity>();
    const double g_scale = g.lpNorm<Eigen::Infinity>();

    // recover the drift part of g for the objective report
    Matrix drift_to_go(grid.num_nodes(), market.N);
    for (int k = 0; k <= grid.n; ++k)
        drift_to_go.row(k) =
            g_nodes.row(k) + ((market.gamma * (grid.T - grid.node(k)) * market.Sigma +
                               market.varrho * market.Pi) *
                              market.X0)
                                 .transpose();
    return finish_report(market, spec, grid, opts, unstack_time_major(u, market.N), drift_to_go,
                         residual, g_scale, t0);
}

SolveReport solve_stochastic_path(const MarketParams& market, const PropagatorSpec& spec,
                                  const SignalModel& model, const SignalPath& path,
                                  const Grid& grid, const SolveOptions& opts) {
    const auto t0 = Clock::now();
    market.validate();
    model.validate();
    path.validate(market.N);
    if (path.grid.n != grid.n || path.grid.T != grid.T)
        throw PathMismatchError("solve_stochastic_path: path grid mismatch");
    gate_admissibility(market, spec, grid, opts);

    const int n = grid.n, N = market.N;
    const auto sys = assemble_D(market, spec, grid, opts.convention);

    Matrix u_nodes = Matrix::Zero(n + 1, N);
    Vector u_past(0);
    double residual = 0.0, g_scale = 0.0;
    for (int k = 0; k <= n; ++k) {
        const Vector I_k = path.I.row(k).transpose();
        const Matrix gh = g_profile(market, model, I_k, k, grid);
        Vector f = stack_time_major(gh);
        g_scale = std::max(g_scale, f.lpNorm<Eigen::Infinity>());
        if (k > 0)
            f -= sys.D.block(k * N, 0, (n + 1 - k) * N, k * N) * u_past;
        const auto trail = sys.D.block(k * N, k * N, (n + 1 - k) * N, (n + 1 - k) * N);
        Eigen::PartialPivLU<Matrix> lu(trail);
        Vector m = lu.solve(f);
        if (!m.allFinite())
            throw SingularSystemError("solve_stochastic_path: trailing solve failed");
        residual = std::max(residual, (trail * m - f).lpNorm<Eigen::Infinity>());
        u_nodes.row(k) = m.head(N).transpose();
        u_past.conservativeResize((k + 1) * N);
        u_past.tail(N) = m.head(N);
    }

    // realized drift profile for the objective report
    Matrix togo;
    if (model.kind == SignalModel::Kind::Deterministic) {
        togo = drift_to_go_nodes(model, model.I0, grid);
    } else {
        togo = Matrix::Zero(n + 1, N);
        Vector tail = Vector::Zero(N);
        for (int j = n - 1; j >= 0; --j) {
            tail += 0.5 * grid.dt() * (path.I.row(j) + path.I.row(j + 1)).transpose();
            togo.row(j) = tail.transpose();
        }
    }
    return finish_report(market, spec, grid, opts, std::move(u_nodes), togo, residual, g_scale,
                         t0);
}

SolveReport solve_stochastic_resolvent(const MarketParams& market, const PropagatorSpec& spec,
                                       const SignalModel& model, const SignalPath& path,
                                       const Grid& grid, const SolveOptions& opts) {
    const auto t0 = Clock::now();
    market.validate();
    model.validate();
    path.validate(market.N);
    if (path.grid.n != grid.n || path.grid.T != grid.T)
        throw PathMismatchError("solve_stochastic_resolvent: path grid mismatch");
    gate_admissibility(market, spec, grid, opts);

    const int n = grid.n, N = market.N;
    const auto sys = assemble_D(market, spec, grid, opts.convention);
    const Matrix Lbar = market.lambda_bar();
    Eigen::PartialPivLU<Matrix> lbar_lu(Lbar);

    Matrix u_nodes = Matrix::Zero(n + 1, N);
    double residual = 0.0, g_scale = 0.0;
    for (int k = 0; k <= n; ++k) {
        const int m = (n + 1 - k) * N;
        const Vector I_k = path.I.row(k).transpose();
        const Vector gh = stack_time_major(g_profile(market, model, I_k, k, grid));
        g_scale = std::max(g_scale, gh.lpNorm<Eigen::Infinity>());

        const auto trail = sys.D.block(k * N, k * N, m, m);
        Eigen::PartialPivLU<Matrix> lu(trail);

        // row-k blocks of the trailing system without the Lbar diagonal:
        // the discrete counterpart of int_t^T K(r,t)^T (.) dr
        Matrix upper_row = sys.D.block(k * N, k * N, N, m);
        upper_row.leftCols(N) -= Lbar;

        // a_k = Lbar^{-1} (g_k - upper_row D_t^{-1} ghat)
        const Vector h = lu.solve(gh);
        Vector acc = lbar_lu.solve(gh.head(N) - upper_row * h);

        if (k > 0) {
            // B(k,j) = -Lbar^{-1} (upper_row (D_t^{-1} <> K(., j)) - K(k, j)),
            // columns j < k applied to the already-determined controls
            const Matrix K_low = sys.D.block(k * N, 0, m, k * N);
            const Matrix H = lu.solve(K_low);  // column-wise trailing inverse
            const Matrix B_row = -lbar_lu.solve(Matrix(upper_row * H - K_low.topRows(N)));
            Vector u_past(k * N);
            for (int j = 0; j < k; ++j) u_past.segment(j * N, N) = u_nodes.row(j).transpose();
            acc -= B_row * u_past;
        }
        u_nodes.row(k) = acc.transpose();

        // consistency residual of the row-k stationarity identity
        Vector f = gh;
        if (k > 0) {
            Vector u_past(k * N);
            for (int j = 0; j < k; ++j) u_past.segment(j * N, N) = u_nodes.row(j).transpose();
            f -= sys.D.block(k * N, 0, m, k * N) * u_past;
        }
        const Vector mvec = lu.solve(f);
        residual = std::max(residual,
                            (Lbar * acc - (f.head(N) - upper_row * mvec)).lpNorm<Eigen::Infinity>());
    }

    Matrix togo;
    if (model.kind == SignalModel::Kind::Deterministic) {
        togo = drift_to_go_nodes(model, model.I0, grid);
    } else {
        togo = Matrix::Zero(n + 1, N);
        Vector tail = Vector::Zero(N);
        for (int j = n - 1; j >= 0; --j) {
            tail += 0.5 * grid.dt() * (path.I.row(j) + path.I.row(j + 1)).transpose();
            togo.row(j) = tail.transpose();
        }
    }
    return finish_report(market, spec, grid, opts, std::move(u_nodes), togo, residual, g_scale,
                         t0);
}

}  // namespace crossimpact
