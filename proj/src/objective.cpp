#include "crossimpact/objective.hpp"

#include <cmath>

namespace crossimpact {

Vector stack_time_major(const Matrix& nodes) {
    const int rows = static_cast<int>(nodes.rows()), N = static_cast<int>(nodes.cols());
    Vector v(rows * N);
    for (int k = 0; k < rows; ++k) v.segment(k * N, N) = nodes.row(k).transpose();
    return v;
}

Matrix unstack_time_major(const Vector& v, int N) {
    const int rows = static_cast<int>(v.size()) / N;
    Matrix nodes(rows, N);
    for (int k = 0; k < rows; ++k) nodes.row(k) = v.segment(k * N, N).transpose();
    return nodes;
}

ObjectiveBreakdown evaluate_objective(const MarketParams& market, const PropagatorSpec& spec,
                                      const Grid& grid, const Matrix& u_nodes,
                                      const Matrix& drift_to_go, AssemblyConvention convention) {
    market.validate();
    const int n = grid.n, N = market.N;
    if (u_nodes.rows() != n + 1 || u_nodes.cols() != N)
        throw GridMismatchError("evaluate_objective: u must be (n+1) x N");
    if (drift_to_go.rows() != n + 1 || drift_to_go.cols() != N)
        throw GridMismatchError("evaluate_objective: drift profile must be (n+1) x N");

    const double w = node_weight(grid);
    const Matrix Lbar = market.lambda_bar();

    // A(t_k) with P_0 = 0: A_T - (A_T - A_k); A_T = drift_to_go at t = 0.
    const Vector A_T = drift_to_go.row(0).transpose();

    ObjectiveBreakdown b;

    Vector sum_u = Vector::Zero(N);
    double lin_risk = 0.0;
    for (int k = 0; k <= n; ++k) {
        const Vector uk = u_nodes.row(k).transpose();
        const Vector Ak = A_T - drift_to_go.row(k).transpose();
        b.execution_cost += w * uk.dot(Ak);
        b.temporary_cost += 0.5 * w * uk.dot(Lbar * uk);
        lin_risk += w * (grid.T - grid.node(k)) * market.X0.dot(market.Sigma * uk);
        sum_u += uk;
    }

    const Vector X_T = market.X0 + w * sum_u;
    b.terminal_book_value = X_T.dot(A_T);
    b.terminal_penalty = 0.5 * market.varrho * X_T.dot(market.Pi * X_T);

    // quadratic kernel and risk forms via the assembly blocks; the kernel part
    // is isolated by zeroing gamma and varrho in the block evaluation
    const auto win = detail::precompute_windows(spec, grid);
    MarketParams kernel_only = market;
    kernel_only.gamma = 0.0;
    kernel_only.varrho = 0.0;
    double quad_kernel = 0.0, quad_risk = 0.0;
    for (int k = 0; k <= n; ++k) {
        const Vector uk = u_nodes.row(k).transpose();
        for (int j = 0; j <= n; ++j) {
            const Vector uj = u_nodes.row(j).transpose();
            Matrix kb = detail::system_block(kernel_only, spec, grid, win, convention, k, j);
            if (k == j) kb -= Lbar;
            quad_kernel += uk.dot(kb * uj);
            const int kv = std::max(k, j);
            quad_risk += (grid.T - grid.node(kv)) * grid.dt() * uk.dot(market.Sigma * uj);
        }
    }
    b.transient_cost = 0.5 * w * quad_kernel;
    b.risk_penalty = market.gamma * (0.5 * grid.T * market.X0.dot(market.Sigma * market.X0) +
                                     lin_risk + 0.5 * w * quad_risk);

    b.total = b.terminal_book_value - b.execution_cost - b.transient_cost - b.temporary_cost -
              b.risk_penalty - b.terminal_penalty;
    return b;
}

ObjectiveBreakdown evaluate_objective(const MarketParams& market, const PropagatorSpec& spec,
                                      const Grid& grid, const Matrix& u_nodes,
                                      const SignalModel& model, const SignalPath& path,
                                      AssemblyConvention convention) {
    Matrix togo;
    if (model.kind == SignalModel::Kind::Deterministic) {
        togo = drift_to_go_nodes(model, model.I0, grid);
    } else {
        // realized-path functional: A_T - A_k by trapezoid on the realized I
        path.validate(market.N);
        togo = Matrix::Zero(grid.num_nodes(), market.N);
        Vector tail = Vector::Zero(market.N);
        for (int j = grid.n - 1; j >= 0; --j) {
            tail += 0.5 * grid.dt() * (path.I.row(j) + path.I.row(j + 1)).transpose();
            togo.row(j) = tail.transpose();
        }
    }
    return evaluate_objective(market, spec, grid, u_nodes, togo, convention);
}

Vector markowitz(const Matrix& Sigma, double gamma, const Vector& I_t) {
    if (gamma == 0.0) throw Error("markowitz: gamma must be nonzero (ZeroGamma)");
    Eigen::FullPivLU<Matrix> lu(Sigma);
    if (!lu.isInvertible()) throw SingularSystemError("markowitz: Sigma is singular");
    return lu.solve(I_t) / gamma;
}

double foc_residual(const MarketParams& market, const PropagatorSpec& spec, const Matrix& u_nodes,
                    const Matrix& g_nodes, const Grid& grid, AssemblyConvention convention) {
    const auto sys = assemble_D(market, spec, grid, convention);
    const Vector u = stack_time_major(u_nodes);
    const Vector g = stack_time_major(g_nodes);
    if (u.size() != sys.D.rows() || g.size() != sys.D.rows())
        throw GridMismatchError("foc_residual: dimensions inconsistent with grid");
    return (sys.D * u - g).lpNorm<Eigen::Infinity>();
}

}  // namespace crossimpact
