#pragma once

#include "crossimpact/discretization.hpp"
#include "crossimpact/signals.hpp"
#include "crossimpact/types.hpp"

namespace crossimpact {

// Discretized revenue-risk functional, term by term. All quadratures reuse the
// operator-assembly blocks, so the stationarity system of the discrete
// objective is exactly D u = g (not merely O(dt)-consistent): with node weight
// w = T/(n+1),
//   J(u) = const + w (g' u - 1/2 u' D u).
struct ObjectiveBreakdown {
    double execution_cost = 0.0;       // sum_k w u_k' A(t_k): cash paid at unaffected prices
    double terminal_book_value = 0.0;  // X_T' A_T (X_T by the w-weighted node rule)
    double transient_cost = 0.0;       // 1/2 u' (kernel part) u, >= 0 for admissible kernels
    double temporary_cost = 0.0;       // 1/2 sum_k w u_k' Lbar u_k
    double risk_penalty = 0.0;         // gamma/2 * discretized int X' Sigma X
    double terminal_penalty = 0.0;     // varrho/2 * X_T' Pi X_T
    double total = 0.0;                // book value - execution cost - costs - penalties
};

// Drift realization used when evaluating the objective: values of
// E[P_T - P_{t_k}] (equivalently A_T - A_{t_k} with P_0 = 0) at the nodes.
// For deterministic signals this is exactly the drift part of the solver's g.
ObjectiveBreakdown evaluate_objective(const MarketParams& market, const PropagatorSpec& spec,
                                      const Grid& grid, const Matrix& u_nodes,
                                      const Matrix& drift_to_go,
                                      AssemblyConvention convention = AssemblyConvention::SymmetricQp);

// Convenience overload: computes the drift profile from a signal realization.
ObjectiveBreakdown evaluate_objective(const MarketParams& market, const PropagatorSpec& spec,
                                      const Grid& grid, const Matrix& u_nodes,
                                      const SignalModel& model, const SignalPath& path,
                                      AssemblyConvention convention = AssemblyConvention::SymmetricQp);

// Frictionless benchmark position Sigma^{-1} I / gamma.
Vector markowitz(const Matrix& Sigma, double gamma, const Vector& I_t);

// Max-norm residual of the discretized stationarity system, ||D u - g||_inf.
double foc_residual(const MarketParams& market, const PropagatorSpec& spec, const Matrix& u_nodes,
                    const Matrix& g_nodes, const Grid& grid,
                    AssemblyConvention convention = AssemblyConvention::SymmetricQp);

// Node weight of the discrete objective's quadrature.
inline double node_weight(const Grid& grid) { return grid.T / (grid.n + 1); }

// Stacks an (n+1) x N node matrix into the time-major N(n+1) vector.
Vector stack_time_major(const Matrix& nodes);
Matrix unstack_time_major(const Vector& v, int N);

}  // namespace crossimpact
