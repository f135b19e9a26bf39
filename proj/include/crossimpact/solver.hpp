#pragma once

#include "crossimpact/admissibility.hpp"
#include "crossimpact/discretization.hpp"
#include "crossimpact/objective.hpp"
#include "crossimpact/signals.hpp"
#include "crossimpact/types.hpp"

namespace crossimpact {

struct SolveOptions {
    AssemblyConvention convention = AssemblyConvention::SymmetricQp;
    // Inadmissible kernels are refused: a propagator outside the admissible
    // class permits price manipulation and the first-order condition loses its
    // sufficiency. `force` overrides with a warning.
    bool check_admissibility = true;
    bool force = false;
    double admissibility_tol = 1e-10;
};

struct SolveReport {
    Strategy strategy;
    Matrix inventory;   // (n+1) x N, X_{k+1} = X_k + u_k dt
    Matrix distortion;  // (n+1) x N, lower kernel blocks applied to past controls
    double foc_residual_abs = 0.0;
    double foc_residual_rel = 0.0;
    ObjectiveBreakdown objective;
    double wall_seconds = 0.0;
};

// Deterministic solve u = D^{-1} g for a known profile g at the nodes.
SolveReport solve_deterministic(const MarketParams& market, const PropagatorSpec& spec,
                                const Matrix& g_nodes, const Grid& grid,
                                const SolveOptions& opts = {});

// Path-wise stochastic solve by the trailing-system recursion: at each node k,
// form the conditional profile from the observed predictor, subtract the
// past-control contribution through the strictly-lower blocks, solve the
// trailing principal system and read off u_k. With a deterministic signal this
// reproduces solve_deterministic exactly.
//
// Signal classes beyond deterministic/OU would require a user-supplied
// conditional-expectation callback in place of g_profile; that hook is the
// natural extension point.
SolveReport solve_stochastic_path(const MarketParams& market, const PropagatorSpec& spec,
                                  const SignalModel& model, const SignalPath& path,
                                  const Grid& grid, const SolveOptions& opts = {});

// Second implementation via the explicit resolvent construction: discrete
// a_k and B(k,j) blocks built from trailing inverses (column-wise application
// to the lower kernel blocks), then (I + B) u = a by forward substitution.
// Cross-validates the recursion.
SolveReport solve_stochastic_resolvent(const MarketParams& market, const PropagatorSpec& spec,
                                       const SignalModel& model, const SignalPath& path,
                                       const Grid& grid, const SolveOptions& opts = {});

// Inventory by exact piecewise-constant integration and distortion through the
// same lower kernel blocks as the assembly.
std::pair<Matrix, Matrix> inventory_and_distortion(const PropagatorSpec& spec, const Vector& X0,
                                                   const Matrix& u_nodes, const Grid& grid,
                                                   AssemblyConvention convention =
                                                       AssemblyConvention::SymmetricQp);

}  // namespace crossimpact
