#pragma once

#include <cstdint>
#include <functional>

#include "crossimpact/types.hpp"

namespace crossimpact {

// Unaffected-price drift model: either a deterministic drift path I(t) = Adot,
// or the mean-reverting OU predictor dI = -beta I dt + noise dW with diagonal
// beta. Only the drift enters the optimal strategy; the martingale part of the
// price cancels in g and is never simulated here.
struct SignalModel {
    enum class Kind { Deterministic, OU };

    Kind kind = Kind::Deterministic;
    std::function<Vector(double)> drift_fn;  // Deterministic: t -> I(t)
    Vector beta_diag;                        // OU mean reversion rates, >= 0
    Vector I0;                               // OU initial predictor
    Matrix noise_scale;                      // OU diffusion of W
    Matrix drift_table;                      // optional pw-linear table behind drift_fn
    bool is_none = false;                    // zero-drift marker for serialization

    static SignalModel none(int N);
    static SignalModel deterministic(int N, std::function<Vector(double)> drift);
    static SignalModel ou(Vector beta_diag, Vector I0, Matrix noise_scale);

    int dim() const;
    void validate() const;
};

struct SignalPath {
    Grid grid;
    Matrix I;  // (n+1) x N predictor values at the nodes
    std::uint64_t seed = 0;

    void validate(int N) const {
        if (I.rows() != grid.num_nodes() || I.cols() != N)
            throw PathMismatchError("SignalPath: I must be (n+1) x N on the associated grid");
        if (!I.allFinite()) throw PathMismatchError("SignalPath: entries must be finite");
    }
};

// Euler-Maruyama path of the OU predictor, deterministic given the seed.
SignalPath simulate_ou_path(const SignalModel& model, const Grid& grid, std::uint64_t seed);

// Node values of a deterministic model's drift (for reporting and for the
// deterministic branch of the stochastic solver).
SignalPath deterministic_path(const SignalModel& model, const Grid& grid);

// E_t[I_r] = e^{-beta (r-t)} I_t, diagonal closed form. OU kind only.
Vector conditional_future_drift(const SignalModel& model, const Vector& I_t, double t, double r);

// Profile g_hat(r_j) = E_t[g_{r_j}] for every grid node r_j >= t_k, stacked as
// rows j = k..n:
//   OU:            E_t[P_T - P_r] = (e^{-beta (r-t)} - e^{-beta (T-t)}) / beta * I_t
//                  (coordinate-wise, limit (T-r) I_t when beta_i = 0)
//   Deterministic: A_T - A_r by composite Simpson on a 4x refined grid
// minus the penalty term (gamma (T-r) Sigma + varrho Pi) X0 at each r.
Matrix g_profile(const MarketParams& market, const SignalModel& model, const Vector& I_t, int k,
                 const Grid& grid);

// Full profile at t = 0 (used by the deterministic solver front end).
Matrix g_nodes(const MarketParams& market, const SignalModel& model, const Grid& grid);

// Drift part E_0[P_T - P_{t_j}] alone, without the penalty term (used when
// evaluating the objective).
Matrix drift_to_go_nodes(const SignalModel& model, const Vector& I_0, const Grid& grid);

}  // namespace crossimpact
