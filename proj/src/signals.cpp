#include "crossimpact/signals.hpp"

#include <cmath>

#include "crossimpact/rng.hpp"

namespace crossimpact {

SignalModel SignalModel::none(int N) {
    SignalModel m = deterministic(N, [N](double) { return Vector::Zero(N); });
    m.is_none = true;
    return m;
}

SignalModel SignalModel::deterministic(int N, std::function<Vector(double)> drift) {
    SignalModel m;
    m.kind = Kind::Deterministic;
    m.drift_fn = std::move(drift);
    m.I0 = Vector::Zero(N);
    m.beta_diag = Vector::Zero(N);
    m.noise_scale = Matrix::Zero(N, N);
    m.validate();
    return m;
}

SignalModel SignalModel::ou(Vector beta_diag, Vector I0, Matrix noise_scale) {
    SignalModel m;
    m.kind = Kind::OU;
    m.beta_diag = std::move(beta_diag);
    m.I0 = std::move(I0);
    m.noise_scale = std::move(noise_scale);
    m.validate();
    return m;
}

int SignalModel::dim() const { return static_cast<int>(I0.size()); }

void SignalModel::validate() const {
    const int N = dim();
    if (N < 1) throw InvalidSpecError("SignalModel: dimension must be >= 1");
    if (kind == Kind::OU) {
        if (beta_diag.size() != N || noise_scale.rows() != N || noise_scale.cols() != N)
            throw DimensionMismatchError("SignalModel: beta/noise dimensions inconsistent");
        if ((beta_diag.array() < 0.0).any())
            throw InvalidSpecError("SignalModel: beta entries must be >= 0");
    } else if (!drift_fn) {
        throw InvalidSpecError("SignalModel: deterministic model needs a drift function");
    }
}

SignalPath simulate_ou_path(const SignalModel& model, const Grid& grid, std::uint64_t seed) {
    if (model.kind != SignalModel::Kind::OU)
        throw WrongKindError("simulate_ou_path: OU kind required");
    const int N = model.dim();
    const double dt = grid.dt(), sdt = std::sqrt(dt);
    NormalSampler normal(seed);
    SignalPath path{grid, Matrix::Zero(grid.num_nodes(), N), seed};
    path.I.row(0) = model.I0.transpose();
    Vector xi(N);
    for (int k = 0; k < grid.n; ++k) {
        for (int i = 0; i < N; ++i) xi[i] = normal();
        Vector Ik = path.I.row(k).transpose();
        path.I.row(k + 1) =
            (Ik - model.beta_diag.cwiseProduct(Ik) * dt + model.noise_scale * xi * sdt).transpose();
    }
    return path;
}

SignalPath deterministic_path(const SignalModel& model, const Grid& grid) {
    if (model.kind != SignalModel::Kind::Deterministic)
        throw WrongKindError("deterministic_path: deterministic kind required");
    const int N = model.dim();
    SignalPath path{grid, Matrix::Zero(grid.num_nodes(), N), 0};
    for (int k = 0; k <= grid.n; ++k) path.I.row(k) = model.drift_fn(grid.node(k)).transpose();
    return path;
}

Vector conditional_future_drift(const SignalModel& model, const Vector& I_t, double t, double r) {
    if (model.kind != SignalModel::Kind::OU)
        throw WrongKindError("conditional_future_drift: OU kind required");
    if (r < t) throw TimeOrderError("conditional_future_drift: requires t <= r");
    return (-(r - t) * model.beta_diag.array()).exp() * I_t.array();
}

namespace {

// int_r^T E_t[I_s] ds per coordinate: (e^{-beta (r-t)} - e^{-beta (T-t)})/beta,
// with the beta -> 0 limit (T - r).
double ou_drift_to_go(double beta, double I, double r_minus_t, double T_minus_t) {
    if (beta <= 0.0) return (T_minus_t - r_minus_t) * I;
    return (std::exp(-beta * r_minus_t) - std::exp(-beta * T_minus_t)) / beta * I;
}

// Composite Simpson over [a,b], refined 4x per pass until the 1e-10
// tolerance is met.
double simpson_refined(const std::function<Vector(double)>& f, int coord, double a, double b) {
    auto composite = [&](int sub) {
        const double h = (b - a) / sub;
        double total = 0.0;
        for (int i = 0; i < sub; ++i) {
            const double lo = a + i * h, hi = lo + h, mid = 0.5 * (lo + hi);
            total += h / 6.0 * (f(lo)[coord] + 4.0 * f(mid)[coord] + f(hi)[coord]);
        }
        return total;
    };
    double prev = composite(4);
    for (int sub = 16; sub <= 4096; sub *= 4) {
        const double cur = composite(sub);
        if (std::abs(cur - prev) <= 1e-10 * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace

Matrix drift_to_go_nodes(const SignalModel& model, const Vector& I_t, const Grid& grid) {
    const int N = model.dim();
    Matrix out = Matrix::Zero(grid.num_nodes(), N);
    if (model.kind == SignalModel::Kind::OU) {
        for (int j = 0; j <= grid.n; ++j)
            for (int i = 0; i < N; ++i)
                out(j, i) = ou_drift_to_go(model.beta_diag[i], I_t[i], grid.node(j), grid.T);
        return out;
    }
    // Deterministic: accumulate tails A_T - A_{t_j} from the last node backwards.
    Vector tail = Vector::Zero(N);
    for (int j = grid.n - 1; j >= 0; --j) {
        for (int i = 0; i < N; ++i)
            tail[i] += simpson_refined(model.drift_fn, i, grid.node(j), grid.node(j + 1));
        out.row(j) = tail.transpose();
    }
    return out;
}

Matrix g_profile(const MarketParams& market, const SignalModel& model, const Vector& I_t, int k,
                 const Grid& grid) {
    if (k < 0 || k > grid.n) throw IndexOutOfRangeError("g_profile: node index out of range");
    const int N = market.N;
    const int rows = grid.n - k + 1;
    Matrix out(rows, N);
    const double tk = grid.node(k);
    for (int idx = 0; idx < rows; ++idx) {
        const int j = k + idx;
        const double r = grid.node(j);
        Vector drift(N);
        if (model.kind == SignalModel::Kind::OU) {
            for (int i = 0; i < N; ++i)
                drift[i] = ou_drift_to_go(model.beta_diag[i], I_t[i], r - tk, grid.T - tk);
        } else {
            drift.setZero();
        }
        out.row(idx) =
            (drift - (market.gamma * (grid.T - r) * market.Sigma + market.varrho * market.Pi) *
                         market.X0)
                .transpose();
    }
    if (model.kind == SignalModel::Kind::Deterministic) {
        // profile restriction: the t=0 tail integrals are reused verbatim so
        // recomputation at a later t agrees exactly on the overlap
        const Matrix togo = drift_to_go_nodes(model, I_t, grid);
        out += togo.bottomRows(rows);
    }
    return out;
}

Matrix g_nodes(const MarketParams& market, const SignalModel& model, const Grid& grid) {
    const Vector I0 = model.kind == SignalModel::Kind::OU ? model.I0 : Vector::Zero(market.N);
    return g_profile(market, model, I0, 0, grid);
}

}  // namespace crossimpact
