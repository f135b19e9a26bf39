#include "crossimpact/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace crossimpact {

const char* kernel_kind_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::Zero: return "zero";
        case KernelKind::FactorizedExp: return "factorized_exp";
        case KernelKind::FactorizedFractionalSingular: return "factorized_fractional";
        case KernelKind::FactorizedPowerLawShifted: return "factorized_power_law";
        case KernelKind::MatrixExp: return "matrix_exp";
        case KernelKind::Permanent: return "permanent";
        case KernelKind::Constructed: return "constructed";
        case KernelKind::Bond: return "bond";
    }
    return "unknown";
}

// ---------------------------------------------------------------- ScalarDecay

ScalarDecay ScalarDecay::constant(double c) {
    ScalarDecay d;
    d.kind = Kind::Const;
    d.c = c;
    d.validate();
    return d;
}

ScalarDecay ScalarDecay::exponential(double c, double rho) {
    ScalarDecay d;
    d.kind = Kind::Exp;
    d.c = c;
    d.rho = rho;
    d.validate();
    return d;
}

ScalarDecay ScalarDecay::power_law(double c, double beta, double t0) {
    ScalarDecay d;
    d.kind = Kind::PowerLawShifted;
    d.c = c;
    d.beta = beta;
    d.t0 = t0;
    d.validate();
    return d;
}

ScalarDecay ScalarDecay::tabulated(std::vector<std::pair<double, double>> pts) {
    ScalarDecay d;
    d.kind = Kind::Tabulated;
    d.table = std::move(pts);
    d.validate();
    return d;
}

void ScalarDecay::validate() const {
    switch (kind) {
        case Kind::Const:
            break;
        case Kind::Exp:
            if (!(rho > 0.0)) throw InvalidSpecError("ScalarDecay: exp decay needs rho > 0");
            break;
        case Kind::PowerLawShifted:
            if (!(beta > 0.0 && beta < 1.0))
                throw InvalidSpecError("ScalarDecay: power law needs beta in (0,1)");
            if (!(t0 > 0.0)) throw InvalidSpecError("ScalarDecay: power law needs t0 > 0");
            break;
        case Kind::Tabulated: {
            if (table.size() < 2) throw InvalidSpecError("ScalarDecay: table needs >= 2 points");
            for (std::size_t i = 1; i < table.size(); ++i)
                if (!(table[i].first > table[i - 1].first))
                    throw InvalidSpecError("ScalarDecay: table abscissae must be increasing");
            break;
        }
    }
}

double ScalarDecay::value(double t) const {
    switch (kind) {
        case Kind::Const:
            return c;
        case Kind::Exp:
            return c * std::exp(-rho * t);
        case Kind::PowerLawShifted:
            return c * std::pow(1.0 + t / t0, -beta);
        case Kind::Tabulated: {
            if (t <= table.front().first) return table.front().second;
            if (t >= table.back().first) return table.back().second;
            auto it = std::upper_bound(table.begin(), table.end(), t,
                                       [](double x, const auto& p) { return x < p.first; });
            const auto& [t1, v1] = *it;
            const auto& [t0p, v0] = *(it - 1);
            const double w = (t - t0p) / (t1 - t0p);
            return v0 + w * (v1 - v0);
        }
    }
    return 0.0;
}

double ScalarDecay::integrate(double a, double b) const {
    if (b <= a) return 0.0;
    switch (kind) {
        case Kind::Const:
            return c * (b - a);
        case Kind::Exp:
            return c * (std::exp(-rho * a) - std::exp(-rho * b)) / rho;
        case Kind::PowerLawShifted: {
            auto F = [&](double x) { return t0 / (1.0 - beta) * std::pow(1.0 + x / t0, 1.0 - beta); };
            return c * (F(b) - F(a));
        }
        case Kind::Tabulated: {
            // exact integral of the piecewise-linear interpolant (clamped ends)
            double total = 0.0;
            auto seg = [&](double x0, double x1, double v0, double v1) {
                const double lo = std::max(a, x0), hi = std::min(b, x1);
                if (hi <= lo) return;
                auto val = [&](double x) { return v0 + (v1 - v0) * (x - x0) / (x1 - x0); };
                total += 0.5 * (val(lo) + val(hi)) * (hi - lo);
            };
            if (a < table.front().first)
                total += table.front().second * (std::min(b, table.front().first) - a);
            for (std::size_t i = 1; i < table.size(); ++i)
                seg(table[i - 1].first, table[i].first, table[i - 1].second, table[i].second);
            if (b > table.back().first)
                total += table.back().second * (b - std::max(a, table.back().first));
            return total;
        }
    }
    return 0.0;
}

// ------------------------------------------------------------- PropagatorSpec

namespace {

void require_square(const Matrix& M, const char* name) {
    if (M.rows() == 0 || M.rows() != M.cols())
        throw DimensionMismatchError(std::string("PropagatorSpec: ") + name + " must be square");
    if (!M.allFinite())
        throw InvalidSpecError(std::string("PropagatorSpec: ") + name + " has non-finite entries");
}

}  // namespace

PropagatorSpec PropagatorSpec::zero(int N) {
    PropagatorSpec s;
    s.kind = KernelKind::Zero;
    s.N = N;
    s.C = Matrix::Zero(N, N);
    s.validate();
    return s;
}

PropagatorSpec PropagatorSpec::factorized_exp(Matrix C, double rho) {
    PropagatorSpec s;
    s.kind = KernelKind::FactorizedExp;
    s.N = static_cast<int>(C.rows());
    s.C = std::move(C);
    s.rho_decay = rho;
    s.validate();
    return s;
}

PropagatorSpec PropagatorSpec::factorized_fractional(Matrix C, double alpha) {
    PropagatorSpec s;
    s.kind = KernelKind::FactorizedFractionalSingular;
    s.N = static_cast<int>(C.rows());
    s.C = std::move(C);
    s.alpha = alpha;
    s.validate();
    return s;
}

PropagatorSpec PropagatorSpec::factorized_power_law(Matrix C, double beta, double t0) {
    PropagatorSpec s;
    s.kind = KernelKind::FactorizedPowerLawShifted;
    s.N = static_cast<int>(C.rows());
    s.C = std::move(C);
    s.beta_pl = beta;
    s.t0 = t0;
    s.validate();
    return s;
}

PropagatorSpec PropagatorSpec::matrix_exp(Matrix Cmat) {
    PropagatorSpec s;
    s.kind = KernelKind::MatrixExp;
    s.N = static_cast<int>(Cmat.rows());
    s.Cmat = std::move(Cmat);
    s.validate();
    s.cmat_eig();  // decompose once here so the spec is immutable afterwards
    return s;
}

PropagatorSpec PropagatorSpec::permanent(Matrix C) {
    PropagatorSpec s;
    s.kind = KernelKind::Permanent;
    s.N = static_cast<int>(C.rows());
    s.C = std::move(C);
    s.validate();
    return s;
}

PropagatorSpec PropagatorSpec::constructed(Matrix Q, std::vector<ScalarDecay> g_list) {
    PropagatorSpec s;
    s.kind = KernelKind::Constructed;
    s.N = static_cast<int>(Q.rows());
    s.Q = std::move(Q);
    s.g_list = std::move(g_list);
    s.validate();
    return s;
}

PropagatorSpec PropagatorSpec::bond(Matrix C, double alpha_bond, ScalarDecay H, double T) {
    PropagatorSpec s;
    s.kind = KernelKind::Bond;
    s.N = static_cast<int>(C.rows());
    s.C = std::move(C);
    s.alpha_bond = alpha_bond;
    s.H_inner = std::move(H);
    s.horizon = T;
    s.validate();
    return s;
}

void PropagatorSpec::validate() const {
    if (N < 1) throw InvalidSpecError("PropagatorSpec: N must be >= 1");
    switch (kind) {
        case KernelKind::Zero:
            break;
        case KernelKind::FactorizedExp:
            require_square(C, "C");
            if (!(rho_decay > 0.0)) throw InvalidSpecError("PropagatorSpec: rho_decay must be > 0");
            break;
        case KernelKind::FactorizedFractionalSingular:
            require_square(C, "C");
            // strict square-integrability bound for the singular profile
            if (!(alpha > 0.0 && alpha < 0.5))
                throw InvalidSpecError("PropagatorSpec: alpha must lie strictly in (0, 0.5)");
            break;
        case KernelKind::FactorizedPowerLawShifted:
            require_square(C, "C");
            if (!(beta_pl > 0.0 && beta_pl < 1.0))
                throw InvalidSpecError("PropagatorSpec: beta_pl must lie in (0, 1)");
            if (!(t0 > 0.0)) throw InvalidSpecError("PropagatorSpec: t0 must be > 0");
            break;
        case KernelKind::MatrixExp:
            require_square(Cmat, "Cmat");
            if (!is_symmetric(Cmat))
                throw InvalidSpecError("PropagatorSpec: Cmat must be symmetric");
            break;
        case KernelKind::Permanent:
            require_square(C, "C");
            break;
        case KernelKind::Constructed: {
            require_square(Q, "Q");
            if (static_cast<int>(g_list.size()) != N)
                throw DimensionMismatchError("PropagatorSpec: g_list must have N entries");
            for (const auto& g : g_list) g.validate();
            Eigen::FullPivLU<Matrix> lu(Q);
            if (!lu.isInvertible())
                throw InvalidSpecError("PropagatorSpec: Q must be invertible");
            break;
        }
        case KernelKind::Bond:
            require_square(C, "C");
            if (!(alpha_bond > 0.0)) throw InvalidSpecError("PropagatorSpec: alpha_bond must be > 0");
            if (!(horizon > 0.0)) throw InvalidSpecError("PropagatorSpec: bond kernel needs T > 0");
            H_inner.validate();
            break;
    }
    if ((kind == KernelKind::FactorizedExp || kind == KernelKind::FactorizedFractionalSingular ||
         kind == KernelKind::FactorizedPowerLawShifted || kind == KernelKind::Permanent ||
         kind == KernelKind::Bond) &&
        (C.rows() != N || C.cols() != N))
        throw DimensionMismatchError("PropagatorSpec: C must be NxN");
}

double PropagatorSpec::phi(double tau) const {
    switch (kind) {
        case KernelKind::Zero:
            return 0.0;
        case KernelKind::FactorizedExp:
            return std::exp(-rho_decay * tau);
        case KernelKind::FactorizedFractionalSingular:
            if (tau <= 0.0)
                throw SingularityAtDiagonalError("singular fractional kernel evaluated at lag 0");
            return std::pow(tau, -alpha);
        case KernelKind::FactorizedPowerLawShifted:
            return std::pow(1.0 + tau / t0, -beta_pl);
        case KernelKind::Permanent:
            return 1.0;
        default:
            throw WrongKindError("phi: kernel is not factorized");
    }
}

const Eigen::SelfAdjointEigenSolver<Matrix>& PropagatorSpec::cmat_eig() const {
    if (kind != KernelKind::MatrixExp) throw WrongKindError("cmat_eig: MatrixExp kind only");
    if (!cmat_eig_) {
        cmat_eig_.emplace(Cmat);
        if (cmat_eig_->info() != Eigen::Success)
            throw EigenFailureError("eigendecomposition of Cmat failed");
    }
    return *cmat_eig_;
}

// ------------------------------------------------------------------ evaluate

namespace {

Matrix kernel_value_at_lag(const PropagatorSpec& spec, double tau, double t_row) {
    switch (spec.kind) {
        case KernelKind::Zero:
            return Matrix::Zero(spec.N, spec.N);
        case KernelKind::FactorizedExp:
        case KernelKind::FactorizedFractionalSingular:
        case KernelKind::FactorizedPowerLawShifted:
        case KernelKind::Permanent:
            return spec.C * spec.phi(tau);
        case KernelKind::MatrixExp: {
            const auto& eig = spec.cmat_eig();
            Vector ev = (-tau * eig.eigenvalues().array()).exp();
            return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
        }
        case KernelKind::Constructed: {
            Vector d(spec.N);
            for (int i = 0; i < spec.N; ++i) d[i] = spec.g_list[i].value(tau);
            return spec.Q.transpose() * d.asDiagonal() * spec.Q;
        }
        case KernelKind::Bond: {
            if (tau <= 0.0) return Matrix::Zero(spec.N, spec.N);  // strict indicator 1_{t>s}
            return spec.alpha_bond * (spec.horizon - t_row) * spec.H_inner.value(tau) * spec.C;
        }
    }
    return Matrix::Zero(spec.N, spec.N);
}

}  // namespace

Matrix eval_propagator(const PropagatorSpec& spec, double t, double s) {
    if (t < s) return Matrix::Zero(spec.N, spec.N);  // Volterra: exact zero below the diagonal
    if (t == s && spec.is_singular())
        throw SingularityAtDiagonalError("eval_propagator: singular kernel at t == s");
    return kernel_value_at_lag(spec, t - s, t);
}

Matrix mirrored_eval(const PropagatorSpec& spec, double t, double s) {
    if (t > s) return eval_propagator(spec, t, s);
    if (t < s) return eval_propagator(spec, s, t).transpose();
    if (spec.is_singular())
        throw SingularityAtDiagonalError("mirrored_eval: singular kernel at t == s");
    const Matrix G = eval_propagator(spec, t, t);
    return 0.5 * (G + G.transpose());
}

// ---------------------------------------------------------------- quadrature

double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double rel_tol) {
    if (b <= a) return 0.0;
    struct Simpson {
        const std::function<double(double)>& f;
        double rel_tol;
        int evals = 0;

        double whole(double lo, double hi, double flo, double fmid, double fhi) const {
            return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        }
        double recurse(double lo, double hi, double flo, double fmid, double fhi, double S,
                       int depth) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            const double flm = f(lm), frm = f(rm);
            evals += 2;
            const double Sl = whole(lo, mid, flo, flm, fmid);
            const double Sr = whole(mid, hi, fmid, frm, fhi);
            const double err = Sl + Sr - S;
            if (std::abs(err) <= 15.0 * rel_tol * (1.0 + std::abs(Sl + Sr)) || depth > 48)
                return Sl + Sr + err / 15.0;
            if (evals > 2'000'000)
                throw QuadratureFailureError("adaptive quadrature: tolerance not reached");
            return recurse(lo, mid, flo, flm, fmid, Sl, depth + 1) +
                   recurse(mid, hi, fmid, frm, fhi, Sr, depth + 1);
        }
    };
    Simpson s{f, rel_tol};
    const double mid = 0.5 * (a + b);
    const double fa = f(a), fm = f(mid), fb = f(b);
    return s.recurse(a, b, fa, fm, fb, s.whole(a, b, fa, fm, fb), 0);
}

double phi_window_integral(const PropagatorSpec& spec, int m, double dt) {
    if (m < 1) throw IndexOutOfRangeError("phi_window_integral: window index must be >= 1");
    switch (spec.kind) {
        case KernelKind::Zero:
            return 0.0;
        case KernelKind::FactorizedExp:
            // Table row: (e^{rho dt} - 1)/rho * e^{-rho m dt}
            return (std::exp(spec.rho_decay * dt) - 1.0) / spec.rho_decay *
                   std::exp(-spec.rho_decay * m * dt);
        case KernelKind::FactorizedFractionalSingular: {
            const double p = 1.0 - spec.alpha;
            return std::pow(dt, p) / p * (std::pow(double(m), p) - std::pow(double(m - 1), p));
        }
        case KernelKind::FactorizedPowerLawShifted: {
            auto F = [&](double x) {
                return spec.t0 / (1.0 - spec.beta_pl) * std::pow(1.0 + x / spec.t0, 1.0 - spec.beta_pl);
            };
            return F(m * dt) - F((m - 1) * dt);
        }
        case KernelKind::Permanent:
            return dt;
        default:
            throw WrongKindError("phi_window_integral: kernel is not factorized");
    }
}

double integrate_phi_block(const PropagatorSpec& spec, int k, int j, double dt, BlockSide side,
                           int n) {
    if (side == BlockSide::Lower) {
        if (j < 0 || j > k - 1)
            throw IndexOutOfRangeError("integrate_phi_block: lower blocks need 0 <= j <= k-1");
        return phi_window_integral(spec, k - j, dt);
    }
    if (j < k || (n >= 0 && j > n - 1))
        throw IndexOutOfRangeError("integrate_phi_block: upper blocks need k <= j <= n-1");
    return phi_window_integral(spec, j - k + 1, dt);
}

Matrix matrix_window_integral(const PropagatorSpec& spec, int m, double dt) {
    switch (spec.kind) {
        case KernelKind::Zero:
        case KernelKind::FactorizedExp:
        case KernelKind::FactorizedFractionalSingular:
        case KernelKind::FactorizedPowerLawShifted:
        case KernelKind::Permanent:
            return phi_window_integral(spec, m, dt) * spec.C;
        case KernelKind::MatrixExp: {
            // per-eigenvalue closed form of int exp(-tau lambda)
            const auto& eig = spec.cmat_eig();
            const double a = (m - 1) * dt, b = m * dt;
            Vector w(spec.N);
            for (int i = 0; i < spec.N; ++i) {
                const double lam = eig.eigenvalues()[i];
                w[i] = std::abs(lam) < 1e-14 ? (b - a)
                                             : (std::exp(-lam * a) - std::exp(-lam * b)) / lam;
            }
            return eig.eigenvectors() * w.asDiagonal() * eig.eigenvectors().transpose();
        }
        case KernelKind::Constructed: {
            Vector w(spec.N);
            for (int i = 0; i < spec.N; ++i) w[i] = spec.g_list[i].integrate((m - 1) * dt, m * dt);
            return spec.Q.transpose() * w.asDiagonal() * spec.Q;
        }
        case KernelKind::Bond:
            throw WrongKindError("matrix_window_integral: bond kernel is not a convolution");
    }
    return Matrix::Zero(spec.N, spec.N);
}

Matrix integrate_matrix_block(const PropagatorSpec& spec, const Grid& grid, int k, int j,
                              BlockSide side) {
    const double dt = grid.dt();
    if (spec.kind != KernelKind::Bond) {
        const int m = side == BlockSide::Lower ? k - j : j - k + 1;
        if (side == BlockSide::Lower && (j < 0 || j > k - 1))
            throw IndexOutOfRangeError("integrate_matrix_block: lower blocks need 0 <= j <= k-1");
        if (side == BlockSide::Upper && (j < k || j > grid.n - 1))
            throw IndexOutOfRangeError("integrate_matrix_block: upper blocks need k <= j <= n-1");
        // the upper side enters the operator through the adjoint G(s, t_k)^T
        if (side == BlockSide::Upper) return matrix_window_integral(spec, m, dt).transpose();
        return matrix_window_integral(spec, m, dt);
    }
    // Bond: row-collocated quadrature of the full integrand. Lower blocks fix
    // t at the row node t_k; upper blocks are the adjoint G(s, t_k)^T with the
    // (T - s) factor frozen at the cell's left node, mirroring the Step-1
    // convention for F_1.
    const double tk = grid.node(k);
    if (side == BlockSide::Lower) {
        if (j < 0 || j > k - 1)
            throw IndexOutOfRangeError("integrate_matrix_block: lower blocks need 0 <= j <= k-1");
        const double w = adaptive_quadrature(
            [&](double s) { return spec.H_inner.value(tk - s); }, grid.node(j), grid.node(j + 1));
        return spec.alpha_bond * (spec.horizon - tk) * w * spec.C;
    }
    if (j < k || j > grid.n - 1)
        throw IndexOutOfRangeError("integrate_matrix_block: upper blocks need k <= j <= n-1");
    const double w = adaptive_quadrature([&](double s) { return spec.H_inner.value(s - tk); },
                                         grid.node(j), grid.node(j + 1));
    return spec.alpha_bond * (spec.horizon - grid.node(j)) * w * spec.C.transpose();
}

}  // namespace crossimpact
