#include "crossimpact/admissibility.hpp"

#include <cmath>

#include "crossimpact/rng.hpp"

namespace crossimpact {

const char* structural_verdict_name(StructuralVerdict v) {
    switch (v) {
        case StructuralVerdict::Admissible: return "Admissible";
        case StructuralVerdict::NotApplicable: return "NotApplicable";
        case StructuralVerdict::Rejected: return "Rejected";
    }
    return "unknown";
}

const char* grid_verdict_name(GridVerdict v) {
    return v == GridVerdict::PassedPSD ? "PassedPSD" : "FailedPSD";
}

namespace {

bool symmetric_psd(const Matrix& M, std::string& why, const char* name) {
    if (!is_symmetric(M)) {
        why = std::string(name) + " is not symmetric";
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()));
    if (eig.info() != Eigen::Success) throw EigenFailureError("eigendecomposition failed");
    const double lo = eig.eigenvalues().minCoeff();
    const double scale = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
    if (lo < -1e-12 * scale) {
        why = std::string(name) + " has a negative eigenvalue (" + std::to_string(lo) + ")";
        return false;
    }
    return true;
}

// Finite-difference screen of a sampled profile on (0, T): nonnegative,
// nonincreasing, convex. Distinguishes hard violations from sample-tolerance
// ambiguity on convexity.
StructuralResult screen_profile(const ScalarDecay& g, double T, const std::string& label) {
    constexpr int kSamples = 1000;
    const double tol = 1e-9;
    std::vector<double> v(kSamples);
    double scale = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double t = (i + 0.5) * T / kSamples;
        v[i] = g.value(t);
        scale = std::max(scale, std::abs(v[i]));
    }
    const double eps = tol * std::max(scale, 1.0);
    for (int i = 0; i + 1 < kSamples; ++i)
        if (v[i + 1] > v[i] + eps)
            return {StructuralVerdict::Rejected, label + " is not nonincreasing on (0,T)"};
    for (int i = 0; i < kSamples; ++i)
        if (v[i] < -eps)
            return {StructuralVerdict::Rejected, label + " is not nonnegative on (0,T)"};
    for (int i = 1; i + 1 < kSamples; ++i)
        if (v[i + 1] + v[i - 1] - 2.0 * v[i] < -eps)
            return {StructuralVerdict::NotApplicable,
                    label + " convexity could not be established from samples"};
    return {StructuralVerdict::Admissible, ""};
}

double screen_horizon(const PropagatorSpec& spec) {
    // Screening horizon for sampled profiles; the bond kind records its own T.
    return spec.horizon > 0.0 ? spec.horizon : 10.0;
}

}  // namespace

StructuralResult check_structural(const PropagatorSpec& spec) {
    spec.validate();
    std::string why;
    switch (spec.kind) {
        case KernelKind::Zero:
            return {StructuralVerdict::Admissible, "zero kernel: costs vanish identically"};
        case KernelKind::FactorizedExp:
            if (!symmetric_psd(spec.C, why, "C")) return {StructuralVerdict::Rejected, why};
            return {StructuralVerdict::Admissible,
                    "factorized exponential: C symmetric PSD, phi nonnegative/nonincreasing/convex"};
        case KernelKind::FactorizedFractionalSingular:
            if (!symmetric_psd(spec.C, why, "C")) return {StructuralVerdict::Rejected, why};
            return {StructuralVerdict::Admissible,
                    "singular power law with alpha in (0,1/2): C symmetric PSD, profile convex"};
        case KernelKind::FactorizedPowerLawShifted:
            if (!symmetric_psd(spec.C, why, "C")) return {StructuralVerdict::Rejected, why};
            return {StructuralVerdict::Admissible,
                    "shifted power law: C symmetric PSD, profile nonnegative/nonincreasing/convex"};
        case KernelKind::Permanent:
            if (!symmetric_psd(spec.C, why, "C")) return {StructuralVerdict::Rejected, why};
            return {StructuralVerdict::Admissible, "permanent impact: C symmetric PSD, phi == 1"};
        case KernelKind::MatrixExp:
            if (!symmetric_psd(spec.Cmat, why, "Cmat")) return {StructuralVerdict::Rejected, why};
            return {StructuralVerdict::Admissible,
                    "matrix exponential: Cmat symmetric PSD, diagonalizes to convex channels"};
        case KernelKind::Constructed: {
            for (int i = 0; i < spec.N; ++i) {
                auto r = screen_profile(spec.g_list[i], screen_horizon(spec),
                                        "g_" + std::to_string(i + 1));
                if (r.verdict != StructuralVerdict::Admissible) return r;
            }
            return {StructuralVerdict::Admissible,
                    "constructed kernel: Q invertible, channel kernels pass the sampled screen"};
        }
        case KernelKind::Bond: {
            if (!symmetric_psd(spec.C, why, "C")) return {StructuralVerdict::Rejected, why};
            auto r = screen_profile(spec.H_inner, spec.horizon, "inner decay H");
            if (r.verdict != StructuralVerdict::Admissible) return r;
            return {StructuralVerdict::Admissible,
                    "bond kernel: admissible inner decay times symmetric PSD C"};
        }
    }
    return {StructuralVerdict::NotApplicable, "kernel kind outside all certified patterns"};
}

double transient_cost(const PropagatorSpec& spec, const Matrix& u_cells, const Grid& grid) {
    const int n = grid.n, N = spec.N;
    if (u_cells.rows() != n || u_cells.cols() != N)
        throw GridMismatchError("transient_cost: strategy must have one row per grid cell");
    const auto win = detail::precompute_windows(spec, grid);
    const double dt = grid.dt();

    // 1/2 dt u' (L + U) u over cells: lower windows pair (k, j<k), upper
    // windows pair (k, j>=k) at the shifted lag.
    double acc = 0.0;
    auto block = [&](int k, int j, bool lower) -> Matrix {
        if (!win.convolution) {
            const double tk = grid.node(k), tj = grid.node(j);
            if (lower) return spec.alpha_bond * (spec.horizon - tk) * win.h[k - j] * spec.C;
            return spec.alpha_bond * (spec.horizon - tj) * win.h[j - k + 1] * spec.C.transpose();
        }
        return lower ? win.W[k - j - 1] : Matrix(win.W[j - k].transpose());
    };
    for (int k = 0; k < n; ++k) {
        const Vector uk = u_cells.row(k).transpose();
        for (int j = 0; j < k; ++j) acc += uk.dot(block(k, j, true) * u_cells.row(j).transpose());
        for (int j = k; j < n; ++j) acc += uk.dot(block(k, j, false) * u_cells.row(j).transpose());
    }
    return 0.5 * dt * acc;
}

double transient_cost(const PropagatorSpec& spec, const Strategy& strategy, const Grid& grid) {
    if (strategy.grid.n != grid.n || strategy.grid.T != grid.T)
        throw GridMismatchError("transient_cost: strategy grid mismatch");
    return transient_cost(spec, Matrix(strategy.u.topRows(grid.n)), grid);
}

GridPsdResult check_grid_psd(const PropagatorSpec& spec, const Grid& grid, double tol) {
    spec.validate();
    const int n = grid.n, N = spec.N;
    const double dt = grid.dt();

    Matrix M;
    if (spec.is_singular()) {
        // integrated cell blocks: (L + U + L^T + U^T)/dt^2 over cells 0..n-1
        const auto [L, U] = build_kernel_blocks(spec, grid);
        const Matrix S = (L + U).topLeftCorner(n, n);
        const Matrix Ssym = S + S.transpose();
        M = Matrix::Zero(N * n, N * n);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                M.block(k * N, j * N, N, N) =
                    Ssym(k, j) / (dt * dt) * (k >= j ? spec.C : Matrix(spec.C.transpose()));
        M = 0.5 * (M + M.transpose());
    } else {
        // The bond kind carries a strict 1_{t>s}, so its mirrored kernel is
        // discontinuous on the diagonal; the check uses the tau -> 0 limit
        // there (the value the continuous theory sees).
        auto check_block = [&](double t, double s) -> Matrix {
            if (spec.kind == KernelKind::Bond && t == s)
                return spec.alpha_bond * (spec.horizon - t) * spec.H_inner.value(0.0) * 0.5 *
                       (spec.C + spec.C.transpose());
            return mirrored_eval(spec, t, s);
        };
        M = Matrix::Zero(N * (n + 1), N * (n + 1));
        for (int k = 0; k <= n; ++k)
            for (int l = 0; l <= n; ++l)
                M.block(k * N, l * N, N, N) = check_block(grid.node(k), grid.node(l));
        M = 0.5 * (M + M.transpose());
    }

    Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
    if (eig.info() != Eigen::Success)
        throw EigenFailureError("check_grid_psd: eigendecomposition failed");

    GridPsdResult res;
    res.grid_n = n;
    res.min_eigenvalue = eig.eigenvalues().minCoeff();
    res.max_eigenvalue = eig.eigenvalues().maxCoeff();
    const double threshold = -tol * std::max(res.max_eigenvalue, 0.0);
    res.verdict =
        res.min_eigenvalue >= threshold ? GridVerdict::PassedPSD : GridVerdict::FailedPSD;
    if (res.verdict == GridVerdict::PassedPSD) return res;

    // Witness search: demeaned (round-trip) candidates from the most negative
    // eigenvector, then seeded random round trips.
    auto as_cells = [&](const Vector& v) {
        Matrix cand = Matrix::Zero(n, N);
        const int rows = static_cast<int>(v.size()) / N;
        for (int k = 0; k < std::min(rows, n); ++k)
            cand.row(k) = v.segment(k * N, N).transpose();
        cand.rowwise() -= cand.colwise().mean();  // enforce int u dt = 0
        return cand;
    };
    Matrix best;
    double best_cost = 0.0;
    auto consider = [&](const Matrix& cand) {
        if (cand.norm() < 1e-14) return;
        const double cost = transient_cost(spec, cand, grid);
        if (cost < best_cost) {
            best_cost = cost;
            best = cand;
        }
    };
    consider(as_cells(eig.eigenvectors().col(0)));
    NormalSampler normal(20240613u);
    for (int trial = 0; trial < 256; ++trial) {
        Matrix cand(n, N);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < N; ++i) cand(k, i) = normal();
        cand.rowwise() -= cand.colwise().mean();
        consider(cand);
    }
    if (best_cost < 0.0) {
        res.witness = best;
        res.witness_cost = best_cost;
    }
    return res;
}

AdmissibilityReport audit_kernel(const PropagatorSpec& spec, const Grid& grid, double tol) {
    AdmissibilityReport rep;
    rep.structural = check_structural(spec);
    rep.grid = check_grid_psd(spec, grid, tol);
    return rep;
}

}  // namespace crossimpact
