#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace crossimpact {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error taxonomy. Every failure mode surfaced by the library derives from
// Error so callers (CLI, bindings) can map them to exit codes uniformly.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSpecError : Error { using Error::Error; };
struct SingularityAtDiagonalError : Error { using Error::Error; };
struct QuadratureFailureError : Error { using Error::Error; };
struct WrongKindError : Error { using Error::Error; };
struct TimeOrderError : Error { using Error::Error; };
struct GridMismatchError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };
struct IndexOutOfRangeError : Error { using Error::Error; };
struct SingularSystemError : Error { using Error::Error; };
struct InadmissibleKernelError : Error { using Error::Error; };
struct PathMismatchError : Error { using Error::Error; };
struct EigenFailureError : Error { using Error::Error; };
struct ConfigParseError : Error { using Error::Error; };
struct IoFailureError : Error { using Error::Error; };

// Uniform time grid 0 = t_0 < t_1 < ... < t_n = T.
struct Grid {
    int n = 0;
    double T = 0.0;

    Grid() = default;
    Grid(int n_, double T_) : n(n_), T(T_) {
        if (n < 2) throw InvalidSpecError("Grid: n must be >= 2");
        if (!(T > 0.0)) throw InvalidSpecError("Grid: T must be positive");
    }

    double dt() const { return T / n; }
    double node(int k) const { return k * dt(); }
    int num_nodes() const { return n + 1; }
};

inline bool is_symmetric(const Matrix& A, double rel_tol = 1e-12) {
    const double scale = A.norm();
    return (A - A.transpose()).norm() <= rel_tol * std::max(scale, 1e-300);
}

// Market and objective parameters. Lambda is the temporary impact matrix
// (positive definite, not necessarily symmetric); its symmetric part
// lambda_bar() is the one entering the operator.
struct MarketParams {
    int N = 1;
    double T = 1.0;
    Matrix Lambda;
    Matrix Sigma;
    double gamma = 0.0;
    double varrho = 0.0;
    Matrix Pi;
    Vector X0;

    Matrix lambda_bar() const { return 0.5 * (Lambda + Lambda.transpose()); }

    void validate() const {
        if (N < 1) throw InvalidSpecError("MarketParams: N must be >= 1");
        if (!(T > 0.0)) throw InvalidSpecError("MarketParams: T must be positive");
        auto check_dim = [&](const Matrix& M, const char* name) {
            if (M.rows() != N || M.cols() != N)
                throw DimensionMismatchError(std::string("MarketParams: ") + name + " must be NxN");
        };
        check_dim(Lambda, "Lambda");
        check_dim(Sigma, "Sigma");
        check_dim(Pi, "Pi");
        if (X0.size() != N) throw DimensionMismatchError("MarketParams: X0 must have length N");
        if (gamma < 0.0) throw InvalidSpecError("MarketParams: gamma must be >= 0");
        if (varrho < 0.0) throw InvalidSpecError("MarketParams: varrho must be >= 0");
        // Lambda_bar must be positive definite (Cholesky is the certificate).
        Eigen::LLT<Matrix> llt(lambda_bar());
        if (llt.info() != Eigen::Success)
            throw SingularSystemError("MarketParams: symmetric part of Lambda is not positive definite");
        auto check_psd = [](const Matrix& M, const char* name) {
            if (!is_symmetric(M))
                throw InvalidSpecError(std::string("MarketParams: ") + name + " must be symmetric");
            Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()));
            const double scale = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
            if (eig.eigenvalues().minCoeff() < -1e-12 * scale)
                throw InvalidSpecError(std::string("MarketParams: ") + name +
                                       " must be positive semidefinite");
        };
        check_psd(Sigma, "Sigma");
        check_psd(Pi, "Pi");
    }
};

// Trading-speed path on the grid nodes: u.row(k) holds u(t_k), k = 0..n.
struct Strategy {
    Grid grid;
    Matrix u;  // (n+1) x N

    void validate(int N) const {
        if (u.rows() != grid.num_nodes() || u.cols() != N)
            throw GridMismatchError("Strategy: u must be (n+1) x N on the associated grid");
        if (!u.allFinite()) throw InvalidSpecError("Strategy: entries must be finite");
    }
};

}  // namespace crossimpact
