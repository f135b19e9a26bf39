#pragma once

#include <cmath>
#include <functional>

#include "crossimpact/rng.hpp"
#include "crossimpact/types.hpp"

namespace crossimpact::testing {

// Fixed-refinement composite Simpson used as an independent quadrature oracle
// (separate from the library's adaptive routine).
inline double simpson_oracle(const std::function<double(double)>& f, double a, double b,
                             int panels = 4096) {
    const double h = (b - a) / panels;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * h, hi = lo + h, mid = 0.5 * (lo + hi);
        acc += h / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
    }
    return acc;
}

// Double-exponential (tanh-sinh) quadrature; handles integrable endpoint
// singularities such as the fractional kernel window through zero.
inline double tanh_sinh_oracle(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (b - a), d = 0.5 * (a + b);
    auto level = [&](double h) {
        double s = 0.0;
        for (int k = 0;; ++k) {
            const double t = h * k;
            if (t > 6.5) break;
            const double w = 0.5 * M_PI * std::sinh(t);
            const double x = std::tanh(w);
            const double dx = 0.5 * M_PI * std::cosh(t) / std::pow(std::cosh(w), 2);
            if (1.0 - std::abs(x) < 1e-17 && k > 0) break;
            const double xp = d + c * x, xn = d - c * x;
            // never touch the endpoints themselves (integrable singularities)
            const double fp = xp < b && xp > a ? f(xp) : 0.0;
            const double fn = k == 0 ? 0.0 : (xn > a && xn < b ? f(xn) : 0.0);
            s += (fp + fn) * dx;
        }
        return s * h * c;
    };
    double prev = level(0.5), cur = 0.0;
    for (double h = 0.25; h > 1e-4; h /= 2) {
        cur = level(h);
        if (std::abs(cur - prev) < 1e-13 * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    return cur;
}

inline Matrix random_matrix(int rows, int cols, NormalSampler& rng) {
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = rng();
    return M;
}

inline Matrix random_spd(int n, NormalSampler& rng, double shift = 0.1) {
    const Matrix A = random_matrix(n, n, rng);
    return A * A.transpose() + shift * Matrix::Identity(n, n);
}

inline Matrix random_psd(int n, NormalSampler& rng) {
    const Matrix A = random_matrix(n, n, rng);
    return A * A.transpose();
}

// Test-local Kronecker product (row-major blocks), independent of the
// library's block assembly.
inline Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

}  // namespace crossimpact::testing
