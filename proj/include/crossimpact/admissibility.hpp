#pragma once

#include <optional>
#include <string>

#include "crossimpact/discretization.hpp"
#include "crossimpact/kernels.hpp"
#include "crossimpact/types.hpp"

namespace crossimpact {

enum class StructuralVerdict { Admissible, NotApplicable, Rejected };
enum class GridVerdict { PassedPSD, FailedPSD };

const char* structural_verdict_name(StructuralVerdict v);
const char* grid_verdict_name(GridVerdict v);

struct StructuralResult {
    StructuralVerdict verdict = StructuralVerdict::NotApplicable;
    std::string reason;
};

struct GridPsdResult {
    GridVerdict verdict = GridVerdict::FailedPSD;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    int grid_n = 0;
    std::optional<Matrix> witness;       // round-trip strategy on the cells, (n x N)
    std::optional<double> witness_cost;  // its transient cost (negative when present)
};

struct AdmissibilityReport {
    StructuralResult structural;
    GridPsdResult grid;
    bool admissible() const {
        return structural.verdict == StructuralVerdict::Admissible ||
               grid.verdict == GridVerdict::PassedPSD;
    }
};

// Structural sufficient conditions, per kernel kind: factorized kinds need a
// symmetric PSD C and a nonnegative/nonincreasing/convex profile (holds
// analytically for the exp/power-law/constant profiles and for the singular
// power law with alpha < 1/2); Constructed needs an invertible Q and channel
// kernels screened on a 1000-point grid; MatrixExp needs symmetric PSD Cmat;
// Bond needs an admissible inner decay and symmetric PSD C.
//
// Rejected marks a positively violated hypothesis (asymmetry, negative
// eigenvalue, increasing or negative profile); NotApplicable marks a profile
// whose convexity cannot be established from samples -- a failed sufficient
// condition, not a proof of manipulation.
StructuralResult check_structural(const PropagatorSpec& spec);

// Numerical PSD check of the mirrored kernel on the uniform grid: pointwise
// node sampling for continuous kinds, integrated cell blocks
// (L + U + L^T + U^T)/dt^2 over cells 0..n-1 for the singular kind. PassedPSD
// iff lambda_min >= -tol * lambda_max. On failure, searches for a round-trip
// witness with negative transient cost.
GridPsdResult check_grid_psd(const PropagatorSpec& spec, const Grid& grid, double tol = 1e-10);

AdmissibilityReport audit_kernel(const PropagatorSpec& spec, const Grid& grid, double tol = 1e-10);

// Discretized expected transient cost int int u' G u ds dt for a strategy
// given by its cell values (piecewise constant on [t_j, t_{j+1})), via the
// Step-1 L/U block quadrature: 1/2 dt u' (L + U) u over cells 0..n-1.
double transient_cost(const PropagatorSpec& spec, const Matrix& u_cells, const Grid& grid);

// Strategy overload; uses the first n rows (the node-n value trades on a
// zero-measure interval and never enters the cost).
double transient_cost(const PropagatorSpec& spec, const Strategy& strategy, const Grid& grid);

}  // namespace crossimpact
