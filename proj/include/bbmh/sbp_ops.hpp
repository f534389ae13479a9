#pragma once

#include <span>
#include <vector>

#include "bbmh/circulant_operator.hpp"
#include "bbmh/grid.hpp"

namespace bbmh {

/// Periodic upwind SBP operators D+, D-, the induced central operator
/// D1 = (D+ + D-)/2 and the diagonal mass matrix M.
///
/// Invariants checked on construction:
///   M D+ + D-^T M = 0,  D+ 1 = D- 1 = 0,  M (D+ - D-) / 2 <= 0.
/// Immutable after construction.
struct OperatorSet {
    GridSpec grid;
    int order = 0;
    CirculantOperator d_plus;
    CirculantOperator d_minus;
    CirculantOperator d_central;
    std::vector<double> mass_diag;

    std::size_t n() const { return grid.n; }

    /// a^T M b
    double mass_dot(std::span<const double> a, std::span<const double> b) const;
    /// sqrt(a^T M a)
    double mass_norm(std::span<const double> a) const;
    /// 1^T M a
    double mass_sum(std::span<const double> a) const;
};

/// Supported accuracy orders are 2, 3 and 4; the grid needs n >= 2*order + 2.
OperatorSet build_upwind_operators(const GridSpec& grid, int order);

}  // namespace bbmh
