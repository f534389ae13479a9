#include "bbmh/sbp_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bbmh/errors.hpp"

namespace bbmh {

namespace {

struct UpwindStencil {
    int plus_offset;
    std::vector<double> plus;
    int minus_offset;
    std::vector<double> minus;
};

// Interior stencils of the periodic upwind operators (unit spacing). D- is
// the mirror image of D+ with flipped sign.
UpwindStencil upwind_table(int order) {
    switch (order) {
        case 2:
            return {0, {-3.0 / 2.0, 2.0, -1.0 / 2.0},
                    -2, {1.0 / 2.0, -2.0, 3.0 / 2.0}};
        case 3:
            return {-1, {-1.0 / 3.0, -1.0 / 2.0, 1.0, -1.0 / 6.0},
                    -2, {1.0 / 6.0, -1.0, 1.0 / 2.0, 1.0 / 3.0}};
        case 4:
            return {-1, {-1.0 / 4.0, -5.0 / 6.0, 3.0 / 2.0, -1.0 / 2.0, 1.0 / 12.0},
                    -3, {-1.0 / 12.0, 1.0 / 2.0, -3.0 / 2.0, 5.0 / 6.0, 1.0 / 4.0}};
        default:
            throw ConfigError("unsupported upwind SBP order " + std::to_string(order) +
                              " (supported: 2, 3, 4)");
    }
}

// Moment conditions sum_k c_k (offset_k)^m = [m == 1] for m = 0..order.
void check_moments(int first, const std::vector<double>& c, int order, const char* which) {
    for (int m = 0; m <= order; ++m) {
        double acc = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            acc += c[k] * std::pow(static_cast<double>(first + static_cast<int>(k)), m);
        }
        const double expected = (m == 1) ? 1.0 : 0.0;
        if (std::abs(acc - expected) > 1e-12) {
            throw ConfigError(std::string("stencil table for ") + which + " fails moment " +
                              std::to_string(m));
        }
    }
}

void check_table(const UpwindStencil& t, int order) {
    check_moments(t.plus_offset, t.plus, order, "D+");
    check_moments(t.minus_offset, t.minus, order, "D-");

    // M D+ + D-^T M = 0 with M = h I  <=>  minus(o) = -plus(-o).
    const int lo = std::min(t.plus_offset, -(t.minus_offset + static_cast<int>(t.minus.size()) - 1));
    const int hi = std::max(t.plus_offset + static_cast<int>(t.plus.size()) - 1, -t.minus_offset);
    auto at = [](int first, const std::vector<double>& c, int o) {
        const int k = o - first;
        return (k < 0 || k >= static_cast<int>(c.size())) ? 0.0 : c[static_cast<std::size_t>(k)];
    };
    for (int o = lo; o <= hi; ++o) {
        if (std::abs(at(t.plus_offset, t.plus, o) + at(t.minus_offset, t.minus, -o)) > 1e-15) {
            throw ConfigError("stencil table violates the upwind SBP identity");
        }
    }
}

}  // namespace

double OperatorSet::mass_dot(std::span<const double> a, std::span<const double> b) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += mass_diag[j] * a[j] * b[j];
    return acc;
}

double OperatorSet::mass_norm(std::span<const double> a) const { return std::sqrt(mass_dot(a, a)); }

double OperatorSet::mass_sum(std::span<const double> a) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += mass_diag[j] * a[j];
    return acc;
}

OperatorSet build_upwind_operators(const GridSpec& grid, int order) {
    const UpwindStencil table = upwind_table(order);
    check_table(table, order);
    const auto min_n = static_cast<std::size_t>(2 * order + 2);
    if (grid.n < min_n) {
        throw ConfigError("upwind operator of order " + std::to_string(order) + " needs n >= " +
                          std::to_string(min_n) + ", got " + std::to_string(grid.n));
    }
    const double inv_h = 1.0 / grid.h();
    auto scaled = [inv_h](std::vector<double> c) {
        for (double& x : c) x *= inv_h;
        return c;
    };

    OperatorSet ops;
    ops.grid = grid;
    ops.order = order;
    ops.d_plus = CirculantOperator(grid.n, table.plus_offset, scaled(table.plus));
    ops.d_minus = CirculantOperator(grid.n, table.minus_offset, scaled(table.minus));
    ops.d_central = 0.5 * (ops.d_plus + ops.d_minus);
    ops.mass_diag.assign(grid.n, grid.h());
    return ops;
}

}  // namespace bbmh
