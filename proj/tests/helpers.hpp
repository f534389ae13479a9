#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bbmh/circulant_operator.hpp"
#include "bbmh/sbp_ops.hpp"
#include "bbmh/splitting.hpp"
#include "bbmh/state.hpp"

namespace bbmh::testing {

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    return x;
}

inline State random_state(std::size_t n, std::mt19937_64& rng) {
    return State::bbmh(random_vector(n, rng), random_vector(n, rng), random_vector(n, rng));
}

inline Eigen::MatrixXd to_dense(const CirculantOperator& op) {
    const auto n = static_cast<Eigen::Index>(op.size());
    const auto d = op.dense();
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = d[static_cast<std::size_t>(i * n + j)];
    return m;
}

inline Eigen::VectorXd to_eigen(std::span<const double> x) {
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

inline double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Dense 3n x 3n assembly of the implicit stage equations solved by pivoted
/// LU in extended precision. The v equation is multiplied by eps^2 so the
/// rows are balanced for small eps.
inline Eigen::VectorXd dense_stage_solve(const OperatorSet& ops, const SplittingParams& sp, double a,
                                         const State& r) {
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const auto n = static_cast<Eigen::Index>(ops.n());
    const long double eps = sp.eps;
    const long double e2 = eps * eps;
    const long double la = a;
    const MatL id = MatL::Identity(n, n);
    MatL m = MatL::Zero(3 * n, 3 * n);
    m.block(0, 0, n, n) = id;
    m.block(0, n, n, n) = la * (1.0L - sp.delta1 * eps) * to_dense(ops.d_plus).cast<long double>();
    m.block(n, 0, n, n) = la * (1.0L - sp.delta2 * eps) * to_dense(ops.d_minus).cast<long double>();
    m.block(n, n, n, n) = e2 * id;
    m.block(n, 2 * n, n, n) = -la * id;
    m.block(2 * n, n, n, n) = la * id;
    m.block(2 * n, 2 * n, n, n) =
        id + la * (1.0L - sp.delta3) * e2 * to_dense(ops.d_central).cast<long double>();
    VecL rhs = to_eigen(r.data()).cast<long double>();
    rhs.segment(n, n) *= e2;
    const VecL x = m.partialPivLu().solve(rhs);
    return x.cast<double>();
}

}  // namespace bbmh::testing
