#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "bbmh/circulant_operator.hpp"
#include "bbmh/sbp_ops.hpp"
#include "bbmh/splitting.hpp"
#include "bbmh/state.hpp"

namespace bbmh {

/// Exact solver for banded circulant systems A x = b.
///
/// A is split into its banded (non-wrapping) part B and the corner
/// couplings, A = B + U V^T with rank(U) equal to the number of rows that
/// wrap around. B is factorised by banded LU without pivoting and the
/// corners are handled by the Sherman-Morrison-Woodbury formula. This is
/// valid whenever the symmetric part of A is positive definite, which holds
/// for every system assembled by StageSystem and BbmEllipticSolver. Grids
/// too small for the band fall back to a dense pivoted LU.
///
/// Immutable after construction; solve() is safe to call concurrently.
class CyclicBandedSolver {
public:
    explicit CyclicBandedSolver(const CirculantOperator& a);

    std::size_t size() const { return n_; }
    void solve(std::span<const double> rhs, std::span<double> x) const;
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    void band_solve(std::span<double> x) const;

    std::size_t n_ = 0;
    std::size_t lower_ = 0;
    std::size_t upper_ = 0;
    std::vector<double> lu_;  // row i, column j at i*(lower+upper+1) + (j - i + lower)

    std::vector<std::size_t> corner_rows_;
    std::vector<std::vector<std::pair<std::size_t, double>>> corner_entries_;
    Eigen::MatrixXd z_;  // B^{-1} U
    Eigen::PartialPivLU<Eigen::MatrixXd> capacitance_;

    bool dense_ = false;
    Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu_;
};

/// Transform-space solve of a circulant system; n must be a power of two.
/// Independent of CyclicBandedSolver and used to cross-check it.
std::vector<double> circulant_fft_solve(const CirculantOperator& a, std::span<const double> rhs);

/// Implicit stage system of the hyperbolized BBM semidiscretization,
///   u = r_u - a (1 - delta1 eps) D+ v
///   v = r_v - a ((1 - delta2 eps)/eps^2 D- u - w/eps^2)
///   w = r_w - a ((1 - delta3) eps^2 D1 w + v)
/// with a = dt * a_ii. Eliminating w and v (all operators commute) leaves a
/// scalar banded circulant system for u; v and w follow by back-substitution.
/// With delta3 = 1 the back-substitution is pointwise.
class StageSystem {
public:
    StageSystem(const OperatorSet& ops, const SplittingParams& sp, double dt_aii);

    double dt_aii() const { return dt_aii_; }
    const SplittingParams& splitting() const { return sp_; }
    const OperatorSet& operators() const { return *ops_; }

    State solve(std::span<const double> r_u, std::span<const double> r_v,
                std::span<const double> r_w) const;

private:
    const OperatorSet* ops_;
    SplittingParams sp_;
    double dt_aii_;
    double c1_ = 1.0;
    double c2_ = 1.0;
    double b_ = 0.0;  // a (1 - delta3) eps^2
    std::unique_ptr<CyclicBandedSolver> u_solver_;
    std::unique_ptr<CyclicBandedSolver> v_solver_;  // only for delta3 != 1
    std::unique_ptr<CyclicBandedSolver> w_solver_;  // only for delta3 != 1
    CirculantOperator helmholtz_b_;                 // I + b D1
};

/// Solves the stage equations with a prepared system. dt_aii must match the
/// system; dt_aii == 0 returns the residuals unchanged.
State solve_stage(const StageSystem& sys, std::span<const double> r_u, std::span<const double> r_v,
                  std::span<const double> r_w);

/// Thread-safe cache of stage systems keyed on (dt*a_ii, eps, deltas,
/// operator identity).
class StageSystemCache {
public:
    std::shared_ptr<const StageSystem> get(const OperatorSet& ops, const SplittingParams& sp,
                                           double dt_aii);
    std::size_t size() const;

private:
    using Key = std::tuple<const OperatorSet*, double, double, double, double, double>;
    mutable std::mutex mutex_;
    std::map<Key, std::shared_ptr<const StageSystem>> cache_;
};

/// Factorised (I - D+ D-) for the BBM semidiscretization.
class BbmEllipticSolver {
public:
    explicit BbmEllipticSolver(const OperatorSet& ops);
    std::vector<double> solve(std::span<const double> rhs) const { return solver_.solve(rhs); }
    const CirculantOperator& matrix() const { return matrix_; }

private:
    CirculantOperator matrix_;
    CyclicBandedSolver solver_;
};

/// One-off solve of (I - D+ D-) y = rhs.
std::vector<double> solve_bbm_elliptic(const OperatorSet& ops, std::span<const double> rhs);

}  // namespace bbmh
