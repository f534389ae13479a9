#include "bbmh/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bbmh/errors.hpp"
#include "bbmh/fourier.hpp"

namespace bbmh {

CyclicBandedSolver::CyclicBandedSolver(const CirculantOperator& a) : n_(a.size()) {
    lower_ = static_cast<std::size_t>(std::max(0, -a.first_offset()));
    upper_ = static_cast<std::size_t>(std::max(0, a.last_offset()));

    if (2 * (lower_ + upper_) + 1 > n_) {
        dense_ = true;
        const auto d = a.dense();
        Eigen::MatrixXd m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) m(i, j) = d[i * n_ + j];
        }
        dense_lu_.compute(m);
        if (std::abs(dense_lu_.determinant()) == 0.0) {
            throw SolverError("circulant system is singular");
        }
        return;
    }

    const std::size_t width = lower_ + upper_ + 1;
    lu_.assign(n_ * width, 0.0);
    corner_entries_.clear();
    const long n = static_cast<long>(n_);
    double scale = 0.0;
    for (double w : a.weights()) scale = std::max(scale, std::abs(w));

    for (long i = 0; i < n; ++i) {
        std::vector<std::pair<std::size_t, double>> wrapped;
        for (int o = a.first_offset(); o <= a.last_offset(); ++o) {
            const double w = a.weight(o);
            if (w == 0.0) continue;
            const long j = i + o;
            if (j >= 0 && j < n) {
                lu_[static_cast<std::size_t>(i) * width + static_cast<std::size_t>(j - i + static_cast<long>(lower_))] += w;
            } else {
                wrapped.emplace_back(static_cast<std::size_t>((j % n + n) % n), w);
            }
        }
        if (!wrapped.empty()) {
            corner_rows_.push_back(static_cast<std::size_t>(i));
            corner_entries_.push_back(std::move(wrapped));
        }
    }

    // Banded LU without pivoting.
    for (std::size_t k = 0; k < n_; ++k) {
        const double pivot = lu_[k * width + lower_];
        if (!(std::abs(pivot) > 1e-14 * scale)) {
            throw SolverError("banded LU hit a vanishing pivot at row " + std::to_string(k));
        }
        const std::size_t i_end = std::min(n_ - 1, k + lower_);
        const std::size_t j_end = std::min(n_ - 1, k + upper_);
        for (std::size_t i = k + 1; i <= i_end; ++i) {
            double& lik = lu_[i * width + (k + lower_ - i)];
            lik /= pivot;
            for (std::size_t j = k + 1; j <= j_end; ++j) {
                lu_[i * width + (j + lower_ - i)] -= lik * lu_[k * width + (j + lower_ - k)];
            }
        }
    }

    const auto rank = static_cast<Eigen::Index>(corner_rows_.size());
    if (rank == 0) return;
    z_.resize(static_cast<Eigen::Index>(n_), rank);
    std::vector<double> col(n_);
    for (Eigen::Index c = 0; c < rank; ++c) {
        std::ranges::fill(col, 0.0);
        col[corner_rows_[static_cast<std::size_t>(c)]] = 1.0;
        band_solve(col);
        for (std::size_t i = 0; i < n_; ++i) z_(static_cast<Eigen::Index>(i), c) = col[i];
    }
    Eigen::MatrixXd cap = Eigen::MatrixXd::Identity(rank, rank);
    for (Eigen::Index r = 0; r < rank; ++r) {
        for (const auto& [j, w] : corner_entries_[static_cast<std::size_t>(r)]) {
            cap.row(r) += w * z_.row(static_cast<Eigen::Index>(j));
        }
    }
    capacitance_.compute(cap);
    if (!std::isfinite(capacitance_.rcond()) || capacitance_.rcond() < 1e-14) {
        throw SolverError("Woodbury capacitance matrix is singular (rcond = " +
                          std::to_string(capacitance_.rcond()) + ")");
    }
}

void CyclicBandedSolver::band_solve(std::span<double> x) const {
    const std::size_t width = lower_ + upper_ + 1;
    for (std::size_t i = 1; i < n_; ++i) {
        const std::size_t j0 = i > lower_ ? i - lower_ : 0;
        double acc = x[i];
        for (std::size_t j = j0; j < i; ++j) acc -= lu_[i * width + (j + lower_ - i)] * x[j];
        x[i] = acc;
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        const std::size_t j_end = std::min(n_ - 1, ii + upper_);
        double acc = x[ii];
        for (std::size_t j = ii + 1; j <= j_end; ++j) acc -= lu_[ii * width + (j + lower_ - ii)] * x[j];
        x[ii] = acc / lu_[ii * width + lower_];
    }
}

void CyclicBandedSolver::solve(std::span<const double> rhs, std::span<double> x) const {
    if (rhs.size() != n_ || x.size() != n_) {
        throw UsageError("right-hand side length does not match the system size");
    }
    if (dense_) {
        Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n_));
        Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n_)) = dense_lu_.solve(b);
        return;
    }
    if (rhs.data() != x.data()) std::ranges::copy(rhs, x.begin());
    band_solve(x);
    const auto rank = static_cast<Eigen::Index>(corner_rows_.size());
    if (rank == 0) return;
    Eigen::VectorXd t(rank);
    for (Eigen::Index r = 0; r < rank; ++r) {
        double acc = 0.0;
        for (const auto& [j, w] : corner_entries_[static_cast<std::size_t>(r)]) acc += w * x[j];
        t(r) = acc;
    }
    const Eigen::VectorXd s = capacitance_.solve(t);
    Eigen::Map<Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n_));
    xv.noalias() -= z_ * s;
}

std::vector<double> CyclicBandedSolver::solve(std::span<const double> rhs) const {
    std::vector<double> x(n_);
    solve(rhs, x);
    return x;
}

std::vector<double> circulant_fft_solve(const CirculantOperator& a, std::span<const double> rhs) {
    const std::size_t n = a.size();
    const FourierOperator fop(GridSpec{0.0, static_cast<double>(n), n});
    auto rhat = fop.forward(rhs);
    for (std::size_t k = 0; k < n; ++k) {
        const auto lambda = a.symbol(k);
        if (std::abs(lambda) < 1e-14) {
            throw SingularOperatorError("circulant symbol vanishes at mode " + std::to_string(k),
                                        static_cast<long>(k));
        }
        rhat[k] /= lambda;
    }
    return fop.inverse(rhat);
}

StageSystem::StageSystem(const OperatorSet& ops, const SplittingParams& sp, double dt_aii)
    : ops_(&ops), sp_(sp), dt_aii_(dt_aii) {
    if (!(sp.eps > 0.0)) throw ConfigError("eps must be positive");
    if (dt_aii < 0.0) throw ConfigError("dt * a_ii must be non-negative");
    if (dt_aii == 0.0) return;

    const std::size_t n = ops.n();
    const double a = dt_aii;
    const double eps2 = sp.eps * sp.eps;
    c1_ = 1.0 - sp.delta1 * sp.eps;
    c2_ = 1.0 - sp.delta2 * sp.eps;
    b_ = a * (1.0 - sp.delta3) * eps2;
    const double coupling = a * a * c1_ * c2_;
    const auto id = CirculantOperator::identity(n);
    const auto dpdm = ops.d_plus * ops.d_minus;

    if (b_ == 0.0) {
        // (eps^2 + a^2) u - a^2 c1 c2 D+ D- u = rhs
        u_solver_ = std::make_unique<CyclicBandedSolver>((eps2 + a * a) * id - coupling * dpdm);
        return;
    }
    helmholtz_b_ = id + b_ * ops.d_central;
    const auto c_op = eps2 * helmholtz_b_ + (a * a) * id;
    const auto k_op = c_op - coupling * (ops.d_plus * helmholtz_b_ * ops.d_minus);
    u_solver_ = std::make_unique<CyclicBandedSolver>(k_op);
    v_solver_ = std::make_unique<CyclicBandedSolver>(c_op);
    w_solver_ = std::make_unique<CyclicBandedSolver>(helmholtz_b_);
}

State StageSystem::solve(std::span<const double> r_u, std::span<const double> r_v,
                         std::span<const double> r_w) const {
    const std::size_t n = ops_->n();
    if (r_u.size() != n || r_v.size() != n || r_w.size() != n) {
        throw UsageError("stage residuals do not match the grid size");
    }
    if (dt_aii_ == 0.0) return State::bbmh(r_u, r_v, r_w);

    const double a = dt_aii_;
    const double eps2 = sp_.eps * sp_.eps;
    State q(n, 3);
    auto u = q.u();
    auto v = q.v();
    auto w = q.w();
    std::vector<double> tmp(n), tmp2(n);

    // Solve for the increment du = u - r_u: K du = -a c1 D+ (s - a c2 B D- r_u),
    // so the factorization only ever sees the (small) stage update.
    ops_->d_minus.apply(r_u, tmp);  // D- r_u
    std::vector<double> du(n), rhs(n);
    if (b_ == 0.0) {
        const double denom = eps2 + a * a;
        // z = eps^2 r_v + a (r_w - c2 D- r_u)
        std::vector<double> z(n);
        for (std::size_t j = 0; j < n; ++j) z[j] = eps2 * r_v[j] + a * (r_w[j] - c2_ * tmp[j]);
        ops_->d_plus.apply(z, rhs);
        for (std::size_t j = 0; j < n; ++j) rhs[j] *= -a * c1_;
        u_solver_->solve(rhs, du);
        ops_->d_minus.apply(du, tmp2);  // D- du
        for (std::size_t j = 0; j < n; ++j) {
            u[j] = r_u[j] + du[j];
            v[j] = (z[j] - a * c2_ * tmp2[j]) / denom;
            // Same as r_w - a v, without cancellation when eps << a.
            w[j] = (eps2 * (r_w[j] - a * r_v[j]) + a * a * c2_ * (tmp[j] + tmp2[j])) / denom;
        }
    } else {
        // z = eps^2 B r_v + a r_w - a c2 B D- r_u with B = I + b D1
        const auto b_rv = helmholtz_b_.apply(r_v);
        const auto b_dm_ru = helmholtz_b_.apply(tmp);
        std::vector<double> z(n);
        for (std::size_t j = 0; j < n; ++j) z[j] = eps2 * b_rv[j] + a * r_w[j] - a * c2_ * b_dm_ru[j];
        ops_->d_plus.apply(z, rhs);
        for (std::size_t j = 0; j < n; ++j) rhs[j] *= -a * c1_;
        u_solver_->solve(rhs, du);
        // C v = z - a c2 B D- du
        ops_->d_minus.apply(du, tmp2);
        const auto b_dm_du = helmholtz_b_.apply(tmp2);
        for (std::size_t j = 0; j < n; ++j) {
            u[j] = r_u[j] + du[j];
            rhs[j] = z[j] - a * c2_ * b_dm_du[j];
        }
        v_solver_->solve(rhs, v);
        // B w = r_w - a v
        for (std::size_t j = 0; j < n; ++j) rhs[j] = r_w[j] - a * v[j];
        w_solver_->solve(rhs, w);
    }
    return q;
}

State solve_stage(const StageSystem& sys, std::span<const double> r_u, std::span<const double> r_v,
                  std::span<const double> r_w) {
    return sys.solve(r_u, r_v, r_w);
}

std::shared_ptr<const StageSystem> StageSystemCache::get(const OperatorSet& ops,
                                                         const SplittingParams& sp, double dt_aii) {
    const Key key{&ops, dt_aii, sp.eps, sp.delta1, sp.delta2, sp.delta3};
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto sys = std::make_shared<const StageSystem>(ops, sp, dt_aii);
    cache_.emplace(key, sys);
    return sys;
}

std::size_t StageSystemCache::size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

BbmEllipticSolver::BbmEllipticSolver(const OperatorSet& ops)
    : matrix_(CirculantOperator::identity(ops.n()) - ops.d_plus * ops.d_minus), solver_(matrix_) {}

std::vector<double> solve_bbm_elliptic(const OperatorSet& ops, std::span<const double> rhs) {
    if (rhs.size() != ops.n()) throw UsageError("right-hand side length does not match the grid");
    return BbmEllipticSolver(ops).solve(rhs);
}

}  // namespace bbmh
