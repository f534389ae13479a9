#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bbmh/linsolve.hpp"
#include "bbmh/sbp_ops.hpp"
#include "bbmh/split_problem.hpp"
#include "bbmh/splitting.hpp"
#include "bbmh/state.hpp"

namespace bbmh {

/// Discretization of the convective term u u_x.
///   split:     (u D1 u + D1 u^2) / 3, energy conserving
///   advective: u D1 u, only for tests demonstrating the loss of conservation
enum class NonlinearForm { split, advective };

struct InvariantValue {
    double linear_u = 0.0;  // 1^T M u
    double energy = 0.0;    // quadratic invariant
};

enum class SplittingViolation {
    delta_out_of_range,      // some delta_i outside [0, 1]
    delta1_eps_above_one,    // delta1 eps > 1
    delta2_eps_above_one,    // delta2 eps > 1
    zero_not_paired,         // exactly one of delta1, delta2 is zero
    unity_not_paired,        // exactly one of delta1 eps, delta2 eps is one
};

std::string describe(SplittingViolation v);

/// Empty iff the splitting is admissible.
std::vector<SplittingViolation> validate_splitting(const SplittingParams& sp);

/// -(1/3)(u D1 u + D1 u^2), or -u D1 u for the advective form.
std::vector<double> convective_term(std::span<const double> u, const OperatorSet& ops,
                                    NonlinearForm form = NonlinearForm::split);

/// Explicit part f of the hyperbolized semidiscretization.
State bbmh_rhs_explicit(const State& q, const SplittingParams& sp, const OperatorSet& ops,
                        NonlinearForm form = NonlinearForm::split);
/// Implicit (linear) part g of the hyperbolized semidiscretization.
State bbmh_rhs_implicit(const State& q, const SplittingParams& sp, const OperatorSet& ops);

/// d/dt eta = -(1/3) (I - D+ D-)^{-1} (eta D1 eta + D1 eta^2)
std::vector<double> bbm_rhs(std::span<const double> eta, const OperatorSet& ops,
                            const BbmEllipticSolver& solver,
                            NonlinearForm form = NonlinearForm::split);

/// Linear and quadratic invariants. Three-component states need sp (for
/// eps); single-component states use eta^T M (I - D+ D-) eta / 2.
InvariantValue invariants(const State& q, const OperatorSet& ops,
                          std::optional<SplittingParams> sp = std::nullopt);

/// a_u^T M b_u + eps^2 a_v^T M b_v + a_w^T M b_w
double bbmh_energy_dot(const State& a, const State& b, const OperatorSet& ops, double eps);
/// a^T M (I - D+ D-) b
double bbm_energy_dot(std::span<const double> a, std::span<const double> b, const OperatorSet& ops);

struct WaveSpeeds {
    double explicit_speed = 0.0;
    double implicit_speed = 0.0;
};

/// Largest characteristic speeds of the explicit and implicit subsystems
/// over all grid values of u.
WaveSpeeds max_wave_speeds(const State& q, const SplittingParams& sp);

enum class VInit { consistent, zero };
enum class WOperator { central, minus };

/// Well-prepared data: u = eta0, w = sign * D eta0 with D = D1 or D-, and
/// v = c D1^2 eta0 (consistent) or 0.
State well_prepared_init(std::span<const double> eta0, const OperatorSet& ops, VInit v_mode,
                         double wave_speed_c, WOperator w_op = WOperator::minus,
                         double w_sign = 1.0);

/// Hyperbolized BBM semidiscretization as an IMEX split problem. The
/// operator set must outlive the problem.
class BbmhProblem final : public SplitProblem {
public:
    BbmhProblem(const OperatorSet& ops, const SplittingParams& sp,
                NonlinearForm form = NonlinearForm::split);

    const OperatorSet& operators() const { return ops_; }
    const SplittingParams& splitting() const { return sp_; }
    const StageSystemCache& stage_cache() const { return cache_; }

    State zero_state() const override { return State(ops_.n(), 3); }
    void explicit_rhs(const State& q, State& out) const override;
    void implicit_rhs(const State& q, State& out) const override;
    State solve_implicit(double dt_aii, const State& r) const override;

private:
    const OperatorSet& ops_;
    SplittingParams sp_;
    NonlinearForm form_;
    mutable StageSystemCache cache_;
};

/// BBM semidiscretization; everything is explicit (g = 0).
class BbmProblem final : public SplitProblem {
public:
    explicit BbmProblem(const OperatorSet& ops, NonlinearForm form = NonlinearForm::split);

    const OperatorSet& operators() const { return ops_; }
    const BbmEllipticSolver& elliptic() const { return solver_; }

    State zero_state() const override { return State(ops_.n(), 1); }
    void explicit_rhs(const State& q, State& out) const override;
    void implicit_rhs(const State& q, State& out) const override;
    State solve_implicit(double dt_aii, const State& r) const override;

private:
    const OperatorSet& ops_;
    NonlinearForm form_;
    BbmEllipticSolver solver_;
};

}  // namespace bbmh
