#include "bbmh/models.hpp"

#include <algorithm>
#include <cmath>

#include "bbmh/errors.hpp"

namespace bbmh {

namespace {

constexpr double kParamTol = 1e-14;

bool is_zero(double x) { return std::abs(x) <= kParamTol; }
bool is_one(double x) { return std::abs(x - 1.0) <= kParamTol; }

void require_grid(std::span<const double> x, const OperatorSet& ops) {
    if (x.size() != ops.n()) throw UsageError("vector length does not match the operator grid");
}

void require_bbmh(const State& q, const OperatorSet& ops) {
    if (q.components() != 3 || q.n() != ops.n()) {
        throw UsageError("expected a three-component state on the operator grid");
    }
}

}  // namespace

std::string describe(SplittingViolation v) {
    switch (v) {
        case SplittingViolation::delta_out_of_range:
            return "every delta_i must lie in [0, 1]";
        case SplittingViolation::delta1_eps_above_one:
            return "delta1 * eps must not exceed 1";
        case SplittingViolation::delta2_eps_above_one:
            return "delta2 * eps must not exceed 1";
        case SplittingViolation::zero_not_paired:
            return "if delta1 = 0 or delta2 = 0, then both of them are zero";
        case SplittingViolation::unity_not_paired:
            return "if delta1 eps = 1 or delta2 eps = 1, then both of them are unity";
    }
    return "unknown violation";
}

std::vector<SplittingViolation> validate_splitting(const SplittingParams& sp) {
    std::vector<SplittingViolation> out;
    const auto in_unit = [](double d) { return d >= -kParamTol && d <= 1.0 + kParamTol; };
    if (!in_unit(sp.delta1) || !in_unit(sp.delta2) || !in_unit(sp.delta3)) {
        out.push_back(SplittingViolation::delta_out_of_range);
    }
    const double p1 = sp.delta1 * sp.eps;
    const double p2 = sp.delta2 * sp.eps;
    if (p1 > 1.0 + kParamTol) out.push_back(SplittingViolation::delta1_eps_above_one);
    if (p2 > 1.0 + kParamTol) out.push_back(SplittingViolation::delta2_eps_above_one);
    if (is_zero(sp.delta1) != is_zero(sp.delta2)) out.push_back(SplittingViolation::zero_not_paired);
    if (is_one(p1) != is_one(p2)) out.push_back(SplittingViolation::unity_not_paired);
    return out;
}

std::vector<double> convective_term(std::span<const double> u, const OperatorSet& ops,
                                    NonlinearForm form) {
    require_grid(u, ops);
    const std::size_t n = u.size();
    std::vector<double> du = ops.d_central.apply(u);
    std::vector<double> out(n);
    if (form == NonlinearForm::advective) {
        for (std::size_t j = 0; j < n; ++j) out[j] = -u[j] * du[j];
        return out;
    }
    std::vector<double> u2(n);
    for (std::size_t j = 0; j < n; ++j) u2[j] = u[j] * u[j];
    const auto du2 = ops.d_central.apply(u2);
    for (std::size_t j = 0; j < n; ++j) out[j] = -(u[j] * du[j] + du2[j]) / 3.0;
    return out;
}

State bbmh_rhs_explicit(const State& q, const SplittingParams& sp, const OperatorSet& ops,
                        NonlinearForm form) {
    require_bbmh(q, ops);
    const std::size_t n = q.n();
    const double eps = sp.eps;
    State f(n, 3);
    const auto conv = convective_term(q.u(), ops, form);
    auto fu = f.u();
    auto fv = f.v();
    auto fw = f.w();
    std::ranges::copy(conv, fu.begin());
    if (sp.delta1 != 0.0) {
        const auto dpv = ops.d_plus.apply(q.v());
        for (std::size_t j = 0; j < n; ++j) fu[j] -= sp.delta1 * eps * dpv[j];
    }
    if (sp.delta2 != 0.0) {
        const auto dmu = ops.d_minus.apply(q.u());
        for (std::size_t j = 0; j < n; ++j) fv[j] = -(sp.delta2 / eps) * dmu[j];
    }
    if (sp.delta3 != 0.0) {
        const auto d1w = ops.d_central.apply(q.w());
        for (std::size_t j = 0; j < n; ++j) fw[j] = -sp.delta3 * eps * eps * d1w[j];
    }
    return f;
}

State bbmh_rhs_implicit(const State& q, const SplittingParams& sp, const OperatorSet& ops) {
    require_bbmh(q, ops);
    const std::size_t n = q.n();
    const double eps = sp.eps;
    const double eps2 = eps * eps;
    State g(n, 3);
    const auto dpv = ops.d_plus.apply(q.v());
    const auto dmu = ops.d_minus.apply(q.u());
    auto gu = g.u();
    auto gv = g.v();
    auto gw = g.w();
    const auto v = q.v();
    const auto w = q.w();
    const double c1 = 1.0 - sp.delta1 * eps;
    const double c2 = (1.0 - sp.delta2 * eps) / eps2;
    for (std::size_t j = 0; j < n; ++j) {
        gu[j] = -c1 * dpv[j];
        gv[j] = -c2 * dmu[j] + w[j] / eps2;
        gw[j] = -v[j];
    }
    if (sp.delta3 != 1.0) {
        const auto d1w = ops.d_central.apply(w);
        for (std::size_t j = 0; j < n; ++j) gw[j] -= (1.0 - sp.delta3) * eps2 * d1w[j];
    }
    return g;
}

std::vector<double> bbm_rhs(std::span<const double> eta, const OperatorSet& ops,
                            const BbmEllipticSolver& solver, NonlinearForm form) {
    return solver.solve(convective_term(eta, ops, form));
}

double bbmh_energy_dot(const State& a, const State& b, const OperatorSet& ops, double eps) {
    return ops.mass_dot(a.u(), b.u()) + eps * eps * ops.mass_dot(a.v(), b.v()) +
           ops.mass_dot(a.w(), b.w());
}

double bbm_energy_dot(std::span<const double> a, std::span<const double> b, const OperatorSet& ops) {
    const auto da = ops.d_minus.apply(a);
    const auto db = ops.d_minus.apply(b);
    return ops.mass_dot(a, b) + ops.mass_dot(da, db);
}

InvariantValue invariants(const State& q, const OperatorSet& ops, std::optional<SplittingParams> sp) {
    if (q.n() != ops.n()) throw UsageError("state does not match the operator grid");
    InvariantValue out;
    out.linear_u = ops.mass_sum(q.u());
    if (q.components() == 1) {
        out.energy = 0.5 * bbm_energy_dot(q.u(), q.u(), ops);
    } else if (q.components() == 3) {
        if (!sp) throw UsageError("invariants of a three-component state need eps");
        out.energy = 0.5 * bbmh_energy_dot(q, q, ops, sp->eps);
    } else {
        throw UsageError("state must have one or three components");
    }
    return out;
}

WaveSpeeds max_wave_speeds(const State& q, const SplittingParams& sp) {
    const double eps = sp.eps;
    const double eps2 = eps * eps;
    const double d12 = sp.delta1 * sp.delta2;
    double umax = 0.0;
    for (double u : q.u()) umax = std::max(umax, std::abs(u));
    WaveSpeeds s;
    // |u/2| + sqrt(u^2/4 + d1 d2) is the larger modulus of the pair, and it
    // grows with |u|.
    s.explicit_speed = std::max(sp.delta3 * eps2, 0.5 * umax + std::sqrt(0.25 * umax * umax + d12));
    const double prod = (1.0 - sp.delta1 * eps) * (1.0 - sp.delta2 * eps);
    s.implicit_speed = std::max((1.0 - sp.delta3) * eps2, std::sqrt(std::max(prod, 0.0)) / eps);
    return s;
}

State well_prepared_init(std::span<const double> eta0, const OperatorSet& ops, VInit v_mode,
                         double wave_speed_c, WOperator w_op, double w_sign) {
    require_grid(eta0, ops);
    const std::size_t n = eta0.size();
    State q(n, 3);
    std::ranges::copy(eta0, q.u().begin());
    const auto& dw = (w_op == WOperator::central) ? ops.d_central : ops.d_minus;
    const auto deta = dw.apply(eta0);
    auto w = q.w();
    for (std::size_t j = 0; j < n; ++j) w[j] = w_sign * deta[j];
    if (v_mode == VInit::consistent) {
        const auto d2 = ops.d_central.apply(ops.d_central.apply(eta0));
        auto v = q.v();
        for (std::size_t j = 0; j < n; ++j) v[j] = wave_speed_c * d2[j];
    }
    return q;
}

BbmhProblem::BbmhProblem(const OperatorSet& ops, const SplittingParams& sp, NonlinearForm form)
    : ops_(ops), sp_(sp), form_(form) {
    if (!(sp.eps > 0.0)) throw ConfigError("eps must be positive");
    const auto violations = validate_splitting(sp);
    if (!violations.empty()) {
        throw ConfigError("inadmissible splitting: " + describe(violations.front()));
    }
}

void BbmhProblem::explicit_rhs(const State& q, State& out) const {
    out = bbmh_rhs_explicit(q, sp_, ops_, form_);
}

void BbmhProblem::implicit_rhs(const State& q, State& out) const {
    out = bbmh_rhs_implicit(q, sp_, ops_);
}

State BbmhProblem::solve_implicit(double dt_aii, const State& r) const {
    if (dt_aii == 0.0) return r;
    const auto sys = cache_.get(ops_, sp_, dt_aii);
    return sys->solve(r.u(), r.v(), r.w());
}

BbmProblem::BbmProblem(const OperatorSet& ops, NonlinearForm form)
    : ops_(ops), form_(form), solver_(ops) {}

void BbmProblem::explicit_rhs(const State& q, State& out) const {
    out = State::bbm(bbm_rhs(q.u(), ops_, solver_, form_));
}

void BbmProblem::implicit_rhs(const State& q, State& out) const { out = State(q.n(), 1); }

State BbmProblem::solve_implicit(double, const State& r) const { return r; }

}  // namespace bbmh
