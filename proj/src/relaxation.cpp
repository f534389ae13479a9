#include "bbmh/relaxation.hpp"

#include <cmath>
#include <string>

#include "bbmh/errors.hpp"

namespace bbmh {

QuadraticInvariant QuadraticInvariant::bbmh(const OperatorSet& ops, double eps) {
    QuadraticInvariant inv;
    inv.dot = [&ops, eps](const State& a, const State& b) { return bbmh_energy_dot(a, b, ops, eps); };
    inv.linear = [&ops](const State& q) { return ops.mass_sum(q.u()); };
    return inv;
}

QuadraticInvariant QuadraticInvariant::bbm(const OperatorSet& ops) {
    QuadraticInvariant inv;
    inv.dot = [&ops](const State& a, const State& b) {
        return bbm_energy_dot(a.component(0), b.component(0), ops);
    };
    inv.linear = [&ops](const State& q) { return ops.mass_sum(q.component(0)); };
    return inv;
}

RelaxationStep relax(const State& q_old, State& candidate, double dt, const QuadraticInvariant& inv) {
    if (!q_old.same_shape(candidate)) throw UsageError("relax: state shapes differ");
    State dq = candidate;
    auto d = dq.data();
    const auto o = q_old.data();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= o[k];

    const double dd = inv.dot(dq, dq);
    if (dd < 1e-300) return {1.0, dt};
    const double gamma = -2.0 * inv.dot(q_old, dq) / dd;
    if (!(gamma >= 0.1 && gamma <= 1.9)) {
        throw DivergenceError("relaxation factor " + std::to_string(gamma) + " outside [0.1, 1.9]");
    }
    auto c = candidate.data();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = o[k] + gamma * d[k];
    return {gamma, gamma * dt};
}

RelaxationStep relax(const State& q_old, State& candidate, double dt, const OperatorSet& ops,
                     const SplittingParams& sp) {
    return relax(q_old, candidate, dt, QuadraticInvariant::bbmh(ops, sp.eps));
}

RunRecord evolve(const SplitProblem& problem, const ImexStepper& stepper, const State& initial,
                 const QuadraticInvariant& inv, const EvolveOptions& opt) {
    if (!(opt.dt > 0.0)) throw UsageError("evolve: dt must be positive");
    if (opt.t_end < 0.0) throw UsageError("evolve: t_end must be non-negative");

    RunRecord rec;
    rec.times.push_back(0.0);
    rec.nominal_times.push_back(0.0);
    rec.invariants.push_back(inv.evaluate(initial));
    rec.snapshots.push_back({0, 0.0, initial});
    if (opt.observer) opt.observer(0, 0.0, initial);

    State q = initial;
    double t = 0.0;
    double nominal = 0.0;
    const double t_tol = 1e-12 * std::max(1.0, opt.t_end);
    std::size_t step = 0;
    while (opt.t_end - t > t_tol) {
        bool last = false;
        double dt = opt.dt;
        if (t + dt >= opt.t_end - t_tol) {
            dt = opt.t_end - t;
            last = true;
        }
        State next = stepper.step(problem, q, dt);
        ++step;
        if (!next.all_finite()) {
            throw DivergenceError("non-finite state at step " + std::to_string(step));
        }
        double gamma = 1.0;
        if (opt.relaxation) {
            try {
                gamma = relax(q, next, dt, inv).gamma;
            } catch (const DivergenceError& e) {
                throw DivergenceError("step " + std::to_string(step) + ": " + e.what());
            }
        }
        q = std::move(next);
        nominal += dt;
        t = last && !opt.relaxation ? opt.t_end : t + gamma * dt;

        rec.times.push_back(t);
        rec.nominal_times.push_back(nominal);
        rec.gammas.push_back(gamma);
        rec.invariants.push_back(inv.evaluate(q));
        if (opt.snapshot_stride != 0 && step % opt.snapshot_stride == 0) rec.snapshots.push_back({step, t, q});
        if (opt.observer) opt.observer(step, t, q);
        if (last) break;
    }
    if (rec.snapshots.back().step != step) rec.snapshots.push_back({step, t, q});
    rec.final_state = std::move(q);
    return rec;
}

}  // namespace bbmh
