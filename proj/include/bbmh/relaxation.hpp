#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "bbmh/imex.hpp"
#include "bbmh/models.hpp"
#include "bbmh/sbp_ops.hpp"
#include "bbmh/splitting.hpp"
#include "bbmh/state.hpp"

namespace bbmh {

/// Quadratic invariant I(q) = dot(q, q) / 2 together with the linear
/// invariant 1^T M u.
struct QuadraticInvariant {
    std::function<double(const State&, const State&)> dot;
    std::function<double(const State&)> linear;

    double energy(const State& q) const { return 0.5 * dot(q, q); }
    InvariantValue evaluate(const State& q) const { return {linear(q), energy(q)}; }

    /// Weights (M, eps^2 M, M).
    static QuadraticInvariant bbmh(const OperatorSet& ops, double eps);
    /// Weight M (I - D+ D-).
    static QuadraticInvariant bbm(const OperatorSet& ops);
};

struct RelaxationStep {
    double gamma = 1.0;
    double accepted_dt = 0.0;
};

/// Replaces `candidate` by q_old + gamma (candidate - q_old) with gamma the
/// nonzero root of I(q_old + gamma dq) = I(q_old). Throws DivergenceError if
/// gamma leaves [0.1, 1.9].
RelaxationStep relax(const State& q_old, State& candidate, double dt, const QuadraticInvariant& inv);
RelaxationStep relax(const State& q_old, State& candidate, double dt, const OperatorSet& ops,
                     const SplittingParams& sp);

struct Snapshot {
    std::size_t step = 0;
    double time = 0.0;
    State state;
};

struct RunRecord {
    std::vector<double> times;          // physical (relaxed) time after each step, times[0] = 0
    std::vector<double> nominal_times;  // sum of nominal step sizes
    std::vector<InvariantValue> invariants;
    std::vector<double> gammas;         // one per step; 1 without relaxation
    std::vector<Snapshot> snapshots;
    State final_state;

    std::size_t steps() const { return gammas.size(); }
};

struct EvolveOptions {
    double t_end = 0.0;
    double dt = 0.0;
    bool relaxation = false;
    /// Keep every k-th state; 0 keeps only the initial and final states.
    std::size_t snapshot_stride = 0;
    /// Called with (step, time, state) after the initial state and every step.
    std::function<void(std::size_t, double, const State&)> observer;
};

/// Time loop with optional relaxation. Without relaxation the last step is
/// cut to land on t_end exactly; with relaxation the last nominal step is cut
/// and time advances by gamma dt, ending within dt of t_end.
RunRecord evolve(const SplitProblem& problem, const ImexStepper& stepper, const State& initial,
                 const QuadraticInvariant& inv, const EvolveOptions& opt);

}  // namespace bbmh
