#pragma once

#include "bbmh/state.hpp"

namespace bbmh {

/// Semidiscrete system q' = f(q) + g(q) split into a non-stiff part f,
/// integrated explicitly, and a stiff linear part g, integrated implicitly.
class SplitProblem {
public:
    virtual ~SplitProblem() = default;

    /// Zero state of the right shape.
    virtual State zero_state() const = 0;
    virtual void explicit_rhs(const State& q, State& out) const = 0;
    virtual void implicit_rhs(const State& q, State& out) const = 0;
    /// Returns q with q - dt_aii * g(q) = r.
    virtual State solve_implicit(double dt_aii, const State& r) const = 0;
};

}  // namespace bbmh
