#pragma once

#include <vector>

#include "bbmh/split_problem.hpp"
#include "bbmh/state.hpp"
#include "bbmh/tableau.hpp"

namespace bbmh {

/// One step of a diagonally implicit additive Runge-Kutta method:
///   q(i)  = q^n + dt sum_j at_ij f(q(j)) + dt sum_j a_ij g(q(j))
///   q^n+1 = q^n + dt sum_j bt_j f(q(j)) + dt sum_j b_j g(q(j))
/// Holds the tableau and its classification; reusable across steps and
/// safe to share between threads.
class ImexStepper {
public:
    explicit ImexStepper(ImexTableau tab);

    const ImexTableau& tableau() const { return tab_; }
    const TableauClassification& classification() const { return cls_; }

    /// For GSA tableaux the assembled update is compared with the last stage
    /// and a SolverError is thrown if they differ by more than 1e-12
    /// relative. When `stages` is non-null it receives the s stage values.
    State step(const SplitProblem& problem, const State& q, double dt,
               std::vector<State>* stages = nullptr) const;

private:
    ImexTableau tab_;
    TableauClassification cls_;
};

State imex_step(const SplitProblem& problem, const State& q, double dt, const ImexTableau& tab);

}  // namespace bbmh
