#include "bbmh/imex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bbmh/errors.hpp"

namespace bbmh {

namespace {

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

ImexStepper::ImexStepper(ImexTableau tab) : tab_(std::move(tab)), cls_(classify(tab_)) {}

State ImexStepper::step(const SplitProblem& problem, const State& q, double dt,
                        std::vector<State>* stages) const {
    if (!(dt > 0.0)) throw UsageError("time step must be positive");
    const auto s = static_cast<Eigen::Index>(tab_.stages());
    std::vector<State> f(static_cast<std::size_t>(s)), g(static_cast<std::size_t>(s));
    std::vector<State> local;
    std::vector<State>& qs = stages != nullptr ? *stages : local;
    qs.assign(static_cast<std::size_t>(s), State());

    for (Eigen::Index i = 0; i < s; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        State r = q;
        for (Eigen::Index j = 0; j < i; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            if (const double a = tab_.a_expl(i, j); a != 0.0) axpy(dt * a, f[uj].data(), r.data());
            if (const double a = tab_.a_impl(i, j); a != 0.0) axpy(dt * a, g[uj].data(), r.data());
        }
        const double dt_aii = dt * tab_.a_impl(i, i);
        try {
            qs[ui] = dt_aii != 0.0 ? problem.solve_implicit(dt_aii, r) : r;
        } catch (const SolverError& e) {
            throw SolverError("stage " + std::to_string(i + 1) + ": " + e.what());
        }

        f[ui] = problem.zero_state();
        problem.explicit_rhs(qs[ui], f[ui]);
        if (dt_aii != 0.0) {
            // g(q(i)) = (q(i) - r) / (dt a_ii); avoids re-evaluating a stiff operator.
            g[ui] = qs[ui];
            auto gd = g[ui].data();
            const auto rd = r.data();
            const double inv = 1.0 / dt_aii;
            for (std::size_t k = 0; k < gd.size(); ++k) gd[k] = (gd[k] - rd[k]) * inv;
        } else {
            g[ui] = problem.zero_state();
            problem.implicit_rhs(qs[ui], g[ui]);
        }
    }

    State out = q;
    for (Eigen::Index j = 0; j < s; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (const double b = tab_.b_expl(j); b != 0.0) axpy(dt * b, f[uj].data(), out.data());
        if (const double b = tab_.b_impl(j); b != 0.0) axpy(dt * b, g[uj].data(), out.data());
    }
    if (!cls_.gsa) return out;

    const State& last = qs.back();
    double diff = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        diff = std::max(diff, std::abs(out.data()[k] - last.data()[k]));
    }
    const double scale = std::max({1.0, max_abs(last.data()), max_abs(q.data())});
    if (!(diff <= 1e-12 * scale)) {
        throw SolverError("GSA update of " + tab_.name + " differs from its last stage by " +
                          std::to_string(diff / scale) + " (relative)");
    }
    return last;
}

State imex_step(const SplitProblem& problem, const State& q, double dt, const ImexTableau& tab) {
    return ImexStepper(tab).step(problem, q, dt);
}

}  // namespace bbmh
