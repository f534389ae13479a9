#include "bbmh/waves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bbmh/errors.hpp"

namespace bbmh {

double SolitonParams::k() const { return 0.5 * std::sqrt((c - 1.0) / c); }

std::vector<double> bbm_soliton(const SolitonParams& p, std::span<const double> x, double t) {
    if (!(p.c > 1.0)) throw ConfigError("soliton speed must exceed 1");
    const double k = p.k();
    const double amp = 3.0 * (p.c - 1.0);
    const double len = p.domain.length();
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        // Periodic image of x - c t closest to the crest at 0.
        double xi = x[j] - p.c * t;
        xi -= len * std::nearbyint(xi / len);
        const double s = 1.0 / std::cosh(k * xi);
        out[j] = 1.0 + amp * s * s;
    }
    return out;
}

double petviashvili_symbol(double k, double c, double eps) {
    const double e2 = eps * eps;
    const double beta = (c - e2) * c * e2;
    const double k2 = k * k;
    return (c - 1.0) + (c - e2) * k2 / (1.0 - beta * k2);
}

namespace {

std::vector<double> apply_l(const FourierOperator& fop, std::span<const double> u, double c, double eps) {
    return fop.apply_symbol(u, [&](double k) { return petviashvili_symbol(k, c, eps); });
}

double grid_dot(std::span<const double> a, std::span<const double> b, double h) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return h * s;
}

}  // namespace

double petviashvili_residual(const FourierOperator& fop, std::span<const double> u_tilde, double c,
                             double eps) {
    const auto lu = apply_l(fop, u_tilde, c, eps);
    double s = 0.0;
    for (std::size_t i = 0; i < lu.size(); ++i) {
        const double r = lu[i] - 0.5 * u_tilde[i] * u_tilde[i];
        s += r * r;
    }
    return std::sqrt(fop.grid().h() * s);
}

std::vector<double> petviashvili_initial_guess(double c, const GridSpec& grid) {
    auto u = bbm_soliton({c, grid}, grid.nodes(), 0.0);
    for (double& x : u) x -= 1.0;
    return u;
}

PetviashviliResult petviashvili_solve(double c, double eps, const FourierOperator& fop,
                                      std::span<const double> initial_guess,
                                      const PetviashviliOptions& opt) {
    const std::size_t n = fop.n();
    if (initial_guess.size() != n) throw UsageError("initial guess length differs from the grid size");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    const double e2 = eps * eps;
    const double beta = (c - e2) * c * e2;
    const auto ks = fop.wavenumbers();
    for (std::size_t j = 0; j < n; ++j) {
        const double k2 = ks[j] * ks[j];
        const double denom = (c - 1.0) * (1.0 - beta * k2) + (c - e2) * k2;
        if (std::abs(denom) < 1e-14 || std::abs(1.0 - beta * k2) < 1e-14) {
            throw SingularOperatorError("Petviashvili operator is singular", fop.mode(j));
        }
    }
    const double h = fop.grid().h();

    PetviashviliResult res;
    std::vector<double> u(initial_guess.begin(), initial_guess.end());
    std::vector<double> nu(n);
    bool converged = false;
    for (int it = 1; it <= opt.max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) nu[i] = 0.5 * u[i] * u[i];
        const auto lu = apply_l(fop, u, c, eps);
        const double num = grid_dot(lu, u, h);
        const double den = grid_dot(nu, u, h);
        double rsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) rsq += (lu[i] - nu[i]) * (lu[i] - nu[i]);
        res.residual_history.push_back(std::sqrt(h * rsq));
        if (!(den != 0.0) || !(num / den > 0.0)) {
            throw DivergenceError("Petviashvili stabilizing factor is not positive at iteration " +
                                  std::to_string(it));
        }
        const double m = num / den;
        res.stabilizer_history.push_back(m);
        const double scale = std::pow(m, opt.gamma_exp);
        // L^{-1} per mode: (1 - beta k^2) / ((c-1)(1 - beta k^2) + (c - eps^2) k^2)
        auto next = fop.apply_symbol(nu, [&](double k) {
            const double k2 = k * k;
            const double a = 1.0 - beta * k2;
            return scale * a / ((c - 1.0) * a + (c - e2) * k2);
        });
        double inc = 0.0;
        for (std::size_t i = 0; i < n; ++i) inc = std::max(inc, std::abs(next[i] - u[i]));
        res.increment_history.push_back(inc);
        u = std::move(next);
        res.iterations = it;
        if (!std::isfinite(inc)) throw DivergenceError("Petviashvili iteration produced non-finite values");
        if (inc <= opt.tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "Petviashvili iteration did not reach tol " << opt.tol << " in " << opt.max_iter
            << " iterations; residual history:";
        const std::size_t first = res.residual_history.size() > 10 ? res.residual_history.size() - 10 : 0;
        for (std::size_t i = first; i < res.residual_history.size(); ++i) msg << ' ' << res.residual_history[i];
        throw SolverError(msg.str());
    }
    res.residual = petviashvili_residual(fop, u, c, eps);

    auto& prof = res.profile;
    prof.c = c;
    prof.eps = eps;
    prof.xi = fop.grid().nodes();
    prof.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) prof.v[i] = (c - 1.0 - 0.5 * u[i]) * u[i];
    const auto du = fop.derivative(u);
    const auto dv = fop.derivative(prof.v);
    prof.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) prof.w[i] = du[i] - c * e2 * dv[i];
    prof.u.resize(n);
    for (std::size_t i = 0; i < n; ++i) prof.u[i] = u[i] + opt.background_shift;
    res.u_tilde = std::move(u);
    return res;
}

std::pair<double, double> traveling_ode_rhs(double u_t, double w_t, double c, double eps) {
    const double e2 = eps * eps;
    const double d1 = 1.0 + c * e2 * (u_t - c);
    const double d2 = e2 - c;
    if (std::abs(d1) < 1e-14) throw SolverError("traveling-wave system is singular at u = " + std::to_string(u_t));
    if (std::abs(d2) < 1e-14) throw SolverError("traveling-wave system is singular for c = eps^2");
    return {w_t / d1, u_t * (0.5 * u_t - c) / d2};
}

double singular_line_u(double c, double eps) { return c - 1.0 / (c * eps * eps); }

PhaseOrbit integrate_phase_plane(std::pair<double, double> start, double c, double eps, double step,
                                 std::size_t n_steps) {
    if (step == 0.0) throw UsageError("phase-plane step must be nonzero");
    const double e2 = eps * eps;
    auto denom = [&](double u) { return 1.0 + c * e2 * (u - c); };
    PhaseOrbit orb;
    double u = start.first;
    double w = start.second;
    double xi = 0.0;
    const double side = denom(u);
    if (std::abs(side) < 1e-14) throw UsageError("phase-plane start lies on the singular line");
    orb.xi.push_back(xi);
    orb.u.push_back(u);
    orb.w.push_back(w);

    auto on_side = [&](double uu) { return denom(uu) * side > 0.0 && std::abs(denom(uu)) >= 1e-14; };
    for (std::size_t s = 0; s < n_steps; ++s) {
        const auto k1 = traveling_ode_rhs(u, w, c, eps);
        const double u2 = u + 0.5 * step * k1.first;
        if (!on_side(u2)) { orb.singular = true; break; }
        const auto k2 = traveling_ode_rhs(u2, w + 0.5 * step * k1.second, c, eps);
        const double u3 = u + 0.5 * step * k2.first;
        if (!on_side(u3)) { orb.singular = true; break; }
        const auto k3 = traveling_ode_rhs(u3, w + 0.5 * step * k2.second, c, eps);
        const double u4 = u + step * k3.first;
        if (!on_side(u4)) { orb.singular = true; break; }
        const auto k4 = traveling_ode_rhs(u4, w + step * k3.second, c, eps);
        const double un = u + step / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
        const double wn = w + step / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
        if (!on_side(un)) { orb.singular = true; break; }
        u = un;
        w = wn;
        xi += step;
        orb.xi.push_back(xi);
        orb.u.push_back(u);
        orb.w.push_back(w);
    }
    return orb;
}

PhaseOrbit reflect_orbit(const PhaseOrbit& orbit) {
    PhaseOrbit out;
    out.singular = orbit.singular;
    const std::size_t n = orbit.xi.size();
    out.xi.resize(n);
    out.u.resize(n);
    out.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        out.xi[i] = -orbit.xi[j];
        out.u[i] = orbit.u[j];
        out.w[i] = -orbit.w[j];
    }
    return out;
}

void write_profile_csv(const TravelingWaveProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "xi,u,v,w\n";
    char buf[128];
    for (std::size_t i = 0; i < profile.xi.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", profile.xi[i], profile.u[i],
                      profile.v[i], profile.w[i]);
        out << buf;
    }
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace bbmh
