#pragma once

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "bbmh/fourier.hpp"
#include "bbmh/grid.hpp"

namespace bbmh {

/// BBM solitary wave 1 + 3(c-1) sech^2(K (x - c t)), K = sqrt((c-1)/c)/2.
struct SolitonParams {
    double c = 1.2;
    GridSpec domain;

    double k() const;
};

/// Evaluates the soliton at the points x, wrapping x - c t periodically into
/// a period centered on the crest at x = c t. Throws ConfigError for c <= 1.
std::vector<double> bbm_soliton(const SolitonParams& p, std::span<const double> x, double t);

struct TravelingWaveProfile {
    std::vector<double> xi;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> w;
    double c = 0.0;
    double eps = 0.0;
};

struct PetviashviliOptions {
    double gamma_exp = 2.0;
    double tol = 1e-12;
    int max_iter = 1000;
    /// u = u_tilde + background_shift. The soliton has background 1, so the
    /// default is +1; pass -1 for the alternative mapping.
    double background_shift = 1.0;
};

struct PetviashviliResult {
    TravelingWaveProfile profile;
    std::vector<double> u_tilde;
    int iterations = 0;
    std::vector<double> increment_history;  // max |u^{n+1} - u^n|
    std::vector<double> residual_history;   // M-norm of L u - N(u) at each iterate
    std::vector<double> stabilizer_history; // m(u^n)
    double residual = 0.0;                  // fixed-point residual of the returned iterate
};

/// Fourier symbol of L for the shifted traveling-wave equation.
double petviashvili_symbol(double k, double c, double eps);

/// Fixed-point residual sqrt(h sum (L u - u^2/2)^2).
double petviashvili_residual(const FourierOperator& fop, std::span<const double> u_tilde, double c,
                             double eps);

/// Throws DivergenceError if m <= 0 and SolverError (carrying the residual
/// history in its message) if tol is not reached within max_iter.
PetviashviliResult petviashvili_solve(double c, double eps, const FourierOperator& fop,
                                      std::span<const double> initial_guess,
                                      const PetviashviliOptions& opt = {});

/// Default initial guess: the BBM soliton minus its background.
std::vector<double> petviashvili_initial_guess(double c, const GridSpec& grid);

/// Right-hand side of the reduced traveling-wave system
///   u' = w / (1 + c eps^2 (u - c)),  w' = u (u/2 - c) / (eps^2 - c).
/// Throws SolverError if a denominator is below 1e-14 in magnitude.
std::pair<double, double> traveling_ode_rhs(double u_t, double w_t, double c, double eps);

struct PhaseOrbit {
    std::vector<double> xi;
    std::vector<double> u;
    std::vector<double> w;
    bool singular = false;  // stopped at the line 1 + c eps^2 (u - c) = 0
};

/// Classical fourth-order Runge-Kutta with fixed step (negative steps
/// integrate backwards). Stops before any step that would reach or cross
/// the singular line and sets the flag.
PhaseOrbit integrate_phase_plane(std::pair<double, double> start, double c, double eps, double step,
                                 std::size_t n_steps);

/// Mirror image under (xi, w) -> (-xi, -w), reversed so xi increases.
PhaseOrbit reflect_orbit(const PhaseOrbit& orbit);

/// u value of the singular line.
double singular_line_u(double c, double eps);

/// Writes columns xi,u,v,w with 17 significant digits.
void write_profile_csv(const TravelingWaveProfile& profile, const std::filesystem::path& path);

}  // namespace bbmh
