#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "bbmh/errors.hpp"
#include "bbmh/waves.hpp"
#include "helpers.hpp"

using namespace bbmh;

TEST_CASE("BBM soliton values") {
    const auto grid = GridSpec::make(-90.0, 90.0, 512);
    const SolitonParams p{1.2, grid};
    CHECK(p.k() == doctest::Approx(0.5 * std::sqrt(0.2 / 1.2)));

    CHECK(bbm_soliton(p, std::vector<double>{0.0}, 0.0)[0] == doctest::Approx(1.6));
    CHECK(bbm_soliton(p, std::vector<double>{3.6}, 3.0)[0] == doctest::Approx(1.6));
    CHECK(bbm_soliton(p, std::vector<double>{89.0}, 0.0)[0] == doctest::Approx(1.0).epsilon(1e-12));

    // Independent evaluation of 1 + 3(c-1) / cosh^2(K (x - c t)).
    const auto x = grid.nodes();
    const double t = 7.5;
    const auto u = bbm_soliton(p, x, t);
    double worst = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        double xi = x[j] - 1.2 * t;
        if (xi < -90.0) xi += 180.0;
        const double ch = std::cosh(p.k() * xi);
        worst = std::max(worst, std::abs(u[j] - (1.0 + 0.6 / (ch * ch))));
    }
    CHECK(worst <= 1e-15);

    // Periodic wrap: after one period the profile is back.
    const auto u_period = bbm_soliton(p, x, 180.0 / 1.2);
    CHECK(bbmh::testing::max_abs_diff(u_period, bbm_soliton(p, x, 0.0)) <= 1e-12);

    CHECK_THROWS_AS(bbm_soliton({1.0, grid}, x, 0.0), ConfigError);
    CHECK_THROWS_AS(bbm_soliton({0.5, grid}, x, 0.0), ConfigError);
}

TEST_CASE("soliton amplitude is exactly 3(c - 1)") {
    const auto grid = GridSpec::make(-90.0, 90.0, 512);
    for (double c : {1.0001, 1.01, 1.2, 2.0}) {
        const auto u = bbm_soliton({c, grid}, grid.nodes(), 0.0);
        double amp = 0.0;
        for (double v : u) amp = std::max(amp, std::abs(v - 1.0));
        CHECK(amp == doctest::Approx(3.0 * (c - 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("Petviashvili iteration") {
    const auto grid = GridSpec::make(-90.0, 90.0, 1024);
    FourierOperator fop(grid);
    const double c = 1.2;
    const auto guess = petviashvili_initial_guess(c, grid);

    SUBCASE("small eps reproduces the BBM soliton") {
        const auto res = petviashvili_solve(c, 1e-3, fop, guess);
        CHECK(res.residual <= 1e-11);
        CHECK(res.increment_history.back() <= 1e-12);
        CHECK(res.stabilizer_history.back() == doctest::Approx(1.0).epsilon(1e-10));
        const auto sol = bbm_soliton({c, grid}, grid.nodes(), 0.0);
        const double dev = bbmh::testing::max_abs_diff(res.profile.u, sol);
        CHECK(dev < 1e-6);
        CHECK(dev > 0.0);
        // Residual decreases monotonically once the iteration has settled,
        // until it reaches roundoff.
        for (std::size_t k = 3; k + 1 < res.residual_history.size(); ++k) {
            if (res.residual_history[k + 1] < 1e-11) break;
            CHECK(res.residual_history[k + 1] <= res.residual_history[k]);
        }

        // A converged iterate is a fixed point.
        const auto again = petviashvili_solve(c, 1e-3, fop, res.u_tilde);
        CHECK(again.iterations == 1);
        CHECK(again.stabilizer_history[0] == doctest::Approx(1.0).epsilon(1e-12));

        // Traveling-wave relation for v.
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double ut = res.u_tilde[j];
            CHECK(res.profile.v[j] == doctest::Approx((c - 1.0 - 0.5 * ut) * ut));
        }
    }
    SUBCASE("deviation from the soliton grows with eps") {
        const auto sol = bbm_soliton({c, grid}, grid.nodes(), 0.0);
        double prev = 0.0;
        for (double eps : {1e-3, 1e-2, 1e-1}) {
            const auto res = petviashvili_solve(c, eps, fop, guess);
            const double dev = bbmh::testing::max_abs_diff(res.profile.u, sol);
            CHECK(dev > prev);
            prev = dev;
        }
    }
    SUBCASE("shift flag") {
        PetviashviliOptions opt;
        opt.background_shift = -1.0;
        const auto res = petviashvili_solve(c, 1e-3, fop, guess, opt);
        for (std::size_t j = 0; j < grid.n; ++j) CHECK(res.profile.u[j] == res.u_tilde[j] - 1.0);
    }
    SUBCASE("failures") {
        PetviashviliOptions opt;
        opt.max_iter = 3;
        try {
            petviashvili_solve(c, 1e-3, fop, guess, opt);
            FAIL("expected non-convergence");
        } catch (const SolverError& e) {
            CHECK(std::string(e.what()).find("residual history") != std::string::npos);
        }
        std::vector<double> neg(guess);
        for (double& x : neg) x = -x;
        CHECK_THROWS_AS(petviashvili_solve(c, 1e-3, fop, neg), DivergenceError);
        CHECK_THROWS_AS(petviashvili_solve(c, 1e-3, fop, std::vector<double>(8, 0.0)), UsageError);
    }
}

TEST_CASE("fixed-point residual vanishes only at solutions") {
    const auto grid = GridSpec::make(-90.0, 90.0, 256);
    FourierOperator fop(grid);
    CHECK(petviashvili_residual(fop, std::vector<double>(256, 0.0), 1.2, 0.1) == 0.0);
    const auto guess = petviashvili_initial_guess(1.2, grid);
    CHECK(petviashvili_residual(fop, guess, 1.2, 0.5) > 1e-3);
}

TEST_CASE("traveling-wave ODE right-hand side") {
    const auto z = traveling_ode_rhs(0.0, 0.0, 1.2, 0.1);
    CHECK(z.first == 0.0);
    CHECK(z.second == 0.0);
    const auto e = traveling_ode_rhs(2.4, 0.0, 1.2, 0.1);
    CHECK(e.first == 0.0);
    CHECK(e.second == 0.0);
    const auto g = traveling_ode_rhs(0.5, 2.0, 1.2, 0.1);
    CHECK(g.first == doctest::Approx(2.0 / (1.0 + 1.2 * 0.01 * (0.5 - 1.2))));
    CHECK(g.second == doctest::Approx(0.5 * (0.25 - 1.2) / (0.01 - 1.2)));

    const double eps_peak = std::sqrt(4.0 / 3.0);
    CHECK(singular_line_u(0.5, eps_peak) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(traveling_ode_rhs(-1.0, 0.3, 0.5, eps_peak), SolverError);
    CHECK_THROWS_AS(traveling_ode_rhs(0.2, 0.3, 1.0, 1.0), SolverError);
}

TEST_CASE("phase-plane integration") {
    SUBCASE("equilibria are constant orbits") {
        for (double u0 : {0.0, 2.4}) {
            const auto orb = integrate_phase_plane({u0, 0.0}, 1.2, 0.1, 0.05, 100);
            CHECK(orb.u.size() == 101);
            CHECK_FALSE(orb.singular);
            for (std::size_t i = 0; i < orb.u.size(); ++i) {
                CHECK(orb.u[i] == u0);
                CHECK(orb.w[i] == 0.0);
            }
        }
    }
    SUBCASE("homoclinic orbit for c > eps^2 returns to the origin") {
        const double c = 1.2, eps = 0.1, e2 = eps * eps;
        // Unstable direction of the saddle at the origin.
        const double d1 = 1.0 - c * c * e2;
        const double lambda = std::sqrt(c / ((c - e2) * d1));
        const double delta = 1e-9;
        const double u0 = delta, w0 = delta * lambda * d1;
        const auto orb = integrate_phase_plane({u0, w0}, c, eps, 0.005, 12000);
        CHECK_FALSE(orb.singular);
        std::size_t peak = 0;
        for (std::size_t i = 0; i < orb.u.size(); ++i)
            if (orb.u[i] > orb.u[peak]) peak = i;
        CHECK(orb.u[peak] > 2.0 * c);
        double closest = 1e9;
        for (std::size_t i = peak; i < orb.u.size(); ++i)
            closest = std::min(closest, std::hypot(orb.u[i], orb.w[i]));
        CHECK(closest <= 1e-6);
    }
    SUBCASE("peakon: the orbit ends on the singular line and reflects") {
        const double c = 0.5, eps = std::sqrt(4.0 / 3.0);
        const double e2 = 4.0 / 3.0;
        // Saddle at (2c, 0) = (1, 0).
        const double d1 = 1.0 + c * e2 * (1.0 - c);
        const double lambda = std::sqrt((1.0 - c) / ((e2 - c) * d1));
        CHECK(lambda * lambda == doctest::Approx(0.45));
        const double delta = 1e-8;
        const auto fwd = integrate_phase_plane({1.0 - delta, -delta * lambda * d1}, c, eps, 0.01, 20000);
        CHECK(fwd.singular);
        CHECK(fwd.u.back() > singular_line_u(c, eps));
        CHECK(fwd.u.back() < singular_line_u(c, eps) + 0.05);
        CHECK(std::abs(fwd.w.back()) < 0.05);
        for (std::size_t i = 1; i < fwd.u.size(); ++i) CHECK(fwd.u[i] < fwd.u[i - 1]);

        const auto back = integrate_phase_plane({1.0 - delta, delta * lambda * d1}, c, eps, -0.01, 20000);
        const auto mirrored = reflect_orbit(back);
        REQUIRE(mirrored.u.size() == fwd.u.size());
        const std::size_t n = fwd.u.size();
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(mirrored.u[n - 1 - i] - fwd.u[i]) <= 1e-12);
            CHECK(std::abs(mirrored.w[n - 1 - i] - fwd.w[i]) <= 1e-12);
            CHECK(mirrored.xi[n - 1 - i] == doctest::Approx(fwd.xi[i]));
        }
    }
    CHECK_THROWS_AS(integrate_phase_plane({0.0, 0.0}, 1.2, 0.1, 0.0, 10), UsageError);
    CHECK_THROWS_AS(integrate_phase_plane({-1.0, 0.0}, 0.5, std::sqrt(4.0 / 3.0), 0.1, 10), UsageError);
}

TEST_CASE("profile CSV export") {
    TravelingWaveProfile p;
    p.xi = {0.0, 0.5};
    p.u = {1.0, 1.25};
    p.v = {0.0, -0.1};
    p.w = {0.1, 0.2};
    const auto path = std::filesystem::temp_directory_path() / "bbmh_profile.csv";
    write_profile_csv(p, path);
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    CHECK(header == "xi,u,v,w");
    std::getline(in, line);
    CHECK(line == "0,1,0,0.10000000000000001");
    std::filesystem::remove(path);
}
