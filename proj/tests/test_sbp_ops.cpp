#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "bbmh/errors.hpp"
#include "bbmh/sbp_ops.hpp"
#include "helpers.hpp"

using namespace bbmh;
using bbmh::testing::to_dense;

namespace {

double derivative_error(std::size_t n, int order) {
    const auto grid = GridSpec::make(0.0, 1.0, n);
    const auto ops = build_upwind_operators(grid, order);
    const auto x = grid.nodes();
    std::vector<double> f(n), df(n);
    for (std::size_t j = 0; j < n; ++j) {
        f[j] = std::sin(2 * std::numbers::pi * x[j]);
        df[j] = 2 * std::numbers::pi * std::cos(2 * std::numbers::pi * x[j]);
    }
    const auto dp = ops.d_plus.apply(f);
    const auto dm = ops.d_minus.apply(f);
    return std::max(bbmh::testing::max_abs_diff(dp, df), bbmh::testing::max_abs_diff(dm, df));
}

}  // namespace

TEST_CASE("grid validation and nodes") {
    CHECK_THROWS_AS(GridSpec::make(0.0, 1.0, 3), ConfigError);
    CHECK_THROWS_AS(GridSpec::make(1.0, 1.0, 8), ConfigError);
    const auto g = GridSpec::make(-90.0, 90.0, 512);
    CHECK(g.h() == doctest::Approx(180.0 / 512));
    CHECK(g.node(0) == -90.0);
    CHECK(g.wrap(90.0) == doctest::Approx(-90.0));
    CHECK(g.wrap(-91.0) == doctest::Approx(89.0));
}

TEST_CASE("operator construction rejects bad input") {
    const auto g = GridSpec::make(0.0, 1.0, 16);
    CHECK_THROWS_AS(build_upwind_operators(g, 1), ConfigError);
    CHECK_THROWS_AS(build_upwind_operators(g, 5), ConfigError);
    CHECK_THROWS_AS(build_upwind_operators(GridSpec::make(0.0, 1.0, 9), 4), ConfigError);
    CHECK_NOTHROW(build_upwind_operators(GridSpec::make(0.0, 1.0, 10), 4));
}

TEST_CASE("SBP identity, consistency and dissipation for all orders") {
    for (int order : {2, 3, 4}) {
        for (std::size_t n : {16u, 32u, 64u}) {
            CAPTURE(order);
            CAPTURE(n);
            const auto ops = build_upwind_operators(GridSpec::make(0.0, 1.0, n), order);
            const auto dp = to_dense(ops.d_plus);
            const auto dm = to_dense(ops.d_minus);
            const auto d1 = to_dense(ops.d_central);
            Eigen::MatrixXd m = Eigen::Map<const Eigen::VectorXd>(ops.mass_diag.data(), n).asDiagonal();
            CHECK((m * dp + dm.transpose() * m).cwiseAbs().maxCoeff() <= 1e-13);
            CHECK((d1 - 0.5 * (dp + dm)).cwiseAbs().maxCoeff() <= 1e-14);
            CHECK((dp.rowwise().sum()).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((dm.rowwise().sum()).cwiseAbs().maxCoeff() <= 1e-12);
            for (double mj : ops.mass_diag) CHECK(mj == doctest::Approx(1.0 / n));
            if (n <= 32) {
                Eigen::MatrixXd s = 0.5 * m * (dp - dm);
                Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
                CHECK(es.eigenvalues().maxCoeff() <= 1e-12);
            }
        }
    }
}

TEST_CASE("dissipation sampled on random vectors") {
    std::mt19937_64 rng(7);
    for (int order : {2, 3, 4}) {
        const auto ops = build_upwind_operators(GridSpec::make(0.0, 2.0, 64), order);
        for (int k = 0; k < 100; ++k) {
            const auto x = bbmh::testing::random_vector(64, rng);
            const auto dpx = ops.d_plus.apply(x);
            const auto dmx = ops.d_minus.apply(x);
            std::vector<double> diff(64);
            for (std::size_t j = 0; j < 64; ++j) diff[j] = dpx[j] - dmx[j];
            double nrm2 = 0.0;
            for (double v : x) nrm2 += v * v;
            CHECK(ops.mass_dot(x, diff) <= 1e-12 * nrm2);
        }
    }
}

TEST_CASE("apply matches the dense columns") {
    const auto ops = build_upwind_operators(GridSpec::make(0.0, 1.0, 20), 4);
    const auto dense = to_dense(ops.d_plus);
    for (std::size_t j = 0; j < 20; ++j) {
        std::vector<double> e(20, 0.0);
        e[j] = 1.0;
        const auto col = ops.d_plus.apply(e);
        for (std::size_t i = 0; i < 20; ++i) CHECK(col[i] == dense(i, j));
    }
    std::vector<double> ones(20, 1.0);
    CHECK(bbmh::testing::max_abs(ops.d_central.apply(ones)) <= 1e-12);
    std::vector<double> wrong(19, 0.0);
    CHECK_THROWS_AS(ops.d_plus.apply(wrong), UsageError);
}

TEST_CASE("transpose relation between the upwind operators") {
    const auto ops = build_upwind_operators(GridSpec::make(0.0, 1.0, 32), 3);
    const auto lhs = to_dense(ops.d_minus);
    const auto rhs = to_dense(ops.d_plus.transpose());
    CHECK((lhs + rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("derivative of sin converges at the nominal order") {
    for (int order : {2, 3, 4}) {
        CAPTURE(order);
        const double e1 = derivative_error(128, order);
        const double e2 = derivative_error(256, order);
        const double rate = std::log2(e1 / e2);
        CHECK(rate == doctest::Approx(order).epsilon(0.3 / order));
    }
    const double e256 = derivative_error(256, 4);
    const double e512 = derivative_error(512, 4);
    CHECK(e256 / e512 == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("circulant algebra") {
    const auto ops = build_upwind_operators(GridSpec::make(0.0, 1.0, 24), 4);
    const auto prod = ops.d_plus * ops.d_minus;
    const Eigen::MatrixXd dense = to_dense(ops.d_plus) * to_dense(ops.d_minus);
    CHECK((to_dense(prod) - dense).cwiseAbs().maxCoeff() <= 1e-9);
    const auto id = CirculantOperator::identity(24);
    CHECK((to_dense(id) - Eigen::MatrixXd::Identity(24, 24)).cwiseAbs().maxCoeff() == 0.0);
    // Mode k of a circulant matrix is an eigenvector.
    const std::size_t k = 3;
    std::vector<std::complex<double>> mode(24);
    for (std::size_t j = 0; j < 24; ++j)
        mode[j] = std::polar(1.0, 2 * std::numbers::pi * double(k * j) / 24.0);
    const auto lambda = ops.d_plus.symbol(k);
    const auto dp = to_dense(ops.d_plus);
    for (std::size_t i = 0; i < 24; ++i) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < 24; ++j) acc += dp(i, j) * mode[j];
        CHECK(std::abs(acc - lambda * mode[i]) <= 1e-10);
    }
}
