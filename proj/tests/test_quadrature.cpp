#include <catch2/catch.hpp>

#include <cmath>

#include "predrisk/quadrature.hpp"
#include "predrisk/specfun.hpp"

using namespace predrisk;

TEST_CASE("gauss_legendre_01 integrates polynomials exactly") {
    const QuadRule& rule = detail::gauss_legendre_01(16);
    for (int k = 0; k <= 31; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            acc += rule.weights[i] * std::pow(rule.nodes[i], k);
        }
        CHECK(acc == Approx(1.0 / (k + 1.0)).epsilon(1e-13));
    }
}

TEST_CASE("gauss_jacobi_01 with flat weight reproduces Gauss-Legendre") {
    QuadRule gj = gauss_jacobi_01(12, 0.0, 0.0);
    const QuadRule& gl = detail::gauss_legendre_01(12);
    for (std::size_t i = 0; i < gj.nodes.size(); ++i) {
        CHECK(gj.nodes[i] == Approx(gl.nodes[i]).margin(1e-12));
        CHECK(gj.weights[i] == Approx(gl.weights[i]).margin(1e-12));
    }
}

TEST_CASE("gauss_jacobi_01 moments with left-singular weight") {
    for (double nu : {0.05, 0.33, 0.9}) {
        QuadRule rule = gauss_jacobi_01(16, 0.0, nu - 1.0);
        for (int k = 0; k <= 8; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                acc += rule.weights[i] * std::pow(rule.nodes[i], k);
            }
            // int_0^1 t^{nu-1+k} dt = 1/(nu+k)
            CHECK(acc == Approx(1.0 / (nu + k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("gauss_jacobi_01 moments with right-singular weight") {
    for (double kappa : {0.5, 1.5, 2.0}) {
        QuadRule rule = gauss_jacobi_01(16, kappa - 1.0, 0.0);
        for (int k = 0; k <= 6; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                acc += rule.weights[i] * std::pow(rule.nodes[i], k);
            }
            // int_0^1 (1-t)^{kappa-1} t^k dt = B(k+1, kappa)
            CHECK(acc == Approx(std::exp(log_beta(k + 1.0, kappa))).epsilon(1e-12));
        }
    }
}

TEST_CASE("gauss_jacobi_01 rejects invalid weights") {
    CHECK_THROWS_AS(gauss_jacobi_01(8, -1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_jacobi_01(8, 0.0, -1.2), std::invalid_argument);
    CHECK_THROWS_AS(gauss_jacobi_01(0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("adaptive_gauss on smooth and peaked integrands") {
    double v = adaptive_gauss([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-13, 1e-13);
    CHECK(v == Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    // narrow Lorentzian peak inside the interval
    double w = 1e-4;
    double peak = adaptive_gauss([&](double x) { return w / (w * w + (x - 0.37) * (x - 0.37)); },
                                 0.0, 1.0, 1e-12, 1e-11);
    double expect = std::atan((1.0 - 0.37) / w) - std::atan((0.0 - 0.37) / w);
    CHECK(peak == Approx(expect).epsilon(1e-9));
}

TEST_CASE("adaptive_gauss reports non-convergence") {
    CHECK_THROWS_AS(adaptive_gauss([](double x) { return std::pow(std::fabs(x - 0.3), -0.9); }, 0.0,
                                   1.0, 1e-14, 1e-14, 16),
                    QuadratureError);
}

TEST_CASE("tanh_sinh_01 handles endpoint singularities") {
    double a = tanh_sinh_01([](double x, double) { return std::pow(x, -0.95); }, 1e-12);
    CHECK(a == Approx(20.0).epsilon(1e-11));
    double b = tanh_sinh_01([](double, double omx) { return std::pow(omx, -0.5); }, 1e-12);
    CHECK(b == Approx(2.0).epsilon(1e-11));
    double c = tanh_sinh_01([](double x, double) { return std::log(x); }, 1e-12);
    CHECK(c == Approx(-1.0).epsilon(1e-11));
    // both endpoints at once
    double d = tanh_sinh_01(
        [](double x, double omx) { return std::pow(x, -0.5) * std::pow(omx, -0.5); }, 1e-12);
    CHECK(d == Approx(M_PI).epsilon(1e-10));
}

TEST_CASE("QuadratureConfig validation") {
    QuadratureConfig q;
    CHECK_NOTHROW(q.validate());
    q.node_count = 4;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q.node_count = 64;
    q.rel_tol = 0.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}
