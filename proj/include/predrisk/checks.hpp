#ifndef PREDRISK_CHECKS_HPP
#define PREDRISK_CHECKS_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "predrisk/bayes.hpp"
#include "predrisk/bounds.hpp"
#include "predrisk/model.hpp"
#include "predrisk/prior.hpp"
#include "predrisk/quadrature.hpp"
#include "predrisk/rng.hpp"

// Verification suites: each one exercises an identity or inequality the
// closed-form machinery must satisfy, against an independent route
// (2-D marginal quadrature, direct normalization, envelope evaluation,
// noncentral-beta Monte Carlo). Exposed to the CLI `check` subcommand and to
// the acceptance runner.

namespace predrisk {

struct CheckCase {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct CheckSuiteResult {
    std::string suite;
    bool pass = true;
    std::vector<CheckCase> cases;
    double seconds = 0.0;

    void add(CheckCase c) {
        pass = pass && c.pass;
        cases.push_back(std::move(c));
    }
};

namespace detail {

inline std::string format_double(double v, const char* fmt = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

struct RandomPredictiveConfig {
    PriorSpec spec;
    SufficientStats stats;
    std::vector<double> y;
};

// Random density-evaluation configurations spread over d in {1,2},
// nu in {0.05, 0.25, 0.33}, n in {2,3}, and the variants that are valid in
// low dimension (low_dim and ms with b = 0).
inline RandomPredictiveConfig random_predictive_config(Rng& rng, int index) {
    static const double nus[3] = {0.05, 0.25, 0.33};
    int d = 1 + static_cast<int>(rng.next_u64() % 2);
    int n = 2 + static_cast<int>(rng.next_u64() % 2);
    double nu = nus[index % 3];
    RhoVariant variant = (index % 2 == 0) ? RhoVariant::low_dim : RhoVariant::maruyama_strawderman;
    PriorSpec spec(nu, variant, n, d, 0.0);
    std::vector<double> xbar(d), y(d);
    for (int i = 0; i < d; ++i) {
        xbar[i] = -2.0 + 4.0 * rng.uniform();
        y[i] = -2.0 + 4.0 * rng.uniform();
    }
    double s = d * (0.4 + 3.6 * rng.uniform());
    return RandomPredictiveConfig{spec, SufficientStats(std::move(xbar), s, n), std::move(y)};
}

// integral over y of exp(logpdf(y)) for a univariate density, via the
// tangent substitution y = center + tan(theta).
inline double normalization_integral(const std::function<double(double)>& logpdf, double center) {
    auto f = [&](double theta) {
        double c = std::cos(theta);
        double y = center + std::tan(theta);
        return std::exp(logpdf(y)) / (c * c);
    };
    return adaptive_gauss(f, -0.5 * M_PI, 0.5 * M_PI, 1e-9, 1e-8);
}

template <typename Fn>
inline CheckSuiteResult timed_suite(const std::string& name, Fn&& body) {
    auto t0 = std::chrono::steady_clock::now();
    CheckSuiteResult res;
    res.suite = name;
    body(res);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace detail

/// Closed-form density vs. the independent 2-D marginal quadrature route,
/// |difference| <= 1e-5 |value| + 1e-8 at `count` random configurations.
inline CheckSuiteResult check_lemma1(std::uint64_t seed, int count = 50) {
    return detail::timed_suite("lemma1", [&](CheckSuiteResult& res) {
        Rng rng(RngState{seed, 0xC0DE});
        QuadratureConfig fixed;
        QuadratureConfig oracle;
        oracle.rel_tol = 1e-9;
        for (int i = 0; i < count; ++i) {
            auto cfg = detail::random_predictive_config(rng, i);
            double gm = gm_predictive_logpdf(cfg.y, cfg.stats, cfg.spec, fixed);
            double bf = brute_force_predictive_logpdf(cfg.y, cfg.stats, cfg.spec, oracle);
            double tol = 1e-5 * std::fabs(gm) + 1e-8;
            CheckCase c;
            c.name = "config " + std::to_string(i) + " (d=" + std::to_string(cfg.spec.d)
                     + ", n=" + std::to_string(cfg.spec.n) + ", " + to_string(cfg.spec.variant)
                     + ", nu=" + detail::format_double(cfg.spec.nu) + ")";
            c.observed = std::fabs(gm - bf);
            c.bound = tol;
            c.pass = c.observed <= tol;
            c.detail = "gm=" + detail::format_double(gm, "%.10g")
                       + " oracle=" + detail::format_double(bf, "%.10g");
            res.add(std::move(c));
        }
    });
}

/// Marginal-ratio identity: rho_pi(n+1 stats)/rho_pi(n stats) must equal
/// p_GM/p_R, rel tol 1e-4, at `count` random univariate points.
inline CheckSuiteResult check_theorem1(std::uint64_t seed, int count = 20) {
    return detail::timed_suite("theorem1", [&](CheckSuiteResult& res) {
        Rng rng(RngState{seed, 0x7E0});
        QuadratureConfig fixed;
        QuadratureConfig oracle;
        oracle.rel_tol = 1e-8;
        static const double nus[3] = {0.1, 0.25, 0.5};
        for (int i = 0; i < count; ++i) {
            int n = 2 + static_cast<int>(rng.next_u64() % 2);
            PriorSpec spec(nus[i % 3], RhoVariant::low_dim, n, 1);
            std::vector<double> xbar{-2.0 + 4.0 * rng.uniform()};
            std::vector<double> y{-2.0 + 4.0 * rng.uniform()};
            double s = 0.4 + 3.6 * rng.uniform();
            SufficientStats stats(xbar, s, n);
            SufficientStats next = update_stats(stats, y);
            double ratio_rho = marginal_rho(next.xbar, next.s, n + 1, spec, oracle)
                               / marginal_rho(stats.xbar, stats.s, n, spec, oracle);
            double ratio_pred = std::exp(gm_predictive_logpdf(y, stats, spec, fixed)
                                         - best_equivariant_logpdf(y, stats));
            CheckCase c;
            c.name = "point " + std::to_string(i) + " (n=" + std::to_string(n)
                     + ", nu=" + detail::format_double(spec.nu) + ")";
            c.observed = std::fabs(ratio_rho / ratio_pred - 1.0);
            c.bound = 1e-4;
            c.pass = c.observed <= c.bound;
            c.detail = "rho ratio=" + detail::format_double(ratio_rho, "%.10g")
                       + " predictive ratio=" + detail::format_double(ratio_pred, "%.10g");
            res.add(std::move(c));
        }
    });
}

/// Normalization of the predictive densities over y (d = 1): integral must
/// be 1 within 1e-4 for three (xbar, s, nu) configurations, for both the
/// Gaussian-mixture and the best equivariant density.
inline CheckSuiteResult check_normalization() {
    return detail::timed_suite("normalization", [&](CheckSuiteResult& res) {
        struct Cfg {
            double xbar, s, nu;
            int n;
        };
        const Cfg cfgs[3] = {{0.7, 1.3, 0.25, 2}, {-1.5, 0.6, 0.05, 2}, {0.0, 2.5, 1.5, 3}};
        for (const Cfg& cfg : cfgs) {
            PriorSpec spec(cfg.nu, RhoVariant::low_dim, cfg.n, 1);
            SufficientStats stats({cfg.xbar}, cfg.s, cfg.n);
            GmPredictiveDensity gm(spec);
            double igm = detail::normalization_integral(
                [&](double y) { return gm.logpdf({y}, stats); }, cfg.xbar);
            CheckCase c;
            c.name = "gm xbar=" + detail::format_double(cfg.xbar) + " s="
                     + detail::format_double(cfg.s) + " nu=" + detail::format_double(cfg.nu);
            c.observed = std::fabs(igm - 1.0);
            c.bound = 1e-4;
            c.pass = c.observed <= c.bound;
            c.detail = "integral=" + detail::format_double(igm, "%.10g");
            res.add(std::move(c));

            double ieq = detail::normalization_integral(
                [&](double y) { return best_equivariant_logpdf({y}, stats); }, cfg.xbar);
            CheckCase c2;
            c2.name = "equivariant xbar=" + detail::format_double(cfg.xbar)
                      + " s=" + detail::format_double(cfg.s) + " n=" + std::to_string(cfg.n);
            c2.observed = std::fabs(ieq - 1.0);
            c2.bound = 1e-4;
            c2.pass = c2.observed <= c2.bound;
            c2.detail = "integral=" + detail::format_double(ieq, "%.10g");
            res.add(std::move(c2));
        }
    });
}

/// Envelope consistency: zero violation for the variants that sit exactly on
/// the envelope, and the d = n = 2 coincidence between the low-dimensional
/// mixing density and the upper envelope, to machine precision.
inline CheckSuiteResult check_sandwich() {
    return detail::timed_suite("sandwich", [&](CheckSuiteResult& res) {
        for (int n : {2, 3}) {
            for (int d : {3, 4, 5}) {
                PriorSpec kato = PriorSpec::kato(n, d);
                SandwichReport rep = validate_sandwich(kato);
                CheckCase c;
                c.name = "kato d=" + std::to_string(d) + " n=" + std::to_string(n);
                c.observed = rep.max_violation;
                c.bound = 0.0;
                c.pass = rep.pass && rep.max_violation == 0.0;
                res.add(std::move(c));

                double nu_up = 0.5 * (0.5 * d - 1.0);
                PriorSpec upper(nu_up, RhoVariant::high_dim_upper, n, d);
                SandwichReport rep2 = validate_sandwich(upper);
                CheckCase c2;
                c2.name = "highdim-upper d=" + std::to_string(d) + " n=" + std::to_string(n)
                          + " nu=" + detail::format_double(nu_up);
                c2.observed = rep2.max_violation;
                c2.bound = 0.0;
                c2.pass = rep2.pass && rep2.max_violation == 0.0;
                res.add(std::move(c2));
            }
        }
        // d = n = 2: the low-dimensional mixing density coincides with the
        // upper envelope, (1 - lambda/2)^{-nu}.
        for (double nu : {0.25, 0.33, 1.0}) {
            PriorSpec low(nu, RhoVariant::low_dim, 2, 2);
            double worst = 0.0;
            for (int i = 1; i < 2000; ++i) {
                double lambda = i / 2000.0;
                double a = rho_eval(low, lambda);
                double b = sandwich_upper(2, 2, nu, lambda);
                worst = std::max(worst, std::fabs(a - b) / std::fabs(b));
            }
            CheckCase c;
            c.name = "d=n=2 coincidence nu=" + detail::format_double(nu);
            c.observed = worst;
            c.bound = 8.0 * std::numeric_limits<double>::epsilon();
            c.pass = worst <= c.bound;
            res.add(std::move(c));
        }
    });
}

/// Monte Carlo verification of the two domination-bound inequalities on the
/// d in 1..4, xi in {0, 10, 100} matrix at nu = nu*(d)/2, n = 2.
inline CheckSuiteResult check_lemma_bounds(std::uint64_t seed, int replicates = 5000,
                                           int trials = 10, int threads = 0) {
    return detail::timed_suite("lemma-bounds", [&](CheckSuiteResult& res) {
        for (int d = 1; d <= 4; ++d) {
            NuStarResult star = nu_star(d);
            double nu = 0.5 * star.nu_star;
            for (double xi : {0.0, 10.0, 100.0}) {
                LemmaBoundsReport rep =
                    verify_lemma_bounds(d, 2, nu, xi, replicates, trials, seed, threads);
                CheckCase c;
                c.name = "d=" + std::to_string(d) + " xi=" + detail::format_double(xi)
                         + " nu=" + detail::format_double(nu);
                c.observed = std::min(rep.bound_g.lhs - rep.bound_g.rhs,
                                      rep.bound_h.lhs - rep.bound_h.rhs);
                c.bound = 0.0; // slack must stay above -3 combined se (checked inside)
                c.pass = rep.pass;
                c.detail = "g-side lhs=" + detail::format_double(rep.bound_g.lhs)
                           + " rhs=" + detail::format_double(rep.bound_g.rhs)
                           + "; h-side lhs=" + detail::format_double(rep.bound_h.lhs)
                           + " rhs=" + detail::format_double(rep.bound_h.rhs);
                res.add(std::move(c));
            }
        }
    });
}

} // namespace predrisk

#endif // PREDRISK_CHECKS_HPP
