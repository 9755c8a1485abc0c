#ifndef PREDRISK_BOUNDS_HPP
#define PREDRISK_BOUNDS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "predrisk/risk.hpp"
#include "predrisk/sampling.hpp"
#include "predrisk/specfun.hpp"

// Bound functions g and h, the domination threshold nu*, and Monte
// Carlo verification of the lemma inequalities behind the domination result.

namespace predrisk {

/// Piecewise bound function g(n, d, nu), defined for 0 < nu < 1:
///   d <= n:    (1/nu) log[ B(nu, nd/2 - (d-nu)/n) / B(nu, nd/2) ]
///   d >= n+1:  (d-nu) / (n nu (nd/2 - 1)) * log(1+nu)
inline double g_fn(int n, int d, double nu) {
    if (n < 2 || d < 1) throw std::domain_error("g_fn: require n >= 2, d >= 1");
    if (!(nu > 0.0 && nu < 1.0)) throw std::domain_error("g_fn: require 0 < nu < 1");
    if (d <= n) {
        double x1 = 0.5 * n * d - (d - nu) / n;
        if (!(x1 > 0.0)) throw std::domain_error("g_fn: beta argument nonpositive");
        return (log_beta(nu, x1) - log_beta(nu, 0.5 * n * d)) / nu;
    }
    return (d - nu) / (n * nu * (0.5 * n * d - 1.0)) * std::log1p(nu);
}

/// h(n, d) = {1 + (n+1)d/2} / (nd/2) * [ psi(1 + (n+1)d/2) - psi(1 + nd/2) ].
inline double h_fn(int n, int d) {
    if (n < 2 || d < 1) throw std::domain_error("h_fn: require n >= 2, d >= 1");
    double top = 1.0 + 0.5 * (n + 1.0) * d;
    return top / (0.5 * n * d) * (digamma(top) - digamma(1.0 + 0.5 * n * d));
}

struct NuStarResult {
    int d = 0;
    int n = 0;
    bool found = false;
    double nu_star = std::numeric_limits<double>::quiet_NaN();
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double tol = 0.0;
};

/// Largest nu in (0,1) with g(n,d,nu') - h(n,d) >= 0 for all nu' <= nu:
/// upward grid scan (step 1e-3) for the first down-crossing, then bisection.
/// found = false when the difference is already negative near 0 or never
/// crosses inside (0,1).
inline NuStarResult nu_star(int d, int n = 2, double tol = 1e-6) {
    if (!(tol > 0.0)) throw std::invalid_argument("nu_star: tol must be positive");
    NuStarResult res;
    res.d = d;
    res.n = n;
    res.tol = tol;
    const double h = h_fn(n, d);
    auto diff = [&](double nu) { return g_fn(n, d, nu) - h; };
    const double step = 1e-3;
    double lo = 1e-6;
    if (diff(lo) < 0.0) return res; // no positive interval at all
    double hi = lo + step;
    bool crossed = false;
    while (hi < 1.0) {
        if (diff(hi) < 0.0) {
            crossed = true;
            break;
        }
        lo = hi;
        hi += step;
    }
    if (!crossed) return res; // no root in (0,1)
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (diff(mid) >= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    res.found = true;
    res.nu_star = 0.5 * (lo + hi);
    return res;
}

struct LemmaBound {
    double lhs = 0.0;
    double lhs_se = 0.0;
    double rhs = 0.0;
    double rhs_se = 0.0;
    bool pass = false;
};

struct LemmaBoundsReport {
    LemmaBound bound_g; // E[log(B-ratio J_{n+1}/J_n ((1-u_n)/(1-u_{n+1}))^nu)] >= nu g E(1-u)
    LemmaBound bound_h; // E[log((n+1)/n s_n/s_{n+1} (1-u_{n+1})/(1-u_n))] >= -h E(1-u)
    bool pass = false;
};

/// Monte Carlo check of both lemma inequalities at (d, n, nu, xi) for the
/// low-dimensional mixing density. Left sides are estimated from simulated
/// (y, xbar, s); the right-hand E(1-u_{n+1}) uses the noncentral-beta ratio
/// with dof pair (d, nd) and noncentrality (n+1)*xi, the law u_{n+1}
/// inherits from the data ((n+1) eta ||xbar_{n+1}||^2 is noncentral
/// chi-square with noncentrality (n+1) xi). Passing means
/// lhs >= rhs - 3 * combined standard error.
inline LemmaBoundsReport verify_lemma_bounds(int d, int n, double nu, double xi, int replicates,
                                             int trials, std::uint64_t seed, int threads = 0) {
    PriorSpec spec(nu, RhoVariant::low_dim, n, d);
    if (!(nu > 0.0 && nu < 1.0))
        throw std::domain_error("verify_lemma_bounds: require 0 < nu < 1");
    if (!(xi >= 0.0)) throw std::domain_error("verify_lemma_bounds: xi must be nonnegative");

    const JIntegrator j_n(spec, n);
    const JIntegrator j_np1(spec, n + 1);
    const double log_bratio = log_beta(nu, 0.5 * (n - 1.0) * d) - log_beta(nu, 0.5 * n * d);
    const double g = g_fn(n, d, nu);
    const double h = h_fn(n, d);

    std::vector<double> mu(d, 0.0);
    mu[0] = std::sqrt(xi);
    ModelConfig model(n, d, std::move(mu), 1.0);
    std::uint64_t cseed = detail::cell_seed(seed, xi, spec) ^ 0x1EAFBEEFULL;

    // three coupled series per replicate: both lemma left sides and 1-u_beta
    const std::int64_t total = static_cast<std::int64_t>(replicates) * trials;
    std::vector<double> lhs_g(total), lhs_h(total), omu(total);
    {
        auto eval = [&](std::uint64_t i) {
            Rng rng(RngState{cseed, i});
            Triplet trip = sample_triplet(rng, model);
            SufficientStats stats(std::move(trip.xbar), trip.s, n);
            SufficientStats next = update_stats(stats, trip.y);
            double w1 = stats.w(), w2 = next.w();
            // log(1 - u_l) = -log1p(w_l)
            lhs_g[i] = log_bratio + j_np1.log_j(w2) - j_n.log_j(w1)
                       + nu * (std::log1p(w2) - std::log1p(w1));
            lhs_h[i] = std::log((n + 1.0) / n) + std::log(stats.s) - std::log(next.s)
                       + std::log1p(w1) - std::log1p(w2);
            // noncentrality (n+1) xi: the sampler scales its xi argument by n
            double ub = sample_noncentral_beta_u(rng, d, n + 1, xi * (n + 1.0) / n, n);
            omu[i] = 1.0 - ub;
            return 0.0;
        };
        mc_across_trials(replicates, trials, cseed, eval, threads);
    }
    auto reduce = [&](const std::vector<double>& vals) {
        return mc_across_trials(replicates, trials, cseed,
                                [&](std::uint64_t i) { return vals[i]; }, 1);
    };
    RiskEstimate est_g = reduce(lhs_g);
    RiskEstimate est_h = reduce(lhs_h);
    RiskEstimate est_u = reduce(omu);

    LemmaBoundsReport rep;
    rep.bound_g.lhs = est_g.mean;
    rep.bound_g.lhs_se = est_g.std_error;
    rep.bound_g.rhs = nu * g * est_u.mean;
    rep.bound_g.rhs_se = std::fabs(nu * g) * est_u.std_error;
    rep.bound_g.pass = rep.bound_g.lhs
                       >= rep.bound_g.rhs
                              - 3.0 * std::hypot(rep.bound_g.lhs_se, rep.bound_g.rhs_se);
    rep.bound_h.lhs = est_h.mean;
    rep.bound_h.lhs_se = est_h.std_error;
    rep.bound_h.rhs = -h * est_u.mean;
    rep.bound_h.rhs_se = std::fabs(h) * est_u.std_error;
    rep.bound_h.pass = rep.bound_h.lhs
                       >= rep.bound_h.rhs
                              - 3.0 * std::hypot(rep.bound_h.lhs_se, rep.bound_h.rhs_se);
    rep.pass = rep.bound_g.pass && rep.bound_h.pass;
    return rep;
}

} // namespace predrisk

#endif // PREDRISK_BOUNDS_HPP
