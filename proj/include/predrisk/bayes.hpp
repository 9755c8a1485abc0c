#ifndef PREDRISK_BAYES_HPP
#define PREDRISK_BAYES_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "predrisk/model.hpp"
#include "predrisk/prior.hpp"
#include "predrisk/quadrature.hpp"
#include "predrisk/specfun.hpp"

// Closed-form Bayesian predictive density for the Gaussian-mixture priors.
// Relative to the best equivariant density the Bayes factor reduces to a
// constant, a deviance-ratio power, and a ratio of one-dimensional integrals
//
//   J_l(w) = int_0^1 lambda^{nu-1} {1+(l-1)lambda}^{d/2-nu-1}
//            (1+w lambda)^{-(l-1)d/2-nu} rho{ l lambda / (1+(l-1)lambda) } dlambda,
//
// evaluated at w_l = l ||xbar_l||^2 / s_l for l = n and n+1. An independent
// two-dimensional (eta, lambda) marginal-density oracle lives alongside it.

namespace predrisk {

namespace detail {

// Streaming log-sum-exp accumulator; keeps sums of exp(e_i) stable for any
// exponent range.
class LogSumExp {
  public:
    void add(double e) {
        if (!(e > -std::numeric_limits<double>::infinity())) return;
        if (acc_ == 0.0) {
            max_ = e;
            acc_ = 1.0;
            return;
        }
        if (e <= max_) {
            acc_ += std::exp(e - max_);
        } else {
            acc_ = acc_ * std::exp(max_ - e) + 1.0;
            max_ = e;
        }
    }
    double value() const {
        if (acc_ == 0.0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(acc_);
    }

  private:
    double max_ = -std::numeric_limits<double>::infinity();
    double acc_ = 0.0;
};

// u(lambda) = l*lambda / (1 + (l-1)*lambda), the mixing-variable map inside J_l.
inline double j_mix_u(int l, double lambda) {
    return l * lambda / (1.0 + (l - 1.0) * lambda);
}

} // namespace detail

/// Fixed-node evaluator for log J_l(w), reusable across Monte Carlo
/// replicates: node tables depend only on (spec, l), w enters through a
/// single exp/log1p per node. The lambda^{nu-1} and (1-lambda)^{kappa-1}
/// endpoint behaviors are absorbed into Gauss-Jacobi weights; the interior
/// scale 1/w introduced by (1+w lambda)^{-alpha} is covered by per-octave
/// Gauss-Legendre panels between 2^-M and 1/2, with M following w.
class JIntegrator {
  public:
    JIntegrator(const PriorSpec& spec, int l, int node_count = 128)
        : spec_(spec), l_(l) {
        if (l < 2) throw std::invalid_argument("JIntegrator: l must be >= 2");
        if (node_count < 8) throw std::invalid_argument("JIntegrator: node_count too small");
        nu_ = spec.nu;
        kappa_ = detail::rho_kappa(spec);
        alpha_ = 0.5 * (l - 1.0) * spec.d + nu_;
        mid_exp_ = 0.5 * spec.d - nu_ - kappa_;

        int n_left = std::max(8, node_count / 8);
        int n_mid = std::max(8, node_count / 8);
        int n_right = std::max(12, node_count / 4);

        const QuadRule left_base = gauss_jacobi_01(n_left, 0.0, nu_ - 1.0);
        const QuadRule right_base = gauss_jacobi_01(n_right, kappa_ - 1.0, 0.0);
        const QuadRule& mid_base = detail::gauss_legendre_01(n_mid);

        // right region: lambda in [1/2, 1], weight carries (1-lambda)^{kappa-1}
        right_.lambda.resize(right_base.nodes.size());
        right_.log_c.resize(right_base.nodes.size());
        for (std::size_t i = 0; i < right_base.nodes.size(); ++i) {
            double lam = 0.5 * (1.0 + right_base.nodes[i]);
            right_.lambda[i] = lam;
            right_.log_c[i] = std::log(right_base.weights[i]) - kappa_ * std::log(2.0)
                              + (nu_ - 1.0) * std::log(lam) + log_mid(lam);
        }

        // dyadic octaves [2^{-k-1}, 2^{-k}], k = 1..62
        octaves_.resize(kMaxOctave);
        for (int k = 1; k <= kMaxOctave; ++k) {
            Region& reg = octaves_[k - 1];
            double lo = std::ldexp(1.0, -k - 1);
            reg.lambda.resize(mid_base.nodes.size());
            reg.log_c.resize(mid_base.nodes.size());
            for (std::size_t i = 0; i < mid_base.nodes.size(); ++i) {
                double lam = lo * (1.0 + mid_base.nodes[i]);
                reg.lambda[i] = lam;
                reg.log_c[i] = std::log(mid_base.weights[i]) + std::log(lo)
                               + (nu_ - 1.0) * std::log(lam)
                               + (kappa_ - 1.0) * std::log1p(-lam) + log_mid(lam);
            }
        }

        // left stubs [0, 2^-M], weight carries lambda^{nu-1}
        left_.resize(kMaxOctave + 1);
        for (int m = 1; m <= kMaxOctave + 1; ++m) {
            Region& reg = left_[m - 1];
            double lam_m = std::ldexp(1.0, -m);
            reg.lambda.resize(left_base.nodes.size());
            reg.log_c.resize(left_base.nodes.size());
            for (std::size_t i = 0; i < left_base.nodes.size(); ++i) {
                double lam = lam_m * left_base.nodes[i];
                reg.lambda[i] = lam;
                reg.log_c[i] = std::log(left_base.weights[i]) - m * nu_ * std::log(2.0)
                               + (kappa_ - 1.0) * std::log1p(-lam) + log_mid(lam);
            }
        }
    }

    double nu() const { return nu_; }
    int l() const { return l_; }

    double log_j(double w) const {
        if (!(w >= 0.0)) throw std::domain_error("JIntegrator::log_j: w must be nonnegative");
        // Past w ~ 2^63 the integral is its leading large-w form to 1e-9;
        // the node tables stop there.
        if (w >= 9.0e18) {
            return log_beta(nu_, alpha_ - nu_) - nu_ * std::log(w);
        }
        int m = 1;
        double scale = 0.0;
        if (w > 1.0) {
            m = std::min(kMaxOctave + 1, static_cast<int>(std::ceil(std::log2(2.0 * w))));
            scale = nu_ * std::log(w);
        }
        detail::LogSumExp lse;
        accumulate(left_[m - 1], w, scale, lse);
        for (int k = m - 1; k >= 1; --k) accumulate(octaves_[k - 1], w, scale, lse);
        accumulate(right_, w, scale, lse);
        return lse.value() - scale;
    }

    double j(double w) const { return std::exp(log_j(w)); }

  private:
    static constexpr int kMaxOctave = 62;

    struct Region {
        std::vector<double> lambda;
        std::vector<double> log_c;
    };

    void accumulate(const Region& reg, double w, double scale, detail::LogSumExp& lse) const {
        for (std::size_t i = 0; i < reg.lambda.size(); ++i) {
            lse.add(reg.log_c[i] + scale - alpha_ * std::log1p(w * reg.lambda[i]));
        }
    }

    // log of the analytic mid factor {1+(l-1)lambda}^{d/2-nu-kappa} * rho_tilde(u).
    double log_mid(double lambda) const {
        double u = detail::j_mix_u(l_, lambda);
        return mid_exp_ * std::log1p((l_ - 1.0) * lambda)
               + std::log(detail::rho_tilde(spec_, u));
    }

    PriorSpec spec_;
    int l_;
    double nu_, kappa_, alpha_, mid_exp_;
    Region right_;
    std::vector<Region> octaves_;
    std::vector<Region> left_;
};

namespace detail {

// log of the full J integrand without the lambda^{nu-1}(1-lambda)^{kappa-1}
// endpoint powers (those are handled by each scheme separately).
inline double j_core_log(const PriorSpec& spec, int l, double w, double lambda) {
    double kappa = rho_kappa(spec);
    double alpha = 0.5 * (l - 1.0) * spec.d + spec.nu;
    double u = j_mix_u(l, lambda);
    return (0.5 * spec.d - spec.nu - kappa) * std::log1p((l - 1.0) * lambda)
           + std::log(rho_tilde(spec, u)) - alpha * std::log1p(w * lambda);
}

inline double j_adaptive(const PriorSpec& spec, int l, double w, const QuadratureConfig& quad) {
    double nu = spec.nu;
    double kappa = rho_kappa(spec);
    // left half, lambda = (1/2) t^{1/nu} removes the lambda^{nu-1} singularity
    auto left = [&](double t) {
        if (t <= 0.0) t = 1e-300;
        double lam = 0.5 * std::pow(t, 1.0 / nu);
        return std::exp((kappa - 1.0) * std::log1p(-lam) + j_core_log(spec, l, w, lam));
    };
    // right half, 1-lambda = (1/2) r^{1/kappa}
    auto right = [&](double r) {
        if (r <= 0.0) r = 1e-300;
        double oml = 0.5 * std::pow(r, 1.0 / kappa);
        double lam = 1.0 - oml;
        return std::exp((nu - 1.0) * std::log(lam) + j_core_log(spec, l, w, lam));
    };
    double scale_l = std::pow(2.0, -nu) / nu;
    double scale_r = std::pow(2.0, -kappa) / kappa;
    double il = adaptive_gauss(left, 0.0, 1.0, 0.5 * quad.abs_tol / scale_l, 0.5 * quad.rel_tol);
    double ir = adaptive_gauss(right, 0.0, 1.0, 0.5 * quad.abs_tol / scale_r, 0.5 * quad.rel_tol);
    return scale_l * il + scale_r * ir;
}

inline double j_tanh_sinh(const PriorSpec& spec, int l, double w, const QuadratureConfig& quad) {
    double nu = spec.nu;
    double kappa = rho_kappa(spec);
    return tanh_sinh_01(
        [&](double lam, double oml) {
            double e = (nu - 1.0) * std::log(lam) + (kappa - 1.0) * std::log(oml)
                       + j_core_log(spec, l, w, lam);
            return std::exp(e);
        },
        quad.rel_tol);
}

} // namespace detail

/// J_l integral for the given prior and w >= 0, scheme chosen by the config.
/// The gauss_jacobi scheme is the fixed-node production path; tanh_sinh and
/// adaptive provide independent cross-checks.
inline double j_integral(int l, double w, const PriorSpec& spec, const QuadratureConfig& quad) {
    quad.validate();
    if (!(w >= 0.0)) throw std::domain_error("j_integral: w must be nonnegative");
    switch (quad.scheme) {
        case QuadScheme::gauss_jacobi:
            return JIntegrator(spec, l, quad.node_count).j(w);
        case QuadScheme::adaptive:
            return detail::j_adaptive(spec, l, w, quad);
        case QuadScheme::tanh_sinh:
            return detail::j_tanh_sinh(spec, l, w, quad);
    }
    throw std::logic_error("j_integral: unknown scheme");
}

/// log c_B = nu log((n+1)/n) + log B(nu, (n-1)d/2) - log B(nu, nd/2).
inline double log_bayes_constant(const PriorSpec& spec) {
    return spec.nu * std::log((spec.n + 1.0) / spec.n)
           + log_beta(spec.nu, 0.5 * (spec.n - 1.0) * spec.d)
           - log_beta(spec.nu, 0.5 * spec.n * spec.d);
}

/// Reusable handle for the Gaussian-mixture predictive density; builds the
/// two J_l node tables once and evaluates
///   log c_B - nu log(s_{n+1}/s_n) + log J_{n+1} - log J_n + log p_R
/// per point.
class GmPredictiveDensity {
  public:
    explicit GmPredictiveDensity(const PriorSpec& spec, int node_count = 128)
        : spec_(spec),
          j_n_(spec, spec.n, node_count),
          j_np1_(spec, spec.n + 1, node_count),
          log_cb_(log_bayes_constant(spec)) {}

    double logpdf(const std::vector<double>& y, const SufficientStats& stats) const {
        if (static_cast<int>(y.size()) != spec_.d || y.size() != stats.xbar.size())
            throw std::invalid_argument("GmPredictiveDensity: dimension mismatch");
        if (stats.count != spec_.n)
            throw std::invalid_argument("GmPredictiveDensity: stats count does not match spec.n");
        if (!(stats.s > 0.0))
            throw std::domain_error("GmPredictiveDensity: singular statistic (s = 0)");
        SufficientStats next = update_stats(stats, y);
        return log_cb_ - spec_.nu * (std::log(next.s) - std::log(stats.s))
               + j_np1_.log_j(next.w()) - j_n_.log_j(stats.w())
               + best_equivariant_logpdf(y, stats);
    }

    const PriorSpec& spec() const { return spec_; }

  private:
    PriorSpec spec_;
    JIntegrator j_n_;
    JIntegrator j_np1_;
    double log_cb_;
};

/// One-shot form of the above, honoring the configured J_l scheme.
inline double gm_predictive_logpdf(const std::vector<double>& y, const SufficientStats& stats,
                                   const PriorSpec& spec, const QuadratureConfig& quad) {
    if (quad.scheme == QuadScheme::gauss_jacobi) {
        return GmPredictiveDensity(spec, quad.node_count).logpdf(y, stats);
    }
    if (static_cast<int>(y.size()) != spec.d || y.size() != stats.xbar.size())
        throw std::invalid_argument("gm_predictive_logpdf: dimension mismatch");
    if (stats.count != spec.n)
        throw std::invalid_argument("gm_predictive_logpdf: stats count does not match spec.n");
    if (!(stats.s > 0.0))
        throw std::domain_error("gm_predictive_logpdf: singular statistic (s = 0)");
    SufficientStats next = update_stats(stats, y);
    double log_jn = std::log(j_integral(spec.n, stats.w(), spec, quad));
    double log_jnp = std::log(j_integral(spec.n + 1, next.w(), spec, quad));
    return log_bayes_constant(spec) - spec.nu * (std::log(next.s) - std::log(stats.s))
           + log_jnp - log_jn + best_equivariant_logpdf(y, stats);
}

namespace detail {

// log of int_0^inf eta^{D-1} exp(-beta eta) d eta computed by trapezoid in
// x = log eta. Kept numeric (not the closed Gamma form) so the marginal
// density path stays independent of the J_l machinery it cross-checks.
inline double log_eta_integral(double shape, double beta) {
    const double h = 0.3;
    double x_star = std::log(shape / beta);
    double span_lo = 46.0 / shape + 4.0;
    double span_hi = std::max(4.0, 1.2 * std::log1p(45.0 / shape) + 3.0);
    LogSumExp lse;
    int n_lo = static_cast<int>(std::ceil(span_lo / h));
    int n_hi = static_cast<int>(std::ceil(span_hi / h));
    for (int i = -n_lo; i <= n_hi; ++i) {
        double x = x_star + i * h;
        lse.add(shape * x - beta * std::exp(x));
    }
    return lse.value() + std::log(h);
}

inline double log_marginal_rho(const std::vector<double>& z, double v, int l,
                               const PriorSpec& spec, const QuadratureConfig& quad) {
    if (!(v > 0.0)) throw std::domain_error("marginal_rho: v must be positive");
    if (static_cast<int>(z.size()) != spec.d)
        throw std::invalid_argument("marginal_rho: dimension mismatch");
    if (l != spec.n && l != spec.n + 1)
        throw std::invalid_argument("marginal_rho: l must be n or n+1");
    const double d = spec.d;
    const double k = (l - 1.0) * d; // chi-square dof of eta * v
    const double shape = 0.5 * k + spec.nu;
    const double z2 = squared_norm(z);
    const double a = spec.a();
    const double kappa = rho_kappa(spec);
    const double log_const = -0.5 * d * std::log(2.0 * M_PI) + (0.5 * k - 1.0) * std::log(v)
                             - 0.5 * k * std::log(2.0) - log_gamma(0.5 * k);

    // log integrand over the mixing variable; the eta integral is folded in.
    auto log_inner = [&](double lam, double omlam) {
        double denom = l - (l - 1.0) * lam; // l (1 - u(lambda)) territory, positive on (0,1)
        double c1 = l * lam / denom;
        double beta = 0.5 * (c1 * z2 + v);
        double log_rho = (kappa - 1.0) * std::log(omlam) + std::log(rho_tilde(spec, lam));
        return log_const + 0.5 * d * std::log(c1) + a * std::log(lam) + log_rho
               + log_eta_integral(shape, beta);
    };

    // shift by the largest probed value so tanh-sinh sums O(1) quantities
    double shift = -std::numeric_limits<double>::infinity();
    for (double lam : {9.5e-13, 9.5e-7, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999}) {
        shift = std::max(shift, log_inner(lam, 1.0 - lam));
    }
    double integral = tanh_sinh_01(
        [&](double lam, double omlam) { return std::exp(log_inner(lam, omlam) - shift); },
        quad.rel_tol);
    if (!(integral > 0.0) || !std::isfinite(integral))
        throw QuadratureError("marginal_rho: mixing integral failed to converge");
    return std::log(v) + shift + std::log(integral);
}

} // namespace detail

/// rho_pi(z, v; l) = v * m_pi(z, v; l): the weighted marginal density of the
/// sufficient statistic under the Gaussian-mixture prior. Computed by an
/// analytic Gaussian convolution over the mean followed by 2-D numeric
/// quadrature over (eta, lambda); deliberately does not share code with
/// JIntegrator so it can serve as that path's oracle.
inline double marginal_rho(const std::vector<double>& z, double v, int l, const PriorSpec& spec,
                           const QuadratureConfig& quad) {
    return std::exp(detail::log_marginal_rho(z, v, l, spec, quad));
}

/// Independent route to the Bayes predictive log density via the marginal
/// ratio identity. Guarded to d <= 2 (quadrature cost).
inline double brute_force_predictive_logpdf(const std::vector<double>& y,
                                            const SufficientStats& stats, const PriorSpec& spec,
                                            const QuadratureConfig& quad) {
    if (spec.d > 2)
        throw std::invalid_argument("brute_force_predictive_logpdf: cost guard allows d <= 2 only");
    if (stats.count != spec.n)
        throw std::invalid_argument("brute_force_predictive_logpdf: stats count mismatch");
    SufficientStats next = update_stats(stats, y);
    double log_num = detail::log_marginal_rho(next.xbar, next.s, spec.n + 1, spec, quad);
    double log_den = detail::log_marginal_rho(stats.xbar, stats.s, spec.n, spec, quad);
    return log_num - log_den + best_equivariant_logpdf(y, stats);
}

} // namespace predrisk

#endif // PREDRISK_BAYES_HPP
