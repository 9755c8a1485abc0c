#ifndef PREDRISK_MODEL_HPP
#define PREDRISK_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "predrisk/specfun.hpp"

namespace predrisk {

inline double squared_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

/// Sampling model: n i.i.d. observations in dimension d from an isotropic
/// Gaussian with mean mu and precision eta = 1/sigma^2.
struct ModelConfig {
    int n;
    int d;
    std::vector<double> mu;
    double eta;

    ModelConfig(int n_, int d_, std::vector<double> mu_, double eta_)
        : n(n_), d(d_), mu(std::move(mu_)), eta(eta_) {
        if (n < 2) throw std::invalid_argument("ModelConfig: n must be >= 2");
        if (d < 1) throw std::invalid_argument("ModelConfig: d must be >= 1");
        if (static_cast<int>(mu.size()) != d)
            throw std::invalid_argument("ModelConfig: mu has wrong dimension");
        if (!(eta > 0.0)) throw std::invalid_argument("ModelConfig: eta must be positive");
    }

    /// Noncentrality xi = eta * ||mu||^2; the risk difference depends on
    /// (mu, sigma^2) only through this scalar.
    double xi() const { return eta * squared_norm(mu); }
};

/// Sufficient statistic (sample mean, scaled deviance, count).
struct SufficientStats {
    std::vector<double> xbar;
    double s;
    int count;

    SufficientStats(std::vector<double> xbar_, double s_, int count_)
        : xbar(std::move(xbar_)), s(s_), count(count_) {
        if (count < 2) throw std::invalid_argument("SufficientStats: count must be >= 2");
        if (s < 0.0) throw std::invalid_argument("SufficientStats: s must be nonnegative");
    }

    /// w = count * ||xbar||^2 / s.
    double w() const {
        if (s == 0.0) throw std::domain_error("SufficientStats::w: s is zero");
        return count * squared_norm(xbar) / s;
    }

    /// u = w / (1 + w) in [0,1).
    double u() const {
        double wv = w();
        return wv / (1.0 + wv);
    }
};

/// Absorb one future observation y: the (n+1)-sample mean and deviance from
/// the n-sample statistic.
inline SufficientStats update_stats(const SufficientStats& stats, const std::vector<double>& y) {
    const int n = stats.count;
    const std::size_t d = stats.xbar.size();
    if (y.size() != d) throw std::invalid_argument("update_stats: dimension mismatch");
    std::vector<double> xbar_next(d);
    double dev = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double diff = y[i] - stats.xbar[i];
        dev += diff * diff;
        xbar_next[i] = (n * stats.xbar[i] + y[i]) / (n + 1.0);
    }
    double s_next = stats.s + n * dev / (n + 1.0);
    return SufficientStats(std::move(xbar_next), s_next, n + 1);
}

/// Log density of the best equivariant predictive density, a multivariate
/// Student t centered at xbar:
///   log c_R + (d/2) log( n / ((n+1) pi s) ) - (n d / 2) log( 1 + n ||y-xbar||^2 / ((n+1) s) )
/// with c_R = Gamma(nd/2) / Gamma((n-1)d/2).
inline double best_equivariant_logpdf(const std::vector<double>& y, const SufficientStats& stats) {
    const int n = stats.count;
    const int d = static_cast<int>(stats.xbar.size());
    if (y.size() != stats.xbar.size())
        throw std::invalid_argument("best_equivariant_logpdf: dimension mismatch");
    if (!(stats.s > 0.0))
        throw std::domain_error("best_equivariant_logpdf: singular statistic (s = 0)");
    double dev = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double diff = y[i] - stats.xbar[i];
        dev += diff * diff;
    }
    double log_c = log_gamma(0.5 * n * d) - log_gamma(0.5 * (n - 1.0) * d);
    double ratio = static_cast<double>(n) / (n + 1.0);
    return log_c + 0.5 * d * std::log(ratio / (M_PI * stats.s))
           - 0.5 * n * d * std::log1p(ratio * dev / stats.s);
}

/// Log density of the isotropic Gaussian plug-in density.
inline double plug_in_logpdf(const std::vector<double>& y, const std::vector<double>& mu_hat,
                             double sigma2_hat) {
    if (y.size() != mu_hat.size()) throw std::invalid_argument("plug_in_logpdf: dimension mismatch");
    if (!(sigma2_hat > 0.0)) throw std::domain_error("plug_in_logpdf: variance must be positive");
    const double d = static_cast<double>(y.size());
    double dev = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double diff = y[i] - mu_hat[i];
        dev += diff * diff;
    }
    return -0.5 * d * std::log(2.0 * M_PI * sigma2_hat) - 0.5 * dev / sigma2_hat;
}

} // namespace predrisk

#endif // PREDRISK_MODEL_HPP
