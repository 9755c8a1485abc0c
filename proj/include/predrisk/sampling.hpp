#ifndef PREDRISK_SAMPLING_HPP
#define PREDRISK_SAMPLING_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "predrisk/model.hpp"
#include "predrisk/rng.hpp"

namespace predrisk {

/// One draw from N_d(mean, variance * I). variance == 0 returns the mean
/// exactly (degenerate-limit convention used by the test harness).
inline std::vector<double> sample_iso_normal(Rng& rng, const std::vector<double>& mean,
                                             double variance) {
    if (variance < 0.0) throw std::domain_error("sample_iso_normal: variance must be nonnegative");
    std::vector<double> out(mean);
    if (variance == 0.0) return out;
    double sd = std::sqrt(variance);
    for (auto& x : out) x += sd * rng.normal();
    return out;
}

/// One chi-square draw.
inline double sample_chi2(Rng& rng, double dof) {
    return rng.chi_square(dof);
}

/// One noncentral chi-square draw via the exact Poisson(nc/2) mixture of
/// central chi-squares.
inline double sample_noncentral_chi2(Rng& rng, double dof, double noncentrality) {
    if (!(dof > 0.0)) throw std::domain_error("sample_noncentral_chi2: dof must be positive");
    if (noncentrality < 0.0)
        throw std::domain_error("sample_noncentral_chi2: noncentrality must be nonnegative");
    std::uint64_t k = rng.poisson(0.5 * noncentrality);
    return rng.chi_square(dof + 2.0 * static_cast<double>(k));
}

struct Triplet {
    std::vector<double> y;
    std::vector<double> xbar;
    double s;
};

/// Draws the risk-integrand triple: xbar ~ N_d(mu, sigma^2/n I),
/// s ~ sigma^2 chi^2_{(n-1)d}, y ~ N_d(mu, sigma^2 I), mutually independent.
inline Triplet sample_triplet(Rng& rng, const ModelConfig& model) {
    double sigma2 = 1.0 / model.eta;
    Triplet t;
    t.xbar = sample_iso_normal(rng, model.mu, sigma2 / model.n);
    t.s = sigma2 * rng.chi_square(static_cast<double>((model.n - 1) * model.d));
    t.y = sample_iso_normal(rng, model.mu, sigma2);
    return t;
}

/// Draws u_l = chi^2_d(n xi) / (chi^2_d(n xi) + chi^2_{(l-1)d}), the
/// noncentral-beta ratio appearing in the domination bounds. The result is
/// clamped into (1e-300, 1 - 1e-16) so downstream log(1-u) stays finite.
inline double sample_noncentral_beta_u(Rng& rng, int d, int l, double xi, int n) {
    if (d < 1) throw std::domain_error("sample_noncentral_beta_u: d must be >= 1");
    if (l != n && l != n + 1)
        throw std::domain_error("sample_noncentral_beta_u: l must be n or n+1");
    if (xi < 0.0) throw std::domain_error("sample_noncentral_beta_u: xi must be nonnegative");
    double a = sample_noncentral_chi2(rng, static_cast<double>(d), n * xi);
    double b = rng.chi_square(static_cast<double>((l - 1) * d));
    double u = a / (a + b);
    if (u < 1e-300) u = 1e-300;
    if (u > 1.0 - 1e-16) u = 1.0 - 1e-16;
    return u;
}

} // namespace predrisk

#endif // PREDRISK_SAMPLING_HPP
