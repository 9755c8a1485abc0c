#ifndef PREDRISK_PRIOR_HPP
#define PREDRISK_PRIOR_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace predrisk {

/// Mixing-density variants for the Gaussian-mixture prior family.
///  - low_dim:        (1-l)^{(n-1)d/2-1} {1-(n-1)l/n}^{-(n-2)d/2-nu}
///  - high_dim_lower: {1-nl/(n+1)}^{d/2-nu-1}   (lower envelope)
///  - high_dim_upper: {1-(n-1)l/n}^{d/2-nu-1}   (upper envelope)
///  - kato:           1 (forces nu = d/2-1)
///  - maruyama_strawderman: (1-l)^b
enum class RhoVariant { low_dim, high_dim_lower, high_dim_upper, kato, maruyama_strawderman };

inline const char* to_string(RhoVariant v) {
    switch (v) {
        case RhoVariant::low_dim: return "lowdim";
        case RhoVariant::high_dim_lower: return "highdim-lower";
        case RhoVariant::high_dim_upper: return "highdim-upper";
        case RhoVariant::kato: return "kato";
        case RhoVariant::maruyama_strawderman: return "ms";
    }
    return "?";
}

/// Prior specification: shape nu (= d/2 + a + 1), the mixing-density variant,
/// and the model dimensions it is paired with.
///
/// low_dim and ms accept any nu > 0: the low-dimensional domination result
/// only covers nu < 1, but the density is well defined beyond it and the
/// risk experiments deliberately run up to nu = 2. The envelope variants
/// keep their defining range nu <= d/2-1 (d >= 3), and kato *is*
/// nu = d/2-1 with rho == 1.
struct PriorSpec {
    double nu;
    RhoVariant variant;
    int n;
    int d;
    double ms_b = 0.0;

    PriorSpec(double nu_, RhoVariant variant_, int n_, int d_, double ms_b_ = 0.0)
        : nu(nu_), variant(variant_), n(n_), d(d_), ms_b(ms_b_) {
        if (n < 2) throw std::invalid_argument("PriorSpec: n must be >= 2");
        if (d < 1) throw std::invalid_argument("PriorSpec: d must be >= 1");
        if (!(nu > 0.0)) throw std::invalid_argument("PriorSpec: nu must be positive");
        if (variant == RhoVariant::kato) {
            if (d < 3) throw std::invalid_argument("PriorSpec: kato variant requires d >= 3");
            double expect = 0.5 * d - 1.0;
            if (std::fabs(nu - expect) > 1e-12)
                throw std::invalid_argument("PriorSpec: kato variant requires nu = d/2 - 1 = "
                                            + std::to_string(expect));
        }
        if (variant == RhoVariant::high_dim_lower || variant == RhoVariant::high_dim_upper) {
            if (d < 3) throw std::invalid_argument("PriorSpec: high-dim variants require d >= 3");
            if (!(nu <= 0.5 * d - 1.0))
                throw std::invalid_argument("PriorSpec: high-dim variants require nu <= d/2 - 1");
        }
        if (variant == RhoVariant::maruyama_strawderman && !(ms_b > -1.0))
            throw std::invalid_argument("PriorSpec: ms variant requires b > -1");
    }

    static PriorSpec kato(int n, int d) { return PriorSpec(0.5 * d - 1.0, RhoVariant::kato, n, d); }

    /// a = nu - d/2 - 1, the hyperprior power.
    double a() const { return nu - 0.5 * d - 1.0; }
};

/// Lower envelope {1 - n*lambda/(n+1)}^{d/2-nu-1} of the mixing density.
inline double sandwich_lower(int n, int d, double nu, double lambda) {
    return std::pow(1.0 - n * lambda / (n + 1.0), 0.5 * d - nu - 1.0);
}

/// Upper envelope {1 - (n-1)*lambda/n}^{d/2-nu-1}.
inline double sandwich_upper(int n, int d, double nu, double lambda) {
    return std::pow(1.0 - (n - 1.0) * lambda / n, 0.5 * d - nu - 1.0);
}

/// Mixing density rho(lambda) on (0,1) for the given variant.
inline double rho_eval(const PriorSpec& spec, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::domain_error("rho_eval: lambda must lie in (0,1)");
    switch (spec.variant) {
        case RhoVariant::low_dim: {
            double e1 = 0.5 * (spec.n - 1.0) * spec.d - 1.0;
            double e2 = -(0.5 * (spec.n - 2.0) * spec.d + spec.nu);
            return std::pow(1.0 - lambda, e1) * std::pow(1.0 - (spec.n - 1.0) * lambda / spec.n, e2);
        }
        case RhoVariant::high_dim_lower:
            return sandwich_lower(spec.n, spec.d, spec.nu, lambda);
        case RhoVariant::high_dim_upper:
            return sandwich_upper(spec.n, spec.d, spec.nu, lambda);
        case RhoVariant::kato:
            return 1.0;
        case RhoVariant::maruyama_strawderman:
            return std::pow(1.0 - lambda, spec.ms_b);
    }
    throw std::logic_error("rho_eval: unknown variant");
}

struct SandwichReport {
    bool pass = false;
    double max_violation = 0.0; // worst signed excursion outside the envelope
    double worst_lambda = 0.0;
};

/// Checks lower(lambda) <= rho(lambda) <= upper(lambda) on a dense grid.
/// Preconditions follow the envelope condition: d >= 3 and 0 < nu <= d/2-1.
inline SandwichReport validate_sandwich(const PriorSpec& spec, int grid_points = 10000) {
    if (spec.d < 3) throw std::domain_error("validate_sandwich: requires d >= 3");
    if (!(spec.nu > 0.0 && spec.nu <= 0.5 * spec.d - 1.0))
        throw std::domain_error("validate_sandwich: requires 0 < nu <= d/2 - 1");
    if (grid_points < 2) throw std::invalid_argument("validate_sandwich: grid too small");
    SandwichReport report;
    report.pass = true;
    for (int i = 1; i <= grid_points; ++i) {
        double lambda = static_cast<double>(i) / (grid_points + 1.0);
        double rho = rho_eval(spec, lambda);
        double lo = sandwich_lower(spec.n, spec.d, spec.nu, lambda);
        double hi = sandwich_upper(spec.n, spec.d, spec.nu, lambda);
        double viol = std::max(lo - rho, rho - hi);
        if (viol > report.max_violation) {
            report.max_violation = viol;
            report.worst_lambda = lambda;
        }
    }
    // tolerate rounding noise at the envelope scale
    if (report.max_violation > 1e-12) report.pass = false;
    return report;
}

namespace detail {

// rho(u) factors as (1-u)^{kappa-1} * rho_tilde(u) with rho_tilde analytic and
// positive on [0,1], rho_tilde(0) = 1. The closed-form Bayes integral uses
// this split to put the (1-lambda) endpoint behavior into quadrature weights.
inline double rho_kappa(const PriorSpec& spec) {
    switch (spec.variant) {
        case RhoVariant::low_dim: return 0.5 * (spec.n - 1.0) * spec.d;
        case RhoVariant::maruyama_strawderman: return spec.ms_b + 1.0;
        default: return 1.0;
    }
}

inline double rho_tilde(const PriorSpec& spec, double u) {
    switch (spec.variant) {
        case RhoVariant::low_dim:
            return std::pow(1.0 - (spec.n - 1.0) * u / spec.n, -(0.5 * (spec.n - 2.0) * spec.d + spec.nu));
        case RhoVariant::high_dim_lower:
            return std::pow(1.0 - spec.n * u / (spec.n + 1.0), 0.5 * spec.d - spec.nu - 1.0);
        case RhoVariant::high_dim_upper:
            return std::pow(1.0 - (spec.n - 1.0) * u / spec.n, 0.5 * spec.d - spec.nu - 1.0);
        case RhoVariant::kato:
        case RhoVariant::maruyama_strawderman:
            return 1.0;
    }
    throw std::logic_error("rho_tilde: unknown variant");
}

} // namespace detail

} // namespace predrisk

#endif // PREDRISK_PRIOR_HPP
