#ifndef PREDRISK_QUADRATURE_HPP
#define PREDRISK_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <mutex>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "predrisk/specfun.hpp"

namespace predrisk {

/// Thrown when an adaptive scheme fails to reach its tolerance within the
/// subdivision budget.
class QuadratureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class QuadScheme { gauss_jacobi, tanh_sinh, adaptive };

struct QuadratureConfig {
    int node_count = 128;
    QuadScheme scheme = QuadScheme::gauss_jacobi;
    double abs_tol = 1e-11;
    double rel_tol = 1e-9;

    void validate() const {
        if (node_count < 8) throw std::invalid_argument("QuadratureConfig: node_count must be >= 8");
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw std::invalid_argument("QuadratureConfig: tolerances must be positive");
    }
};

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline QuadRule gauss_legendre_m11(int n) {
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) {
                // one more polish pass, then stop
                p0 = 1.0;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

// Cached Gauss-Legendre rule mapped to [0,1].
inline const QuadRule& gauss_legendre_01(int n) {
    static std::mutex mu;
    static std::unordered_map<int, QuadRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    QuadRule r = gauss_legendre_m11(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = 0.5 * (1.0 + r.nodes[i]);
        r.weights[i] *= 0.5;
    }
    return cache.emplace(n, std::move(r)).first->second;
}

// Implicit-QL eigensolver for a symmetric tridiagonal matrix, tracking the
// first component of each eigenvector (Golub-Welsch needs only that row).
// diag/offdiag are modified in place; z starts as e_1.
inline void tridiag_eigen_first_row(std::vector<double>& diag, std::vector<double>& offdiag,
                                    std::vector<double>& z) {
    const int n = static_cast<int>(diag.size());
    offdiag.push_back(0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
                if (std::fabs(offdiag[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw QuadratureError("tridiag_eigen: QL iteration failed to converge");
                double g = (diag[l + 1] - diag[l]) / (2.0 * offdiag[l]);
                double r = std::hypot(g, 1.0);
                g = diag[m] - diag[l] + offdiag[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * offdiag[i];
                    double b = c * offdiag[i];
                    r = std::hypot(f, g);
                    offdiag[i + 1] = r;
                    if (r == 0.0) {
                        diag[i + 1] -= p;
                        offdiag[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = diag[i + 1] - p;
                    r = (diag[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    diag[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (r == 0.0 && i >= l) continue;
                diag[l] -= p;
                offdiag[l] = g;
                offdiag[m] = 0.0;
            }
        } while (m != l);
    }
    offdiag.pop_back();
}

} // namespace detail

/// Gauss-Jacobi rule on [0,1] for the weight t^beta_exp * (1-t)^alpha_exp,
/// alpha_exp, beta_exp > -1, via Golub-Welsch. Integrates
/// integral_0^1 t^beta_exp (1-t)^alpha_exp f(t) dt as sum w_i f(t_i).
inline QuadRule gauss_jacobi_01(int n, double alpha_exp, double beta_exp) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi_01: need at least one node");
    if (!(alpha_exp > -1.0) || !(beta_exp > -1.0))
        throw std::invalid_argument("gauss_jacobi_01: weight exponents must exceed -1");
    const double A = alpha_exp, B = beta_exp;
    std::vector<double> diag(n), off(std::max(0, n - 1));
    double apb = A + B;
    diag[0] = (B - A) / (apb + 2.0);
    for (int k = 1; k < n; ++k) {
        double den = (2.0 * k + apb) * (2.0 * k + apb + 2.0);
        diag[k] = (B * B - A * A) / den;
    }
    for (int k = 1; k < n; ++k) {
        double num, den;
        if (k == 1) {
            num = 4.0 * (1.0 + A) * (1.0 + B);
            den = (apb + 2.0) * (apb + 2.0) * (apb + 3.0);
        } else {
            num = 4.0 * k * (k + A) * (k + B) * (k + apb);
            den = (2.0 * k + apb) * (2.0 * k + apb) * (2.0 * k + apb + 1.0) * (2.0 * k + apb - 1.0);
        }
        off[k - 1] = std::sqrt(num / den);
    }
    std::vector<double> z(n, 0.0);
    z[0] = 1.0;
    detail::tridiag_eigen_first_row(diag, off, z);
    // total weight mass on [-1,1]: 2^{A+B+1} B(A+1, B+1)
    double mu0 = std::exp((apb + 1.0) * std::log(2.0) + log_beta(A + 1.0, B + 1.0));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return diag[a] < diag[b]; });
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // map x in [-1,1] -> t = (1+x)/2; the 2^{-(A+B+1)} Jacobian/weight factor
    // cancels mu0's power of two.
    for (int i = 0; i < n; ++i) {
        int j = order[i];
        rule.nodes[i] = 0.5 * (1.0 + diag[j]);
        rule.weights[i] = mu0 * z[j] * z[j] * std::pow(2.0, -(apb + 1.0));
    }
    return rule;
}

/// Globally adaptive quadrature of f on [a,b]: nested Gauss-Legendre 10/21
/// error estimate, worst-interval-first refinement.
inline double adaptive_gauss(const std::function<double(double)>& f, double a, double b,
                             double abs_tol, double rel_tol, int max_intervals = 4096) {
    const QuadRule& lo = detail::gauss_legendre_01(10);
    const QuadRule& hi = detail::gauss_legendre_01(21);
    auto eval = [&](double x0, double x1) {
        double h = x1 - x0;
        double ilo = 0.0, ihi = 0.0;
        for (std::size_t i = 0; i < lo.nodes.size(); ++i) ilo += lo.weights[i] * f(x0 + h * lo.nodes[i]);
        for (std::size_t i = 0; i < hi.nodes.size(); ++i) ihi += hi.weights[i] * f(x0 + h * hi.nodes[i]);
        ilo *= h;
        ihi *= h;
        return std::pair<double, double>(ihi, std::fabs(ihi - ilo));
    };
    struct Seg {
        double a, b, val, err;
        bool operator<(const Seg& o) const { return err < o.err; }
    };
    std::priority_queue<Seg> segs;
    auto [v0, e0] = eval(a, b);
    segs.push({a, b, v0, e0});
    double total = v0, total_err = e0;
    int count = 1;
    while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
        if (count >= max_intervals)
            throw QuadratureError("adaptive_gauss: subdivision limit reached without convergence");
        Seg s = segs.top();
        segs.pop();
        double mid = 0.5 * (s.a + s.b);
        auto [vl, el] = eval(s.a, mid);
        auto [vr, er] = eval(mid, s.b);
        total += vl + vr - s.val;
        total_err += el + er - s.err;
        segs.push({s.a, mid, vl, el});
        segs.push({mid, s.b, vr, er});
        ++count;
    }
    return total;
}

/// Tanh-sinh quadrature on (0,1) for integrands with integrable endpoint
/// singularities. The integrand receives both x and 1-x so that endpoint
/// factors can be evaluated without cancellation.
inline double tanh_sinh_01(const std::function<double(double, double)>& f,
                           double rel_tol = 1e-10, int max_level = 12) {
    const double t_max = 7.0; // transformed abscissa bound; weights underflow beyond
    double h = 1.0;
    auto point = [&](double t) {
        double u = 0.5 * M_PI * std::sinh(t);
        // x = 1/(1+e^{-2u}), 1-x = e^{-2u}/(1+e^{-2u}); evaluated from the
        // small side so neither endpoint distance loses precision.
        double e2u = std::exp(-2.0 * std::fabs(u));
        double side_small = e2u / (1.0 + e2u);
        double side_big = 1.0 / (1.0 + e2u);
        double x = (u >= 0.0) ? side_big : side_small;
        double omx = (u >= 0.0) ? side_small : side_big;
        if (x <= 0.0 || omx <= 0.0) return 0.0; // underflowed past all precision
        double ch = std::cosh(u);
        double w = 0.25 * M_PI * std::cosh(t) / (ch * ch);
        if (!(w > 0.0) || !std::isfinite(w)) return 0.0;
        double v = f(x, omx);
        return std::isfinite(v) ? w * v : 0.0;
    };
    double sum = point(0.0);
    for (double t = h; t <= t_max; t += h) {
        sum += point(t) + point(-t);
    }
    double prev = sum * h;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double t = h; t <= t_max; t += 2.0 * h) {
            add += point(t) + point(-t);
        }
        sum += add;
        double cur = sum * h;
        if (level >= 4 && std::fabs(cur - prev) <= rel_tol * std::fabs(cur) + 1e-300) {
            return cur;
        }
        prev = cur;
    }
    return prev;
}

} // namespace predrisk

#endif // PREDRISK_QUADRATURE_HPP
