#ifndef PREDRISK_RISK_HPP
#define PREDRISK_RISK_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "predrisk/bayes.hpp"
#include "predrisk/model.hpp"
#include "predrisk/prior.hpp"
#include "predrisk/rng.hpp"
#include "predrisk/sampling.hpp"

// Monte Carlo estimation of Kullback-Leibler risk differences
// E[log p_GM - log p_R]. A positive estimate at (xi, nu) means the
// Gaussian-mixture Bayes density beats the best equivariant one there.

namespace predrisk {

/// Raised when a Monte Carlo cell cannot be completed (NaN replicate, etc.).
class ComputationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RiskEstimate {
    double mean = 0.0;
    double std_error = 0.0; // across trial means
    int replicates = 0;
    int trials = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

inline std::uint64_t mix_in(std::uint64_t h, std::uint64_t x) {
    return mix64(h ^ mix64(x + 0x9E3779B97F4A7C15ULL));
}

// Per-cell seed: depends on the user seed and the cell coordinates, never on
// grid layout, so permuting grid axes cannot change any cell's estimate.
inline std::uint64_t cell_seed(std::uint64_t seed, double xi, const PriorSpec& spec) {
    std::uint64_t h = mix_in(0x8F0C5E1D2B3A4968ULL, seed);
    h = mix_in(h, std::bit_cast<std::uint64_t>(xi));
    h = mix_in(h, std::bit_cast<std::uint64_t>(spec.nu));
    h = mix_in(h, static_cast<std::uint64_t>(spec.variant));
    h = mix_in(h, std::bit_cast<std::uint64_t>(spec.ms_b));
    h = mix_in(h, (static_cast<std::uint64_t>(spec.n) << 32) | static_cast<std::uint64_t>(spec.d));
    return h;
}

} // namespace detail

/// Deterministic trial-averaged Monte Carlo harness. eval(flat_index) is
/// called for indices 0 .. replicates*trials-1 (replicate r of trial t has
/// index t*replicates + r); results are reduced in fixed index order, so the
/// estimate is bitwise independent of the worker count.
template <typename Eval>
RiskEstimate mc_across_trials(int replicates, int trials, std::uint64_t seed, Eval&& eval,
                              int threads = 0) {
    if (replicates < 1 || trials < 1)
        throw std::invalid_argument("mc_across_trials: replicates and trials must be >= 1");
    const std::int64_t total = static_cast<std::int64_t>(replicates) * trials;
    std::vector<double> values(static_cast<std::size_t>(total));
    int n_workers = std::min<std::int64_t>(detail::resolve_threads(threads), total);
    std::vector<std::string> worker_errors(n_workers);
    {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        std::int64_t chunk = (total + n_workers - 1) / n_workers;
        for (int wk = 0; wk < n_workers; ++wk) {
            std::int64_t lo = wk * chunk;
            std::int64_t hi = std::min(total, lo + chunk);
            pool.emplace_back([&, wk, lo, hi]() {
                try {
                    for (std::int64_t i = lo; i < hi; ++i) {
                        values[static_cast<std::size_t>(i)] = eval(static_cast<std::uint64_t>(i));
                    }
                } catch (const std::exception& e) {
                    worker_errors[wk] = e.what();
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& err : worker_errors) {
        if (!err.empty()) throw ComputationError("mc_across_trials: " + err);
    }
    std::vector<double> trial_means(trials);
    for (int t = 0; t < trials; ++t) {
        double acc = 0.0;
        for (int r = 0; r < replicates; ++r) {
            double v = values[static_cast<std::size_t>(t) * replicates + r];
            if (std::isnan(v)) {
                throw ComputationError("mc_across_trials: NaN at replicate " + std::to_string(r)
                                       + " of trial " + std::to_string(t));
            }
            acc += v;
        }
        trial_means[t] = acc / replicates;
    }
    RiskEstimate est;
    est.replicates = replicates;
    est.trials = trials;
    est.seed = seed;
    double mean = 0.0;
    for (double m : trial_means) mean += m;
    mean /= trials;
    est.mean = mean;
    if (trials > 1) {
        double ss = 0.0;
        for (double m : trial_means) ss += (m - mean) * (m - mean);
        est.std_error = std::sqrt(ss / (trials * (trials - 1.0)));
    }
    return est;
}

/// Risk-difference MC at an explicit model configuration (used by the
/// parameterization-invariance checks; the public xi entry point below fixes
/// mu = sqrt(xi) e_1, sigma^2 = 1).
inline RiskEstimate kl_risk_diff_mc_model(const ModelConfig& model, const PriorSpec& spec,
                                          int replicates, int trials, std::uint64_t stream_seed,
                                          int threads = 0) {
    if (model.n != spec.n || model.d != spec.d)
        throw std::invalid_argument("kl_risk_diff_mc: model and prior dimensions disagree");
    const JIntegrator j_n(spec, spec.n);
    const JIntegrator j_np1(spec, spec.n + 1);
    const double log_cb = log_bayes_constant(spec);
    const double nu = spec.nu;
    auto eval = [&](std::uint64_t i) {
        Rng rng(RngState{stream_seed, i});
        Triplet trip = sample_triplet(rng, model);
        SufficientStats stats(std::move(trip.xbar), trip.s, model.n);
        SufficientStats next = update_stats(stats, trip.y);
        return log_cb - nu * (std::log(next.s) - std::log(stats.s))
               + j_np1.log_j(next.w()) - j_n.log_j(stats.w());
    };
    RiskEstimate est = mc_across_trials(replicates, trials, stream_seed, eval, threads);
    return est;
}

/// E[log p_GM - log p_R] at noncentrality xi, estimated over
/// replicates x trials draws of (y, xbar, s) with mu = sqrt(xi) e_1 and
/// sigma^2 = 1 (the risk difference depends on (mu, sigma^2) only through xi).
inline RiskEstimate kl_risk_diff_mc(double xi, const PriorSpec& spec, int replicates, int trials,
                                    std::uint64_t seed, int threads = 0) {
    if (!(xi >= 0.0)) throw std::domain_error("kl_risk_diff_mc: xi must be nonnegative");
    std::vector<double> mu(spec.d, 0.0);
    mu[0] = std::sqrt(xi);
    ModelConfig model(spec.n, spec.d, std::move(mu), 1.0);
    std::uint64_t cseed = detail::cell_seed(seed, xi, spec);
    RiskEstimate est = kl_risk_diff_mc_model(model, spec, replicates, trials, cseed, threads);
    est.seed = seed;
    return est;
}

struct ExperimentGrid {
    int d = 1;
    int n = 2;
    std::vector<double> xi_values;
    std::vector<double> nu_values;
    RhoVariant variant = RhoVariant::low_dim;
    double ms_b = 0.0;
    int replicates = 5000;
    int trials = 10;
    std::uint64_t seed = 0;
    int threads = 0;
};

struct GridCell {
    double xi = 0.0;
    double nu = 0.0;
    RiskEstimate estimate;
    bool failed = false;
    std::string error;
};

struct GridResult {
    std::vector<GridCell> cells;
    int failures = 0;
};

/// Full (xi, nu) surface. Rows come out in (xi, nu) lexicographic order;
/// per-cell failures are recorded and the run continues.
inline GridResult run_grid(const ExperimentGrid& grid) {
    std::vector<double> xis = grid.xi_values;
    std::vector<double> nus = grid.nu_values;
    std::sort(xis.begin(), xis.end());
    std::sort(nus.begin(), nus.end());
    GridResult result;
    for (double xi : xis) {
        for (double nu : nus) {
            GridCell cell;
            cell.xi = xi;
            cell.nu = nu;
            try {
                PriorSpec spec(nu, grid.variant, grid.n, grid.d, grid.ms_b);
                cell.estimate = kl_risk_diff_mc(xi, spec, grid.replicates, grid.trials, grid.seed,
                                                grid.threads);
            } catch (const std::exception& e) {
                cell.failed = true;
                cell.error = e.what();
                cell.estimate.mean = std::numeric_limits<double>::quiet_NaN();
                cell.estimate.std_error = std::numeric_limits<double>::quiet_NaN();
                cell.estimate.replicates = grid.replicates;
                cell.estimate.trials = grid.trials;
                cell.estimate.seed = grid.seed;
                ++result.failures;
            }
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

} // namespace predrisk

#endif // PREDRISK_RISK_HPP
