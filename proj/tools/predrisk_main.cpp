// predrisk command-line tool: domination thresholds, risk surfaces,
// predictive density queries, and verification suites.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "predrisk/checks.hpp"
#include "predrisk/predrisk.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIncomplete = 3;
constexpr int kExitPartialGrid = 4;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        double v = std::stod(item, &pos);
        if (pos != item.size()) throw CLI::ValidationError(what, "cannot parse '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw CLI::ValidationError(what, "empty list");
    return out;
}

// --xi accepts either a comma list or a:b:k. The a:b:k form produces k
// points: log-spaced from a to b when a > 0; when a == 0 the grid is {0}
// plus k-1 log-spaced points from 1 to b.
std::vector<double> parse_xi_spec(const std::string& text) {
    if (text.find(':') == std::string::npos) {
        auto vals = parse_double_list(text, "--xi");
        for (double v : vals)
            if (v < 0.0) throw CLI::ValidationError("--xi", "values must be nonnegative");
        return vals;
    }
    double a = 0.0, b = 0.0;
    int k = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &a, &b, &k) != 3 || k < 1 || b < a || a < 0.0)
        throw CLI::ValidationError("--xi", "expected a:b:k with 0 <= a <= b and k >= 1");
    std::vector<double> out;
    if (k == 1) return {a};
    double lo = a;
    int points = k;
    if (a == 0.0) {
        out.push_back(0.0);
        lo = std::min(1.0, b);
        points = k - 1;
        if (points == 1) {
            out.push_back(b);
            return out;
        }
    }
    double ratio = std::log(b / lo) / (points - 1);
    for (int i = 0; i < points; ++i) out.push_back(lo * std::exp(i * ratio));
    out.back() = b;
    return out;
}

std::vector<double> default_nu_grid() {
    std::vector<double> nus{0.05};
    for (double v = 0.25; v <= 2.0 + 1e-12; v += 0.25) nus.push_back(v);
    return nus;
}

struct PriorChoice {
    predrisk::RhoVariant variant;
    double ms_b = 0.0;
};

PriorChoice parse_prior(const std::string& text) {
    using predrisk::RhoVariant;
    if (text == "lowdim") return {RhoVariant::low_dim};
    if (text == "highdim-lower") return {RhoVariant::high_dim_lower};
    if (text == "highdim-upper") return {RhoVariant::high_dim_upper};
    if (text == "kato") return {RhoVariant::kato};
    if (text.rfind("ms:", 0) == 0) {
        return {RhoVariant::maruyama_strawderman, std::stod(text.substr(3))};
    }
    throw CLI::ValidationError(
        "--prior", "expected lowdim|highdim-lower|highdim-upper|kato|ms:<b>, got '" + text + "'");
}

int resolve_threads_flag(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("PREDRISK_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0; // library resolves to hardware concurrency
}

json manifest_json(const std::string& command, const json& params, std::uint64_t seed,
                   double seconds) {
    return json{{"command", command},
                {"parameters", params},
                {"seed", seed},
                {"version", PREDRISK_VERSION},
                {"duration_seconds", seconds}};
}

void write_manifest(const std::string& out_path, const json& manifest) {
    std::ofstream mf(out_path + ".manifest.json");
    mf << manifest.dump(2) << "\n";
}

// ---------------------------------------------------------------- nustar ---

int cmd_nustar(int n, int d_min, int d_max, double tol, const std::string& out_path) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<predrisk::NuStarResult> rows;
    bool any_missing = false;
    for (int d = d_min; d <= d_max; ++d) {
        auto r = predrisk::nu_star(d, n, tol);
        any_missing = any_missing || !r.found;
        rows.push_back(r);
    }
    std::ostringstream csv;
    csv << "d,n,nu_star\n";
    for (const auto& r : rows) {
        csv << r.d << "," << r.n << ",";
        if (r.found) csv << fmt17(r.nu_star);
        csv << "\n";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json params{{"n", n}, {"d_min", d_min}, {"d_max", d_max}, {"tol", tol}};
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) {
            std::cerr << "error: cannot open " << out_path << "\n";
            return kExitUsage;
        }
        f << csv.str();
        write_manifest(out_path, manifest_json("nustar", params, 0, secs));
    } else {
        std::cout << csv.str();
    }
    return any_missing ? kExitIncomplete : kExitOk;
}

// ---------------------------------------------------------- risk-surface ---

int cmd_risk_surface(const predrisk::ExperimentGrid& grid, const std::string& prior_text,
                     const std::string& out_path) {
    auto t0 = std::chrono::steady_clock::now();
    predrisk::GridResult result = predrisk::run_grid(grid);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream f(out_path);
    if (!f) {
        std::cerr << "error: cannot open " << out_path << "\n";
        return kExitUsage;
    }
    f << "xi,nu,d,n,prior,riskdiff_mean,riskdiff_se,reps,trials,seed\n";
    for (const auto& cell : result.cells) {
        f << fmt17(cell.xi) << "," << fmt17(cell.nu) << "," << grid.d << "," << grid.n << ","
          << prior_text << "," << fmt17(cell.estimate.mean) << ","
          << fmt17(cell.estimate.std_error) << "," << cell.estimate.replicates << ","
          << cell.estimate.trials << "," << cell.estimate.seed << "\n";
        if (cell.failed) {
            std::cerr << "cell (xi=" << cell.xi << ", nu=" << cell.nu
                      << ") failed: " << cell.error << "\n";
        }
    }
    json params{{"d", grid.d},
                {"n", grid.n},
                {"prior", prior_text},
                {"nu", grid.nu_values},
                {"xi", grid.xi_values},
                {"reps", grid.replicates},
                {"trials", grid.trials},
                {"seed", grid.seed},
                {"threads", grid.threads}};
    write_manifest(out_path, manifest_json("risk-surface", params, grid.seed, secs));
    return result.failures > 0 ? kExitPartialGrid : kExitOk;
}

// -------------------------------------------------------------- density ---

int cmd_density(const std::string& mode, int d, int n, const std::vector<double>& xbar, double s,
                const std::vector<double>& y, std::optional<double> nu,
                const std::string& prior_text) {
    if (static_cast<int>(xbar.size()) != d || static_cast<int>(y.size()) != d) {
        std::cerr << "error: --xbar and --y must have exactly d = " << d << " entries\n";
        return kExitUsage;
    }
    auto t0 = std::chrono::steady_clock::now();
    double logpdf = 0.0;
    json extra;
    if (mode == "plugin") {
        logpdf = predrisk::plug_in_logpdf(y, xbar, s);
        extra["sigma2_hat"] = s;
    } else if (mode == "equivariant") {
        predrisk::SufficientStats stats(xbar, s, n);
        logpdf = predrisk::best_equivariant_logpdf(y, stats);
    } else if (mode == "gm") {
        if (!nu.has_value()) {
            std::cerr << "error: gm mode requires --nu\n";
            return kExitUsage;
        }
        PriorChoice prior = parse_prior(prior_text);
        predrisk::PriorSpec spec(*nu, prior.variant, n, d, prior.ms_b);
        predrisk::SufficientStats stats(xbar, s, n);
        predrisk::QuadratureConfig quad;
        logpdf = predrisk::gm_predictive_logpdf(y, stats, spec, quad);
        extra["nu"] = *nu;
        extra["prior"] = prior_text;
    } else {
        std::cerr << "error: unknown mode '" << mode << "'\n";
        return kExitUsage;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json params{{"mode", mode}, {"d", d}, {"n", n}, {"xbar", xbar}, {"s", s}, {"y", y}};
    for (auto& [k, v] : extra.items()) params[k] = v;
    json out{{"mode", mode},
             {"logpdf", logpdf},
             {"pdf", std::exp(logpdf)},
             {"manifest", manifest_json("density", params, 0, secs)}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- check ---

int cmd_check(const std::string& suite, std::uint64_t seed, int threads,
              const std::string& out_path) {
    using predrisk::CheckSuiteResult;
    std::vector<CheckSuiteResult> results;
    auto want = [&](const char* name) { return suite == "all" || suite == name; };
    if (want("lemma1")) results.push_back(predrisk::check_lemma1(seed));
    if (want("theorem1")) results.push_back(predrisk::check_theorem1(seed));
    if (want("normalization")) results.push_back(predrisk::check_normalization());
    if (want("sandwich")) results.push_back(predrisk::check_sandwich());
    if (want("lemma-bounds"))
        results.push_back(predrisk::check_lemma_bounds(seed, 5000, 10, threads));
    if (results.empty()) {
        std::cerr << "error: unknown suite '" << suite << "'\n";
        return kExitUsage;
    }
    bool all_pass = true;
    json report = json::array();
    for (const auto& res : results) {
        all_pass = all_pass && res.pass;
        std::printf("[%s] suite %-13s (%zu cases, %.2f s)\n", res.pass ? "PASS" : "FAIL",
                    res.suite.c_str(), res.cases.size(), res.seconds);
        json cases = json::array();
        for (const auto& c : res.cases) {
            if (!c.pass) {
                std::printf("  [FAIL] %s: observed %.6g bound %.6g %s\n", c.name.c_str(),
                            c.observed, c.bound, c.detail.c_str());
            }
            cases.push_back(json{{"name", c.name},
                                 {"pass", c.pass},
                                 {"observed", c.observed},
                                 {"bound", c.bound},
                                 {"detail", c.detail}});
        }
        report.push_back(json{{"suite", res.suite},
                              {"pass", res.pass},
                              {"seconds", res.seconds},
                              {"cases", cases}});
    }
    json doc{{"pass", all_pass},
             {"seed", seed},
             {"suites", report},
             {"manifest", manifest_json("check", json{{"suite", suite}}, seed, 0.0)}};
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        f << doc.dump(2) << "\n";
    }
    std::printf("%s\n", all_pass ? "all checks passed" : "CHECK FAILURES PRESENT");
    return all_pass ? kExitOk : kExitCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian predictive density estimation under unknown variance: "
                 "domination thresholds, KL risk-difference surfaces, density queries"};
    app.require_subcommand(1);

    // nustar
    auto* nustar = app.add_subcommand("nustar", "Domination thresholds nu* per dimension");
    int ns_n = 2, ns_dmin = 1, ns_dmax = 4;
    double ns_tol = 1e-6;
    std::string ns_out;
    nustar->add_option("--n", ns_n, "Number of observations")->check(CLI::Range(2, 1 << 20));
    nustar->add_option("--d-min", ns_dmin, "Smallest dimension")->check(CLI::Range(1, 1 << 20));
    nustar->add_option("--d-max", ns_dmax, "Largest dimension")->check(CLI::Range(1, 1 << 20));
    nustar->add_option("--tol", ns_tol, "Bisection tolerance");
    nustar->add_option("--out", ns_out, "Write CSV here instead of stdout");

    // risk-surface
    auto* surf = app.add_subcommand("risk-surface", "Monte Carlo KL risk-difference surface");
    int rs_d = 1, rs_n = 2, rs_reps = 5000, rs_trials = 10, rs_threads = 0;
    std::uint64_t rs_seed = 0;
    std::string rs_prior = "lowdim", rs_nu, rs_xi, rs_out;
    surf->add_option("--d", rs_d, "Dimension")->required()->check(CLI::Range(1, 1 << 20));
    surf->add_option("--n", rs_n, "Number of observations")->required()->check(CLI::Range(2, 1 << 20));
    surf->add_option("--prior", rs_prior,
                     "Prior: lowdim|highdim-lower|highdim-upper|kato|ms:<b>")->required();
    surf->add_option("--nu", rs_nu, "Comma list of nu values (default 0.05,0.25,...,2)");
    surf->add_option("--xi", rs_xi, "Comma list or a:b:k (default 0:1000:21)");
    surf->add_option("--reps", rs_reps, "Replicates per trial")->check(CLI::Range(1, 1 << 30));
    surf->add_option("--trials", rs_trials, "Trials to average")->check(CLI::Range(1, 1 << 20));
    surf->add_option("--seed", rs_seed, "64-bit unsigned seed");
    surf->add_option("--threads", rs_threads, "Worker threads (0 = auto, PREDRISK_THREADS)");
    surf->add_option("--out", rs_out, "Output CSV path")->required();

    // density
    auto* dens = app.add_subcommand("density", "Evaluate one predictive density");
    std::string de_mode, de_xbar, de_y, de_prior = "lowdim";
    int de_d = 1, de_n = 2;
    double de_s = 1.0;
    double de_nu = -1.0;
    dens->add_option("--mode", de_mode, "plugin|equivariant|gm")->required();
    dens->add_option("--d", de_d, "Dimension")->required();
    dens->add_option("--n", de_n, "Number of observations")->required();
    dens->add_option("--xbar", de_xbar, "Comma list, sample mean (plugin: mu-hat)")->required();
    dens->add_option("--s", de_s, "Scaled deviance (plugin: sigma2-hat)")->required();
    dens->add_option("--y", de_y, "Comma list, evaluation point")->required();
    dens->add_option("--nu", de_nu, "Prior shape (gm mode)");
    dens->add_option("--prior", de_prior, "Prior variant (gm mode)");

    // check
    auto* chk = app.add_subcommand("check", "Run verification suites");
    std::string ck_suite = "all", ck_out;
    std::uint64_t ck_seed = 1;
    int ck_threads = 0;
    chk->add_option("--suite", ck_suite,
                    "lemma1|theorem1|normalization|sandwich|lemma-bounds|all");
    chk->add_option("--seed", ck_seed, "64-bit unsigned seed");
    chk->add_option("--threads", ck_threads, "Worker threads (0 = auto)");
    chk->add_option("--out", ck_out, "Write JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (nustar->parsed()) {
            if (ns_dmin > ns_dmax) {
                std::cerr << "error: --d-min must not exceed --d-max\n";
                return kExitUsage;
            }
            return cmd_nustar(ns_n, ns_dmin, ns_dmax, ns_tol, ns_out);
        }
        if (surf->parsed()) {
            PriorChoice prior = parse_prior(rs_prior);
            predrisk::ExperimentGrid grid;
            grid.d = rs_d;
            grid.n = rs_n;
            grid.variant = prior.variant;
            grid.ms_b = prior.ms_b;
            grid.nu_values = rs_nu.empty() ? default_nu_grid() : parse_double_list(rs_nu, "--nu");
            grid.xi_values = rs_xi.empty() ? parse_xi_spec("0:1000:21") : parse_xi_spec(rs_xi);
            grid.replicates = rs_reps;
            grid.trials = rs_trials;
            grid.seed = rs_seed;
            grid.threads = resolve_threads_flag(rs_threads);
            return cmd_risk_surface(grid, rs_prior, rs_out);
        }
        if (dens->parsed()) {
            std::optional<double> nu;
            if (de_nu > 0.0) nu = de_nu;
            return cmd_density(de_mode, de_d, de_n, parse_double_list(de_xbar, "--xbar"), de_s,
                               parse_double_list(de_y, "--y"), nu, de_prior);
        }
        if (chk->parsed()) {
            return cmd_check(ck_suite, ck_seed, resolve_threads_flag(ck_threads), ck_out);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIncomplete;
    }
    return kExitUsage;
}
