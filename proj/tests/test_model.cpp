#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "predrisk/model.hpp"
#include "predrisk/quadrature.hpp"
#include "predrisk/rng.hpp"
#include "predrisk/sampling.hpp"

using namespace predrisk;

namespace {

SufficientStats stats_from_raw(const std::vector<std::vector<double>>& xs) {
    const int n = static_cast<int>(xs.size());
    const std::size_t d = xs[0].size();
    std::vector<double> xbar(d, 0.0);
    for (const auto& x : xs)
        for (std::size_t i = 0; i < d; ++i) xbar[i] += x[i];
    for (auto& v : xbar) v /= n;
    double s = 0.0;
    for (const auto& x : xs)
        for (std::size_t i = 0; i < d; ++i) s += (x[i] - xbar[i]) * (x[i] - xbar[i]);
    return SufficientStats(std::move(xbar), s, n);
}

} // namespace

TEST_CASE("update_stats worked example") {
    SufficientStats st({0.0}, 2.0, 2);
    SufficientStats next = update_stats(st, {3.0});
    CHECK(next.count == 3);
    CHECK(next.xbar[0] == Approx(1.0).margin(1e-15));
    CHECK(next.s == Approx(8.0).margin(1e-15));
}

TEST_CASE("update_stats no-op when y equals the mean, and s never decreases") {
    SufficientStats st({0.4, -1.2}, 3.7, 4);
    SufficientStats same = update_stats(st, {0.4, -1.2});
    CHECK(same.xbar[0] == Approx(0.4).margin(1e-15));
    CHECK(same.xbar[1] == Approx(-1.2).margin(1e-15));
    CHECK(same.s == Approx(3.7).margin(1e-15));

    Rng rng(RngState{5, 0});
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> y{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        CHECK(update_stats(st, y).s >= st.s);
    }
    CHECK_THROWS_AS(update_stats(st, {1.0}), std::invalid_argument);
}

TEST_CASE("update_stats matches recomputation from raw samples") {
    Rng rng(RngState{31, 0});
    for (int rep = 0; rep < 50; ++rep) {
        int n = 2 + static_cast<int>(rng.next_u64() % 4);
        int d = 1 + static_cast<int>(rng.next_u64() % 3);
        std::vector<std::vector<double>> xs(n, std::vector<double>(d));
        for (auto& x : xs)
            for (auto& v : x) v = 6.0 * rng.uniform() - 3.0;
        std::vector<double> y(d);
        for (auto& v : y) v = 6.0 * rng.uniform() - 3.0;

        SufficientStats base = stats_from_raw(xs);
        SufficientStats incremental = update_stats(base, y);
        xs.push_back(y);
        SufficientStats direct = stats_from_raw(xs);
        for (int i = 0; i < d; ++i)
            CHECK(incremental.xbar[i] == Approx(direct.xbar[i]).margin(1e-12));
        CHECK(incremental.s == Approx(direct.s).epsilon(1e-12));
    }
}

TEST_CASE("u() lies in [0,1) and is scale equivariant") {
    SufficientStats st({1.3, 0.2}, 2.1, 3);
    double u = st.u();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    for (double c : {0.1, 2.0, 37.5}) {
        std::vector<double> scaled{1.3 * c, 0.2 * c};
        SufficientStats st2(scaled, 2.1 * c * c, 3);
        CHECK(st2.u() == Approx(u).epsilon(1e-14));
    }
}

TEST_CASE("best_equivariant_logpdf closed-form value and invariances") {
    SufficientStats st({0.0}, 1.0, 2);
    // c_R (1/(pi s) * n/(n+1))^{1/2} at the mode = sqrt(2)/(sqrt(3) pi)
    double expect = std::log(std::sqrt(2.0) / (std::sqrt(3.0) * M_PI));
    CHECK(best_equivariant_logpdf({0.0}, st) == Approx(expect).epsilon(1e-13));

    SufficientStats shifted({5.5}, 1.0, 2);
    CHECK(best_equivariant_logpdf({5.5}, shifted)
          == Approx(best_equivariant_logpdf({0.0}, st)).epsilon(1e-14));

    SufficientStats zero_s({0.0}, 0.0, 2);
    CHECK_THROWS_AS(best_equivariant_logpdf({0.0}, zero_s), std::domain_error);
}

TEST_CASE("best_equivariant density integrates to one (d=1)") {
    SufficientStats st({0.7}, 1.9, 2);
    auto f = [&](double theta) {
        double c = std::cos(theta);
        double y = 0.7 + std::tan(theta);
        return std::exp(best_equivariant_logpdf({y}, st)) / (c * c);
    };
    double integral = adaptive_gauss(f, -0.5 * M_PI, 0.5 * M_PI, 1e-10, 1e-9);
    CHECK(integral == Approx(1.0).margin(1e-7));
}

TEST_CASE("plug_in_logpdf values and normalization") {
    CHECK(plug_in_logpdf({0.0}, {0.0}, 1.0) == Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-14));
    CHECK(plug_in_logpdf({1.0, 1.0}, {0.0, 0.0}, 1.0)
          == Approx(-std::log(2.0 * M_PI) - 1.0).epsilon(1e-14));
    CHECK_THROWS_AS(plug_in_logpdf({0.0}, {0.0}, 0.0), std::domain_error);
    CHECK_THROWS_AS(plug_in_logpdf({0.0}, {0.0, 1.0}, 1.0), std::invalid_argument);

    auto f = [&](double theta) {
        double c = std::cos(theta);
        double y = 0.3 + std::tan(theta);
        return std::exp(plug_in_logpdf({y}, {0.3}, 2.3)) / (c * c);
    };
    CHECK(adaptive_gauss(f, -0.5 * M_PI, 0.5 * M_PI, 1e-10, 1e-9) == Approx(1.0).margin(1e-7));
}

TEST_CASE("best-equivariant density has constant risk") {
    // E[log p_true(y) - log pR(y | xbar, s)] must not depend on (mu, sigma^2)
    const int reps = 40000;
    auto estimate = [&](const ModelConfig& model, std::uint64_t stream) {
        Rng rng(RngState{137, stream});
        double sigma2 = 1.0 / model.eta;
        double acc = 0.0, acc2 = 0.0;
        for (int i = 0; i < reps; ++i) {
            Triplet t = sample_triplet(rng, model);
            SufficientStats st(std::move(t.xbar), t.s, model.n);
            double v = plug_in_logpdf(t.y, model.mu, sigma2) - best_equivariant_logpdf(t.y, st);
            acc += v;
            acc2 += v * v;
        }
        double mean = acc / reps;
        double se = std::sqrt((acc2 / reps - mean * mean) / reps);
        return std::pair<double, double>(mean, se);
    };
    ModelConfig a(2, 2, {0.0, 0.0}, 1.0);
    ModelConfig b(2, 2, {3.0, -1.0}, 0.25);
    auto [ma, sa] = estimate(a, 0);
    auto [mb, sb] = estimate(b, 1);
    CHECK(std::fabs(ma - mb) < 3.0 * std::hypot(sa, sb));
}

TEST_CASE("ModelConfig validation and xi accessor") {
    CHECK_THROWS_AS(ModelConfig(1, 1, {0.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelConfig(2, 2, {0.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelConfig(2, 1, {0.0}, 0.0), std::invalid_argument);
    ModelConfig m(3, 2, {3.0, 4.0}, 0.04);
    CHECK(m.xi() == Approx(1.0).epsilon(1e-14));
}
