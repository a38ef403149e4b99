#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ordsieve/math/gauss_legendre.hpp"
#include "ordsieve/sieve.hpp"

using namespace ordsieve;
using Catch::Matchers::WithinAbs;

namespace {

// quadratic-form route through pi_matrix, used as an independent oracle
double h_cdf_quadform(int k, const std::vector<double>& theta, double v) {
    Eigen::VectorXd a(k + 1);
    double dot = 0.0;
    for (int i = 1; i <= k; ++i) dot += theta[i - 1] / (i + 1);
    a(0) = 1.0 - dot;
    for (int i = 1; i <= k; ++i) a(i) = theta[i - 1];
    const double num = a.dot(pi_matrix(k, v) * a);
    const double den = a.dot(pi_matrix(k, 1.0) * a);
    return num / den;
}

}  // namespace

TEST_CASE("legendre rho closed forms", "[sieve]") {
    CHECK(legendre_rho(0, 0.3) == 1.0);
    CHECK_THAT(legendre_rho(1, 0.5), WithinAbs(0.0, 1e-15));
    CHECK_THAT(legendre_rho(2, 0.5), WithinAbs(-std::sqrt(5.0) / 2.0, 1e-14));
    CHECK_THAT(legendre_rho(1, 1.0), WithinAbs(std::sqrt(3.0), 1e-14));
}

TEST_CASE("legendre rho orthonormality", "[sieve]") {
    const GaussLegendre rule = gauss_legendre01(64);
    for (int j = 0; j <= 8; ++j) {
        for (int l = j; l <= 8; ++l) {
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                acc += rule.weights[i] * legendre_rho(j, rule.nodes[i]) *
                       legendre_rho(l, rule.nodes[i]);
            CHECK_THAT(acc, WithinAbs(j == l ? 1.0 : 0.0, 1e-10));
        }
    }
}

TEST_CASE("pi matrix entries", "[sieve]") {
    const auto m1 = pi_matrix(1, 1.0);
    CHECK_THAT(m1(0, 0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(m1(0, 1), WithinAbs(0.5, 1e-15));
    CHECK_THAT(m1(1, 0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(m1(1, 1), WithinAbs(1.0 / 3.0, 1e-15));
    const auto m0 = pi_matrix(3, 0.0);
    CHECK(m0.cwiseAbs().maxCoeff() == 0.0);
    const auto mh = pi_matrix(1, 0.5);
    CHECK_THAT(mh(0, 0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(mh(0, 1), WithinAbs(0.125, 1e-15));
    CHECK_THAT(mh(1, 1), WithinAbs(1.0 / 24.0, 1e-15));
}

TEST_CASE("mu moments", "[sieve]") {
    CHECK_THAT(mu_moment(1, 0), WithinAbs(std::sqrt(3.0) / 6.0, 1e-13));
    CHECK_THAT(mu_moment(2, 0), WithinAbs(std::sqrt(5.0) / 30.0, 1e-13));
    CHECK_THAT(mu_moment(1, 1), WithinAbs(std::sqrt(3.0) / 6.0, 1e-13));
    // orthogonality: int rho_0 * u^{l} rho_l has no rho_0 component for l >= 1;
    // mu_l(m) with m = 0 equals the leading projection, checked above.  Spot
    // check a higher moment against direct fine quadrature.
    const GaussLegendre rule = gauss_legendre01(96);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * std::pow(rule.nodes[i], 3 + 2) * legendre_rho(3, rule.nodes[i]);
    CHECK_THAT(mu_moment(3, 2), WithinAbs(acc, 1e-12));
}

TEST_CASE("theta feasibility", "[sieve]") {
    CHECK(theta_feasible(4, {0.0, 0.0, 0.0, 0.0}, 5.0));
    // k=1: bound is c itself (1 + sqrt(1) ln 1 = 1); mu_1(0) = sqrt(3)/6
    const double mu10 = std::sqrt(3.0) / 6.0;
    CHECK_FALSE(theta_feasible(1, {5.0 / mu10 * 1.01}, 5.0));
    CHECK(theta_feasible(1, {5.0 / mu10 * 0.99}, 5.0));
    // boundary saturation stays feasible (closed set): step just inside
    double t = 5.0 / mu10;
    while (std::fabs(t * mu10) > 5.0) t = std::nextafter(t, 0.0);
    CHECK(theta_feasible(1, {t}, 5.0));
}

TEST_CASE("h_cdf identity at theta = 0 and endpoints", "[sieve]") {
    for (int k : {1, 3, 6}) {
        const std::vector<double> zero(k, 0.0);
        for (double v : {0.0, 0.1, 0.25, 0.5, 0.9, 1.0}) {
            CHECK(h_cdf(k, zero, v) == v);
        }
    }
    const std::vector<double> th{0.3, -0.2, 0.1};
    CHECK(h_cdf(3, th, 0.0) == 0.0);
    CHECK(h_cdf(3, th, 1.0) == 1.0);
}

TEST_CASE("h_cdf equals the quadratic form route", "[sieve]") {
    const std::vector<std::vector<double>> thetas = {
        {0.4}, {0.3, -0.2}, {0.25, -0.12, 0.07, -0.04}, {0.2, 0.1, -0.3, 0.05, 0.02, -0.01}};
    for (const auto& th : thetas) {
        const int k = static_cast<int>(th.size());
        for (double v : {0.05, 0.3, 0.5, 0.77, 0.95}) {
            CHECK_THAT(h_cdf(k, th, v), WithinAbs(h_cdf_quadform(k, th, v), 1e-13));
        }
    }
}

TEST_CASE("h_cdf matches quadrature of the squared-polynomial density", "[sieve]") {
    // k=1: density proportional to (a0 + theta*u)^2
    const double t = 0.35;
    const std::vector<double> th{t};
    const GaussLegendre rule = gauss_legendre01(64);
    auto dens = [&](double u) {
        const double a0 = 1.0 - t / 2.0;
        const double p = a0 + t * u;
        return p * p;
    };
    double den = 0.0, num = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        den += rule.weights[i] * dens(rule.nodes[i]);
        num += 0.5 * rule.weights[i] * dens(0.5 * rule.nodes[i]);  // map to [0, 0.5]
    }
    CHECK_THAT(h_cdf(1, th, 0.5), WithinAbs(num / den, 1e-10));
}

TEST_CASE("h_cdf validates input", "[sieve]") {
    CHECK_THROWS_AS(h_cdf(1, {0.1, 0.2}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(h_cdf(1, {0.1}, 1.5), std::domain_error);
    // the implied density integrates to one, so by Cauchy-Schwarz the
    // denominator is >= 1 for every theta; the < 1e-12 guard is defensive
    const std::vector<double> th{0.9, -0.7, 0.5};
    Eigen::VectorXd a(4);
    double dot = 0.0;
    for (int i = 1; i <= 3; ++i) dot += th[i - 1] / (i + 1);
    a(0) = 1.0 - dot;
    for (int i = 1; i <= 3; ++i) a(i) = th[i - 1];
    CHECK(a.dot(pi_matrix(3, 1.0) * a) >= 1.0 - 1e-14);
}

TEST_CASE("sieve cdf reduces to base at theta = 0", "[sieve]") {
    const std::vector<BaseCdf> bases = {
        BaseCdf::uniform(-1.0, 2.0), BaseCdf::normal(0.0, 0.25),
        BaseCdf::truncnormal(2.0, 1.0), BaseCdf::exponential(1.0)};
    for (const auto& base : bases) {
        const SieveCdf f(base, 4, {0.0, 0.0, 0.0, 0.0});
        for (double x : {-0.5, 0.0, 0.3, 1.0, 2.5}) {
            CHECK(f.cdf(x) == base.cdf(x));
        }
        for (double p : {0.05, 0.5, 0.95}) {
            CHECK(f.quantile(p) == base.quantile(p));
        }
    }
}

TEST_CASE("sieve cdf is monotone with valid endpoints", "[sieve]") {
    const SieveCdf f(BaseCdf::normal(0.0, 0.25), 4, {0.3, -0.2, 0.1, -0.05});
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = -3.0 + 6.0 * i / 1000.0;
        const double v = f.cdf(x);
        CHECK(v >= prev - 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
    CHECK_THAT(f.cdf(-8.0), WithinAbs(0.0, 1e-12));
    CHECK_THAT(f.cdf(8.0), WithinAbs(1.0, 1e-12));
}

TEST_CASE("sieve quantile round trip to 1e-10", "[sieve]") {
    const std::vector<SieveCdf> fs = {
        SieveCdf(BaseCdf::normal(0.0, 0.25), 6, {0.25, -0.12, 0.07, -0.04, 0.10, -0.08}),
        SieveCdf(BaseCdf::exponential(1.0), 6, {-0.20, 0.12, -0.07, 0.05, -0.12, 0.09}),
        SieveCdf(BaseCdf::truncnormal(2.0, 1.0), 4, {-0.3, 0.15, -0.08, 0.04}),
        SieveCdf(BaseCdf::uniform(0.0, 1.0), 3, {0.5, -0.25, 0.1})};
    for (const auto& f : fs) {
        for (double p = 0.001; p < 0.9995; p += 0.02) {
            const double x = f.quantile(p);
            CHECK_THAT(f.cdf(x), WithinAbs(p, 1e-10));
        }
    }
}

TEST_CASE("sieve quantile boundary errors", "[sieve]") {
    const SieveCdf f(BaseCdf::exponential(1.0), 2, {0.1, -0.05});
    CHECK_THROWS_AS(f.quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(f.quantile(1.0), std::domain_error);
}

TEST_CASE("sieve cdf quadrature oracle over normal base", "[sieve]") {
    const SieveCdf f(BaseCdf::normal(0.0, 0.25), 4, {0.25, -0.12, 0.07, -0.04});
    // integrate the implied density numerically from far below
    const GaussLegendre rule = gauss_legendre(16);
    auto integrate_to = [&](double x) {
        const double a = -4.0;  // 8 standard deviations below the mean
        const int segs = 64;
        double acc = 0.0;
        for (int seg = 0; seg < segs; ++seg) {
            const double lo = a + (x - a) * seg / segs;
            const double hi = a + (x - a) * (seg + 1) / segs;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[i];
                acc += 0.5 * (hi - lo) * rule.weights[i] * f.density(t);
            }
        }
        return acc;
    };
    for (double x : {-1.0, -0.3, 0.0, 0.4, 1.2}) {
        CHECK_THAT(f.cdf(x), WithinAbs(integrate_to(x), 1e-8));
    }
}

TEST_CASE("sieve record round trip is bit exact", "[sieve]") {
    const SieveCdf f(BaseCdf::truncnormal(2.0, 1.0), 5,
                     {0.123456789012345678, -0.2, 1.0 / 3.0, -0.05, 0.0123456789});
    const SieveCdf g = sieve_from_record(sieve_to_record(f));
    CHECK(g.base().kind() == f.base().kind());
    CHECK(std::bit_cast<std::uint64_t>(g.base().param1()) ==
          std::bit_cast<std::uint64_t>(f.base().param1()));
    CHECK(std::bit_cast<std::uint64_t>(g.base().param2()) ==
          std::bit_cast<std::uint64_t>(f.base().param2()));
    CHECK(g.order() == f.order());
    CHECK(std::bit_cast<std::uint64_t>(g.bound_constant()) ==
          std::bit_cast<std::uint64_t>(f.bound_constant()));
    for (int i = 0; i < 5; ++i) {
        CHECK(std::bit_cast<std::uint64_t>(g.theta()[i]) ==
              std::bit_cast<std::uint64_t>(f.theta()[i]));
    }
    CHECK_THROWS_AS(sieve_from_record("base = normal\n"), std::invalid_argument);
}

TEST_CASE("sieve construction validates theta", "[sieve]") {
    CHECK_THROWS_AS(SieveCdf(BaseCdf::exponential(1.0), 2, {0.1}),
                    std::invalid_argument);
    const double mu10 = std::sqrt(3.0) / 6.0;
    CHECK_THROWS_AS(SieveCdf(BaseCdf::exponential(1.0), 1, {5.0 / mu10 * 1.01}),
                    std::invalid_argument);
}
