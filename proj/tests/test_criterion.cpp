#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ordsieve/criterion.hpp"
#include "ordsieve/math/gauss_legendre.hpp"
#include "ordsieve/orderstat.hpp"
#include "ordsieve/random.hpp"

using namespace ordsieve;
using Catch::Matchers::WithinAbs;

namespace {

// Random sample with guaranteed row ordering x_r <= x_s.
ObservedSample random_sample(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    std::vector<double> xr(n), xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = scale * rng.normal();
        xr[i] = z;
        xs[i] = z + scale * std::fabs(rng.normal());
    }
    return ObservedSample(std::move(xr), std::move(xs));
}

// Independent oracle: tensor Gauss-Legendre quadrature of
// (1/4k^2) int_{(-k,k)^2} |psi_data - psi_sim|^2 dt via the empirical ch.f.
double quadrature_criterion(const ObservedSample& data, const ObservedSample& sim,
                            double kappa, int nodes) {
    const GaussLegendre rule = gauss_legendre(nodes);
    double total = 0.0;
    for (int a = 0; a < nodes; ++a) {
        for (int b = 0; b < nodes; ++b) {
            const double t1 = kappa * rule.nodes[a];
            const double t2 = kappa * rule.nodes[b];
            const std::complex<double> diff =
                empirical_chf(data, t1, t2) - empirical_chf(sim, t1, t2);
            total += rule.weights[a] * rule.weights[b] * std::norm(diff);
        }
    }
    return 0.25 * total;
}

}  // namespace

TEST_CASE("q_kernel closed forms", "[criterion]") {
    CHECK(q_kernel(0.0, 0.0, 1.0) == 1.0);
    CHECK(q_kernel(0.0, 0.0, 7.3) == 1.0);
    CHECK_THAT(q_kernel(std::numbers::pi, 1.0, 1.0), WithinAbs(0.0, 1e-15));
    const double s1 = std::sin(1.0);
    CHECK_THAT(q_kernel(1.0, 1.0, 1.0), WithinAbs(s1 * s1, 1e-15));
    // bounded by 1, even in each argument
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const double a = 10.0 * (rng.uniform01() - 0.5);
        const double b = 10.0 * (rng.uniform01() - 0.5);
        const double q = q_kernel(a, b, 2.0);
        CHECK(std::fabs(q) <= 1.0);
        CHECK(q == q_kernel(-a, -b, 2.0));
        CHECK(q == q_kernel(-a, b, 2.0));
    }
}

TEST_CASE("empirical_chf closed forms", "[criterion]") {
    const ObservedSample one({0.0}, {0.0});
    CHECK(empirical_chf(one, 0.7, -2.1) == std::complex<double>(1.0, 0.0));

    const ObservedSample two({0.0, std::numbers::pi}, {0.5, 4.0});
    CHECK(empirical_chf(two, 0.0, 0.0) == std::complex<double>(1.0, 0.0));

    // rows (0,0) and (pi,pi) at t = (1,0): (1 + e^{i pi})/2 = 0
    const ObservedSample cancel({0.0, std::numbers::pi}, {0.0, std::numbers::pi});
    const auto z = empirical_chf(cancel, 1.0, 0.0);
    CHECK_THAT(z.real(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(z.imag(), WithinAbs(0.0, 1e-15));

    const ObservedSample r = random_sample(200, 5);
    for (double t1 : {0.3, -1.7}) CHECK(std::abs(empirical_chf(r, t1, 2.0)) <= 1.0 + 1e-12);
}

TEST_CASE("criterion trivial examples", "[criterion]") {
    const OrderStatDesign d(3, 1, 2);
    const CriterionConfig cfg(1.0, d);

    // N=1: data (0,0), sim (a,b) -> 2 - 2 sinc(a) sinc(b)
    const ObservedSample zero({0.0}, {0.0});
    for (auto [a, b] : std::vector<std::pair<double, double>>{
             {0.7, 1.3}, {1.0, std::numbers::pi}, {0.0, 0.0}, {2.5, 2.5}}) {
        const ObservedSample sim({a}, {b});
        const double expect = 2.0 - 2.0 * sinc(a) * sinc(b);
        CHECK_THAT(criterion(zero, sim, cfg), WithinAbs(expect, 1e-15));
    }

    // self-match identity
    const ObservedSample s = random_sample(200, 42);
    CHECK(std::fabs(criterion(s, s, cfg)) < 1e-13);

    // symmetry and nonnegativity
    const ObservedSample a1 = random_sample(60, 7);
    const ObservedSample b1 = random_sample(60, 8);
    CHECK_THAT(criterion(a1, b1, cfg), WithinAbs(criterion(b1, a1, cfg), 1e-13));
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const ObservedSample x = random_sample(30, seed);
        const ObservedSample y = random_sample(30, seed + 100, 2.0);
        CHECK(criterion(x, y, cfg) >= -1e-12);
    }

    const ObservedSample small({0.0, 0.1}, {0.2, 0.3});
    CHECK_THROWS_AS(criterion(zero, small, cfg), std::invalid_argument);
    CHECK_THROWS_AS(CriterionConfig(0.0, d), std::invalid_argument);
    CHECK_THROWS_AS(CriterionConfig(-1.0, d), std::invalid_argument);
}

TEST_CASE("criterion matches quadrature oracle", "[criterion]") {
    std::uint64_t seed = 900;
    for (double kappa : {1.0, 3.14, 5.0}) {
        const ObservedSample data = random_sample(40, seed++);
        const ObservedSample sim = random_sample(40, seed++, 1.4);
        const CriterionConfig cfg(kappa, OrderStatDesign(3, 1, 2));
        const double closed = criterion(data, sim, cfg);
        const double quad = quadrature_criterion(data, sim, kappa, 320);
        CHECK_THAT(closed, WithinAbs(quad, 1e-6));
    }
}

TEST_CASE("sim panel construction and validation", "[criterion]") {
    const SimPanel p(50, 3, 123);
    CHECK(p.rows() == 50);
    CHECK(p.n() == 3);
    CHECK(p.seed() == 123);
    for (std::size_t i = 0; i < p.rows(); ++i) {
        CHECK((p.v(i) > 0.0 && p.v(i) < 1.0));
        for (int j = 0; j < 3; ++j) CHECK((p.u(i, j) > 0.0 && p.u(i, j) < 1.0));
    }
    // deterministic given the seed
    const SimPanel q(50, 3, 123);
    for (std::size_t i = 0; i < p.rows(); ++i) CHECK(p.v(i) == q.v(i));

    CHECK_THROWS_AS(SimPanel(0, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(SimPanel(10, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(SimPanel({0.5, 0.5, 0.5}, 1, 3), std::invalid_argument);  // wrong count
    CHECK_THROWS_AS(SimPanel({0.5, 0.0, 0.5, 0.5}, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(SimPanel({0.5, 1.0, 0.5, 0.5}, 1, 3), std::invalid_argument);
}

TEST_CASE("simulate_sample known row", "[criterion]") {
    const OrderStatDesign d(3, 1, 2);
    const SieveCdf f_xi(BaseCdf::normal(0.0, 1.0), 2, {0.0, 0.0});
    const SieveCdf f_eps(BaseCdf::exponential(1.0), 2, {0.0, 0.0});
    const SimPanel panel({0.5, 0.5, 0.5, 0.5}, 1, 3);
    const ObservedSample s = simulate_sample(f_xi, f_eps, panel, d);
    REQUIRE(s.size() == 1);
    CHECK_THAT(s.xr[0], WithinAbs(std::log(2.0), 1e-15));
    CHECK_THAT(s.xs[0], WithinAbs(std::log(2.0), 1e-15));

    CHECK_THROWS_AS(simulate_sample(f_xi, f_eps, SimPanel(5, 4, 1), d), std::invalid_argument);
}

TEST_CASE("simulate_sample preserves row ordering", "[criterion]") {
    const OrderStatDesign d(4, 2, 4);
    const SieveCdf f_xi(BaseCdf::normal(0.0, 0.25), 3, {0.2, -0.1, 0.05});
    const SieveCdf f_eps(BaseCdf::exponential(2.0), 3, {-0.15, 0.1, -0.05});
    const SimPanel panel(500, 4, 77);
    const ObservedSample s = simulate_sample(f_xi, f_eps, panel, d);
    REQUIRE(s.size() == 500);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.xr[i] <= s.xs[i]);
}

TEST_CASE("simulate_sample distribution matches convolution oracle", "[criterion]") {
    // theta = 0: row = (xi + eps_(r), xi + eps_(s)) with xi ~ N(0,1) and eps
    // order statistics of n=3 standard exponentials, so the joint CDF is
    // int Fjoint(x1 - z, x2 - z) phi(z) dz.  The integrand vanishes for
    // z > x1, and is smooth below, so one Gauss-Legendre rule on [-8, x1]
    // resolves it far beyond the Monte Carlo noise.
    const OrderStatDesign d(3, 1, 2);
    const SieveCdf f_xi(BaseCdf::normal(0.0, 1.0), 0, {});
    const SieveCdf f_eps(BaseCdf::exponential(1.0), 0, {});
    const std::size_t m = 1000000;
    const SimPanel panel(m, 3, 2024);
    const ObservedSample s = simulate_sample(f_xi, f_eps, panel, d);

    const ExponentialCdf expo;
    const GaussLegendre rule = gauss_legendre(200);
    const auto oracle = [&](double x1, double x2) {
        const double lo = -8.0, hi = x1;
        double total = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double z = 0.5 * (hi - lo) * rule.nodes[i] + 0.5 * (hi + lo);
            const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
            total += rule.weights[i] * orderstat_joint_cdf(expo, d, x1 - z, x2 - z) * phi;
        }
        return 0.5 * (hi - lo) * total;
    };

    for (auto [x1, x2] : std::vector<std::pair<double, double>>{
             {0.0, 0.5}, {0.5, 1.0}, {1.0, 2.0}, {-0.5, 0.0}, {2.0, 2.0}, {1.5, 3.0}}) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (s.xr[i] <= x1 && s.xs[i] <= x2) ++count;
        const double emp = static_cast<double>(count) / static_cast<double>(m);
        const double p = oracle(x1, x2);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(m));
        CHECK_THAT(emp, WithinAbs(p, 4.0 * se));
    }
}
