#pragma once

// Identification diagnostics: the Rossberg counterexample distribution, order-
// statistic spacing and cross-sum samplers, two-sample Kolmogorov-Smirnov
// distance, and characteristic-function ratio curves with delta-method
// standard errors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ordsieve/criterion.hpp"
#include "ordsieve/orderstat.hpp"
#include "ordsieve/random.hpp"

namespace ordsieve {

// G(x) = 1 - e^{-x} [1 + (1 - cos 2 pi x) / pi^2]: shares all order-statistic
// spacing distributions with the standard exponential while being a distinct
// parent (the identification counterexample).
struct RossbergCdf {
    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        const double pi2 = std::numbers::pi * std::numbers::pi;
        return 1.0 - std::exp(-x) * (1.0 + (1.0 - std::cos(2.0 * std::numbers::pi * x)) / pi2);
    }

    // density, for Newton refinement: e^{-x} (1 + (1-cos 2 pi x)/pi^2 - 2 sin(2 pi x)/pi);
    // the bracket is bounded below by ~0.457, so the density never vanishes.
    double density(double x) const {
        if (x <= 0.0) return 0.0;
        const double pi = std::numbers::pi;
        const double c = std::cos(2.0 * pi * x), s = std::sin(2.0 * pi * x);
        return std::exp(-x) * (1.0 + (1.0 - c) / (pi * pi) - 2.0 * s / pi);
    }

    // 1 - G(x) is sandwiched between e^{-x} and e^{-x}(1 + 2/pi^2), giving an
    // analytic starting bracket; bisection + Newton to CDF tolerance 1e-10.
    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0))
            throw std::domain_error("RossbergCdf::quantile: p outside (0,1)");
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double lo = -std::log1p(-p);
        double hi = lo + std::log1p(2.0 / pi2);
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double val = cdf(x) - p;
            if (std::fabs(val) <= 1e-12) return x;
            if (val > 0.0) hi = x; else lo = x;
            const double dv = density(x);
            double next = (dv > 0.0) ? x - val / dv : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (hi - lo < 1e-15 * (1.0 + hi)) break;
            x = next;
        }
        return 0.5 * (lo + hi);
    }

    double support_lower() const { return 0.0; }
};

// Draws of eta_(s) - eta_(r) from an i.i.d. F sample of size n.
template <QuantileParentCdf F>
std::vector<double> spacing_sample(const F& f, const OrderStatDesign& d, std::size_t m,
                                   std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("spacing_sample: m >= 1 required");
    Rng rng(seed);
    std::vector<double> out(m), u(static_cast<std::size_t>(d.n));
    for (std::size_t i = 0; i < m; ++i) {
        for (double& v : u) v = rng.uniform01();
        std::sort(u.begin(), u.end());
        out[i] = f.quantile(u[static_cast<std::size_t>(d.s - 1)]) -
                 f.quantile(u[static_cast<std::size_t>(d.r - 1)]);
    }
    return out;
}

// Draws of eta'_(r) + eta_(s): the r-th order statistic from an independent
// G sample plus the s-th from an F sample (child streams 0 and 1 of seed).
template <QuantileParentCdf F, QuantileParentCdf G>
std::vector<double> crosssum_sample(const F& f, const G& g, const OrderStatDesign& d,
                                    std::size_t m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("crosssum_sample: m >= 1 required");
    Rng rng_f(child_seed(seed, 0));
    Rng rng_g(child_seed(seed, 1));
    std::vector<double> out(m), uf(static_cast<std::size_t>(d.n)), ug(uf.size());
    for (std::size_t i = 0; i < m; ++i) {
        for (double& v : uf) v = rng_f.uniform01();
        for (double& v : ug) v = rng_g.uniform01();
        std::sort(uf.begin(), uf.end());
        std::sort(ug.begin(), ug.end());
        out[i] = g.quantile(ug[static_cast<std::size_t>(d.r - 1)]) +
                 f.quantile(uf[static_cast<std::size_t>(d.s - 1)]);
    }
    return out;
}

// Exact sup distance between two empirical CDFs; inputs must be sorted.
inline double ks_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_distance: both samples must be nonempty");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double dist = 0.0;
    while (i < a.size() || j < b.size()) {
        const double x = (i < a.size() && (j == b.size() || a[i] <= b[j])) ? a[i] : b[j];
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        dist = std::max(dist, std::fabs(static_cast<double>(i) / na -
                                        static_cast<double>(j) / nb));
    }
    return dist;
}

struct DistanceReport {
    double statistic = 0.0;
    std::pair<std::size_t, std::size_t> sample_sizes{0, 0};
    std::vector<double> grid;  // pooled quantile abscissae for curve reporting
};

// Sorts both samples, computes the KS statistic, and records a pooled
// quantile grid on which the two empirical CDFs can be tabulated.
inline DistanceReport ks_report(std::vector<double> a, std::vector<double> b,
                                int grid_points = 201) {
    if (grid_points < 2) throw std::invalid_argument("ks_report: need >= 2 grid points");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    DistanceReport rep;
    rep.statistic = ks_distance(a, b);
    rep.sample_sizes = {a.size(), b.size()};
    std::vector<double> pooled;
    pooled.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(pooled));
    rep.grid.resize(static_cast<std::size_t>(grid_points));
    for (int g = 0; g < grid_points; ++g) {
        const std::size_t idx = (pooled.size() - 1) * static_cast<std::size_t>(g) /
                                static_cast<std::size_t>(grid_points - 1);
        rep.grid[static_cast<std::size_t>(g)] = pooled[idx];
    }
    return rep;
}

struct ChfRatioPoint {
    double t = 0.0;
    std::complex<double> ratio{1.0, 0.0};  // psi_{X_(s)}(t) / psi_{X_(r)}(t)
    double se = 0.0;                       // delta-method standard error
    bool reliable = true;                  // |denominator| >= 1e-3
};

// Empirical ratio psi_{X_(s)}(t)/psi_{X_(r)}(t) on a t grid.  With unit-
// modulus summands the influence-function variance reduces to
//   sum |z_i - R w_i|^2 = m (1 + |R|^2 - 2 Re(conj(R) C)),
// where C = (1/m) sum z_i conj(w_i), so one pass per t suffices.
inline std::vector<ChfRatioPoint> chf_ratio_curve(const ObservedSample& sample,
                                                  const std::vector<double>& t_grid) {
    const std::size_t m = sample.size();
    const double dm = static_cast<double>(m);
    std::vector<ChfRatioPoint> out;
    out.reserve(t_grid.size());
    for (const double t : t_grid) {
        std::complex<double> zbar{0.0, 0.0}, wbar{0.0, 0.0}, cbar{0.0, 0.0};
        for (std::size_t i = 0; i < m; ++i) {
            const std::complex<double> w{std::cos(t * sample.xr[i]), std::sin(t * sample.xr[i])};
            const std::complex<double> z{std::cos(t * sample.xs[i]), std::sin(t * sample.xs[i])};
            zbar += z;
            wbar += w;
            cbar += z * std::conj(w);
        }
        zbar /= dm;
        wbar /= dm;
        cbar /= dm;

        ChfRatioPoint pt;
        pt.t = t;
        pt.reliable = std::abs(wbar) >= 1e-3;
        if (std::abs(wbar) > 0.0) {
            pt.ratio = zbar / wbar;
            const double resid =
                dm * std::max(0.0, 1.0 + std::norm(pt.ratio) -
                                       2.0 * (std::conj(pt.ratio) * cbar).real());
            pt.se = std::sqrt(resid) / (dm * std::abs(wbar));
        } else {
            pt.ratio = {0.0, 0.0};
            pt.se = std::numeric_limits<double>::infinity();
            pt.reliable = false;
        }
        out.push_back(pt);
    }
    return out;
}

// Generic order-statistic pair DGP: row = (L^-1(v) + E^-1(u_(r)), L^-1(v) + E^-1(u_(s))).
// Draw order per row is (v, u_1..u_n), matching SimPanel's column layout.
template <QuantileParentCdf Error, QuantileParentCdf Latent>
ObservedSample simulate_orderstat_pairs(const Error& error_parent, const Latent& latent,
                                        const OrderStatDesign& d, std::size_t m,
                                        std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("simulate_orderstat_pairs: m >= 1 required");
    Rng rng(seed);
    std::vector<double> xr(m), xs(m), u(static_cast<std::size_t>(d.n));
    for (std::size_t i = 0; i < m; ++i) {
        const double z = latent.quantile(rng.uniform01());
        for (double& v : u) v = rng.uniform01();
        std::sort(u.begin(), u.end());
        xr[i] = z + error_parent.quantile(u[static_cast<std::size_t>(d.r - 1)]);
        xs[i] = z + error_parent.quantile(u[static_cast<std::size_t>(d.s - 1)]);
    }
    return ObservedSample(std::move(xr), std::move(xs));
}

// Model-implied ratio curve: simulates m rows under (error_parent, latent)
// and evaluates the empirical ratio on the same machinery as observed data.
template <QuantileParentCdf Error, QuantileParentCdf Latent>
std::vector<ChfRatioPoint> chf_ratio_curve(const Error& error_parent, const Latent& latent,
                                           const OrderStatDesign& d,
                                           const std::vector<double>& t_grid, std::size_t m,
                                           std::uint64_t seed) {
    return chf_ratio_curve(simulate_orderstat_pairs(error_parent, latent, d, m, seed), t_grid);
}

}  // namespace ordsieve
