#pragma once

// Finite-sample distribution theory for order statistics of an i.i.d. sample:
// marginal / joint / conditional CDFs, the conditional limit as the
// conditioning point drops to the support edge, and recovery of the parent
// CDF from a single order-statistic CDF (regularized incomplete beta
// inversion).

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ordsieve {

struct OrderStatDesign {
    int n;  // draws per measurement group
    int r;  // lower rank
    int s;  // upper rank

    OrderStatDesign(int n_, int r_, int s_) : n(n_), r(r_), s(s_) {
        if (n < 2 || r < 1 || s <= r || s > n)
            throw std::invalid_argument("OrderStatDesign: need 1 <= r < s <= n, n >= 2");
    }
};

template <class F>
concept ParentCdf = requires(const F f, double x) {
    { f.cdf(x) } -> std::convertible_to<double>;
    { f.support_lower() } -> std::convertible_to<double>;
};

template <class F>
concept QuantileParentCdf = ParentCdf<F> && requires(const F f, double p) {
    { f.quantile(p) } -> std::convertible_to<double>;
};

namespace detail {

// Binomial tail sum_{l=j}^{n} C(n,l) p^l (1-p)^{n-l} = I_p(j, n-j+1).
// All terms are positive, so plain summation is stable.
inline double binomial_tail(int n, int j, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double choose = 1.0;  // C(n,0)
    for (int l = 1; l < j; ++l) choose *= static_cast<double>(n - l + 1) / l;
    double total = 0.0;
    for (int l = j; l <= n; ++l) {
        choose *= static_cast<double>(n - l + 1) / l;
        total += choose * std::pow(p, l) * std::pow(1.0 - p, n - l);
    }
    return std::min(total, 1.0);
}

// d/dp of binomial_tail: the Beta(j, n-j+1) density, j*C(n,j)*p^{j-1}(1-p)^{n-j}.
inline double binomial_tail_deriv(int n, int j, double p) {
    double choose = 1.0;
    for (int l = 1; l <= j; ++l) choose *= static_cast<double>(n - l + 1) / l;
    return j * choose * std::pow(p, j - 1) * std::pow(1.0 - p, n - j);
}

}  // namespace detail

template <ParentCdf F>
double orderstat_cdf(const F& f, int n, int j, double x) {
    if (j < 1 || j > n)
        throw std::domain_error("orderstat_cdf: rank j outside [1,n]");
    const double p = std::clamp(f.cdf(x), 0.0, 1.0);
    return detail::binomial_tail(n, j, p);
}

// P(eta_(r) <= x_r, eta_(s) <= x_s).  For x_r > x_s the event equals
// {eta_(r) <= x_s, eta_(s) <= x_s}, so x_r is clipped to x_s.
template <ParentCdf F>
double orderstat_joint_cdf(const F& f, const OrderStatDesign& d, double x_r, double x_s) {
    x_r = std::min(x_r, x_s);
    const double pr = std::clamp(f.cdf(x_r), 0.0, 1.0);
    const double ps = std::clamp(f.cdf(x_s), 0.0, 1.0);
    const double gap = std::max(ps - pr, 0.0);
    double total = 0.0;
    double cnk = 1.0;  // C(n,k), advanced multiplicatively
    for (int l = 1; l <= d.s; ++l) cnk *= static_cast<double>(d.n - l + 1) / l;
    for (int k = d.s; k <= d.n; ++k) {
        double ckj = 1.0;  // C(k,j)
        for (int l = 1; l <= d.r; ++l) ckj *= static_cast<double>(k - l + 1) / l;
        for (int j = d.r; j <= k; ++j) {
            // multinomial C(n; j, k-j, n-k) = C(n,k) * C(k,j)
            const double t1 = (j == 0) ? 1.0 : std::pow(pr, j);
            const double t2 = (k - j == 0) ? 1.0 : std::pow(gap, k - j);
            const double t3 = (d.n - k == 0) ? 1.0 : std::pow(1.0 - ps, d.n - k);
            total += cnk * ckj * t1 * t2 * t3;
            ckj *= static_cast<double>(k - j) / (j + 1);
        }
        cnk *= static_cast<double>(d.n - k) / (k + 1);
    }
    return std::clamp(total, 0.0, 1.0);
}

// P(eta_(s) <= x_s | eta_(r) <= x_r); requires F_(r)(x_r) > 0.
template <ParentCdf F>
double conditional_cdf_given_r(const F& f, const OrderStatDesign& d, double x_s, double x_r) {
    const double denom = orderstat_cdf(f, d.n, d.r, x_r);
    if (denom <= 0.0)
        throw std::domain_error("conditional_cdf_given_r: condition on null event "
                                "(F_(r)(x_r) = 0); use conditional_limit_cdf");
    return std::clamp(orderstat_joint_cdf(f, d, x_r, x_s) / denom, 0.0, 1.0);
}

// The limit of conditional_cdf_given_r as x_r drops to the support edge:
// the (s-r)-th order statistic of n-r draws.
template <ParentCdf F>
double conditional_limit_cdf(const F& f, const OrderStatDesign& d, double c) {
    return orderstat_cdf(f, d.n - d.r, d.s - d.r, c);
}

// Unique p with I_p(j, n-j+1) = y: bracketed Newton with bisection
// safeguard.  Stops on the argument, not the residual (the residual can sit
// below any tolerance far from the root where the beta density is tiny):
// either the bracket collapses to 5e-15 or an in-bracket Newton step falls
// below 1e-13, after which the corrected point is accurate to O(step^2).
inline double parent_from_orderstat(double y, int n, int j) {
    if (j < 1 || j > n) throw std::domain_error("parent_from_orderstat: rank outside [1,n]");
    if (y < 0.0 || y > 1.0)
        throw std::domain_error("parent_from_orderstat: y outside [0,1]");
    if (y == 0.0) return 0.0;
    if (y == 1.0) return 1.0;

    double lo = 0.0, hi = 1.0;
    double p = y;  // any interior start
    for (int it = 0; it < 300; ++it) {
        const double val = detail::binomial_tail(n, j, p) - y;
        if (val == 0.0) return p;
        if (val > 0.0) hi = p; else lo = p;
        if (hi - lo <= 5e-15) break;
        const double dv = detail::binomial_tail_deriv(n, j, p);
        double next = 0.5 * (lo + hi);
        if (dv > 0.0) {
            const double step = val / dv;
            const double cand = p - step;
            if (cand > lo && cand < hi) {
                if (std::fabs(step) <= 1e-13) return cand;
                next = cand;
            }
        }
        p = next;
    }
    return 0.5 * (lo + hi);
}

// Applies F^{-1} to the r-th and s-th order statistics of the given uniforms.
template <QuantileParentCdf F>
std::pair<double, double> sample_orderstats(const F& f, const OrderStatDesign& d,
                                            std::vector<double> u) {
    if (static_cast<int>(u.size()) != d.n)
        throw std::invalid_argument("sample_orderstats: need exactly n uniforms");
    for (double v : u)
        if (!(v > 0.0 && v < 1.0))
            throw std::domain_error("sample_orderstats: uniforms must lie in (0,1)");
    std::sort(u.begin(), u.end());
    return {f.quantile(u[d.r - 1]), f.quantile(u[d.s - 1])};
}

// Standard exponential-family parent, the workhorse of the diagnostics.
struct ExponentialCdf {
    double lambda = 1.0;

    explicit ExponentialCdf(double l = 1.0) : lambda(l) {
        if (!(lambda > 0.0)) throw std::invalid_argument("ExponentialCdf: lambda > 0 required");
    }
    double cdf(double x) const { return x <= 0.0 ? 0.0 : -std::expm1(-lambda * x); }
    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0))
            throw std::domain_error("ExponentialCdf::quantile: p outside (0,1)");
        return -std::log1p(-p) / lambda;
    }
    double support_lower() const { return 0.0; }
};

}  // namespace ordsieve
