#pragma once

// Observed/simulated order-statistic samples, the fixed uniform simulation
// panel, the sinc-product kernel, empirical characteristic functions, and
// the closed-form L2 criterion they induce:
//   Q(data, sim) = (1/4k^2) int_{(-k,k)^2} |psi_data - psi_sim|^2 dt.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ordsieve/orderstat.hpp"
#include "ordsieve/random.hpp"
#include "ordsieve/sieve.hpp"

namespace ordsieve {

// N rows of (x_r, x_s); column storage suits the grid evaluator.
struct ObservedSample {
    std::vector<double> xr;
    std::vector<double> xs;

    ObservedSample() = default;
    ObservedSample(std::vector<double> r, std::vector<double> s)
        : xr(std::move(r)), xs(std::move(s)) {
        if (xr.size() != xs.size())
            throw std::invalid_argument("ObservedSample: column sizes differ");
        if (xr.empty()) throw std::invalid_argument("ObservedSample: no rows");
        for (std::size_t i = 0; i < xr.size(); ++i)
            if (!(xr[i] <= xs[i]))
                throw std::invalid_argument("ObservedSample: x_r > x_s in a row");
    }
    std::size_t size() const { return xr.size(); }
};

// Fixed N x (n+1) panel of U(0,1) draws, columns (V, U_1..U_n), drawn once
// from its seed and immutable afterwards.
class SimPanel {
public:
    SimPanel(std::size_t rows, int n, std::uint64_t seed)
        : rows_(rows), n_(n), seed_(seed) {
        check_shape();
        Rng rng(seed);
        draws_.resize(rows_ * (n_ + 1));
        for (double& d : draws_) d = rng.uniform01();
    }

    // Explicit draws, row-major (V_i, U_i1..U_in); every entry must lie
    // strictly inside (0,1).
    SimPanel(std::vector<double> draws, std::size_t rows, int n, std::uint64_t seed = 0)
        : draws_(std::move(draws)), rows_(rows), n_(n), seed_(seed) {
        check_shape();
        if (draws_.size() != rows_ * (n_ + 1))
            throw std::invalid_argument("SimPanel: draw count != rows*(n+1)");
        for (double d : draws_)
            if (!(d > 0.0 && d < 1.0))
                throw std::invalid_argument("SimPanel: draws must lie strictly inside (0,1)");
    }

    std::size_t rows() const { return rows_; }
    int n() const { return n_; }
    std::uint64_t seed() const { return seed_; }
    double v(std::size_t i) const { return draws_[i * (n_ + 1)]; }
    double u(std::size_t i, int j) const { return draws_[i * (n_ + 1) + 1 + j]; }

private:
    void check_shape() const {
        if (rows_ == 0 || n_ < 1)
            throw std::invalid_argument("SimPanel: need rows >= 1 and n >= 1");
    }

    std::vector<double> draws_;
    std::size_t rows_;
    int n_;
    std::uint64_t seed_;
};

struct CriterionConfig {
    double kappa;
    OrderStatDesign design;

    CriterionConfig(double kappa_, OrderStatDesign design_)
        : kappa(kappa_), design(design_) {
        if (!(kappa > 0.0)) throw std::invalid_argument("CriterionConfig: kappa > 0 required");
    }
};

// sin(x)/x with the continuous extension at 0; |x| keeps it bitwise even.
inline double sinc(double x) {
    x = std::fabs(x);
    return x == 0.0 ? 1.0 : std::sin(x) / x;
}

inline double q_kernel(double d1, double d2, double kappa) {
    return sinc(kappa * d1) * sinc(kappa * d2);
}

inline std::complex<double> empirical_chf(const ObservedSample& sample, double t1, double t2) {
    double re = 0.0, im = 0.0;
    const std::size_t n = sample.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = t1 * sample.xr[i] + t2 * sample.xs[i];
        re += std::cos(phase);
        im += std::sin(phase);
    }
    return {re / n, im / n};
}

// Closed form of (1/4k^2) int_{(-k,k)^2} |psi_data - psi_sim|^2:
//   2/N + (2/N^2) [ sum_{i>j} q(X_i-X_j) + sum_{i>j} q(Xs_i-Xs_j)
//                   - sum_{i,j} q(X_i-Xs_j) ].
inline double criterion(const ObservedSample& data, const ObservedSample& sim,
                        const CriterionConfig& cfg) {
    const std::size_t n = data.size();
    if (sim.size() != n)
        throw std::invalid_argument("criterion: data and sim must have equal sizes");
    const double kap = cfg.kappa;
    double within = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            within += q_kernel(data.xr[i] - data.xr[j], data.xs[i] - data.xs[j], kap) +
                      q_kernel(sim.xr[i] - sim.xr[j], sim.xs[i] - sim.xs[j], kap);
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cross += q_kernel(data.xr[i] - sim.xr[j], data.xs[i] - sim.xs[j], kap);
    const double dn = static_cast<double>(n);
    return 2.0 / dn + (2.0 / (dn * dn)) * (within - cross);
}

// Model-implied sample: row i = (xi_i + eps_(r),i, xi_i + eps_(s),i) with
// xi_i = F_xi^-1(V_i) and eps order statistics from the sorted row uniforms.
inline ObservedSample simulate_sample(const SieveCdf& f_xi, const SieveCdf& f_eps,
                                      const SimPanel& panel, const OrderStatDesign& d) {
    if (panel.n() != d.n)
        throw std::invalid_argument("simulate_sample: panel column count does not match design n");
    const std::size_t rows = panel.rows();
    std::vector<double> xr(rows), xs(rows), u(static_cast<std::size_t>(d.n));
    for (std::size_t i = 0; i < rows; ++i) {
        const double xi = f_xi.quantile(panel.v(i));
        for (int j = 0; j < d.n; ++j) u[static_cast<std::size_t>(j)] = panel.u(i, j);
        std::sort(u.begin(), u.end());
        xr[i] = xi + f_eps.quantile(u[static_cast<std::size_t>(d.r - 1)]);
        xs[i] = xi + f_eps.quantile(u[static_cast<std::size_t>(d.s - 1)]);
    }
    return ObservedSample(std::move(xr), std::move(xs));
}

}  // namespace ordsieve
