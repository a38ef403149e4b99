#pragma once

// Sieve family of CDFs F(x) = H_k(G(x); theta): orthonormal shifted-Legendre
// basis, the quadratic-form reparameterization
//   H_k(v; theta) = a(theta)' Pi(v) a(theta) / a(theta)' Pi(1) a(theta),
//   a(theta) = (1 - pi_k' theta, theta')',  Pi(v)_{ij} = v^{i+j+1}/(i+j+1),
// the coefficient constraint set Theta_k, and quantile evaluation for
// inverse-transform simulation.  Internally H_k is evaluated through the
// antiderivative coefficients of the squared polynomial, which is the same
// quadratic form expanded in powers of v.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ordsieve/base_cdf.hpp"
#include "ordsieve/math/gauss_legendre.hpp"

namespace ordsieve {

// rho_l(u) = sqrt(2l+1) * L_l(2u-1), orthonormal on [0,1].
inline double legendre_rho(int l, double u) {
    if (l < 0) throw std::invalid_argument("legendre_rho: l must be >= 0");
    const double x = 2.0 * u - 1.0;
    double p0 = 1.0, p1 = x;
    if (l == 0) return 1.0;
    for (int m = 2; m <= l; ++m) {
        const double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    return std::sqrt(2.0 * l + 1.0) * p1;
}

inline Eigen::MatrixXd pi_matrix(int k, double v) {
    if (k < 0) throw std::invalid_argument("pi_matrix: k must be >= 0");
    Eigen::MatrixXd m(k + 1, k + 1);
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j) {
            const int d = i + j + 1;
            m(i, j) = std::pow(v, d) / d;
        }
    return m;
}

// mu_l(m) = int_0^1 u^{l+m} rho_l(u) du, by quadrature exact for the
// polynomial degree 2l+m (64 nodes cover degree <= 127).
inline double mu_moment(int l, int m) {
    if (l < 1 || m < 0) throw std::invalid_argument("mu_moment: need l >= 1, m >= 0");
    static const GaussLegendre rule = gauss_legendre01(64);
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double u = rule.nodes[i];
        total += rule.weights[i] * std::pow(u, l + m) * legendre_rho(l, u);
    }
    return total;
}

// Constraint set Theta_k: |sum_m theta_{l+m} mu_l(m)| <= c / (1 + sqrt(l) ln l).
// Caches the mu table and bounds for repeated feasibility checks.
class ThetaConstraints {
  public:
    ThetaConstraints(int k, double c) : k_(k), c_(c) {
        if (k < 0) throw std::invalid_argument("ThetaConstraints: k must be >= 0");
        if (!(c > 0.0)) throw std::invalid_argument("ThetaConstraints: c must be > 0");
        mu_.resize(k);
        bound_.resize(k);
        for (int l = 1; l <= k; ++l) {
            mu_[l - 1].resize(k - l + 1);
            for (int m = 0; m <= k - l; ++m) mu_[l - 1][m] = mu_moment(l, m);
            bound_[l - 1] = c / (1.0 + std::sqrt(static_cast<double>(l)) * std::log(l));
        }
    }

    int order() const { return k_; }
    double bound_constant() const { return c_; }
    double bound(int l) const { return bound_.at(l - 1); }

    double constraint_sum(const std::vector<double>& theta, int l) const {
        double sum = 0.0;
        for (int m = 0; m <= k_ - l; ++m) sum += theta[l + m - 1] * mu_[l - 1][m];
        return sum;
    }

    bool feasible(const std::vector<double>& theta) const {
        if (static_cast<int>(theta.size()) != k_)
            throw std::invalid_argument("ThetaConstraints: theta length != k");
        for (int l = 1; l <= k_; ++l)
            if (std::fabs(constraint_sum(theta, l)) > bound_[l - 1]) return false;
        return true;
    }

  private:
    int k_;
    double c_;
    std::vector<std::vector<double>> mu_;
    std::vector<double> bound_;
};

inline bool theta_feasible(int k, const std::vector<double>& theta, double c) {
    return ThetaConstraints(k, c).feasible(theta);
}

namespace detail {

// a(theta) = (1 - pi_k' theta, theta')' with pi_k = (1/(i+1))_{i=1..k}.
inline std::vector<double> a_coeffs(const std::vector<double>& theta) {
    const int k = static_cast<int>(theta.size());
    std::vector<double> a(k + 1);
    double dot = 0.0;
    for (int i = 1; i <= k; ++i) dot += theta[i - 1] / (i + 1);
    a[0] = 1.0 - dot;
    for (int i = 1; i <= k; ++i) a[i] = theta[i - 1];
    return a;
}

// Antiderivative coefficients of p(u)^2 where p has coefficients a:
// int_0^v p^2 = sum_d c_d v^d with c_d = (sum_{i+j=d-1} a_i a_j) / d.
inline std::vector<double> squared_antideriv_coeffs(const std::vector<double>& a) {
    const int deg = static_cast<int>(a.size()) - 1;
    std::vector<double> c(2 * deg + 2, 0.0);  // c[d] for v^d, d = 1..2deg+1
    for (int i = 0; i <= deg; ++i)
        for (int j = 0; j <= deg; ++j) c[i + j + 1] += a[i] * a[j] / (i + j + 1);
    return c;
}

inline double poly_eval_ascending(const std::vector<double>& c, double v) {
    double acc = 0.0;
    for (std::size_t d = c.size(); d-- > 0;) acc = acc * v + c[d];
    return acc;  // c[0] + c[1] v + ... evaluated by Horner
}

}  // namespace detail

inline double h_cdf(int k, const std::vector<double>& theta, double v) {
    if (static_cast<int>(theta.size()) != k)
        throw std::invalid_argument("h_cdf: theta length != k");
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("h_cdf: v outside [0,1]");
    const auto c = detail::squared_antideriv_coeffs(detail::a_coeffs(theta));
    double denom = 0.0;
    for (double cd : c) denom += cd;
    if (denom < 1e-12)
        throw std::invalid_argument("h_cdf: degenerate coefficients (denominator < 1e-12)");
    const double num = detail::poly_eval_ascending(c, v);
    return std::clamp(num / denom, 0.0, 1.0);
}

// CDF F(x) = H_k(G(x); theta) over a base distribution G.
class SieveCdf {
  public:
    SieveCdf(BaseCdf base, int k, std::vector<double> theta, double bound_c = 5.0)
        : base_(std::move(base)), k_(k), theta_(std::move(theta)), c_(bound_c) {
        if (static_cast<int>(theta_.size()) != k_)
            throw std::invalid_argument("SieveCdf: theta length != k");
        if (!theta_feasible(k_, theta_, c_))
            throw std::invalid_argument("SieveCdf: theta violates the constraint set");
        anti_ = detail::squared_antideriv_coeffs(detail::a_coeffs(theta_));
        denom_ = 0.0;
        for (double cd : anti_) denom_ += cd;
        if (denom_ < 1e-12)
            throw std::invalid_argument("SieveCdf: degenerate coefficients "
                                        "(denominator < 1e-12)");
    }

    const BaseCdf& base() const { return base_; }
    int order() const { return k_; }
    const std::vector<double>& theta() const { return theta_; }
    double bound_constant() const { return c_; }

    double h(double v) const {
        return std::clamp(detail::poly_eval_ascending(anti_, v) / denom_, 0.0, 1.0);
    }

    // density of H: p(v)^2 / denominator
    double h_density(double v) const {
        double acc = 0.0;
        // derivative of the antiderivative polynomial
        for (std::size_t d = anti_.size(); d-- > 1;) acc = acc * v + anti_[d] * d;
        return acc / denom_;
    }

    double cdf(double x) const { return h(base_.cdf(x)); }

    double density(double x) const { return h_density(base_.cdf(x)) * base_.density(x); }

    // Inverse of v -> h(v) on [0,1]: safeguarded Newton with bisection
    // fallback, CDF tolerance 1e-12.
    double h_inverse(double p) const {
        if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("h_inverse: p outside [0,1]");
        if (p == 0.0) return 0.0;
        if (p == 1.0) return 1.0;
        double lo = 0.0, hi = 1.0, v = p;
        for (int it = 0; it < 200; ++it) {
            const double f = detail::poly_eval_ascending(anti_, v) / denom_ - p;
            if (std::fabs(f) <= 1e-12) return v;
            if (f > 0.0) hi = v; else lo = v;
            const double dv = h_density(v);
            double next = (dv > 0.0) ? v - f / dv : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (hi - lo < 1e-16) return 0.5 * (lo + hi);
            v = next;
        }
        return v;
    }

    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0))
            throw std::domain_error("SieveCdf::quantile: p outside (0,1)");
        return base_.quantile(h_inverse(p));
    }

    double support_lower() const { return base_.support_lower(); }

  private:
    BaseCdf base_;
    int k_;
    std::vector<double> theta_;
    double c_;
    std::vector<double> anti_;
    double denom_ = 0.0;
};

inline double sieve_cdf_eval(const SieveCdf& f, double x) { return f.cdf(x); }
inline double sieve_quantile(const SieveCdf& f, double p) { return f.quantile(p); }

namespace detail {

inline std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

// Plain-text key-value record; 17 significant digits, bit-exact round trip.
inline std::string sieve_to_record(const SieveCdf& f) {
    std::ostringstream out;
    out << "base = " << f.base().kind_name() << "\n";
    out << "base_p1 = " << detail::g17(f.base().param1()) << "\n";
    out << "base_p2 = " << detail::g17(f.base().param2()) << "\n";
    out << "order = " << f.order() << "\n";
    out << "bound = " << detail::g17(f.bound_constant()) << "\n";
    for (int i = 1; i <= f.order(); ++i)
        out << "theta_" << i << " = " << detail::g17(f.theta()[i - 1]) << "\n";
    return out.str();
}

inline SieveCdf sieve_from_record(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return (b == std::string::npos) ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto need = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument("sieve_from_record: missing key '" + key + "'");
        return it->second;
    };
    const std::string kind = need("base");
    const double p1 = std::stod(need("base_p1"));
    const double p2 = std::stod(need("base_p2"));
    BaseCdf base = [&] {
        if (kind == "uniform") return BaseCdf::uniform(p1, p2);
        if (kind == "normal") return BaseCdf::normal(p1, p2);
        if (kind == "truncnormal") return BaseCdf::truncnormal(p1, p2);
        if (kind == "exponential") return BaseCdf::exponential(p1);
        throw std::invalid_argument("sieve_from_record: unknown base kind '" + kind + "'");
    }();
    const int k = std::stoi(need("order"));
    const double c = std::stod(need("bound"));
    std::vector<double> theta(k);
    for (int i = 1; i <= k; ++i) theta[i - 1] = std::stod(need("theta_" + std::to_string(i)));
    return {std::move(base), k, std::move(theta), c};
}

}  // namespace ordsieve
