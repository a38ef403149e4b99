#pragma once

// Base distributions G through which sieve CDFs are parameterized:
// uniform(a,b), normal(mu, sigma^2), truncated-normal-at-zero(mu, sigma^2),
// exponential(lambda).  One value type so the choice can flow through
// configuration files; all kinds expose cdf / quantile / density /
// support_lower.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ordsieve/math/normal.hpp"

namespace ordsieve {

enum class BaseKind { uniform, normal, truncnormal, exponential };

class BaseCdf {
  public:
    BaseCdf(BaseKind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {
        switch (kind_) {
            case BaseKind::uniform:
                if (!(p2 > p1)) throw std::invalid_argument("uniform base: need b > a");
                break;
            case BaseKind::normal:
            case BaseKind::truncnormal:
                if (!(p2 > 0.0)) throw std::invalid_argument("normal base: need sigma^2 > 0");
                break;
            case BaseKind::exponential:
                if (!(p1 > 0.0)) throw std::invalid_argument("exponential base: need lambda > 0");
                break;
        }
        if (kind_ == BaseKind::truncnormal) {
            const double sd = std::sqrt(p2_);
            trunc_mass_ = normal_cdf(-p1_ / sd);  // P(N(mu,s2) < 0)
        }
    }

    static BaseCdf uniform(double a, double b) { return {BaseKind::uniform, a, b}; }
    static BaseCdf normal(double mu, double sigma2) { return {BaseKind::normal, mu, sigma2}; }
    static BaseCdf truncnormal(double mu, double sigma2) {
        return {BaseKind::truncnormal, mu, sigma2};
    }
    static BaseCdf exponential(double lambda) { return {BaseKind::exponential, lambda, 0.0}; }

    BaseKind kind() const { return kind_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }

    double cdf(double x) const {
        switch (kind_) {
            case BaseKind::uniform: {
                if (x <= p1_) return 0.0;
                if (x >= p2_) return 1.0;
                return (x - p1_) / (p2_ - p1_);
            }
            case BaseKind::normal:
                return normal_cdf((x - p1_) / std::sqrt(p2_));
            case BaseKind::truncnormal: {
                if (x <= 0.0) return 0.0;
                const double raw = normal_cdf((x - p1_) / std::sqrt(p2_));
                return std::min((raw - trunc_mass_) / (1.0 - trunc_mass_), 1.0);
            }
            case BaseKind::exponential:
                return x <= 0.0 ? 0.0 : -std::expm1(-p1_ * x);
        }
        return 0.0;  // unreachable
    }

    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0))
            throw std::domain_error("BaseCdf::quantile: p outside (0,1)");
        switch (kind_) {
            case BaseKind::uniform:
                return p1_ + p * (p2_ - p1_);
            case BaseKind::normal:
                return p1_ + std::sqrt(p2_) * normal_quantile(p);
            case BaseKind::truncnormal:
                return p1_ + std::sqrt(p2_) *
                                 normal_quantile(trunc_mass_ + p * (1.0 - trunc_mass_));
            case BaseKind::exponential:
                return -std::log1p(-p) / p1_;
        }
        return 0.0;  // unreachable
    }

    double density(double x) const {
        switch (kind_) {
            case BaseKind::uniform:
                return (x < p1_ || x > p2_) ? 0.0 : 1.0 / (p2_ - p1_);
            case BaseKind::normal: {
                const double z = (x - p1_) / std::sqrt(p2_);
                return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846 * p2_);
            }
            case BaseKind::truncnormal: {
                if (x < 0.0) return 0.0;
                const double z = (x - p1_) / std::sqrt(p2_);
                const double phi =
                    std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846 * p2_);
                return phi / (1.0 - trunc_mass_);
            }
            case BaseKind::exponential:
                return x < 0.0 ? 0.0 : p1_ * std::exp(-p1_ * x);
        }
        return 0.0;  // unreachable
    }

    double support_lower() const {
        switch (kind_) {
            case BaseKind::uniform: return p1_;
            case BaseKind::normal: return -std::numeric_limits<double>::infinity();
            case BaseKind::truncnormal:
            case BaseKind::exponential: return 0.0;
        }
        return 0.0;  // unreachable
    }

    std::string kind_name() const {
        switch (kind_) {
            case BaseKind::uniform: return "uniform";
            case BaseKind::normal: return "normal";
            case BaseKind::truncnormal: return "truncnormal";
            case BaseKind::exponential: return "exponential";
        }
        return "";  // unreachable
    }

  private:
    BaseKind kind_;
    double p1_;
    double p2_;
    double trunc_mass_ = 0.0;
};

}  // namespace ordsieve
