#pragma once

// Gauss-Legendre nodes and weights on [-1,1], computed by Newton iteration
// on the Legendre recurrence.  Machine-accurate for the orders used here.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ordsieve {

struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussLegendre out;
    out.nodes.resize(n);
    out.weights.resize(n);
    const double pi = 3.14159265358979323846;
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // evaluate P_n(x) and P_n'(x) by the three-term recurrence
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= n; ++m) {
                const double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        out.nodes[i] = -x;
        out.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.weights[i] = w;
        out.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) out.nodes[n / 2] = 0.0;
    return out;
}

// Same rule mapped to [0,1].
inline GaussLegendre gauss_legendre01(int n) {
    GaussLegendre g = gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
        g.nodes[i] = 0.5 * (g.nodes[i] + 1.0);
        g.weights[i] *= 0.5;
    }
    return g;
}

}  // namespace ordsieve
