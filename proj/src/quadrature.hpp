#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace fraclab::detail {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre nodes by Newton iteration on P_n.
inline GaussRule gauss_legendre(int order) {
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

// Integrates f over [a, b] split into `pieces` equal panels.
template <class F>
double integrate_1d(const GaussRule& rule, double a, double b, int pieces, F&& f) {
    double total = 0.0;
    const double step = (b - a) / pieces;
    for (int k = 0; k < pieces; ++k) {
        const double lo = a + k * step;
        const double half = 0.5 * step;
        const double mid = lo + half;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            total += rule.weights[q] * half * f(mid + half * rule.nodes[q]);
        }
    }
    return total;
}

}  // namespace fraclab::detail
