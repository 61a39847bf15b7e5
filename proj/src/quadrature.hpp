#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace pii::detail {

inline constexpr int kGaussPoints = 16;

struct GaussRule {
    std::array<double, kGaussPoints> node{};
    std::array<double, kGaussPoints> weight{};
};

// Legendre roots by Newton iteration from the Chebyshev guesses.
inline GaussRule make_gauss_rule() {
    GaussRule rule;
    constexpr int n = kGaussPoints;
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        rule.node[i] = z;
        rule.weight[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return rule;
}

inline const GaussRule& gauss_rule() {
    static const GaussRule rule = make_gauss_rule();
    return rule;
}

// Composite 16-point Gauss-Legendre on [a, b] with equal panels.
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels) {
    const auto& rule = gauss_rule();
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double s = 0.0;
        for (int i = 0; i < kGaussPoints; ++i)
            s += rule.weight[i] * f(mid + 0.5 * h * rule.node[i]);
        total += 0.5 * h * s;
    }
    return total;
}

}  // namespace pii::detail
