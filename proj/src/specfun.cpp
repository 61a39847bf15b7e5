#include "pii/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pii {

namespace {

constexpr double kPi = std::numbers::pi;

// B_{2k} / (2k (2k-1)), k = 1..12
constexpr std::array<double, 12> kStirling = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
};

constexpr double kStirlingShift = 15.0;

cplx log_gamma_stirling(cplx w) {
    const cplx inv = 1.0 / w;
    const cplx inv2 = inv * inv;
    cplx series = 0.0;
    cplx p = inv;
    for (double c : kStirling) {
        series += c * p;
        p *= inv2;
    }
    return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * kPi) + series;
}

// Re z >= 0.5: shift upward with the recurrence, then Stirling.
cplx log_gamma_right(cplx z) {
    cplx shift_sum = 0.0;
    cplx w = z;
    while (w.real() < kStirlingShift) {
        shift_sum += std::log(w);
        w += 1.0;
    }
    return log_gamma_stirling(w) - shift_sum;
}

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

}  // namespace

AiryValue airy_ai(double x) {
    if (!(x >= kAiryMinArgument))
        throw std::domain_error("airy_ai: argument below the supported domain x >= 8");

    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const double q = std::sqrt(std::sqrt(x));
    const double pre = std::exp(-zeta) / (2.0 * std::sqrt(kPi));

    // u_n and v_n are the standard Airy asymptotic coefficients.
    double u = 1.0;
    double sum_u = 1.0;
    double sum_v = 1.0;
    double zpow = 1.0;
    double last = 1.0;
    double omitted = 0.0;
    for (int n = 1; n < 200; ++n) {
        const double u_next = u * (6.0 * n - 5.0) * (6.0 * n - 3.0) * (6.0 * n - 1.0) /
                              ((2.0 * n - 1.0) * 216.0 * n);
        const double v_next = -(6.0 * n + 1.0) / (6.0 * n - 1.0) * u_next;
        zpow /= -zeta;
        const double term = u_next * zpow;
        if (std::abs(term) >= last) {
            omitted = std::abs(term);
            break;
        }
        sum_u += term;
        sum_v += v_next * zpow;
        last = std::abs(term);
        u = u_next;
        omitted = last;
    }

    AiryValue out;
    out.x = x;
    out.ai = pre / q * sum_u;
    out.ai_prime = -pre * q * sum_v;
    out.rel_err_est = omitted / std::abs(sum_u);
    return out;
}

cplx log_gamma(cplx z) {
    if (is_nonpositive_integer(z))
        throw std::domain_error("log_gamma: pole at a nonpositive integer");
    if (z.imag() < 0.0)
        return std::conj(log_gamma(std::conj(z)));
    if (z.real() >= 0.5)
        return log_gamma_right(z);

    // Reflection on the closed upper half-plane with the branch of
    // log sin(pi z) = log(i/2) - i pi z + log(1 - exp(2 pi i z)),
    // which is analytic for Im z > 0; the additive constant is zero there.
    const cplx i(0.0, 1.0);
    const cplx e = std::exp(2.0 * kPi * i * z);
    const cplx log_sin = std::log(0.5) + i * (kPi / 2.0) - i * kPi * z + std::log(1.0 - e);
    return std::log(kPi) - log_sin - log_gamma_right(1.0 - z);
}

double arg_gamma_imag(double y) {
    if (y == 0.0)
        throw std::domain_error("arg_gamma_imag: Gamma has a pole at 0");
    return log_gamma(cplx(0.0, y)).imag();
}

}  // namespace pii
