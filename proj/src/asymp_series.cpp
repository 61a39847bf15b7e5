#include "pii/asymp_series.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "quadrature.hpp"

namespace pii {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxTerms = 400;

void check_domain(double x, const char* who) {
    if (!(x >= kSeriesMinArgument))
        throw std::domain_error(std::string(who) + ": requires x >= 8");
}

// Generates b_n = a_n s^n for a fixed scale s, so that large-x evaluations
// never form the (overflowing) raw coefficients.
template <class T>
class ScaledCoeffs {
  public:
    ScaledCoeffs(T alpha_sq, double scale) : alpha_sq_(alpha_sq), scale_(scale) {
        b_.push_back(T(1));
        pair_.push_back(T(1));
    }

    const T& operator[](int n) {
        while (static_cast<int>(b_.size()) <= n)
            extend();
        return b_[n];
    }

  private:
    void extend() {
        const int n = static_cast<int>(b_.size()) - 1;
        T triple = T(0);
        for (int m = 0; m <= n; ++m)
            triple += pair_[m] * b_[n - m];
        const T next = scale_ * (double((3 * n + 1) * (3 * n + 2)) * b_[n] -
                                 2.0 * alpha_sq_ * triple);
        b_.push_back(next);
        T pair = T(0);
        for (int k = 0; k <= n + 1; ++k)
            pair += b_[k] * b_[n + 1 - k];
        pair_.push_back(pair);
    }

    T alpha_sq_;
    double scale_;
    std::vector<T> b_;
    std::vector<T> pair_;  // sum_{k+l=n} b_k b_l
};

// Index of the last term to include, plus the first omitted magnitude.
template <class T>
std::pair<int, double> choose_truncation(ScaledCoeffs<T>& b, Truncation mode) {
    if (mode.kind == Truncation::Kind::Fixed) {
        if (mode.n < 0)
            throw std::invalid_argument("eval_B: fixed truncation needs n >= 0");
        return {mode.n, std::abs(b[mode.n + 1])};
    }
    const double head = std::abs(b[0]);
    int best = 0;
    double best_mag = head;
    for (int n = 1; n < kMaxTerms; ++n) {
        const double mag = std::abs(b[n]);
        if (mag > best_mag)
            return {best, mag};
        best = n;
        best_mag = mag;
        if (mag <= 1e-20 * head)
            return {n, std::abs(b[n + 1])};
    }
    return {best, best_mag};
}

double stokes_factor(double alpha_sq) {
    // sin(pi alpha) / alpha written in alpha^2, continuous through 0.
    if (alpha_sq > 0.0) {
        const double a = std::sqrt(alpha_sq);
        return std::sin(kPi * a) / a;
    }
    if (alpha_sq < 0.0) {
        const double b = std::sqrt(-alpha_sq);
        return std::sinh(kPi * b) / b;
    }
    return kPi;
}

// e^{zeta} * PV int_0^inf e^{-zeta s} s^p / (1 - s^2) ds.
//
// Folding about s = 1 removes the pole:
//   int_0^2 f(s)/(1-s) ds = int_0^1 (f(1-t) - f(1+t)) / t dt,
// with f(s) = e^{-zeta (s-1)} s^p / (1+s).
double borel_pv(double zeta, double p) {
    auto f = [zeta, p](double s) {
        return std::exp(-zeta * (s - 1.0) + p * std::log(s)) / (1.0 + s);
    };
    const int panels = std::max(24, static_cast<int>(std::ceil(6.0 * std::sqrt(zeta))));
    double folded = detail::gauss_legendre(
        [&](double t) { return (f(1.0 - t) - f(1.0 + t)) / t; }, 0.0, 1.0, panels);

    double tail = 0.0;
    const double width = std::min(0.5, 4.0 / std::sqrt(zeta));
    for (double s = 2.0; s < 1e4; s += width) {
        tail += detail::gauss_legendre([&](double v) { return f(v) / (1.0 - v); }, s, s + width, 1);
        if (f(s + width) < 1e-22)
            break;
    }
    return folded + tail;
}

std::vector<cplx> raw_coeffs(cplx alpha_sq, int n_max, bool* saturated) {
    ScaledCoeffs<cplx> b(alpha_sq, 1.0);
    std::vector<cplx> out;
    out.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        const cplx a = b[n];
        if (std::abs(a) > kCoeffSaturation || !std::isfinite(std::abs(a))) {
            if (saturated)
                *saturated = true;
            break;
        }
        out.push_back(a);
    }
    return out;
}

}  // namespace

SeriesCoeffs series_coeffs(cplx alpha, int n_max) {
    if (n_max < 0)
        throw std::invalid_argument("series_coeffs: n_max must be >= 0");
    SeriesCoeffs out;
    out.alpha = alpha;
    out.coeffs = raw_coeffs(alpha * alpha, n_max, &out.saturated);
    return out;
}

BValue eval_B(cplx alpha, double x, Truncation mode) {
    check_domain(x, "eval_B");
    ScaledCoeffs<cplx> b(alpha * alpha, 1.0 / (x * x * x));
    const auto [last, omitted] = choose_truncation(b, mode);
    const cplx pre = alpha / x;
    cplx sum = 0.0;
    for (int n = 0; n <= last; ++n)
        sum += b[n];
    BValue out;
    out.value = pre * sum;
    out.err_est = std::abs(pre) * omitted;
    out.last_index = last;
    return out;
}

BDerivs eval_B_derivs(cplx alpha, double x, Truncation mode) {
    check_domain(x, "eval_B_derivs");
    ScaledCoeffs<cplx> b(alpha * alpha, 1.0 / (x * x * x));
    const auto [last, omitted] = choose_truncation(b, mode);
    const cplx pre = alpha / x;
    BDerivs out;
    for (int n = 0; n <= last; ++n) {
        const cplx t = pre * b[n];
        out.b += t;
        out.bp -= double(3 * n + 1) * t / x;
        out.bpp += double((3 * n + 1) * (3 * n + 2)) * t / (x * x);
    }
    out.err_est = std::abs(pre) * omitted;
    out.last_index = last;
    return out;
}

std::vector<double> decaying_mode_coeffs(double alpha_sq, int j_max) {
    const int m_max = j_max / 2 + 1;
    ScaledCoeffs<double> a(alpha_sq, 1.0);
    std::vector<double> pair(m_max + 1);
    for (int m = 0; m <= m_max; ++m) {
        double s = 0.0;
        for (int k = 0; k <= m; ++k)
            s += a[k] * a[m - k];
        pair[m] = s;
    }
    std::vector<double> c(j_max + 1);
    c[0] = 1.0;
    for (int j = 0; j < j_max; ++j) {
        const double h = 1.5 * j;
        double coupling = 0.0;
        for (int m = 0; 2 * m <= j; ++m)
            coupling += pair[m] * c[j - 2 * m];
        c[j + 1] = -((h + 0.25) * (h + 1.25) * c[j] - 6.0 * alpha_sq * coupling) / (3.0 * (j + 1));
    }
    return c;
}

DecayingMode decaying_mode(double alpha_sq, double x) {
    check_domain(x, "decaying_mode");
    constexpr int kJ = 120;
    const auto c = decaying_mode_coeffs(alpha_sq, kJ);
    const double r = 1.0 / (x * std::sqrt(x));  // x^{-3/2}
    double sum = 0.0;
    double dsum = 0.0;
    double rp = 1.0;
    double last = std::abs(c[0]);
    double omitted = 0.0;
    for (int j = 0; j <= kJ; ++j) {
        const double term = c[j] * rp;
        if (j > 0 && std::abs(term) > last) {
            omitted = std::abs(term);
            break;
        }
        sum += term;
        dsum -= 1.5 * j * term / x;
        last = std::abs(term);
        omitted = last;
        if (last <= 1e-20 * std::abs(sum))
            break;
        rp *= r;
    }
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const double pre = std::exp(-zeta) / (2.0 * std::sqrt(kPi)) / std::sqrt(std::sqrt(x));
    DecayingMode out;
    out.w = pre * sum;
    out.wp = pre * (dsum - sum / (4.0 * x) - std::sqrt(x) * sum);
    out.rel_err_est = omitted / std::abs(sum);
    return out;
}

MedianB eval_B_median(double amplitude, double alpha_sq, double x) {
    check_domain(x, "eval_B_median");
    MedianB out;
    if (amplitude == 0.0)
        return out;

    ScaledCoeffs<double> b(alpha_sq, 1.0 / (x * x * x));
    // Tail starts at the smallest term.
    int start = 1;
    double best = std::abs(b[0]);
    for (int n = 1; n < kMaxTerms; ++n) {
        const double mag = std::abs(b[n]);
        if (mag > best)
            break;
        best = mag;
        start = n;
    }

    const double pre = amplitude / x;
    for (int n = 0; n < start; ++n) {
        const double t = pre * b[n];
        out.b += t;
        out.bp -= (3 * n + 1) * t / x;
    }
    out.truncation_index = start;

    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const int j_cap = std::min(24, 2 * start - 1);
    const auto c = decaying_mode_coeffs(alpha_sq, j_cap);

    double tail = 0.0;
    double dtail = 0.0;
    double last = 0.0;
    double omitted = 0.0;
    double w_scale = 1.0;  // (2/3)^j
    double zpow = 1.0;     // zeta^{-j}
    int used = 0;
    for (int j = 0; j < j_cap; ++j) {
        const double p = 2.0 * start - 0.5 - j;
        const double w = c[j] * w_scale;
        const double i0 = borel_pv(zeta, p);
        const double term = w * zpow * i0;
        if (j > 0 && std::abs(term) > last) {
            omitted = std::abs(term);
            break;
        }
        const double i1 = borel_pv(zeta, p + 1.0);
        tail += term;
        dtail += w * (-j * zpow / zeta * i0 - zpow * i1);
        last = std::abs(term);
        omitted = last;
        ++used;
        if (last <= 1e-17 * std::abs(tail))
            break;
        w_scale *= 2.0 / 3.0;
        zpow /= zeta;
    }

    const double g = amplitude * stokes_factor(alpha_sq) / std::pow(kPi, 1.5);
    const double scale = g * std::exp(-zeta) / std::sqrt(std::sqrt(x));
    const double r = scale * tail;
    out.b += r;
    out.bp += scale * std::sqrt(x) * dtail - r / (4.0 * x);
    out.err_est = std::abs(scale) * omitted + 1e-16 * std::abs(out.b);
    out.tail_terms = used;
    return out;
}

}  // namespace pii
