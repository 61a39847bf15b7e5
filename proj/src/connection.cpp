#include "pii/connection.hpp"

#include <cmath>
#include <numbers>

#include "pii/specfun.hpp"

namespace pii {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

// Shared phase: -3/2 d^2 ln 2 + arg Gamma(i d^2 / 2) - pi/4 - arg(last).
double phase(double d_sq, cplx last) {
    return wrap_phase(-1.5 * d_sq * std::numbers::ln2 + arg_gamma_imag(0.5 * d_sq) - kPi / 4.0 -
                      std::arg(last));
}

}  // namespace

std::string to_string(Family f) { return f == Family::RealAS ? "real" : "imag"; }

void PIIParams::check_family() const {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()) || !std::isfinite(k.real()) ||
        !std::isfinite(k.imag()))
        throw InvalidParams("parameters must be finite");
    if (family == Family::RealAS) {
        if (alpha.imag() != 0.0 || k.imag() != 0.0)
            throw InvalidParams("real family needs real alpha and k");
    } else {
        if (alpha.real() != 0.0 || k.real() != 0.0)
            throw InvalidParams("imaginary family needs purely imaginary alpha and k");
    }
}

void PIIParams::validate() const {
    check_family();
    if (family == Family::RealAS) {
        const double a = alpha.real();
        if (!(std::abs(a) < 0.5))
            throw InvalidParams("real family needs alpha in (-1/2, 1/2)");
        if (!(std::abs(k.real()) < std::cos(kPi * a)))
            throw BoundaryParams("real family needs |k| < cos(pi alpha)");
    }
}

RealReduction PIIParams::reduced() const {
    check_family();
    RealReduction r;
    if (family == Family::RealAS) {
        r.amp = alpha.real();
        r.alpha_sq = r.amp * r.amp;
        r.kk = k.real();
        r.sigma = 1.0;
    } else {
        r.amp = alpha.imag();
        r.alpha_sq = -r.amp * r.amp;
        r.kk = k.imag();
        r.sigma = -1.0;
    }
    return r;
}

cplx StokesTriple::constraint_residual(cplx alpha) const {
    return s1 - s2 + s3 + s1 * s2 * s3 + 2.0 * std::sin(kPi * alpha);
}

StokesTriple stokes_from_params(const PIIParams& p) {
    p.validate();
    const cplx s = std::sin(kPi * p.alpha);
    return {-s - kI * p.k, 0.0, -s + kI * p.k};
}

cplx nu_exponent(const StokesTriple& s) {
    const cplx w = 1.0 - s.s1 * s.s3;
    if (!(w.real() > 0.0) || std::abs(w.imag()) > 1e-12 * std::abs(w))
        throw BoundaryParams("nu_exponent: 1 - s1 s3 must be a positive real");
    // -ln(w) / (2 pi i) = i ln(w) / (2 pi)
    return {0.0, std::log(w.real()) / (2.0 * kPi)};
}

ConnectionData connection_real(double alpha, double k) {
    const PIIParams p = PIIParams::real(alpha, k);
    p.validate();
    if (p.is_trivial())
        throw DegenerateParams("connection_real: (0, 0) is the zero solution");
    const double c = std::cos(kPi * alpha);
    // 1 - s1 s3 = cos^2(pi alpha) - k^2, factored to avoid cancellation near the boundary
    const double log_arg = std::log((c - k) * (c + k));
    const double d_sq = -log_arg / kPi;
    ConnectionData out;
    out.d = std::sqrt(d_sq);
    out.phi = phase(d_sq, cplx(-std::sin(kPi * alpha), -k));
    out.nu = cplx(0.0, log_arg / (2.0 * kPi));
    return out;
}

ConnectionData connection_imag(double alpha_im, double k_im) {
    const PIIParams p = PIIParams::imag(alpha_im, k_im);
    p.validate();
    if (p.is_trivial())
        throw DegenerateParams("connection_imag: (0, 0) is the zero solution");
    const cplx alpha = p.alpha;
    const cplx k = p.k;
    const double ch = std::cosh(kPi * alpha_im);  // cosh(pi i alpha)
    const double log_arg = std::log(ch * ch + k_im * k_im);
    ConnectionData out;
    out.d = kI * std::sqrt(log_arg / kPi);
    const double d_sq = -log_arg / kPi;
    out.phi = phase(d_sq, -kI * k + kI * std::sinh(kPi * kI * alpha));
    out.nu = cplx(0.0, log_arg / (2.0 * kPi));
    return out;
}

Connection connect(const PIIParams& p) {
    p.validate();
    if (p.is_trivial())
        return TrivialConnection{};
    if (p.family == Family::RealAS)
        return connection_real(p.alpha.real(), p.k.real());
    return connection_imag(p.alpha.imag(), p.k.imag());
}

cplx oscillatory_leading_term(double x, const PIIParams& p) {
    if (!(x < 0.0))
        throw std::domain_error("oscillatory_leading_term: requires x < 0");
    p.validate();
    if (p.is_trivial())
        return 0.0;
    const StokesTriple s = stokes_from_params(p);
    const cplx nu = nu_exponent(s);
    const double t = std::pow(-x, 1.5);
    const cplx coeff = std::sqrt(kPi) * std::exp(-kI * kPi * nu / 2.0 - log_gamma(nu)) / s.s1;
    const cplx term = coeff * std::exp(kI * (2.0 / 3.0) * t + nu * std::log(8.0 * t) - kI * kPi / 4.0);
    const double scale = 2.0 * std::pow(-x, -0.25);
    if (p.family == Family::RealAS)
        return scale * term.real();
    return kI * (scale * term.imag());
}

cplx closed_form_leading_term(double x, const PIIParams& p, const ConnectionData& c) {
    if (!(x < 0.0))
        throw std::domain_error("closed_form_leading_term: requires x < 0");
    const double m = -x;
    const double d_sq = (c.d * c.d).real();
    const double arg = (2.0 / 3.0) * std::pow(m, 1.5) - 0.75 * d_sq * std::log(m) + c.phi;
    const double env = std::pow(m, -0.25);
    if (p.family == Family::RealAS)
        return c.d * env * std::cos(arg);
    return c.d * env * std::sin(arg);
}

double wrap_phase(double phi) {
    double r = std::remainder(phi, 2.0 * kPi);  // [-pi, pi]
    if (r <= -kPi)
        r += 2.0 * kPi;
    return r;
}

double circular_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

}  // namespace pii
