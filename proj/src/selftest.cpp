#include "pii/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "pii/asymp_series.hpp"
#include "pii/connection.hpp"
#include "pii/pii_ode.hpp"
#include "pii/specfun.hpp"
#include "pii/verifier.hpp"

namespace pii {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

CheckResult check(std::string name, double value, double limit) {
    return {std::move(name), value <= limit, value, limit};
}

PIIParams random_params(Family f, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    if (f == Family::RealAS) {
        const double a = 0.49 * unit(rng);
        return PIIParams::real(a, 0.98 * unit(rng) * std::cos(kPi * a));
    }
    return PIIParams::imag(unit(rng), 3.0 * unit(rng));
}

double airy_equation() {
    double worst = 0.0;
    // five-point stencil; h balances h^4 x^3 truncation against exp rounding
    const double h = 3e-3;
    for (double x = 8.01; x <= 15.0; x += 0.37) {
        auto ai = [](double t) { return airy_ai(t).ai; };
        const double d2 =
            (-ai(x + 2 * h) + 16 * ai(x + h) - 30 * ai(x) + 16 * ai(x - h) - ai(x - 2 * h)) / (12 * h * h);
        worst = std::max(worst, std::abs(d2 - x * ai(x)) / ai(x));
    }
    return worst;
}

double gamma_reflection() {
    double worst = 0.0;
    for (double tau = 0.01; tau <= 3.0; tau += 0.0299) {
        const cplx nu(0.0, tau);
        const cplx lhs = std::exp(log_gamma(nu) + log_gamma(-nu));
        const cplx rhs = -kPi / (nu * std::sin(kPi * nu));
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    return worst;
}

double gamma_recurrence(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> re(1.0, 3.0), im(-5.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const cplx z(re(rng), im(rng));
        worst = std::max(worst, std::abs(std::exp(log_gamma(z + 1.0) - log_gamma(z)) / z - 1.0));
    }
    return worst;
}

struct Identities {
    double d2_nu = 0.0;
    double stokes = 0.0;
    double modulus = 0.0;
    double leading = 0.0;
};

Identities connection_identities(std::mt19937_64& rng) {
    Identities out;
    for (Family f : {Family::RealAS, Family::ImagAS}) {
        for (int i = 0; i < 100; ++i) {
            const PIIParams p = random_params(f, rng);
            if (p.is_trivial())
                continue;
            const auto c = std::get<ConnectionData>(connect(p));
            const StokesTriple s = stokes_from_params(p);
            out.d2_nu = std::max(out.d2_nu, std::abs(c.d * c.d - 2.0 * kI * c.nu));
            out.stokes = std::max(out.stokes, std::abs(s.constraint_residual(p.alpha)));

            const double lhs = std::exp(-2.0 * log_gamma(c.nu).real());
            const double s1sq = std::norm(s.s1);
            const cplx rhs = f == Family::RealAS
                                 ? kI * c.nu / (2.0 * kPi) * std::exp(kI * kPi * c.nu) * s1sq
                                 : -kI * c.nu / (2.0 * kPi) * std::exp(-kI * kPi * c.nu) * s1sq / (1.0 + s1sq);
            out.modulus = std::max(out.modulus, std::abs(lhs - rhs) / lhs);

            for (double x : {-20.0, -50.0, -100.0}) {
                const cplx a = oscillatory_leading_term(x, p);
                const cplx b = closed_form_leading_term(x, p, c);
                out.leading = std::max(out.leading, std::abs(a - b) / (std::abs(c.d) * std::pow(-x, -0.25)));
            }
        }
    }
    return out;
}

double lax_defect(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0), lr(std::log(0.1), std::log(10.0)), ang(0.0, 2 * kPi);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = 10.0 * u(rng);
        const cplx uu(u(rng), u(rng)), up(u(rng), u(rng)), upp(u(rng), u(rng)), alpha(u(rng), u(rng));
        const cplx lambda = std::polar(std::exp(lr(rng)), ang(rng));
        const Mat2 m = lax_compatibility(x, uu, up, upp, alpha, lambda);
        const cplx r = pii_residual(x, uu, upp, alpha);
        const Mat2 target = {{{0.0, -2.0 * r}, {-2.0 * r, 0.0}}};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                worst = std::max(worst, std::abs(m[a][b] - target[a][b]));
    }
    return worst;
}

double series_closed_forms() {
    double worst = 0.0;
    for (cplx alpha : {cplx(0.0), cplx(0.1), cplx(0.45), cplx(0.0, 0.3)}) {
        const auto s = series_coeffs(alpha, 20);
        const auto m = series_coeffs(-alpha, 20);
        const cplx a2 = alpha * alpha;
        worst = std::max(worst, std::abs(s.coeffs[1] - (2.0 - 2.0 * a2)));
        worst = std::max(worst, std::abs(s.coeffs[2] - (2.0 - 2.0 * a2) * (20.0 - 6.0 * a2)) / std::abs(s.coeffs[2]));
        for (int n = 0; n <= 20; ++n)
            worst = std::max(worst, std::abs(s.coeffs[n] - m.coeffs[n]) / std::max(1.0, std::abs(s.coeffs[n])));
    }
    return worst;
}

// |residual| / err_est for the truncated series at x = 15.
double series_residual() {
    const BDerivs d = eval_B_derivs(0.25, 15.0);
    // the budget includes rounding of x B ~ alpha
    const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * 15.0 * std::abs(d.b);
    return std::abs(pii_residual(15.0, d.b, d.bpp, 0.25)) / (d.err_est + rounding / 10.0);
}

double symmetry() {
    double worst = 0.0;
    for (auto [a, k] : {std::pair{0.25, 0.3}, std::pair{0.1, -0.6}}) {
        IntegrateOptions o;
        o.sample_spacing = 1.0;
        const PIIParams p = PIIParams::real(a, k), q = PIIParams::real(-a, -k);
        const Trajectory tp = integrate(p, 8.0, -60.0, init_plus(p), 1e-11, o);
        const Trajectory tq = integrate(q, 8.0, -60.0, init_plus(q), 1e-11, o);
        for (std::size_t i = 0; i < tp.samples.size(); ++i)
            worst = std::max(worst, std::abs(tp.samples[i].u + tq.samples[i].u));
    }
    return worst;
}

}  // namespace

std::vector<CheckResult> run_selftest() {
    std::mt19937_64 rng(20240601);
    std::vector<CheckResult> out;
    out.push_back(check("airy_equation", airy_equation(), 1e-8));
    out.push_back(check("gamma_reflection", gamma_reflection(), 1e-10));
    out.push_back(check("gamma_recurrence", gamma_recurrence(rng), 1e-12));
    const Identities id = connection_identities(rng);
    out.push_back(check("d2_equals_2i_nu", id.d2_nu, 1e-12));
    out.push_back(check("stokes_constraint", id.stokes, 1e-14));
    out.push_back(check("gamma_modulus", id.modulus, 1e-10));
    out.push_back(check("leading_term_vs_closed_form", id.leading, 1e-10));
    out.push_back(check("lax_zero_curvature", lax_defect(rng), 1e-12));
    out.push_back(check("series_closed_forms", series_closed_forms(), 1e-12));
    out.push_back(check("series_residual_x15", series_residual(), 10.0));
    out.push_back(check("symmetry", symmetry(), 1e-9));

    for (const PIIParams& p : {PIIParams::real(0.0, 0.5), PIIParams::real(0.25, 0.3), PIIParams::imag(0.3, 0.5)}) {
        const VerificationReport r = verify_connection(p);
        const double worst = std::max(r.err_d_rel / 1e-3, r.err_phi_abs / 1e-2);
        out.push_back({"verify_" + to_string(p.family) + "_" + std::to_string(p.alpha.real() + p.alpha.imag()) +
                           "_" + std::to_string(p.k.real() + p.k.imag()),
                       r.pass, worst, 1.0});
    }

    const auto rows = scan_pole_free(default_scan_grid(), -60.0, 15.0, {});
    const auto bad = std::count_if(rows.begin(), rows.end(), [](const ScanRow& r) { return r.status != Status::Completed; });
    out.push_back(check("pole_free_scan", static_cast<double>(bad), 0.0));
    return out;
}

}  // namespace pii
