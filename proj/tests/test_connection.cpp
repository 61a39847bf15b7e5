#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pii/connection.hpp"
#include "pii/specfun.hpp"

using namespace pii;
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

namespace {

PIIParams draw(Family f, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    if (f == Family::RealAS) {
        const double a = 0.499 * u(rng);
        return PIIParams::real(a, 0.999 * u(rng) * std::cos(kPi * a));
    }
    return PIIParams::imag(2.0 * u(rng), 4.0 * u(rng));
}

// arg Gamma(i y) from the product oracle
double arg_gamma_ref(double y) { return oracle::log_gamma_product(cplx(0.0, y)).imag(); }

}  // namespace

TEST_CASE("params: validation") {
    CHECK_NOTHROW(PIIParams::real(0.25, 0.3).validate());
    CHECK_THROWS_AS(PIIParams::real(0.5, 0.0).validate(), InvalidParams);
    CHECK_THROWS_AS(PIIParams::real(0.25, 0.8).validate(), BoundaryParams);
    CHECK_THROWS_AS(PIIParams::real(0.0, 1.0).validate(), BoundaryParams);
    CHECK_THROWS_AS((PIIParams{cplx(0.1, 0.1), 0.0, Family::RealAS}.validate()), InvalidParams);
    CHECK_THROWS_AS((PIIParams{0.0, 0.5, Family::ImagAS}.validate()), InvalidParams);
    CHECK_NOTHROW(PIIParams::imag(5.0, 10.0).validate());
    CHECK_NOTHROW(PIIParams::real(0.0, 1.2).check_family());

    const RealReduction r = PIIParams::imag(0.3, -0.5).reduced();
    CHECK(r.amp == 0.3);
    CHECK(r.alpha_sq == doctest::Approx(-0.09));
    CHECK(r.kk == -0.5);
    CHECK(r.sigma == -1.0);
}

TEST_CASE("stokes: examples") {
    const StokesTriple z = stokes_from_params(PIIParams::real(0.0, 0.0));
    CHECK(z.s1 == cplx(0.0));
    CHECK(z.s3 == cplx(0.0));

    const StokesTriple s = stokes_from_params(PIIParams::real(0.25, 0.3));
    CHECK(std::abs(s.s1 - cplx(-std::sqrt(2.0) / 2.0, -0.3)) < 1e-15);
    CHECK(std::abs(s.s3 - cplx(-std::sqrt(2.0) / 2.0, 0.3)) < 1e-15);
    CHECK(s.s2 == cplx(0.0));
    CHECK(std::abs(1.0 - s.s1 * s.s3 - 0.41) < 1e-15);

    const StokesTriple t = stokes_from_params(PIIParams::imag(0.3, 0.5));
    CHECK(std::abs(t.s1 - (-kI * std::sinh(0.3 * kPi) + 0.5)) < 1e-15);
    CHECK(std::abs(t.s3 + std::conj(t.s1)) < 1e-15);
    const double ch = std::cosh(0.3 * kPi);
    CHECK(std::abs(1.0 - t.s1 * t.s3 - (ch * ch + 0.25)) < 1e-14);

    CHECK_THROWS_AS(stokes_from_params(PIIParams::real(0.3, 0.9)), BoundaryParams);
}

TEST_CASE("nu: examples") {
    CHECK(nu_exponent({0.0, 0.0, 0.0}) == cplx(0.0));
    const cplx nu = nu_exponent(stokes_from_params(PIIParams::real(0.0, 0.5)));
    CHECK(nu.real() == 0.0);
    CHECK(nu.imag() == doctest::Approx(std::log(0.75) / (2 * kPi)).epsilon(1e-14));
    const cplx nu2 = nu_exponent(stokes_from_params(PIIParams::real(0.25, 0.3)));
    CHECK(nu2.imag() == doctest::Approx(std::log(0.41) / (2 * kPi)).epsilon(1e-14));
    CHECK_THROWS_AS(nu_exponent({2.0, 0.0, 2.0}), BoundaryParams);
}

TEST_CASE("connection_real: examples") {
    const ConnectionData c = connection_real(0.0, 0.5);
    CHECK(c.d.real() == doctest::Approx(0.302609).epsilon(1e-6));
    CHECK(c.d.imag() == 0.0);

    const ConnectionData q = connection_real(0.25, 0.3);
    const double d_sq = -std::log(0.41) / kPi;
    CHECK(q.d.real() == doctest::Approx(std::sqrt(d_sq)).epsilon(1e-15));
    CHECK(q.d.real() == doctest::Approx(0.53275).epsilon(1e-4));
    const double phi = -1.5 * d_sq * std::log(2.0) + arg_gamma_ref(d_sq / 2) - kPi / 4 -
                       std::atan2(-0.3, -std::sin(kPi / 4));
    CHECK(circular_distance(q.phi, phi) < 1e-12);
    CHECK(q.phi > -kPi);
    CHECK(q.phi <= kPi);

    CHECK_THROWS_AS(connection_real(0.0, 0.0), DegenerateParams);
    CHECK_THROWS_AS(connection_real(0.2, std::cos(0.2 * kPi)), BoundaryParams);
}

TEST_CASE("connection_real: homogeneous reduction") {
    for (double k : {-0.99, -0.6, -0.1, 0.05, 0.5, 0.9}) {
        const ConnectionData c = connection_real(0.0, k);
        const double d = std::sqrt(-std::log(1 - k * k)) / std::sqrt(kPi);
        const double phi = -1.5 * d * d * std::log(2.0) + arg_gamma_ref(d * d / 2) + kPi / 2 * (k > 0 ? 1 : -1) - kPi / 4;
        CAPTURE(k);
        CHECK(std::abs(c.d.real() - d) < 1e-12);
        CHECK(circular_distance(c.phi, phi) < 1e-12);
    }
}

TEST_CASE("connection_real: k -> -k at alpha = 0 mirrors the phase") {
    for (double k : {0.2, 0.7}) {
        const ConnectionData p = connection_real(0.0, k);
        const ConnectionData m = connection_real(0.0, -k);
        CHECK(p.d == m.d);
        // u -> -u shifts the cosine by pi
        CHECK(circular_distance(p.phi, m.phi + kPi) < 1e-14);
    }
}

TEST_CASE("connection_imag: examples and homogeneous reduction") {
    const ConnectionData c = connection_imag(0.3, 0.5);
    const double ch = std::cosh(0.3 * kPi);
    CHECK(c.d.real() == 0.0);
    CHECK((c.d * c.d).real() == doctest::Approx(-std::log(ch * ch + 0.25) / kPi).epsilon(1e-14));

    for (double k0 : {0.1, 0.5, 1.0, 3.0}) {
        const ConnectionData h = connection_imag(0.0, k0);
        const double d_im = std::sqrt(std::log(1 + k0 * k0)) / std::sqrt(kPi);
        const double d_sq = -d_im * d_im;
        const double phi = -1.5 * d_sq * std::log(2.0) + arg_gamma_ref(d_sq / 2) - kPi / 4;
        CHECK(std::abs(h.d - kI * d_im) < 1e-12);
        CHECK(circular_distance(h.phi, phi) < 1e-12);
        // the other sign of k flips the solution, so the phase moves by pi
        const ConnectionData m = connection_imag(0.0, -k0);
        CHECK(circular_distance(m.phi, phi + kPi) < 1e-12);
    }
    CHECK_THROWS_AS(connection_imag(0.0, 0.0), DegenerateParams);
}

TEST_CASE("connect: trivial variant") {
    CHECK(std::holds_alternative<TrivialConnection>(connect(PIIParams::real(0.0, 0.0))));
    CHECK(std::holds_alternative<TrivialConnection>(connect(PIIParams::imag(0.0, 0.0))));
    CHECK(std::holds_alternative<ConnectionData>(connect(PIIParams::real(0.1, 0.0))));
}

TEST_CASE("identities over random admissible parameters") {
    std::mt19937_64 rng(11);
    for (Family f : {Family::RealAS, Family::ImagAS}) {
        for (int i = 0; i < 100; ++i) {
            const PIIParams p = draw(f, rng);
            const auto c = std::get<ConnectionData>(connect(p));
            const StokesTriple s = stokes_from_params(p);
            CHECK(std::abs(c.d * c.d - 2.0 * kI * c.nu) < 1e-12);
            // the Stokes route loses ~eps / |1 - s1 s3| to cancellation when it is small
            const double w = std::abs(1.0 - s.s1 * s.s3);
            CHECK(std::abs(nu_exponent(s) - c.nu) < 1e-14 / std::min(w, 1.0));
            CHECK(c.nu.real() == 0.0);
            CHECK(std::abs(s.constraint_residual(p.alpha)) <= 1e-14 * std::max(1.0, std::abs(s.s1)));
            if (f == Family::RealAS)
                CHECK(s.s3 == std::conj(s.s1));
            else
                CHECK(s.s3 == -std::conj(s.s1));

            const double inv_mod = std::exp(-2.0 * oracle::log_gamma_product(c.nu, 50000).real());
            const double s1sq = std::norm(s.s1);
            const cplx rhs = f == Family::RealAS
                                 ? kI * c.nu / (2 * kPi) * std::exp(kI * kPi * c.nu) * s1sq
                                 : -kI * c.nu / (2 * kPi) * std::exp(-kI * kPi * c.nu) * s1sq / (1 + s1sq);
            CHECK(std::abs(rhs.imag()) < 1e-15 * std::abs(rhs));
            CHECK(std::abs(inv_mod - rhs.real()) <= 1e-10 * inv_mod);
        }
    }
}

TEST_CASE("leading term: agrees with the closed form") {
    std::mt19937_64 rng(5);
    for (Family f : {Family::RealAS, Family::ImagAS}) {
        for (int i = 0; i < 100; ++i) {
            const PIIParams p = draw(f, rng);
            const auto c = std::get<ConnectionData>(connect(p));
            for (double x : {-20.0, -50.0, -100.0}) {
                const cplx a = oscillatory_leading_term(x, p);
                const cplx b = closed_form_leading_term(x, p, c);
                const double envelope = std::abs(c.d) * std::pow(-x, -0.25);
                CHECK(std::abs(a - b) <= 1e-10 * envelope);
                if (f == Family::RealAS)
                    CHECK(a.imag() == 0.0);
                else
                    CHECK(a.real() == 0.0);
            }
        }
    }
    CHECK(oscillatory_leading_term(-30.0, PIIParams::real(0.0, 0.0)) == cplx(0.0));
    CHECK_THROWS_AS(oscillatory_leading_term(1.0, PIIParams::real(0.1, 0.1)), std::domain_error);
}

TEST_CASE("phase helpers") {
    CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(3 * kPi + 0.1) == doctest::Approx(-kPi + 0.1));
    CHECK(circular_distance(kPi - 0.01, -kPi + 0.01) == doctest::Approx(0.02));
}
