#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pii/asymp_series.hpp"
#include "pii/pii_ode.hpp"
#include "pii/specfun.hpp"

using namespace pii;
const cplx kI(0.0, 1.0);

TEST_CASE("pii_residual") {
    CHECK(pii_residual(3.0, 0.0, 0.0, 0.0) == cplx(0.0));
    CHECK(pii_residual(0.0, 1.0, 0.0, 0.0) == cplx(-2.0));
    CHECK(pii_residual(2.0, 0.5, 1.0, 0.25) == cplx(1.0 - 0.25 - 1.0 + 0.25));
}

TEST_CASE("lax: compatibility equals -2 R sigma1") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0), lr(std::log(0.1), std::log(10.0)),
        ang(0.0, 2 * std::numbers::pi);
    for (int i = 0; i < 1000; ++i) {
        const double x = 10 * u(rng);
        const cplx uu(u(rng), u(rng)), up(u(rng), u(rng)), upp(u(rng), u(rng)), alpha(u(rng), u(rng));
        const cplx lambda = std::polar(std::exp(lr(rng)), ang(rng));
        const Mat2 m = lax_compatibility(x, uu, up, upp, alpha, lambda);
        const cplx r = pii_residual(x, uu, upp, alpha);
        CHECK(std::abs(m[0][0]) < 1e-12);
        CHECK(std::abs(m[1][1]) < 1e-12);
        CHECK(std::abs(m[0][1] + 2.0 * r) < 1e-12);
        CHECK(std::abs(m[1][0] + 2.0 * r) < 1e-12);

        const cplx exact = 2.0 * uu * uu * uu + x * uu - alpha;
        const Mat2 z = lax_compatibility(x, uu, up, exact, alpha, lambda);
        for (auto& row : z)
            for (auto& e : row)
                CHECK(std::abs(e) < 1e-12);
    }
}

TEST_CASE("lax: matrices are traceless and lambda = 0 is rejected") {
    const LaxMatrices m = lax_matrices(1.0, 0.3, -0.2, 0.1, cplx(0.5, 0.2));
    CHECK(std::abs(m.A[0][0] + m.A[1][1]) < 1e-15);
    CHECK(std::abs(m.U[0][0] + m.U[1][1]) < 1e-15);
    CHECK_THROWS_AS(lax_matrices(1.0, 0.3, 0.0, 0.1, 0.0), std::domain_error);
    CHECK_THROWS_AS(lax_compatibility(1.0, 0.3, 0.0, 0.0, 0.1, 0.0), std::domain_error);
}

TEST_CASE("init_plus: examples") {
    const State z = init_plus(PIIParams::real(0.0, 0.0), 15.0);
    CHECK(z.u == cplx(0.0));
    CHECK(z.up == cplx(0.0));

    const State s = init_plus(PIIParams::real(0.25, 0.3), 15.0);
    CHECK(std::abs(s.u - 0.25 / 15.0) <= 0.25 * 2.0 / std::pow(15.0, 4) * 1.1);
    CHECK(s.u.imag() == 0.0);

    // alpha = 0: k Ai exactly
    const State h = init_plus(PIIParams::real(0.0, 0.7), 9.0);
    CHECK(std::abs(h.u.real() / (0.7 * airy_ai(9.0).ai) - 1.0) < 1e-14);

    const State i = init_plus(PIIParams::imag(0.3, 0.5), 8.0);
    CHECK(i.u.real() == 0.0);
    CHECK(i.up.real() == 0.0);

    // the optimal-truncation variant only differs at the Ai level
    InitOptions opt;
    opt.background = BackgroundSum::Optimal;
    opt.dressed_mode = false;
    const State a = init_plus(PIIParams::real(0.25, 0.3), 8.0);
    const State b = init_plus(PIIParams::real(0.25, 0.3), 8.0, opt);
    CHECK(std::abs(a.u - b.u) < airy_ai(8.0).ai);
    CHECK(std::abs(a.u - b.u) > 0.0);

    CHECK_THROWS_AS(init_plus(PIIParams::real(0.1, 0.1), 7.0), std::domain_error);
}

TEST_CASE("integrate: zero solution") {
    const PIIParams p = PIIParams::real(0.0, 0.0);
    const Trajectory t = integrate(p, 8.0, -60.0, init_plus(p), 1e-11);
    CHECK(t.status == Status::Completed);
    CHECK(t.samples.size() == 137);
    for (const State& s : t.samples)
        CHECK(s.u == cplx(0.0));
}

TEST_CASE("integrate: samples are strictly monotone and exactly real / imaginary") {
    const PIIParams p = PIIParams::real(0.1, 0.5);
    const Trajectory t = integrate(p, 8.0, -40.0, init_plus(p), 1e-11);
    REQUIRE(t.status == Status::Completed);
    CHECK(t.samples.front().x == 8.0);
    CHECK(t.samples.back().x == -40.0);
    for (std::size_t i = 1; i < t.samples.size(); ++i)
        CHECK(t.samples[i].x < t.samples[i - 1].x);
    for (const State& s : t.samples)
        CHECK(s.u.imag() == 0.0);
    CHECK(t.step_stats.count > 0);
    CHECK(t.step_stats.h_min <= t.step_stats.h_max);

    const PIIParams q = PIIParams::imag(0.3, 0.5);
    const Trajectory ti = integrate(q, 8.0, -40.0, init_plus(q), 1e-11);
    REQUIRE(ti.status == Status::Completed);
    for (const State& s : ti.samples) {
        CHECK(s.u.real() == 0.0);
        CHECK(s.up.real() == 0.0);
    }
}

TEST_CASE("integrate: symmetry u(x; alpha, k) = -u(x; -alpha, -k)") {
    for (auto [a, k] : {std::pair{0.25, 0.3}, std::pair{-0.4, 0.2}, std::pair{0.0, 0.9}}) {
        const PIIParams p = PIIParams::real(a, k);
        const PIIParams q = PIIParams::real(-a, -k);
        const Trajectory tp = integrate(p, 8.0, -60.0, init_plus(p), 1e-11);
        const Trajectory tq = integrate(q, 8.0, -60.0, init_plus(q), 1e-11);
        REQUIRE(tp.samples.size() == tq.samples.size());
        for (std::size_t i = 0; i < tp.samples.size(); ++i)
            CHECK(std::abs(tp.samples[i].u + tq.samples[i].u) < 1e-9);
    }
}

TEST_CASE("integrate: tolerance refinement") {
    const PIIParams p = PIIParams::real(0.2, 0.4);
    IntegrateOptions o;
    o.sample_points = {-50.0};
    const Trajectory a = integrate(p, 8.0, -50.0, init_plus(p), 1e-10, o);
    const Trajectory b = integrate(p, 8.0, -50.0, init_plus(p), 5e-11, o);
    REQUIRE(a.samples.size() == 1);
    CHECK(std::abs(a.samples[0].u - b.samples[0].u) < 1e-8);
}

TEST_CASE("integrate: starting point consistency") {
    // alpha = 0: the homogeneous solution k Ai is representable at x0 = 15
    {
        const PIIParams p = PIIParams::real(0.0, 0.6);
        IntegrateOptions o;
        o.sample_points = {0.0};
        const Trajectory a = integrate(p, 15.0, 0.0, init_plus(p, 15.0), 1e-12, o);
        const Trajectory b = integrate(p, 13.0, 0.0, init_plus(p, 13.0), 1e-12, o);
        CHECK(std::abs(a.samples[0].u - b.samples[0].u) < 1e-9);
    }
    // alpha != 0: k Ai(x0) must stay above the rounding level of B(x0)
    {
        const PIIParams p = PIIParams::real(0.25, 0.3);
        IntegrateOptions o;
        o.sample_points = {0.0};
        const Trajectory a = integrate(p, 9.0, 0.0, init_plus(p, 9.0), 1e-13, o);
        const Trajectory b = integrate(p, 8.0, 0.0, init_plus(p, 8.0), 1e-13, o);
        CHECK(std::abs(a.samples[0].u - b.samples[0].u) < 1e-6);
    }
}

TEST_CASE("integrate: zero curvature along the trajectory") {
    const PIIParams p = PIIParams::real(0.3, -0.4);
    IntegrateOptions o;
    o.sample_spacing = 1e-3;
    const Trajectory t = integrate(p, 8.0, -20.0, init_plus(p), 1e-12, o);
    REQUIRE(t.status == Status::Completed);
    double worst = 0.0;
    for (std::size_t i = 1000; i + 2 < t.samples.size(); i += 997) {
        const auto& s = t.samples[i];
        // sampling runs toward -x, so the sample order is reversed
        const double h = -1e-3;
        auto up = [&](int j) { return t.samples[i + j].up; };
        const cplx upp_fd = (-up(2) + 8.0 * up(1) - 8.0 * up(-1) + up(-2)) / (12.0 * h);
        const Mat2 m = lax_compatibility(s.x, s.u, s.up, upp_fd, 0.3, cplx(0.7, 0.4));
        for (auto& row : m)
            for (auto& e : row)
                worst = std::max(worst, std::abs(e));
        const Mat2 z = lax_compatibility(s.x, s.u, s.up, 2.0 * s.u * s.u * s.u + s.x * s.u - 0.3, 0.3, 1.3);
        CHECK(std::abs(z[0][1]) + std::abs(z[1][0]) + std::abs(z[0][0]) < 1e-12);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("integrate: pole detection and tolerance contract") {
    const PIIParams p = PIIParams::real(0.0, 1.2);
    const Trajectory t = integrate(p, 8.0, -60.0, init_plus(p), 1e-11);
    CHECK(t.status == Status::PoleDetected);
    CHECK(t.x_pole < 0.0);

    const PIIParams q = PIIParams::real(0.1, 0.1);
    CHECK_THROWS_AS(integrate(q, 8.0, 0.0, init_plus(q), 1e-5), std::invalid_argument);
    CHECK_THROWS_AS(integrate(q, 8.0, 0.0, init_plus(q), 1e-15), std::invalid_argument);

    IntegrateOptions tight;
    tight.max_steps = 10;
    const Trajectory f = integrate(q, 8.0, -60.0, init_plus(q), 1e-11, tight);
    CHECK(f.status == Status::ToleranceFailure);
}

TEST_CASE("integrate: fixed-step convergence order") {
    // Started away from the decaying side, where rounding of u(8) is amplified
    // by the growth of the Ai mode and hides the truncation error.
    const PIIParams p = PIIParams::real(0.2, 0.5);
    const State s0{2.0, 0.1, -0.1};
    const State ref = integrate_fixed(p, 2.0, -6.0, s0, 6400);
    double prev_err = 0.0;
    double order = 100.0;
    for (long n : {25, 50, 100}) {
        const double err = std::abs(integrate_fixed(p, 2.0, -6.0, s0, n).u - ref.u);
        if (prev_err > 0.0)
            order = std::min(order, std::log2(prev_err / err));
        prev_err = err;
    }
    CAPTURE(order);
    CHECK(order >= 7.5);
}
