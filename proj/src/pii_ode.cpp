#include "pii/pii_ode.hpp"

#include <cmath>
#include <stdexcept>

#include "dop853.hpp"
#include "pii/asymp_series.hpp"
#include "pii/specfun.hpp"

namespace pii {

namespace {

const cplx kI(0.0, 1.0);

using detail::Vec;

// v = u on the real family, v = -i u on the imaginary one.
double to_reduced(const PIIParams& p, cplx u) {
    return p.family == Family::RealAS ? u.real() : (-kI * u).real();
}

cplx from_reduced(const PIIParams& p, double v) {
    return p.family == Family::RealAS ? cplx(v, 0.0) : cplx(0.0, v);
}

auto make_rhs(const RealReduction& r) {
    return [r](double x, const Vec<2>& y) -> Vec<2> {
        const double v = y[0];
        return {y[1], 2.0 * r.sigma * v * v * v + x * v - r.amp};
    };
}

State make_state(const PIIParams& p, double x, const Vec<2>& y) {
    return {x, from_reduced(p, y[0]), from_reduced(p, y[1])};
}

Mat2 pauli(int which, cplx c) {
    switch (which) {
    case 1:
        return {{{0.0, c}, {c, 0.0}}};
    case 2:
        return {{{0.0, -kI * c}, {kI * c, 0.0}}};
    default:
        return {{{c, 0.0}, {0.0, -c}}};
    }
}

Mat2 add(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r[i][j] = a[i][j] + b[i][j];
    return r;
}

Mat2 sub(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r[i][j] = a[i][j] - b[i][j];
    return r;
}

Mat2 mul(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
}

std::vector<double> sample_grid(double x_start, double x_end, const IntegrateOptions& opts) {
    if (!opts.sample_points.empty())
        return opts.sample_points;
    if (!(opts.sample_spacing > 0.0))
        throw std::invalid_argument("integrate: sample_spacing must be positive");
    const double dir = x_end >= x_start ? 1.0 : -1.0;
    std::vector<double> grid;
    const double span = std::abs(x_end - x_start);
    const long n = static_cast<long>(std::floor(span / opts.sample_spacing + 1e-9));
    for (long i = 0; i <= n; ++i)
        grid.push_back(x_start + dir * i * opts.sample_spacing);
    if (std::abs(grid.back() - x_end) > 1e-12 * std::max(1.0, span))
        grid.push_back(x_end);
    else
        grid.back() = x_end;
    return grid;
}

}  // namespace

std::string to_string(Status s) {
    switch (s) {
    case Status::Completed:
        return "Completed";
    case Status::PoleDetected:
        return "PoleDetected";
    default:
        return "ToleranceFailure";
    }
}

cplx pii_residual(double x, cplx u, cplx upp, cplx alpha) { return upp - 2.0 * u * u * u - x * u + alpha; }

LaxMatrices lax_matrices(double x, cplx u, cplx up, cplx alpha, cplx lambda) {
    if (lambda == 0.0)
        throw std::domain_error("lax_matrices: lambda = 0 is singular");
    LaxMatrices m;
    m.lambda = lambda;
    m.A = add(add(pauli(3, -kI * (4.0 * lambda * lambda + x + 2.0 * u * u)),
                  pauli(2, -(4.0 * lambda * u + alpha / lambda))),
              pauli(1, -2.0 * up));
    m.U = add(pauli(3, -kI * lambda), pauli(2, -u));
    return m;
}

Mat2 lax_compatibility(double x, cplx u, cplx up, cplx upp, cplx alpha, cplx lambda) {
    const LaxMatrices m = lax_matrices(x, u, up, alpha, lambda);
    const Mat2 a_x = add(add(pauli(3, -kI * (1.0 + 4.0 * u * up)), pauli(2, -4.0 * lambda * up)),
                         pauli(1, -2.0 * upp));
    const Mat2 u_lambda = pauli(3, -kI);
    return add(sub(a_x, u_lambda), sub(mul(m.A, m.U), mul(m.U, m.A)));
}

State init_plus(const PIIParams& p, double x0, InitOptions opts) {
    if (!(x0 >= kInitMinArgument))
        throw std::domain_error("init_plus: requires x0 >= 8");
    const RealReduction r = p.reduced();

    double b = 0.0;
    double bp = 0.0;
    if (opts.background == BackgroundSum::Median) {
        const MedianB m = eval_B_median(r.amp, r.alpha_sq, x0);
        b = m.b;
        bp = m.bp;
    } else {
        const BDerivs d = eval_B_derivs(p.alpha, x0);
        b = to_reduced(p, d.b);
        bp = to_reduced(p, d.bp);
    }

    double w = 0.0;
    double wp = 0.0;
    if (opts.dressed_mode) {
        const DecayingMode dm = decaying_mode(r.alpha_sq, x0);
        w = dm.w;
        wp = dm.wp;
    } else {
        const AiryValue ai = airy_ai(x0);
        w = ai.ai;
        wp = ai.ai_prime;
    }
    return make_state(p, x0, {b + r.kk * w, bp + r.kk * wp});
}

Trajectory integrate(const PIIParams& p, double x_start, double x_end, const State& init, double tol,
                     const IntegrateOptions& opts) {
    if (!(tol >= 1e-14 && tol <= 1e-6))
        throw std::invalid_argument("integrate: tol must lie in [1e-14, 1e-6]");
    const RealReduction r = p.reduced();

    Trajectory traj;
    traj.params = p;
    traj.tol = tol;
    traj.x_reached = x_start;

    const std::vector<double> grid = sample_grid(x_start, x_end, opts);
    const double dir = x_end >= x_start ? 1.0 : -1.0;
    std::size_t next = 0;

    const Vec<2> y0 = {to_reduced(p, init.u), to_reduced(p, init.up)};
    while (next < grid.size() && dir * (grid[next] - x_start) <= 0.0) {
        if (grid[next] == x_start)
            traj.samples.push_back(make_state(p, x_start, y0));
        ++next;
    }

    detail::StepControl ctl;
    ctl.rtol = tol;
    ctl.h_min = opts.min_step;
    ctl.max_steps = opts.max_steps;
    detail::Dop853<2, decltype(make_rhs(r))> solver(make_rhs(r), ctl);

    bool pole = false;
    auto observer = [&](const detail::DenseStep<2>& step) {
        while (next < grid.size() && dir * (grid[next] - step.t_new) <= 0.0) {
            traj.samples.push_back(make_state(p, grid[next], step(grid[next])));
            ++next;
        }
        const Vec<2> y = step(step.t_new);
        if (!(std::abs(y[0]) < opts.pole_threshold)) {
            pole = true;
            traj.x_pole = 0.5 * (step.t_old + step.t_new);
            return false;
        }
        return true;
    };
    const detail::StepOutcome outcome = solver.run(x_start, x_end, y0, observer);

    const auto& c = solver.counters();
    traj.step_stats = {c.accepted ? c.h_min : 0.0, c.h_max, c.accepted, c.rejected};
    traj.x_reached = solver.last_t();

    switch (outcome) {
    case detail::StepOutcome::Completed:
        traj.status = Status::Completed;
        break;
    case detail::StepOutcome::Stopped:
        traj.status = pole ? Status::PoleDetected : Status::ToleranceFailure;
        break;
    case detail::StepOutcome::StepTooSmall:
    case detail::StepOutcome::NonFinite:
        // Step collapse next to a large solution is read as a pole.
        if (std::abs(solver.last_y()[0]) > 1e2) {
            traj.status = Status::PoleDetected;
            traj.x_pole = solver.last_t();
        } else {
            traj.status = Status::ToleranceFailure;
        }
        break;
    case detail::StepOutcome::TooManySteps:
        traj.status = Status::ToleranceFailure;
        break;
    }
    return traj;
}

State integrate_fixed(const PIIParams& p, double x_start, double x_end, const State& init, long n_steps) {
    if (n_steps < 1)
        throw std::invalid_argument("integrate_fixed: n_steps must be positive");
    const RealReduction r = p.reduced();
    detail::Dop853<2, decltype(make_rhs(r))> solver(make_rhs(r), {});
    const Vec<2> y = solver.run_fixed(x_start, x_end, {to_reduced(p, init.u), to_reduced(p, init.up)}, n_steps);
    return make_state(p, x_end, y);
}

}  // namespace pii
