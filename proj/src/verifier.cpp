#include "pii/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <thread>
#include <tuple>

#include "dop853.hpp"
#include "pii/asymp_series.hpp"
#include "pii/specfun.hpp"

namespace pii {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStationMaxX = -40.0;
constexpr double kAmplitudeFloor = 1e-10;

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& s, const std::vector<double>& y) {
    const double n = static_cast<double>(s.size());
    double ms = 0.0, my = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        ms += s[i];
        my += y[i];
    }
    ms /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sxx += (s[i] - ms) * (s[i] - ms);
        sxy += (s[i] - ms) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * ms;
    double r2 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * s[i];
        r2 += r * r;
    }
    f.rms = std::sqrt(r2 / n);
    return f;
}

double reduced_value(const PIIParams& p, cplx u) {
    return p.family == Family::RealAS ? u.real() : u.imag();
}

auto sort_key(const PIIParams& p) {
    const bool real = p.family == Family::RealAS;
    return std::make_tuple(real ? 0 : 1, real ? p.alpha.real() : p.alpha.imag(), real ? p.k.real() : p.k.imag());
}

}  // namespace

std::vector<double> station_grid(int n, double m_lo, double m_hi) {
    if (n < 2 || !(m_lo > 0.0) || !(m_hi > m_lo))
        throw std::invalid_argument("station_grid: need n >= 2 and 0 < m_lo < m_hi");
    std::vector<double> xs(n);
    const double l0 = std::log(m_lo);
    const double l1 = std::log(m_hi);
    for (int i = 0; i < n; ++i)
        xs[i] = -std::exp(l0 + (l1 - l0) * i / (n - 1));
    xs.front() = -m_lo;
    xs.back() = -m_hi;
    return xs;
}

FitResult fit_oscillation(const Trajectory& traj) { return fit_oscillation(traj, traj.params.family); }

FitResult fit_oscillation(const Trajectory& traj, Family model) {
    if (traj.status != Status::Completed)
        throw FitFailure("fit_oscillation: trajectory did not complete");
    const RealReduction r = traj.params.reduced();

    std::vector<State> picked;
    for (const State& s : traj.samples)
        if (s.x <= kStationMaxX)
            picked.push_back(s);
    std::sort(picked.begin(), picked.end(), [](const State& a, const State& b) { return a.x > b.x; });
    if (picked.size() < 3)
        throw FitFailure("fit_oscillation: need at least 3 samples with x <= -40");

    FitResult out;
    out.model = model;
    double amp_max = 0.0;
    for (const State& s : picked) {
        const double m = -s.x;
        const double q = std::sqrt(std::sqrt(m));
        // Remove the non-oscillatory amp/x background before reading off
        // amplitude and phase.
        const double v = reduced_value(traj.params, s.u) - r.amp / s.x;
        const double vp = reduced_value(traj.params, s.up) + r.amp / (s.x * s.x);
        Station st;
        st.x = s.x;
        st.d_est = q * std::sqrt(v * v + vp * vp / m);
        double theta = std::atan2(vp / q, v * q);
        double d_sq = st.d_est * st.d_est;
        if (model == Family::ImagAS) {
            theta += kPi / 2.0;  // sin carrier
            d_sq = -d_sq;
        }
        st.phi_est = theta - (2.0 / 3.0) * m * std::sqrt(m) + 0.75 * d_sq * std::log(m);
        amp_max = std::max(amp_max, st.d_est);
        out.stations.push_back(st);
    }
    if (!(amp_max > kAmplitudeFloor))
        throw FitFailure("fit_oscillation: amplitude below floor");

    // The carrier is already subtracted, so successive estimates differ by a
    // slowly varying amount; remove the 2 pi jumps.
    for (std::size_t i = 1; i < out.stations.size(); ++i) {
        const double prev = out.stations[i - 1].phi_est;
        double& cur = out.stations[i].phi_est;
        cur += 2.0 * kPi * std::round((prev - cur) / (2.0 * kPi));
    }
    const auto [lo, hi] = std::minmax_element(out.stations.begin(), out.stations.end(),
                                              [](const Station& a, const Station& b) { return a.phi_est < b.phi_est; });
    if (hi->phi_est - lo->phi_est > kPi / 2.0)
        throw FitFailure("fit_oscillation: phase spread exceeds pi/2");

    std::vector<double> s, d, ph;
    for (const Station& st : out.stations) {
        s.push_back(std::pow(-st.x, -0.75));
        d.push_back(st.d_est);
        ph.push_back(st.phi_est);
    }
    const LineFit fd = least_squares(s, d);
    const LineFit fp = least_squares(s, ph);
    out.d_fit = model == Family::RealAS ? cplx(fd.intercept, 0.0) : cplx(0.0, fd.intercept);
    out.phi_fit = wrap_phase(fp.intercept);
    out.fit_residual = fp.rms;
    out.d_fit_residual = fd.rms;
    return out;
}

VerificationReport verify_connection(const PIIParams& p, const VerifyConfig& cfg) {
    const auto t_begin = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.params = p;
    try {
        p.check_family();
        if (p.is_trivial())
            throw DegenerateParams("verify_connection: (0, 0) is the zero solution");
        // Outside the admissible range there is nothing to compare with, but
        // the integration still runs so a pole is reported as such.
        std::optional<ConnectionData> predicted;
        try {
            predicted = std::get<ConnectionData>(connect(p));
            rep.predicted = *predicted;
        } catch (const InvalidParams& e) {
            rep.error = e.what();
        }

        IntegrateOptions opts;
        const double m_hi = std::min(150.0, -cfg.x_end);
        opts.sample_points = station_grid(cfg.stations, std::min(60.0, 0.4 * m_hi), m_hi);
        const State init = init_plus(p, cfg.x0, cfg.init);
        const Trajectory traj = integrate(p, cfg.x0, cfg.x_end, init, cfg.tol, opts);
        rep.pole_status = traj.status;
        rep.x_pole = traj.x_pole;
        if (traj.status != Status::Completed)
            throw std::runtime_error("integration ended with " + to_string(traj.status));
        if (!predicted)
            throw InvalidParams(rep.error);

        rep.fitted = fit_oscillation(traj);
        rep.err_d_rel = std::abs(rep.fitted.d_fit / rep.predicted.d - 1.0);
        rep.err_phi_abs = circular_distance(rep.fitted.phi_fit, rep.predicted.phi);
        rep.pass = rep.err_d_rel <= cfg.tol_d && rep.err_phi_abs <= cfg.tol_phi;
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.pass = false;
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return rep;
}

PlusReport verify_plus(const PIIParams& p, double x_lo, double x_hi, double spacing, double tol) {
    if (!(x_lo >= 8.0 && x_lo < x_hi && x_hi <= 15.0))
        throw std::invalid_argument("verify_plus: need 8 <= x_lo < x_hi <= 15");
    const RealReduction r = p.reduced();
    PlusReport rep;
    rep.params = p;

    // w = v - B, with B the optimally truncated series inside the
    // nonlinear coefficient.
    auto b_opt = [&](double x) { return eval_B(p.alpha, x).value; };
    auto to_red = [&](cplx z) { return p.family == Family::RealAS ? z.real() : (cplx(0.0, -1.0) * z).real(); };
    auto rhs = [&](double x, const detail::Vec<2>& y) -> detail::Vec<2> {
        const double b = to_red(b_opt(x));
        const double w = y[0];
        return {y[1], x * w + 2.0 * r.sigma * (3.0 * b * b * w + 3.0 * b * w * w + w * w * w)};
    };

    std::vector<double> grid;
    for (double x = x_hi; x > x_lo + 1e-12; x -= spacing)
        grid.push_back(x);
    grid.push_back(x_lo);

    const DecayingMode dm = decaying_mode(r.alpha_sq, x_hi);
    detail::Vec<2> y0 = {r.kk * dm.w, r.kk * dm.wp};

    detail::StepControl ctl;
    ctl.rtol = tol;
    detail::Dop853<2, decltype(rhs)> solver(rhs, ctl);
    std::vector<std::pair<double, double>> w_at;
    w_at.emplace_back(x_hi, y0[0]);
    std::size_t next = 1;
    const auto outcome = solver.run(x_hi, x_lo, y0, [&](const detail::DenseStep<2>& step) {
        while (next < grid.size() && grid[next] >= step.t_new) {
            w_at.emplace_back(grid[next], step(grid[next])[0]);
            ++next;
        }
        return true;
    });
    rep.status = outcome == detail::StepOutcome::Completed ? Status::Completed : Status::ToleranceFailure;

    rep.within_bound = true;
    std::vector<double> lx, lr, lm;
    for (const auto& [x, w] : w_at) {
        const BValue bv = eval_B(p.alpha, x);
        const AiryValue ai = airy_ai(x);
        PlusSample s;
        s.x = x;
        s.b_med = eval_B_median(r.amp, r.alpha_sq, x).b;
        s.v = s.b_med + w;
        s.b_opt = to_red(bv.value);
        s.err_est = bv.err_est;
        s.k_ai = r.kk * ai.ai;
        s.residual = s.v - s.b_opt - s.k_ai;
        s.residual_med = w - s.k_ai;
        rep.samples.push_back(s);

        const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(s.b_opt);
        const double bound = std::abs(r.kk) * ai.ai * std::pow(x, -0.75);
        if (std::abs(s.residual) > kPlusConstant * bound + 10.0 * s.err_est + rounding)
            rep.within_bound = false;
        if (r.kk != 0.0) {
            rep.c_emp = std::max(rep.c_emp, std::max(0.0, std::abs(s.residual) - 10.0 * s.err_est) / bound);
            const double ratio = std::abs(s.residual / s.k_ai);
            const double ratio_med = std::abs(s.residual_med / s.k_ai);
            if (ratio > 0.0 && ratio_med > 0.0) {
                lx.push_back(std::log(x));
                lr.push_back(std::log(ratio));
                lm.push_back(std::log(ratio_med));
            }
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.slope = lx.size() >= 2 ? least_squares(lx, lr).slope : nan;
    rep.slope_med = lx.size() >= 2 ? least_squares(lx, lm).slope : nan;
    return rep;
}

std::vector<ScanRow> scan_pole_free(const std::vector<PIIParams>& grid, double x_min, double x_max,
                                    const ScanConfig& cfg) {
    if (!(x_min >= -150.0 && x_max <= 15.0 && x_min < x_max && x_min < cfg.x_init))
        throw std::invalid_argument("scan_pole_free: window must lie in [-150, 15] and straddle x_init");
    std::vector<ScanRow> rows(grid.size());

    auto run_one = [&](std::size_t i) {
        const PIIParams& p = grid[i];
        ScanRow row;
        row.params = p;
        try {
            p.validate();
            row.admissible = true;
        } catch (const InvalidParams&) {
            row.admissible = false;
        }
        try {
            IntegrateOptions opts;
            opts.sample_points = {x_min};
            const State init = init_plus(p, cfg.x_init);
            Trajectory down = integrate(p, cfg.x_init, x_min, init, cfg.tol, opts);
            row.status = down.status;
            row.x_pole = down.x_pole;
            row.x_reached = down.x_reached;
            if (down.status == Status::Completed && x_max > cfg.x_init) {
                opts.sample_points = {x_max};
                Trajectory up = integrate(p, cfg.x_init, x_max, init, cfg.tol, opts);
                if (up.status != Status::Completed) {
                    row.status = up.status;
                    row.x_pole = up.x_pole;
                    row.x_reached = up.x_reached;
                }
            }
        } catch (const std::exception&) {
            row.status = Status::ToleranceFailure;
        }
        rows[i] = row;
    };

    unsigned n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(std::max<std::size_t>(1, grid.size())));
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = cursor++; i < grid.size(); i = cursor++)
                run_one(i);
        });
    for (auto& th : pool)
        th.join();

    std::stable_sort(rows.begin(), rows.end(),
                     [](const ScanRow& a, const ScanRow& b) { return sort_key(a.params) < sort_key(b.params); });
    return rows;
}

std::vector<PIIParams> default_scan_grid() {
    std::vector<PIIParams> grid;
    for (double a : {-0.4, -0.25, 0.0, 0.1, 0.3, 0.45})
        for (double r : {-0.95, -0.9, -0.6, -0.2, 0.0, 0.2, 0.6, 0.9, 0.95})
            grid.push_back(PIIParams::real(a, r * std::cos(kPi * a)));
    return grid;
}

}  // namespace pii
