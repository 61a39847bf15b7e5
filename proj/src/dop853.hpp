// Adaptive Dormand-Prince 8(5,3) with dense output. Step control and error
// norm follow Hairer's DOP853 as packaged by scipy.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "dop853_tableau.hpp"

namespace pii::detail {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
class DenseStep {
  public:
    double t_old = 0.0;
    double t_new = 0.0;
    Vec<N> y_old{};
    std::array<Vec<N>, dop853::kInterpolatorPower> F{};

    Vec<N> operator()(double t) const {
        const double s = (t - t_old) / (t_new - t_old);
        Vec<N> y{};
        for (int i = 0; i < dop853::kInterpolatorPower; ++i) {
            const auto& f = F[dop853::kInterpolatorPower - 1 - i];
            const double m = (i % 2 == 0) ? s : 1.0 - s;
            for (std::size_t c = 0; c < N; ++c)
                y[c] = (y[c] + f[c]) * m;
        }
        for (std::size_t c = 0; c < N; ++c)
            y[c] += y_old[c];
        return y;
    }
};

struct StepControl {
    double rtol = 1e-11;
    double atol = std::numeric_limits<double>::min();
    double h_min = 1e-12;
    long max_steps = 2'000'000;
};

enum class StepOutcome { Completed, StepTooSmall, TooManySteps, NonFinite, Stopped };

struct StepCounters {
    double h_min = std::numeric_limits<double>::infinity();
    double h_max = 0.0;
    long accepted = 0;
    long rejected = 0;
};

template <std::size_t N, class Rhs>
class Dop853 {
  public:
    Dop853(Rhs rhs, StepControl ctl) : rhs_(std::move(rhs)), ctl_(ctl) {}

    // Integrates y from t0 to t1 (either direction). After every accepted step
    // `observer(const DenseStep<N>&)` is called; returning false stops the run.
    template <class Observer>
    StepOutcome run(double t0, double t1, Vec<N> y, Observer&& observer) {
        counters_ = {};
        last_t_ = t0;
        last_y_ = y;
        if (t0 == t1)
            return StepOutcome::Completed;
        const double dir = t1 > t0 ? 1.0 : -1.0;
        double t = t0;
        Vec<N> f = rhs_(t, y);
        double h_abs = initial_step(t, y, f, dir);
        bool rejected_last = false;

        while (dir * (t1 - t) > 0.0) {
            if (counters_.accepted + counters_.rejected >= ctl_.max_steps)
                return StepOutcome::TooManySteps;
            const double floor = std::max(ctl_.h_min, 10.0 * std::abs(std::nextafter(t, dir * HUGE_VAL) - t));
            if (h_abs < floor && std::abs(t1 - t) > floor)
                return StepOutcome::StepTooSmall;

            double h = dir * h_abs;
            double t_new = t + h;
            if (dir * (t_new - t1) > 0.0)
                t_new = t1;
            h = t_new - t;

            Vec<N> y_new;
            Vec<N> f_new;
            stages(t, y, f, h, y_new, f_new);
            const double err = error_norm(h, y, y_new);
            if (!std::isfinite(err)) {
                h_abs *= kMinFactor;
                ++counters_.rejected;
                rejected_last = true;
                if (h_abs < floor)
                    return StepOutcome::NonFinite;
                continue;
            }
            if (err >= 1.0) {
                h_abs *= std::max(kMinFactor, kSafety * std::pow(err, kExponent));
                ++counters_.rejected;
                rejected_last = true;
                continue;
            }

            double factor = err == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err, kExponent));
            if (rejected_last)
                factor = std::min(1.0, factor);
            rejected_last = false;

            ++counters_.accepted;
            counters_.h_min = std::min(counters_.h_min, std::abs(h));
            counters_.h_max = std::max(counters_.h_max, std::abs(h));

            DenseStep<N> dense = interpolant(t, t_new, y, y_new, f, f_new, h);
            t = t_new;
            y = y_new;
            f = f_new;
            last_t_ = t;
            last_y_ = y;
            h_abs = std::abs(h) * factor;
            if (!observer(dense))
                return StepOutcome::Stopped;
        }
        return StepOutcome::Completed;
    }

    // Constant steps, no error control; for order measurements.
    Vec<N> run_fixed(double t0, double t1, Vec<N> y, long n_steps) {
        const double h = (t1 - t0) / static_cast<double>(n_steps);
        double t = t0;
        Vec<N> f = rhs_(t, y);
        for (long i = 0; i < n_steps; ++i) {
            Vec<N> y_new;
            Vec<N> f_new;
            stages(t, y, f, h, y_new, f_new);
            t = t0 + (i + 1) * h;
            y = y_new;
            f = f_new;
        }
        return y;
    }

    const StepCounters& counters() const { return counters_; }
    double last_t() const { return last_t_; }
    const Vec<N>& last_y() const { return last_y_; }

  private:
    static constexpr double kSafety = 0.9;
    static constexpr double kMinFactor = 0.2;
    static constexpr double kMaxFactor = 10.0;
    static constexpr double kExponent = -1.0 / 8.0;

    double scale(const Vec<N>& a, const Vec<N>& b) const {
        double m = 0.0;
        for (std::size_t c = 0; c < N; ++c)
            m = std::max({m, std::abs(a[c]), std::abs(b[c])});
        return ctl_.atol + ctl_.rtol * m;
    }

    double initial_step(double t, const Vec<N>& y, const Vec<N>& f, double dir) {
        const double sc = scale(y, y);
        auto rms = [&](const Vec<N>& v) {
            double s = 0.0;
            for (double e : v)
                s += (e / sc) * (e / sc);
            return std::sqrt(s / N);
        };
        const double d0 = rms(y);
        const double d1 = rms(f);
        const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        Vec<N> y1;
        for (std::size_t c = 0; c < N; ++c)
            y1[c] = y[c] + h0 * dir * f[c];
        const Vec<N> f1 = rhs_(t + h0 * dir, y1);
        Vec<N> df;
        for (std::size_t c = 0; c < N; ++c)
            df[c] = f1[c] - f[c];
        const double d2 = rms(df) / h0;
        const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                       : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
        return std::min(100.0 * h0, h1);
    }

    void stages(double t, const Vec<N>& y, const Vec<N>& f, double h, Vec<N>& y_new, Vec<N>& f_new) {
        using namespace dop853;
        K_[0] = f;
        for (int s = 1; s < kStages; ++s) {
            Vec<N> ys = y;
            for (int j = 0; j < s; ++j) {
                if (A[s][j] == 0.0)
                    continue;
                for (std::size_t c = 0; c < N; ++c)
                    ys[c] += h * A[s][j] * K_[j][c];
            }
            K_[s] = rhs_(t + C[s] * h, ys);
        }
        y_new = y;
        for (int j = 0; j < kStages; ++j)
            for (std::size_t c = 0; c < N; ++c)
                y_new[c] += h * B[j] * K_[j][c];
        f_new = rhs_(t + h, y_new);
        K_[kStages] = f_new;
    }

    double error_norm(double h, const Vec<N>& y, const Vec<N>& y_new) const {
        using namespace dop853;
        const double sc = scale(y, y_new);
        double e5 = 0.0;
        double e3 = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            double a5 = 0.0;
            double a3 = 0.0;
            for (int j = 0; j <= kStages; ++j) {
                a5 += K_[j][c] * E5[j];
                a3 += K_[j][c] * E3[j];
            }
            e5 += (a5 / sc) * (a5 / sc);
            e3 += (a3 / sc) * (a3 / sc);
        }
        if (e5 == 0.0 && e3 == 0.0)
            return 0.0;
        return std::abs(h) * e5 / std::sqrt((e5 + 0.01 * e3) * N);
    }

    DenseStep<N> interpolant(double t, double t_new, const Vec<N>& y, const Vec<N>& y_new,
                             const Vec<N>& f, const Vec<N>& f_new, double h) {
        using namespace dop853;
        for (int s = kStages + 1; s < kStagesExtended; ++s) {
            Vec<N> ys = y;
            for (int j = 0; j < s; ++j) {
                if (A[s][j] == 0.0)
                    continue;
                for (std::size_t c = 0; c < N; ++c)
                    ys[c] += h * A[s][j] * K_[j][c];
            }
            K_[s] = rhs_(t + C[s] * h, ys);
        }
        DenseStep<N> d;
        d.t_old = t;
        d.t_new = t_new;
        d.y_old = y;
        for (std::size_t c = 0; c < N; ++c) {
            const double dy = y_new[c] - y[c];
            d.F[0][c] = dy;
            d.F[1][c] = h * f[c] - dy;
            d.F[2][c] = 2.0 * dy - h * (f_new[c] + f[c]);
            for (int r = 0; r < 4; ++r) {
                double s = 0.0;
                for (int j = 0; j < kStagesExtended; ++j)
                    s += D[r][j] * K_[j][c];
                d.F[3 + r][c] = h * s;
            }
        }
        return d;
    }

    Rhs rhs_;
    StepControl ctl_;
    std::array<Vec<N>, dop853::kStagesExtended> K_{};
    StepCounters counters_{};
    double last_t_ = 0.0;
    Vec<N> last_y_{};
};

}  // namespace pii::detail
