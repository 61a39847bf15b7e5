#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "pii/connection.hpp"

namespace pii {

using cplx = std::complex<double>;
using Mat2 = std::array<std::array<cplx, 2>, 2>;

struct State {
    double x = 0.0;
    cplx u;
    cplx up;
};

enum class Status { Completed, PoleDetected, ToleranceFailure };

std::string to_string(Status s);

struct StepStats {
    double h_min = 0.0;
    double h_max = 0.0;
    long count = 0;
    long rejected = 0;
};

struct Trajectory {
    PIIParams params;
    std::vector<State> samples;  // in integration order
    double tol = 0.0;
    StepStats step_stats;
    Status status = Status::Completed;
    double x_pole = 0.0;  // meaningful only for PoleDetected
    double x_reached = 0.0;
};

/// u'' - 2u^3 - xu + alpha
cplx pii_residual(double x, cplx u, cplx upp, cplx alpha);

struct LaxMatrices {
    Mat2 A;
    Mat2 U;
    cplx lambda;
};

/// A = -i(4 lambda^2 + x + 2u^2) s3 - (4 lambda u + alpha/lambda) s2 - 2u' s1,
/// U = -i lambda s3 - u s2. Throws std::domain_error at lambda = 0.
LaxMatrices lax_matrices(double x, cplx u, cplx up, cplx alpha, cplx lambda);

/// dA/dx - dU/dlambda + AU - UA with u'' = upp supplied by the caller.
/// Equals -2 (upp - 2u^3 - xu + alpha) s1.
Mat2 lax_compatibility(double x, cplx u, cplx up, cplx upp, cplx alpha, cplx lambda);

inline constexpr double kDefaultX0 = 8.0;
inline constexpr double kInitMinArgument = 8.0;

enum class BackgroundSum { Median, Optimal };

struct InitOptions {
    BackgroundSum background = BackgroundSum::Median;
    /// Use the decaying mode of the linearisation about B instead of bare Ai.
    bool dressed_mode = true;
};

/// State at x0 on the decaying branch: u ~ B(alpha; x0) + k Ai(x0).
/// Throws std::domain_error for x0 < 8.
State init_plus(const PIIParams& p, double x0 = kDefaultX0, InitOptions opts = {});

struct IntegrateOptions {
    /// Uniform sample spacing from x_start; ignored when sample_points is set.
    double sample_spacing = 0.5;
    /// Explicit sample abscissae, monotone in the direction of integration.
    std::vector<double> sample_points;
    double pole_threshold = 1e6;
    double min_step = 1e-12;
    long max_steps = 2'000'000;
};

/// Adaptive 8th-order integration of the real reduction from x_start to x_end
/// (either direction). Never throws for bad dynamics; see Trajectory::status.
/// Throws InvalidParams for family violations and std::invalid_argument for
/// tol outside [1e-14, 1e-6].
Trajectory integrate(const PIIParams& p, double x_start, double x_end, const State& init, double tol,
                     const IntegrateOptions& opts = {});

/// Fixed-step run of the same scheme, returning the end state. For order checks.
State integrate_fixed(const PIIParams& p, double x_start, double x_end, const State& init, long n_steps);

}  // namespace pii
