#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pii/connection.hpp"
#include "pii/pii_ode.hpp"

namespace pii {

class FitFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Station {
    double x = 0.0;
    double d_est = 0.0;  // |d| estimate; d itself is i|d| on the imaginary family
    double phi_est = 0.0;
};

struct FitResult {
    Family model = Family::RealAS;
    std::vector<Station> stations;  // ordered by decreasing x
    cplx d_fit;
    double phi_fit = 0.0;
    double fit_residual = 0.0;    // rms residual of the phase regression
    double d_fit_residual = 0.0;  // rms residual of the amplitude regression
};

/// n points log-spaced in -x over [m_lo, m_hi], returned as negative x,
/// ordered from -m_lo to -m_hi.
std::vector<double> station_grid(int n = 24, double m_lo = 60.0, double m_hi = 150.0);

/// Amplitude/phase extraction from every sample with x <= -40, followed by
/// linear extrapolation in (-x)^{-3/4}. The amp/x background is removed first.
/// `model` defaults to the trajectory's own family.
/// Throws FitFailure for fewer than 3 stations, a vanishing amplitude, or a
/// phase spread above pi/2 after unwrapping.
FitResult fit_oscillation(const Trajectory& traj);
FitResult fit_oscillation(const Trajectory& traj, Family model);

struct VerifyConfig {
    double x0 = kDefaultX0;
    double x_end = -150.0;
    double tol = 1e-11;
    int stations = 24;
    double tol_d = 1e-3;
    double tol_phi = 1e-2;
    InitOptions init;
};

struct VerificationReport {
    PIIParams params;
    ConnectionData predicted;
    FitResult fitted;
    double err_d_rel = 0.0;
    double err_phi_abs = 0.0;
    Status pole_status = Status::Completed;
    double x_pole = 0.0;
    bool pass = false;
    std::string error;  // set when something failed before comparison
    double seconds = 0.0;
};

/// init_plus -> integrate -> fit_oscillation -> compare with the connection
/// formulas. Failures are reported, never thrown.
VerificationReport verify_connection(const PIIParams& p, const VerifyConfig& cfg = {});

/// O(1) constant admitted in front of |k| Ai(x) x^{-3/4} by verify_plus.
inline constexpr double kPlusConstant = 1.0;

struct PlusSample {
    double x = 0.0;
    double v = 0.0;         // reduced solution
    double b_opt = 0.0;     // optimally truncated series (reduced)
    double err_est = 0.0;   // its first omitted term
    double k_ai = 0.0;      // k Ai(x) (reduced)
    double residual = 0.0;  // v - b_opt - k_ai
    double b_med = 0.0;     // resummed series (reduced)
    double residual_med = 0.0;  // v - b_med - k_ai
};

struct PlusReport {
    PIIParams params;
    std::vector<PlusSample> samples;  // decreasing x
    Status status = Status::Completed;
    double c_emp = 0.0;    // max (|res| - 10 err) / (|k| Ai x^{-3/4}); 0 when k = 0
    double slope = 0.0;    // log-log slope of |res| / (|k| Ai) against x; NaN when k = 0
    double slope_med = 0.0;     // same with the resummed background
    /// |res| <= kPlusConstant |k| Ai x^{-3/4} + 10 err_est + rounding of B, everywhere
    bool within_bound = false;
};

/// Integrates from x_hi down to x_lo, 8 <= x_lo < x_hi <= 15, and compares
/// with B(alpha; x) + k Ai(x).
///
/// The solution is carried as v = B_med + w with B_med the resummed series,
/// so that k Ai survives in double precision even where it is far below the
/// rounding level of B.
PlusReport verify_plus(const PIIParams& p, double x_lo = 8.0, double x_hi = 15.0, double spacing = 0.25,
                       double tol = 1e-12);

struct ScanRow {
    PIIParams params;
    bool admissible = false;
    Status status = Status::Completed;
    double x_pole = 0.0;
    double x_reached = 0.0;
};

struct ScanConfig {
    double tol = 1e-11;
    double x_init = kDefaultX0;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Integrates each grid point over [x_min, x_max] (down from x_init to
/// x_min, and up from x_init to x_max when x_max > x_init). Rows are sorted
/// by (family, alpha, k) independent of scheduling.
std::vector<ScanRow> scan_pole_free(const std::vector<PIIParams>& grid, double x_min, double x_max,
                                    const ScanConfig& cfg = {});

/// The admissible real grid alpha x {r cos(pi alpha)} used by the pole scan.
std::vector<PIIParams> default_scan_grid();

}  // namespace pii
