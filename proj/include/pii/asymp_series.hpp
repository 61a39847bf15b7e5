#pragma once

#include <complex>
#include <vector>

namespace pii {

using cplx = std::complex<double>;

/// Coefficients a_0..a_N of the algebraic expansion
///   B(alpha; x) ~ (alpha / x) * sum_n a_n x^{-3n},   x -> +inf.
struct SeriesCoeffs {
    cplx alpha;
    std::vector<cplx> coeffs;
    bool saturated = false;  // generation stopped once |a_n| exceeded 1e300
};

inline constexpr double kSeriesMinArgument = 8.0;
inline constexpr double kCoeffSaturation = 1e300;

/// a_0 = 1, a_{n+1} = (3n+1)(3n+2) a_n - 2 alpha^2 sum_{k+l+m=n} a_k a_l a_m.
SeriesCoeffs series_coeffs(cplx alpha, int n_max);

/// How to truncate the divergent series.
struct Truncation {
    enum class Kind { Fixed, Optimal };
    Kind kind = Kind::Optimal;
    int n = 0;

    static Truncation fixed(int n) { return {Kind::Fixed, n}; }
    static Truncation optimal() { return {Kind::Optimal, 0}; }
};

struct BValue {
    cplx value;
    double err_est = 0.0;  // magnitude of the first omitted term
    int last_index = 0;    // highest n included
};

struct BDerivs {
    cplx b;
    cplx bp;
    cplx bpp;
    double err_est = 0.0;
    int last_index = 0;
};

/// Partial sum of B. In optimal mode the sum runs through the smallest term.
/// Throws std::domain_error for x < 8.
BValue eval_B(cplx alpha, double x, Truncation mode = Truncation::optimal());

/// Termwise derivatives, truncated at the same index as eval_B.
BDerivs eval_B_derivs(cplx alpha, double x, Truncation mode = Truncation::optimal());

/// Real-valued resummation of B on the positive axis.
///
/// The series is non-alternating, so its Borel transform has a pole on the
/// integration path. Optimal truncation leaves an error comparable to Ai(x)
/// itself. This routine adds the principal-value Borel sum of the tail,
/// using the late-term form
///   a_n (2/3)^{2n+1/2} amp ~ G sum_j w_j Gamma(2n + 1/2 - j),
/// where w_j are the coefficients of the decaying mode (see decaying_mode)
/// and G = amp sin(pi alpha) / (alpha pi^{3/2}). The result is the median sum
/// to O(exp(-2 zeta)).
///
/// Works in the real reduction: `amplitude` is alpha (real family) or
/// -i alpha (imaginary family); `alpha_sq` is alpha^2 in both cases.
struct MedianB {
    double b = 0.0;
    double bp = 0.0;
    double err_est = 0.0;
    int truncation_index = 0;
    int tail_terms = 0;
};

MedianB eval_B_median(double amplitude, double alpha_sq, double x);

/// Decaying solution of the linearisation w'' = (x + 6 B^2) w about B,
/// normalised so that w / Ai(x) -> 1. At alpha = 0 this is Ai itself.
struct DecayingMode {
    double w = 0.0;
    double wp = 0.0;
    double rel_err_est = 0.0;
};

DecayingMode decaying_mode(double alpha_sq, double x);

/// Coefficients c_j of the decaying mode,
///   w = e^{-zeta} x^{-1/4} / (2 sqrt(pi)) * sum_j c_j x^{-3j/2}.
std::vector<double> decaying_mode_coeffs(double alpha_sq, int j_max);

}  // namespace pii
