#pragma once

#include <complex>

namespace pii {

using cplx = std::complex<double>;

/// Ai(x) and Ai'(x) on the decaying side, x >= 8.
struct AiryValue {
    double x = 0.0;
    double ai = 0.0;
    double ai_prime = 0.0;
    double rel_err_est = 0.0;  // first omitted term relative to the partial sum
};

inline constexpr double kAiryMinArgument = 8.0;

/// Large-argument expansion of Ai, truncated at its smallest term.
/// Throws std::domain_error for x < 8.
AiryValue airy_ai(double x);

/// Principal branch of log Gamma(z); continuous in each open half-plane and
/// real on the positive real axis. Throws std::domain_error at the poles
/// z = 0, -1, -2, ...
cplx log_gamma(cplx z);

/// Im log Gamma(iy). Throws std::domain_error at y = 0.
double arg_gamma_imag(double y);

}  // namespace pii
