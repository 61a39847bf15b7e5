#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>

namespace pii {

using cplx = std::complex<double>;

enum class Family { RealAS, ImagAS };

std::string to_string(Family f);

class InvalidParams : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// (alpha, k) = (0, 0): the zero solution, phase undefined.
class DegenerateParams : public InvalidParams {
  public:
    using InvalidParams::InvalidParams;
};

/// |k| >= cos(pi alpha) on the real family, or 1 - s1 s3 <= 0.
class BoundaryParams : public InvalidParams {
  public:
    using InvalidParams::InvalidParams;
};

/// Real ODE integrated for either family:
///   v'' = 2 sigma v^3 + x v - amp,  v ~ B + kk Ai  as x -> +inf.
/// RealAS: v = u, sigma = +1. ImagAS: v = -i u, sigma = -1, amp = -i alpha.
struct RealReduction {
    double amp = 0.0;
    double alpha_sq = 0.0;
    double kk = 0.0;
    double sigma = 1.0;
};

struct PIIParams {
    cplx alpha;
    cplx k;
    Family family = Family::RealAS;

    static PIIParams real(double alpha, double k) { return {alpha, k, Family::RealAS}; }
    /// alpha = i * alpha_im, k = i * k_im
    static PIIParams imag(double alpha_im, double k_im) {
        return {cplx(0.0, alpha_im), cplx(0.0, k_im), Family::ImagAS};
    }

    /// Real/imaginary structure of the family. Enough for integration,
    /// which also covers the singular range |k| > cos(pi alpha).
    void check_family() const;
    /// Full admissibility: check_family plus |alpha| < 1/2, |k| < cos(pi alpha)
    /// on the real family.
    void validate() const;
    bool is_trivial() const { return alpha == 0.0 && k == 0.0; }
    RealReduction reduced() const;
};

struct StokesTriple {
    cplx s1;
    cplx s2;
    cplx s3;

    /// s1 - s2 + s3 + s1 s2 s3 + 2 sin(pi alpha)
    cplx constraint_residual(cplx alpha) const;
};

struct ConnectionData {
    cplx d;
    double phi = 0.0;
    cplx nu;
};

struct TrivialConnection {};

using Connection = std::variant<TrivialConnection, ConnectionData>;

StokesTriple stokes_from_params(const PIIParams& p);

/// nu = -ln(1 - s1 s3) / (2 pi i). Throws BoundaryParams if 1 - s1 s3 is
/// not a positive real.
cplx nu_exponent(const StokesTriple& s);

ConnectionData connection_real(double alpha, double k);
/// Arguments are the imaginary parts: alpha = i alpha_im, k = i k_im.
ConnectionData connection_imag(double alpha_im, double k_im);

/// Validates p, then dispatches; (0, 0) gives TrivialConnection.
Connection connect(const PIIParams& p);

/// Leading two-exponential term at -inf built from s1, s3, nu and Gamma(nu).
/// RealAS returns a real number, ImagAS a purely imaginary one. Zero at (0, 0).
cplx oscillatory_leading_term(double x, const PIIParams& p);

/// Closed-form carrier d (-x)^{-1/4} cos(...) (sin for ImagAS).
cplx closed_form_leading_term(double x, const PIIParams& p, const ConnectionData& c);

/// Reduce to (-pi, pi].
double wrap_phase(double phi);
/// |a - b| measured on the circle, in [0, pi].
double circular_distance(double a, double b);

}  // namespace pii
