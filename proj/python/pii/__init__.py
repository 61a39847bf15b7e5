"""Ablowitz-Segur solutions of the inhomogeneous Painleve II equation."""

from ._pii import (  # noqa: F401
    FitFailure,
    InvalidParams,
    airy_ai,
    arg_gamma_imag,
    connect,
    eval_B,
    integrate,
    log_gamma,
    oscillatory_leading_term,
    scan_pole_free,
    series_coeffs,
    verify_connection,
)
