"""Special functions backing the kernel and spectral evaluators.

Everything here is real-valued and scalar: normalized Bessel functions of
the first kind, the characteristic function of the uniform distribution on
the sphere, the generalized hypergeometric series 1F2, Gamma/Beta wrappers,
and a truncated numeric Laplace transform.
"""

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.integrate import quad

__all__ = [
    "Tolerance",
    "EvaluationError",
    "PrecisionLossError",
    "default_tolerance",
    "j_norm",
    "j_norm_array",
    "bessel_j",
    "omega_m",
    "hyp1f2",
    "gamma_fn",
    "beta_fn",
    "laplace_numeric",
]


class EvaluationError(RuntimeError):
    """A numeric evaluation failed to reach the requested accuracy."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class PrecisionLossError(EvaluationError):
    """An alternating series lost too many digits to cancellation."""


@dataclass(frozen=True)
class Tolerance:
    """Accuracy targets shared by the series and quadrature evaluators.

    Attributes
    ----------
    rel : float
        Relative tolerance for series truncation and quadratures.
    abs : float
        Absolute floor used to guard relative tests near zero.
    max_terms : int
        Hard cap on series terms before giving up.
    """

    rel: float = 1e-12
    abs: float = 1e-300
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.rel > 0:
            raise ValueError("rel tolerance must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


def default_tolerance():
    """Default :class:`Tolerance`, honoring the BUHMANN_TOL env variable."""
    env = os.environ.get("BUHMANN_TOL")
    if env is None:
        return Tolerance()
    return Tolerance(rel=float(env))


# Beyond this the power series loses ~e^x/eps digits to cancellation, so we
# delegate to the standard (scipy/AMOS) Bessel evaluation instead.
_SERIES_CUTOFF = 10.0


def j_norm(lam, x, tol=None):
    """Normalized Bessel function J_lam(x) / x^lam.

    Unlike the ratio, this is an entire function of x; its power series is

        sum_k (-x^2/4)^k / (2^lam k! Gamma(k + lam + 1)),

    which gives j_norm(lam, 0) = 1 / (2^lam Gamma(lam + 1)).

    Parameters
    ----------
    lam : float
        Order, must be > -1.
    x : float
        Argument, must be >= 0.
    """
    if lam <= -1:
        raise ValueError(f"order must be > -1, got {lam}")
    if x < 0:
        raise ValueError(f"argument must be >= 0, got {x}")
    tol = tol or default_tolerance()
    if x > _SERIES_CUTOFF:
        return special.jv(lam, x) / x**lam

    term = 1.0 / (2.0**lam * special.gamma(lam + 1.0))
    total = term
    q = -0.25 * x * x
    for k in range(tol.max_terms):
        term *= q / ((k + 1.0) * (k + lam + 1.0))
        total += term
        if abs(term) <= tol.rel * abs(total) + tol.abs:
            return total
    raise EvaluationError(
        f"j_norm series did not converge within {tol.max_terms} terms",
        estimate=abs(term),
    )


def j_norm_array(lam, x):
    """Vectorized j_norm over a nonnegative array, for quadrature hot paths.

    Uses the standard Bessel evaluation except very near zero, where the
    two-term series avoids the 0/0 ratio.
    """
    x = np.asarray(x, dtype=float)
    j0 = 1.0 / (2.0**lam * special.gamma(lam + 1.0))
    small = x < 1e-6
    safe = np.where(small, 1.0, x)
    with np.errstate(invalid="ignore", divide="ignore"):
        large_vals = special.jv(lam, safe) / safe**lam
    series = j0 * (1.0 - x * x / (4.0 * (lam + 1.0)))
    return np.where(small, series, large_vals)


def bessel_j(lam, x, tol=None):
    """Bessel function of the first kind J_lam(x) = x^lam * j_norm(lam, x)."""
    if x == 0.0:
        if lam == 0.0:
            return 1.0
        return 0.0 if lam > 0 else math.inf
    return x**lam * j_norm(lam, x, tol)


def omega_m(m, t, tol=None):
    """Characteristic function of the uniform distribution on the sphere in R^m.

    Omega_m(t) = 2^((m-2)/2) Gamma(m/2) j_norm(m/2 - 1, t); Omega_1 = cos,
    Omega_3 = sin(t)/t.  Takes values in [-1, 1] with Omega_m(0) = 1.
    """
    if m < 1 or m != int(m):
        raise ValueError(f"dimension must be a positive integer, got {m}")
    half = 0.5 * m
    return 2.0 ** (half - 1.0) * special.gamma(half) * j_norm(half - 1.0, t, tol)


# Result/max-partial-sum ratio below which we declare the 1F2 series dead to
# cancellation; callers fall back to quadrature.
_CANCEL_FLOOR = 1e-10


def hyp1f2(a, b1, b2, z, tol=None):
    """Generalized hypergeometric series 1F2(a; b1, b2; z).

    Sums the series with term-ratio stopping.  For z < 0 the partial sums can
    grow far beyond the result; the largest partial-sum magnitude is tracked
    and a :class:`PrecisionLossError` is raised when fewer than ~6 significant
    digits survive the cancellation.

    Raises
    ------
    ValueError
        If b1 or b2 is zero or a negative integer (series poles).
    PrecisionLossError
        Cancellation beyond the 1e-10 result/max-partial threshold; the
        exception carries the attained absolute error estimate.
    EvaluationError
        No convergence within ``tol.max_terms`` terms.
    """
    for b in (b1, b2):
        if b <= 0 and b == int(b):
            raise ValueError(f"lower parameter {b} is a series pole")
    tol = tol or default_tolerance()

    term = 1.0
    total = 1.0
    max_partial = 1.0
    converged = False
    for k in range(tol.max_terms):
        term *= (a + k) * z / ((b1 + k) * (b2 + k) * (k + 1.0))
        total += term
        max_partial = max(max_partial, abs(total))
        next_ratio = abs((a + k + 1) * z) / abs((b1 + k + 1) * (b2 + k + 1) * (k + 2.0))
        # stop only past the terms' hump, once they are negligible
        if next_ratio < 1.0 and abs(term) <= tol.rel * abs(total) + tol.abs:
            converged = True
            break
    if not converged:
        raise EvaluationError(
            f"1F2 series did not converge within {tol.max_terms} terms",
            estimate=abs(term),
        )

    if abs(total) < _CANCEL_FLOOR * max_partial:
        err = max_partial * 2.3e-16
        raise PrecisionLossError(
            f"1F2({a}; {b1}, {b2}; {z}) lost precision: "
            f"|result| {abs(total):.3e} vs largest partial sum {max_partial:.3e}",
            estimate=err,
        )
    return total


def gamma_fn(x):
    """Gamma function for positive real arguments."""
    if x <= 0:
        raise ValueError(f"gamma_fn requires a positive argument, got {x}")
    return special.gamma(x)


def beta_fn(a, b):
    """Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0."""
    if a <= 0 or b <= 0:
        raise ValueError(f"beta_fn requires positive arguments, got ({a}, {b})")
    return special.beta(a, b)


def laplace_numeric(g, x, tail_cut=None, tol=None):
    """Truncated numeric Laplace transform integral_0^inf e^(-x s) g(s) ds.

    Parameters
    ----------
    g : callable
        Integrand factor, defined on (0, inf).
    x : float
        Transform variable, must be > 0.
    tail_cut : float, optional
        Truncation point; defaults to 50/x, which suffices whenever
        e^(-x t) |g(t)| is negligible past that point.

    Returns
    -------
    (value, error_estimate) : tuple of float
    """
    if x <= 0:
        raise ValueError(f"laplace_numeric requires x > 0, got {x}")
    tol = tol or default_tolerance()
    if tail_cut is None:
        tail_cut = 50.0 / x
    value, err = quad(
        lambda s: math.exp(-x * s) * g(s),
        0.0,
        tail_cut,
        epsabs=tol.abs if tol.abs > 1e-250 else 1e-14,
        epsrel=max(tol.rel, 1e-12),
        limit=400,
    )
    if not math.isfinite(value):
        raise EvaluationError("Laplace quadrature returned a non-finite value", estimate=err)
    return value, err
