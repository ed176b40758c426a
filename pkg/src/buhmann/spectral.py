"""Hankel spectral densities of compact radial kernels.

The m-dimensional Hankel transform used throughout is

    F_m(h)(t) = int_0^inf h(u) u^(m-1) j_(m/2-1)(t u) du,

with j_lam the normalized Bessel function; F_m differs from the radial
Fourier transform by a (2 pi)^(m/2) factor, and the one-dimensional Fourier
transform of the even extension is sqrt(2 pi) * F_1.  Nonnegativity of F_m
characterizes positive definiteness on R^m for continuous integrable kernels.

Two backends are provided: an oscillation-aware quadrature over the compact
support, and a 1F2 closed form available for the h-kernel family (and for
scalings, Wendland kernels and weighted differences of it, by linearity).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .kernels import RadialKernel, kernel_eval
from .specfn import (
    EvaluationError,
    PrecisionLossError,
    default_tolerance,
    gamma_fn,
    hyp1f2,
    j_norm,
    j_norm_array,
)

__all__ = [
    "I_integral",
    "SpectralConstants",
    "SpectralDensity",
    "fourier1d",
    "hankel_h_closed",
    "hankel_quadrature",
    "laplace_identity_rhs",
]


def I_integral(delta, mu, nu, alpha, t, tol=None):
    """The oscillatory moment integral

        I_{delta,mu,nu,alpha}(t) = int_0^1 (1-x^delta)^(mu-1) x^alpha
                                    j_(nu-1/2)(t x) dx.

    The substitution x = sin^2(theta) absorbs the endpoint singularities at
    x = 0 (alpha < 0) and x = 1 (mu < 1).  Requires delta, mu, alpha+1 > 0
    and nu > -1/2.
    """
    if not (delta > 0 and mu > 0 and alpha + 1 > 0):
        raise ValueError(f"require delta, mu, alpha+1 > 0; got ({delta}, {mu}, {alpha})")
    if not nu > -0.5:
        raise ValueError(f"require nu > -1/2, got {nu}")
    if t < 0:
        raise ValueError(f"require t >= 0, got {t}")
    tol = tol or default_tolerance()
    lam = nu - 0.5

    def integrand(theta):
        sn = math.sin(theta)
        cs = math.cos(theta)
        xv = sn * sn
        return (
            2.0
            * sn ** (2.0 * alpha + 1.0)
            * cs
            * (1.0 - xv**delta) ** (mu - 1.0)
            * j_norm(lam, t * xv)
        )

    limit = 100 + int(12 * t)
    value, err = quad(
        integrand, 0.0, 0.5 * math.pi, epsabs=1e-13, epsrel=max(tol.rel, 1e-11), limit=limit
    )
    if not math.isfinite(value):
        raise EvaluationError("I integral quadrature failed", estimate=err)
    return value


# 15-point Kronrod rule with embedded 7-point Gauss rule; the Gauss nodes are
# the odd-index entries of the sorted Kronrod abscissae.
_GK_NODES = np.array(
    [
        -0.991455371120813,
        -0.949107912342759,
        -0.864864423359769,
        -0.741531185599394,
        -0.586087235467691,
        -0.405845151377397,
        -0.207784955007898,
        0.0,
        0.207784955007898,
        0.405845151377397,
        0.586087235467691,
        0.741531185599394,
        0.864864423359769,
        0.949107912342759,
        0.991455371120813,
    ]
)
_GK_WEIGHTS = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
        0.204432940075298,
        0.190350578064785,
        0.169004726639267,
        0.140653259715525,
        0.104790010322250,
        0.063092092629979,
        0.022935322010529,
    ]
)
_G7_WEIGHTS = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
        0.381830050505119,
        0.279705391489277,
        0.129484966168870,
    ]
)


def _gk15_panels(fn, panels):
    """Apply Gauss-Kronrod 15(7) to each [a, b] row of ``panels``.

    Returns (integrals, error_estimates) per panel; ``fn`` must accept a flat
    array of evaluation points.
    """
    a = panels[:, 0]
    b = panels[:, 1]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GK_NODES[None, :]
    vals = fn(pts.ravel()).reshape(pts.shape)
    k15 = vals @ _GK_WEIGHTS * half
    g7 = vals[:, 1::2] @ _G7_WEIGHTS * half
    return k15, np.abs(k15 - g7) + 1e-300


def _panel_quadrature(fn, boundaries, rel, abs_floor, max_splits=400):
    panels = np.column_stack([boundaries[:-1], boundaries[1:]])
    vals, errs = _gk15_panels(fn, panels)
    panels = list(map(tuple, panels))
    vals = list(vals)
    errs = list(errs)
    for _ in range(max_splits):
        total = math.fsum(vals)
        err = math.fsum(errs)
        if err <= max(abs_floor, rel * abs(total)):
            break
        i = int(np.argmax(errs))
        a, b = panels[i]
        if b - a < 1e-15 * max(abs(a), 1.0):
            break
        sub = np.array([[a, 0.5 * (a + b)], [0.5 * (a + b), b]])
        v2, e2 = _gk15_panels(fn, sub)
        panels[i] = tuple(sub[0])
        vals[i] = v2[0]
        errs[i] = e2[0]
        panels.append(tuple(sub[1]))
        vals.append(v2[1])
        errs.append(e2[1])
    return math.fsum(vals), math.fsum(errs)


def hankel_quadrature(k, m, t, tol=None, return_error=False):
    """Quadrature backend for F_m(k)(t) over the kernel's compact support.

    For t * support beyond a few radians the range is split into panels of
    length pi/t aligned with the sign changes of the Bessel factor, each
    integrated by Gauss-Kronrod 15(7) with error-driven refinement.  The
    value at t = 0 is the continuous extension.
    """
    if m < 1 or m != int(m):
        raise ValueError(f"dimension must be a positive integer, got {m}")
    if t < 0:
        raise ValueError(f"require t >= 0, got {t}")
    tol = tol or default_tolerance()
    R = k.support
    lam = 0.5 * m - 1.0

    def integrand(us):
        return kernel_eval(k, us) * us ** (m - 1.0) * j_norm_array(lam, t * us)

    if t * R <= 2.0 * math.pi:
        boundaries = np.linspace(0.0, R, 5)
    else:
        # McMahon approximation of the Bessel zeros is plenty for alignment
        offset = (0.5 * lam - 0.25) * math.pi
        zeros = [(j * math.pi + offset) / t for j in range(1, int(t * R / math.pi) + 2)]
        inner = [z for z in zeros if 1e-12 * R < z < R * (1 - 1e-12)]
        boundaries = np.array([0.0] + inner + [R])
    rel = max(tol.rel, 1e-12)
    value, err = _panel_quadrature(integrand, boundaries, rel, abs_floor=1e-14)
    if not math.isfinite(value):
        raise EvaluationError("Hankel quadrature failed", estimate=err)
    if return_error:
        return value, err
    return value


def _log_d_constant(m, mu, nu):
    return (
        -0.5 * m * math.log(2.0)
        + gammaln(nu)
        + gammaln(mu)
        + gammaln(m - 1.0 + 2.0 * nu)
        - gammaln(0.5 * m + nu)
        - gammaln(mu + m - 1.0 + 2.0 * nu)
    )


@dataclass(frozen=True)
class SpectralConstants:
    """The closed-form constants of the h-kernel spectral identities.

    ``d`` scales the 1F2 closed form of F_m(h_{mu,nu}); ``c`` is the Laplace
    identity constant, c = d * Gamma(mu + m - 1 + 2 nu).
    """

    d: float
    c: float

    @classmethod
    def for_params(cls, m, mu, nu):
        _check_h_spectrum_params(m, mu, nu)
        d = math.exp(_log_d_constant(m, mu, nu))
        return cls(d=d, c=d * gamma_fn(mu + m - 1.0 + 2.0 * nu))


def _check_h_spectrum_params(m, mu, nu):
    if m < 1 or m != int(m):
        raise ValueError(f"dimension must be a positive integer, got {m}")
    if not (mu > 0 and nu > 0 and 2.0 * nu - 1.0 + m > 0):
        raise ValueError(f"require mu, nu, 2nu-1+m > 0; got ({mu}, {nu}, m={m})")


def hankel_h_closed(m, mu, nu, t, tol=None, allow_fallback=True):
    """Closed-form F_m(h_{mu,nu})(t) via the 1F2 hypergeometric series,

        D(m,mu,nu) * 1F2((m-1)/2+nu; (m-1)/2+nu+mu/2, (m-1)/2+nu+(mu+1)/2;
                         -t^2/4).

    When the alternating series flags precision loss (large t), falls back to
    :func:`hankel_quadrature` unless ``allow_fallback`` is False.
    """
    _check_h_spectrum_params(m, mu, nu)
    p = 0.5 * (m - 1.0) + nu
    d = math.exp(_log_d_constant(m, mu, nu))
    try:
        series = hyp1f2(p, p + 0.5 * mu, p + 0.5 * (mu + 1.0), -0.25 * t * t, tol)
    except PrecisionLossError:
        if not allow_fallback:
            raise
        return hankel_quadrature(RadialKernel.h(mu, nu), m, t, tol)
    return d * series


def laplace_identity_rhs(m, mu, nu, x):
    """Closed form C(m,mu,nu) / (x^mu (1+x^2)^((m-1)/2+nu)).

    This equals the Laplace transform of t^(m-1+2nu+mu-1) F_m(h_{mu,nu})(t),
    with the canonical Hankel normalization above; no extra constant enters.
    """
    if not x > 0:
        raise ValueError(f"require x > 0, got {x}")
    consts = SpectralConstants.for_params(m, mu, nu)
    return consts.c / (x**mu * (1.0 + x * x) ** (0.5 * (m - 1.0) + nu))


def fourier1d(k, t, tol=None):
    """One-dimensional Fourier transform of the kernel's even extension.

    Equals sqrt(2 pi) * F_1(k)(t) = 2 int_0^R k(u) cos(t u) du.
    """
    return math.sqrt(2.0 * math.pi) * hankel_quadrature(k, 1, t, tol)


def _reduce_to_h(k):
    """Express a kernel as sum_i c_i * h_{mu_i,nu_i}(. / b_i), if possible.

    Returns a list of (coef, scale, mu, nu) terms, or None when the family
    does not reduce to the h-kernel (which is what the 1F2 backend needs).
    """
    if k.family == "h":
        mu, nu = k.params
        return [(1.0, 1.0, mu, nu)]
    if k.family == "askey":
        (mu,) = k.params
        return [(mu, 1.0, mu, 1.0)]
    if k.family == "wendland":
        mu, kk = k.params
        coef = mu / (2.0**kk * math.factorial(kk))
        return [(coef, 1.0, mu, kk + 1.0)]
    if k.family == "buhmann":
        delta, mu, nu, alpha = k.params
        if delta == 1.0 and alpha == 2.0 * nu - 1.0:
            return [(1.0, 1.0, mu, nu)]
        return None
    if k.family == "scaled":
        inner, beta = k.params
        terms = _reduce_to_h(inner)
        if terms is None:
            return None
        return [(c, b * beta, mu, nu) for (c, b, mu, nu) in terms]
    if k.family == "difference":
        d = k.params
        return [
            (d.beta2**d.eps, d.beta2, d.mu, d.nu),
            (-(d.beta1**d.eps), d.beta1, d.mu, d.nu),
        ]
    return None


@dataclass(frozen=True)
class SpectralDensity:
    """Evaluator of F_m(kernel) with selectable backend.

    backend is one of "quad", "closed", "auto".  The closed backend uses the
    1F2 form and is only available for kernels reducible to (combinations of)
    the h-kernel; "auto" prefers it and silently falls back to quadrature,
    both per-term on precision loss and wholesale for irreducible families.
    """

    kernel: RadialKernel
    m: int
    backend: str = "auto"

    def __post_init__(self):
        if self.backend not in ("quad", "closed", "auto"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.m < 1 or self.m != int(self.m):
            raise ValueError(f"dimension must be a positive integer, got {self.m}")
        if self.backend == "closed" and _reduce_to_h(self.kernel) is None:
            raise ValueError(
                f"closed-form backend not available for family {self.kernel.family!r}"
            )

    def __call__(self, t, tol=None):
        ts = np.asarray(t, dtype=float)
        flat = np.atleast_1d(ts).astype(float)
        out = np.array([self._eval_one(tv, tol) for tv in flat])
        return float(out[0]) if ts.ndim == 0 else out.reshape(ts.shape)

    def _eval_one(self, t, tol=None):
        if self.backend == "quad":
            return hankel_quadrature(self.kernel, self.m, t, tol)
        terms = _reduce_to_h(self.kernel)
        if terms is None:
            return hankel_quadrature(self.kernel, self.m, t, tol)
        total = 0.0
        for coef, b, mu, nu in terms:
            allow = self.backend == "auto"
            total += coef * b**self.m * hankel_h_closed(
                self.m, mu, nu, b * t, tol, allow_fallback=allow
            )
        return total
