"""Compactly supported radial kernel families and their evaluators.

The core family is the four-parameter integral kernel

    phi_{delta,mu,nu,alpha}(x) = int_|x|^1 (s^2-x^2)^(nu-1) (1-s^delta)^(mu-1)
                                  s^(alpha-2nu+1) ds        for |x| < 1,

vanishing for |x| >= 1.  Specializations evaluated in closed form:

* Askey:      (1 - x)_+^mu                       (delta=1, nu=1, alpha=1, scaled)
* h-kernel:   h_{mu,nu} = phi_{1,mu,nu,2nu-1}    (closed form for nu = 1, 2, 3)
* Wendland:   psi_{mu,k}, the k-fold montee of the Askey kernel.

All evaluators are functions of the radius |x| and return exact zeros at and
beyond the support radius.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .specfn import EvaluationError, beta_fn, default_tolerance

__all__ = [
    "BuhmannParams",
    "DiffParams",
    "RadialKernel",
    "askey_eval",
    "buhmann_eval",
    "h_eval",
    "h_eval_overlap",
    "kernel_eval",
    "wendland_eval",
    "wendland_normalized",
]


@dataclass(frozen=True)
class BuhmannParams:
    """Parameters (delta, mu, nu, alpha) of the integral kernel family."""

    delta: float
    mu: float
    nu: float
    alpha: float

    def __post_init__(self):
        for name in ("delta", "mu", "nu", "alpha"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def continuous(self):
        """True when the kernel extends continuously to all of R."""
        return self.mu + self.nu - 1 > 0


@dataclass(frozen=True)
class DiffParams:
    """Parameters of the weighted-difference kernel

    f(x) = beta2^eps h_{mu,nu}(x/beta2) - beta1^eps h_{mu,nu}(x/beta1).
    """

    mu: float
    nu: float
    eps: float
    beta1: float
    beta2: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.nu > 0.5:
            raise ValueError(f"nu must exceed 1/2, got {self.nu}")
        if not self.mu + self.nu > 1:
            raise ValueError("mu + nu must exceed 1 for a continuous kernel")
        if not (self.beta1 > 0 and self.beta2 > 0):
            raise ValueError("scale parameters must be positive")

    @property
    def degenerate(self):
        """True when both scales coincide and the kernel is identically zero."""
        return self.beta1 == self.beta2


def _quad_strict(fn, a, b, what, tol=None, limit=200):
    tol = tol or default_tolerance()
    value, err = quad(fn, a, b, epsabs=1e-14, epsrel=max(tol.rel, 1e-11), limit=limit)
    if not math.isfinite(value) or (abs(value) > 1e-280 and err > 1e-6 * abs(value) + 1e-12):
        raise EvaluationError(f"quadrature failed for {what}", estimate=err)
    return value


def buhmann_eval(p, x, tol=None):
    """Evaluate the integral kernel phi_{delta,mu,nu,alpha} at radius x >= 0.

    The integration variable is substituted s = x + (1-x) sin^2(theta), which
    absorbs the algebraic endpoint singularities at s = x (for nu < 1) and
    s = 1 (for mu < 1) into integrable trigonometric powers.

    Parameters
    ----------
    p : BuhmannParams
    x : float
        Radius, >= 0.  Values >= 1 return exactly 0.
    """
    if x < 0:
        raise ValueError(f"radius must be >= 0, got {x}")
    if x >= 1.0:
        return 0.0
    if x == 0.0:
        return beta_fn(p.alpha / p.delta, p.mu) / p.delta

    d, mu, nu, al = p.delta, p.mu, p.nu, p.alpha
    w = 1.0 - x

    def integrand(theta):
        sn = math.sin(theta)
        cs = math.cos(theta)
        s = x + w * sn * sn
        # (s^2-x^2)^(nu-1) = (w sin^2)^(nu-1) (s+x)^(nu-1); with ds this
        # yields the sin^(2nu-1) cos factor below.
        return (
            2.0
            * w**nu
            * sn ** (2.0 * nu - 1.0)
            * cs
            * (s + x) ** (nu - 1.0)
            * (1.0 - s**d) ** (mu - 1.0)
            * s ** (al - 2.0 * nu + 1.0)
        )

    return _quad_strict(integrand, 0.0, 0.5 * math.pi, f"buhmann kernel at x={x}", tol)


def askey_eval(mu, x):
    """Askey kernel (1 - x)_+^mu; accepts scalars or arrays."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    x = np.asarray(x, dtype=float)
    out = np.where(x < 1.0, np.maximum(1.0 - x, 0.0) ** mu, 0.0)
    return float(out) if out.ndim == 0 else out


def _h_closed(mu, nu, x):
    """Closed forms of h_{mu,nu} for nu in {1, 2, 3} (polynomial times power)."""
    one = np.maximum(1.0 - x, 0.0)
    if nu == 1:
        return one**mu / mu
    if nu == 2:
        return 2.0 * one ** (mu + 1.0) * (1.0 + (mu + 1.0) * x) / (mu * (mu + 1.0) * (mu + 2.0))
    poly = 3.0 + 3.0 * (mu + 2.0) * x + (mu + 1.0) * (mu + 3.0) * x * x
    denom = mu * (mu + 1.0) * (mu + 2.0) * (mu + 3.0) * (mu + 4.0)
    return 8.0 * one ** (mu + 2.0) * poly / denom


def _h_quad(mu, nu, x, tol=None):
    """Fixed-endpoint integral representation of h_{mu,nu}:

    h(x) = (1-x)^(mu+nu-1) int_0^1 t^(mu-1) (1-t)^(nu-1) (1-t+(1+t)x)^(nu-1) dt

    evaluated after t = sin^2(theta), which regularizes both endpoints.
    """
    prefac = (1.0 - x) ** (mu + nu - 1.0)

    def integrand(theta):
        sn = math.sin(theta)
        cs = math.cos(theta)
        t = sn * sn
        return (
            2.0
            * sn ** (2.0 * mu - 1.0)
            * cs ** (2.0 * nu - 1.0)
            * (1.0 - t + (1.0 + t) * x) ** (nu - 1.0)
        )

    return prefac * _quad_strict(integrand, 0.0, 0.5 * math.pi, f"h kernel at x={x}", tol)


def h_eval(mu, nu, x, tol=None):
    """Evaluate the kernel h_{mu,nu} = phi_{1,mu,nu,2nu-1} at radius x >= 0.

    Uses closed forms for nu in {1, 2, 3}; otherwise the fixed-endpoint
    integral representation (see :func:`_h_quad`).  Accepts scalars or arrays.
    """
    if not (mu > 0 and nu > 0):
        raise ValueError(f"mu and nu must be positive, got ({mu}, {nu})")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("radius must be >= 0")
    if nu in (1.0, 2.0, 3.0):
        out = np.where(arr < 1.0, _h_closed(mu, nu, np.minimum(arr, 1.0)), 0.0)
        return float(out) if out.ndim == 0 else out
    if arr.ndim == 0:
        xv = float(arr)
        if xv >= 1.0:
            return 0.0
        if xv == 0.0:
            return beta_fn(2.0 * nu - 1.0, mu)
        return _h_quad(mu, nu, xv, tol)
    return np.array([h_eval(mu, nu, xi, tol) for xi in arr.ravel()]).reshape(arr.shape)


def h_eval_overlap(mu, nu, x, tol=None):
    """Overlap-integral representation of h_{mu,nu}, kept as a cross-check:

    h(x) = int_x^1 (2u - x) g(u) g(u - x) du,  g(u) = u^(mu-1) (1-u^2)^(nu-1).

    The moving interior singularity at u = x makes this slower and less
    accurate than :func:`h_eval`; it exists to validate that primary path.
    """
    if x >= 1.0:
        return 0.0

    def integrand(u):
        g1 = u ** (mu - 1.0) * (1.0 - u * u) ** (nu - 1.0)
        v = u - x
        g2 = v ** (mu - 1.0) * (1.0 - v * v) ** (nu - 1.0)
        return (2.0 * u - x) * g1 * g2

    tol = tol or default_tolerance()
    value, err = quad(
        integrand, x, 1.0, epsabs=1e-13, epsrel=max(tol.rel, 1e-10), limit=400
    )
    if not math.isfinite(value):
        raise EvaluationError("overlap quadrature failed", estimate=err)
    return value


def wendland_eval(mu, k, x, tol=None):
    """Evaluate the Wendland kernel psi_{mu,k}, the k-fold montee of (1-x)_+^mu.

    This is the exact k-fold integral operator (constants included), so the
    identity chain with the kernel family holds without renormalization, e.g.
    psi_{mu,k} = mu h_{mu,k+1} / (2^k k!).  For the origin-normalized
    polynomial convention see :func:`wendland_normalized`.

    k in {0, 1, 2} is evaluated from the closed-form polynomials; larger k
    falls back to the numeric montee operator.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if k < 0 or k != int(k):
        raise ValueError(f"k must be a nonnegative integer, got {k}")
    k = int(k)
    arr = np.asarray(x, dtype=float)
    if k <= 2:
        out = np.where(arr < 1.0, _wendland_closed(mu, k, np.minimum(arr, 1.0)), 0.0)
        return float(out) if out.ndim == 0 else out
    kernel = _wendland_numeric(mu, k)
    return kernel_eval(kernel, x)


def _wendland_closed(mu, k, x):
    one = np.maximum(1.0 - x, 0.0)
    if k == 0:
        return one**mu
    if k == 1:
        return one ** (mu + 1.0) * (1.0 + (mu + 1.0) * x) / ((mu + 1.0) * (mu + 2.0))
    poly = 3.0 + 3.0 * (mu + 2.0) * x + (mu + 1.0) * (mu + 3.0) * x * x
    denom = (mu + 1.0) * (mu + 2.0) * (mu + 3.0) * (mu + 4.0)
    return one ** (mu + 2.0) * poly / denom


def wendland_normalized(mu, k, x):
    """Origin-normalized Wendland polynomial, psi_{mu,k}(x) / psi_{mu,k}(0).

    For k = 1 this is the familiar (1-x)_+^(mu+1) (1 + (mu+1) x).
    Only k in {0, 1, 2} has a closed form here.
    """
    if k not in (0, 1, 2):
        raise ValueError("closed-form normalization available for k in {0, 1, 2} only")
    x = np.asarray(x, dtype=float)
    c0 = _wendland_closed(mu, k, np.asarray(0.0))
    out = np.where(x < 1.0, _wendland_closed(mu, k, np.minimum(x, 1.0)) / c0, 0.0)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def _wendland_numeric(mu, k):
    from . import operators

    return operators.montee_k(RadialKernel.askey(mu), k)


@dataclass(frozen=True)
class RadialKernel:
    """A radial kernel with known compact support.

    Instances are immutable; ``family`` and ``params`` identify the member
    and ``support`` is the radius beyond which the kernel is identically 0.
    Use the family constructors (:meth:`askey`, :meth:`h`, :meth:`wendland`,
    :meth:`buhmann`, :meth:`difference`, :meth:`scaled`, :meth:`custom`).
    """

    family: str
    params: tuple
    support: float
    fn: callable = field(repr=False, compare=False)

    @classmethod
    def buhmann(cls, params):
        if not isinstance(params, BuhmannParams):
            params = BuhmannParams(*params)

        def f(xs):
            return np.array([buhmann_eval(params, xi) for xi in np.atleast_1d(xs)])

        return cls("buhmann", (params.delta, params.mu, params.nu, params.alpha), 1.0, f)

    @classmethod
    def h(cls, mu, nu):
        if not (mu > 0 and nu > 0):
            raise ValueError(f"mu and nu must be positive, got ({mu}, {nu})")
        return cls("h", (float(mu), float(nu)), 1.0, lambda xs: h_eval(mu, nu, xs))

    @classmethod
    def wendland(cls, mu, k):
        if k < 0 or k != int(k):
            raise ValueError(f"k must be a nonnegative integer, got {k}")
        return cls(
            "wendland", (float(mu), int(k)), 1.0, lambda xs: wendland_eval(mu, int(k), xs)
        )

    @classmethod
    def askey(cls, mu):
        return cls("askey", (float(mu),), 1.0, lambda xs: askey_eval(mu, xs))

    @classmethod
    def difference(cls, params):
        if not isinstance(params, DiffParams):
            params = DiffParams(*params)
        from . import operators

        return cls(
            "difference",
            params,
            max(params.beta1, params.beta2),
            lambda xs: operators.difference_eval(params, xs),
        )

    @classmethod
    def scaled(cls, inner, beta):
        if not beta > 0:
            raise ValueError(f"scale must be positive, got {beta}")
        return cls(
            "scaled",
            (inner, float(beta)),
            inner.support * beta,
            lambda xs: kernel_eval(inner, np.asarray(xs, float) / beta),
        )

    @classmethod
    def custom(cls, fn, support):
        if not support > 0:
            raise ValueError(f"support must be positive, got {support}")
        return cls("custom", (fn,), float(support), lambda xs: np.asarray(fn(xs), float))

    def __call__(self, x):
        return kernel_eval(self, x)


def kernel_eval(k, x):
    """Evaluate a :class:`RadialKernel` at radius x (scalar or array).

    Radii at or beyond the support return exact zeros without touching the
    family evaluator.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("radius must be >= 0")
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    out = np.zeros_like(flat)
    inside = flat < k.support
    if np.any(inside):
        out[inside] = np.asarray(k.fn(flat[inside]), dtype=float).ravel()
    out = out.reshape(np.atleast_1d(arr).shape)
    return float(out[0]) if scalar else out
