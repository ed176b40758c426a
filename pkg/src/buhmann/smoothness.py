"""Origin smoothness of difference kernels: predicted and estimated orders.

For integer nu the even extension of the difference kernel is C^(2nu-2) but
not C^(2nu-1) when eps != 2nu - 1; exactly at eps = 2nu - 1 the leading odd
term |x|^(2nu-1) cancels between the two scales and the kernel gains two
orders, C^(2nu) but not C^(2nu+1) — unless mu is 1 or 2, in which case every
remaining odd coefficient carries the factor (mu-1)(mu-2) and the kernel
collapses to an even polynomial of degree at most mu + 2nu - 2 (C^infinity).

The empirical estimator detects the leading odd |x|^(2k+1) term through the
divergence (like 1/h) of the order-(2k+2) central difference quotient at the
origin; odd-order symmetric differences of an even function vanish
identically, so only even orders are probed.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .kernels import RadialKernel, kernel_eval

__all__ = [
    "INFINITE",
    "SmoothnessReport",
    "estimate_order",
    "even_polynomial_residual",
    "h_deriv_at_zero",
    "predict_order",
    "smoothness_report",
]

INFINITE = math.inf


def predict_order(mu, nu, eps):
    """Predicted differentiability order of the difference kernel at the
    origin (valid for integer nu and beta1 != beta2).

    Returns 2nu - 2 when eps != 2nu - 1; 2nu when eps = 2nu - 1 and mu is
    not 1 or 2; INFINITE when eps = 2nu - 1 and mu is 1 or 2.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if nu < 1 or nu != int(nu):
        raise ValueError(f"the prediction requires a positive integer nu, got {nu}")
    nu = int(nu)
    if eps != 2 * nu - 1:
        return 2 * nu - 2
    if mu in (1.0, 2.0):
        return INFINITE
    return 2 * nu


def h_deriv_at_zero(mu, nu):
    """One-sided derivative h^(2nu+1)_{mu,nu}(0+) in closed form:

        -(-4)^(nu-1) (nu-1)! nu! (mu-1)(mu-2).

    The (mu-1)(mu-2) factor is what makes mu in {1, 2} polynomial cases.
    """
    if nu < 1 or nu != int(nu):
        raise ValueError(f"requires a positive integer nu, got {nu}")
    nu = int(nu)
    return -((-4.0) ** (nu - 1)) * math.factorial(nu - 1) * math.factorial(nu) * (mu - 1.0) * (
        mu - 2.0
    )


def _central_diff(values, n):
    # Delta_c^n F(0) from samples values[j] = F(j*h), j = 0..n/2, even F
    acc = 0.0
    for i in range(n + 1):
        acc += (-1) ** i * math.comb(n, i) * values[abs(n // 2 - i)]
    return acc


def _closed_form_noise(kernel):
    closed = {"askey", "custom"}
    if kernel.family in closed:
        return 4e-15
    if kernel.family == "wendland":
        return 4e-15 if kernel.params[1] <= 2 else 1e-11
    if kernel.family == "h":
        return 4e-15 if kernel.params[1] in (1.0, 2.0, 3.0) else 1e-11
    if kernel.family == "difference":
        return 4e-15 if kernel.params.nu in (1.0, 2.0, 3.0) else 1e-11
    if kernel.family == "scaled":
        return _closed_form_noise(kernel.params[0])
    return 1e-11


def estimate_order(k, q, max_order=8, eval_noise=None, details=False):
    """Estimate the differentiability order of the kernel's even extension
    at the origin.

    For each even order n, the central difference quotient is formed at the
    three steps q/16, q/32, q/64.  Orders whose quotients are Richardson
    consistent (successive changes shrink) count as attained; the first order
    whose quotients grow like 1/h (successive changes double) marks the
    leading odd term |x|^(n-1), so the estimate is n - 2.  If all probed
    orders are consistent the kernel is reported INFINITE at this resolution.

    ``eval_noise`` is the relative accuracy of kernel evaluations; quotients
    below the resulting noise floor are treated as converged-to-zero.  Orders
    of 6 and up are only meaningful for near-machine-accurate kernels.
    """
    if max_order > 8:
        raise ValueError("order estimation beyond 8 is not meaningful in double precision")
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    if eval_noise is None:
        eval_noise = _closed_form_noise(k)

    steps = [q / 16.0, q / 32.0, q / 64.0]
    samples = {}
    for h in steps:
        radii = h * np.arange(max_order // 2 + 1)
        samples[h] = np.asarray(kernel_eval(k, radii), dtype=float)

    scale = max(float(np.max(np.abs(v))) for v in samples.values()) + 1e-300
    diagnostics = []
    estimate = INFINITE
    for n in range(2, max_order + 1, 2):
        quotients = []
        floors = []
        for h in steps:
            d = _central_diff(samples[h], n)
            quotients.append(d / h**n)
            floors.append(64.0 * 2.0**n * eval_noise * scale / h**n)
        verdict = _classify_quotients(quotients, floors)
        diagnostics.append({"order": n, "quotients": quotients, "floors": floors, "verdict": verdict})
        if verdict == "diverged":
            estimate = n - 2
            break
    if details:
        return estimate, diagnostics
    return estimate


def _classify_quotients(D, floors):
    if all(abs(d) <= 8.0 * f for d, f in zip(D, floors)):
        return "converged"  # zero to within evaluation noise
    d1 = D[1] - D[0]
    d2 = D[2] - D[1]
    if abs(d2) <= max(0.6 * abs(d1), 4.0 * floors[2], 1e-8 * abs(D[2])):
        return "converged"
    if abs(d2) >= 1.4 * abs(d1) and abs(D[2]) >= abs(D[0]):
        return "diverged"
    return "diverged" if abs(D[2]) > 2.0 * abs(D[0]) + 8.0 * floors[2] else "converged"


def even_polynomial_residual(k, q, degree):
    """Best even-polynomial fit of the kernel on [0, q]; returns the max
    absolute residual.  Degree bounds the highest (even) power used."""
    xs = np.linspace(0.0, q, 256)
    vals = np.asarray(kernel_eval(k, xs), dtype=float)
    powers = np.arange(0, degree + 1, 2)
    design = xs[:, None] ** powers[None, :]
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    return float(np.max(np.abs(design @ coef - vals)))


@dataclass(frozen=True)
class SmoothnessReport:
    """Predicted vs estimated origin smoothness of a difference kernel."""

    predicted: Optional[float]  # order, INFINITE, or None outside theorem scope
    estimated: float
    q: float
    details: tuple
    in_scope: bool

    @property
    def agrees(self):
        if self.predicted is None:
            return None
        if self.predicted is INFINITE:
            return self.estimated is INFINITE or self.estimated >= 8
        return self.predicted == self.estimated


def smoothness_report(d, max_order=8):
    """Predict and estimate the smoothness of the difference kernel ``d``.

    The prediction applies only for integer nu and beta1 != beta2; outside
    that scope ``predicted`` is None and only the estimate is reported.
    """
    q = min(d.beta1, d.beta2)
    kernel = RadialKernel.difference(d)
    in_scope = d.nu == int(d.nu) and not d.degenerate
    predicted = predict_order(d.mu, d.nu, d.eps) if in_scope else None
    estimated, diag = estimate_order(kernel, q, max_order, details=True)
    return SmoothnessReport(
        predicted=predicted,
        estimated=estimated,
        q=q,
        details=tuple(tuple(sorted(item.items())) for item in diag),
        in_scope=in_scope,
    )
