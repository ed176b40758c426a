"""Positive-definiteness certification of weighted-difference kernels.

A difference kernel f_{mu,nu,eps,beta1,beta2} belongs to the class Phi_m
(positive definite on R^m) for every beta2 > beta1 > 0 exactly when
t^(eps+m) F_m(h_{mu,nu})(t) is nondecreasing on (0, inf), equivalently when

    (eps - 2nu + 1 + (eps + m) x^2) / (x^mu (1+x^2)^((m-1)/2+nu+1))

is completely monotone.  Rule-based certification applies the known
sufficient and necessary conditions; numeric escalation checks the spectral
monotonicity on a grid and complete monotonicity through high-order forward
differences.  Verdicts produced by the numeric paths are labeled evidence,
never proof.
"""

import math
from dataclasses import dataclass
from typing import Optional

import mpmath as mp
import numpy as np

from .kernels import RadialKernel
from .spectral import hankel_h_closed, hankel_quadrature
from .specfn import default_tolerance

__all__ = [
    "Certificate",
    "CMQuery",
    "CMCheckResult",
    "certify_fixed_scale",
    "certify_sufficient",
    "check_cm_numeric",
    "check_spectral_monotone",
    "cm_rule",
    "psd_matrix_check",
]

CERTIFIED = "Certified"
REFUTED = "Refuted"
UNDECIDED = "Undecided"


@dataclass(frozen=True)
class Certificate:
    """Outcome of a positive-definiteness query.

    ``rule`` names the condition that decided it; ``witness`` carries a
    numeric counterexample (location, value) for refutations found on grids.
    A ``Refuted`` verdict requires either a failed necessary condition or a
    witness whose value undercuts the reported error bound.
    """

    verdict: str
    rule: str
    m: int
    witness: Optional[tuple] = None

    @property
    def certified(self):
        return self.verdict == CERTIFIED

    @property
    def refuted(self):
        return self.verdict == REFUTED

    def __str__(self):
        out = f"{self.verdict} [{self.rule}] (m={self.m})"
        if self.witness is not None:
            out += f" witness={self.witness}"
        return out


@dataclass(frozen=True)
class CMQuery:
    """Exponents (mu, nu) of the candidate x^(-mu) (1+x^2)^(-nu)."""

    mu: float
    nu: float


def certify_sufficient(m, mu, nu, eps):
    """Rule-based certification that the difference kernel family with these
    exponents is positive definite on R^m for every beta2 > beta1 > 0.

    Applies, in order: the necessary condition eps >= 2nu - 1; the sufficient
    condition mu >= (m-1)/2 + nu + 3 (which is also necessary when
    eps = 2nu - 1 exactly); and the three-index family of sufficient
    conditions.  Returns Undecided when no rule fires.
    """
    if m < 1 or m != int(m):
        raise ValueError(f"dimension must be a positive integer, got {m}")
    if not nu > 0.5:
        raise ValueError(f"require nu > 1/2, got {nu}")
    if not mu + nu > 1:
        raise ValueError("require mu + nu > 1")
    m = int(m)

    if eps < 2.0 * nu - 1.0:
        return Certificate(REFUTED, "necessary: eps < 2nu-1", m)
    bound = 0.5 * (m - 1.0) + nu + 3.0
    if mu >= bound:
        return Certificate(CERTIFIED, "Thm2.2", m)
    if eps == 2.0 * nu - 1.0:
        return Certificate(REFUTED, "Thm2.2-iff: eps = 2nu-1 and mu < (m-1)/2+nu+3", m)
    for n in (1, 2, 3):
        if _sufficient_index(m, mu, nu, eps, n):
            return Certificate(CERTIFIED, f"Thm2.3-n{n}", m)
    return Certificate(UNDECIDED, "no rule applies", m)


def _sufficient_index(m, mu, nu, eps, n):
    if eps < 2.0 ** (1 - n) * (m + (2.0 * nu - 1.0) * (2.0 ** (n - 1) + 1.0)):
        return False
    half = 0.5 * (m - 1.0) + nu + 1.0 - n
    if not half > 0:
        return False
    rhs = min(m - 1.0 + 2.0 * nu + 2.0 - 2.0 * n, max(1.0, half))
    return mu - n >= rhs


def cm_rule(q):
    """Decide complete monotonicity of x^(-mu) (1+x^2)^(-nu) by the known
    parameter rules.

    Returns "CM", "NotCM", or "Unknown".  CM fires when nu >= 1 and mu >= nu,
    when 0 < nu < 1 and mu >= 1, or when nu > 0 and mu >= 2 nu (equivalently
    mu >= min(2 nu, max(1, nu))).  NotCM fires for mu <= 0 with nu != 0, for
    mu < nu, and for 0 < mu = nu < 1.
    """
    mu, nu = q.mu, q.nu
    if (nu >= 1.0 and mu >= nu) or (0.0 < nu < 1.0 and mu >= 1.0) or (nu > 0.0 and mu >= 2.0 * nu):
        return "CM"
    if (mu <= 0.0 and nu != 0.0) or mu < nu or (0.0 < mu < 1.0 and mu == nu):
        return "NotCM"
    return "Unknown"


def check_spectral_monotone(m, mu, nu, eps, t_grid=None, tol=None):
    """Grid check of the monotonicity criterion: g(t) = t^(eps+m)
    F_m(h_{mu,nu})(t) must be nondecreasing on (0, inf).

    A decrease between adjacent grid points beyond the combined quadrature
    error bounds refutes with a witness; otherwise the verdict is Certified
    with rule "numeric-monotone (grid-limited)" — evidence, not proof.
    """
    if t_grid is None:
        t_grid = default_monotone_grid()
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0) or np.any(t_grid <= 0):
        raise ValueError("t_grid must be strictly increasing and positive")
    m = int(m)

    tol = tol or default_tolerance()
    kernel = RadialKernel.h(mu, nu)
    values = np.empty_like(t_grid)
    errors = np.empty_like(t_grid)
    for i, t in enumerate(t_grid):
        try:
            v = hankel_h_closed(m, mu, nu, t, tol, allow_fallback=False)
            e = 1e-12 * abs(v) + 1e-14
        except Exception:
            v, e = hankel_quadrature(kernel, m, t, tol, return_error=True)
        values[i] = t ** (eps + m) * v
        errors[i] = t ** (eps + m) * e

    drops = values[1:] - values[:-1]
    # refute only a drop an order of magnitude beyond the error bounds
    bound = -10.0 * (errors[1:] + errors[:-1])
    bad = np.where(drops < bound)[0]
    if bad.size:
        i = int(bad[np.argmin(drops[bad])])
        witness = (float(t_grid[i + 1]), float(drops[i]))
        return Certificate(REFUTED, "numeric-monotone: decreasing pair", m, witness)
    return Certificate(CERTIFIED, "numeric-monotone (grid-limited)", m)


def default_monotone_grid():
    """Default t-grid for the spectral monotonicity check: [0.01, 50],
    log-spaced below 1 and fine linear above, dense enough to resolve the
    pi-periodic wiggles of compact-support spectra."""
    return np.concatenate([np.geomspace(0.01, 1.0, 40), np.linspace(1.05, 50.0, 360)])


@dataclass(frozen=True)
class CMCheckResult:
    """Outcome of the finite-difference complete-monotonicity check."""

    consistent: bool
    witness: Optional[tuple] = None  # (x, order, step, value)

    @property
    def tag(self):
        return "consistent-with-CM" if self.consistent else "NotCM"


def check_cm_numeric(f, max_order=12, x_grid=None, high_precision=True):
    """Check (-1)^n Delta_h^n f(x) >= 0 for n = 0..max_order on a log grid.

    For a completely monotone f the alternating forward differences are
    nonnegative for every step h, so violations at any step refute.  The base
    step is x/64; wider steps (up to x) are also scanned because genuinely
    small violations of high order are invisible at small steps in floating
    point.  With ``high_precision`` the samples are taken in 60-digit
    arithmetic when the callable accepts mpmath input, which is what makes
    order ~12 differences meaningful; otherwise a noise floor of
    2^n * eps * max|f| guards each comparison.

    Returns a :class:`CMCheckResult`; the witness records (x, order, step,
    value) of the worst violation.
    """
    if max_order > 12:
        raise ValueError("finite differences beyond order 12 are not meaningful here")
    if x_grid is None:
        x_grid = np.geomspace(0.05, 20.0, 160)

    use_mp = False
    if high_precision:
        try:
            with mp.workdps(60):
                mp.mpf(float(f(mp.mpf("0.7"))))
            use_mp = True
        except Exception:
            use_mp = False

    worst = None
    for x in x_grid:
        for h in (x / 64.0, x / 16.0, x / 4.0, x / 2.0, x):
            if use_mp:
                viol = _scan_orders_mp(f, x, h, max_order)
            else:
                viol = _scan_orders_float(f, x, h, max_order)
            if viol is not None and (worst is None or viol[3] < worst[3]):
                worst = viol
    if worst is not None:
        return CMCheckResult(False, worst)
    return CMCheckResult(True)


def _scan_orders_mp(f, x, h, max_order):
    with mp.workdps(60):
        xs = [mp.mpf(x) + i * mp.mpf(h) for i in range(max_order + 1)]
        vals = [mp.mpf(f(xi)) for xi in xs]
        scale = max(abs(v) for v in vals)
        floor = mp.mpf(10) ** (-40) * (scale + 1)
        worst = None
        # (-1)^n Delta^n f(x) = sum_i (-1)^i C(n,i) f(x + i h)
        for n in range(max_order + 1):
            acc = mp.mpf(0)
            for i in range(n + 1):
                acc += (-1) ** i * mp.binomial(n, i) * vals[i]
            if acc < -floor:
                cand = (float(x), n, float(h), float(acc))
                if worst is None or cand[3] < worst[3]:
                    worst = cand
        return worst


def _scan_orders_float(f, x, h, max_order):
    xs = x + h * np.arange(max_order + 1)
    vals = np.array([f(xi) for xi in xs], dtype=float)
    scale = np.max(np.abs(vals))
    worst = None
    for n in range(max_order + 1):
        coeffs = np.array([(-1) ** i * math.comb(n, i) for i in range(n + 1)], dtype=float)
        acc = float(coeffs @ vals[: n + 1])
        noise = 32.0 * 2.0**n * 2.3e-16 * scale + 1e-300
        if acc < -noise:
            cand = (float(x), n, float(h), acc)
            if worst is None or cand[3] < worst[3]:
                worst = cand
    return worst


def fixed_scale_candidate(m, mu, nu, eps, a):
    """The function whose complete monotonicity decides fixed-scale
    positive definiteness at scale ratio a = beta2/beta1:

        x^-mu (1+x^2)^-p  -  a^(2nu-1-eps) x^-mu (1+a^2 x^2)^-p,

    with p = (m-1)/2 + nu.  Accepts float or mpmath input.
    """
    p = 0.5 * (m - 1.0) + nu
    two = 2.0 * nu - 1.0 - eps

    def g(x):
        return x ** (-mu) * ((1 + x * x) ** (-p) - a**two * (1 + (a * x) ** 2) ** (-p))

    return g


def monotone_candidate(m, mu, nu, eps):
    """The completely monotone candidate equivalent to the any-scale
    positive-definiteness condition:

        (eps - 2nu + 1 + (eps+m) x^2) / (x^mu (1+x^2)^((m-1)/2+nu+1)).
    """
    p = 0.5 * (m - 1.0) + nu + 1.0
    c0 = eps - 2.0 * nu + 1.0
    c2 = eps + m

    def g(x):
        return (c0 + c2 * x * x) * x ** (-mu) * (1 + x * x) ** (-p)

    return g


def certify_fixed_scale(m, mu, nu, eps, a, max_order=12):
    """Certification for a fixed scale ratio a = beta2/beta1 > 1.

    Refutes immediately when eps < 2nu - 1 (necessary for any beta2 > beta1);
    otherwise runs the numeric complete-monotonicity check on the equivalent
    candidate function.  Numeric outcomes are evidence-grade.
    """
    if not a > 1:
        raise ValueError(f"require a > 1, got {a}")
    m = int(m)
    if eps < 2.0 * nu - 1.0:
        return Certificate(REFUTED, "necessary: eps < 2nu-1", m)
    res = check_cm_numeric(fixed_scale_candidate(m, mu, nu, eps, a), max_order)
    if res.consistent:
        return Certificate(CERTIFIED, f"numeric-CM at a={a} (evidence)", m)
    return Certificate(REFUTED, f"numeric-CM violation at a={a}", m, res.witness)


def psd_matrix_check(d, m, n_points=100, seed=0):
    """Empirical Gram-matrix validation of the difference kernel on random
    point sets in [0, L]^m with L = 3 max(beta1, beta2).

    Refutes with the minimum eigenvalue as witness when lambda_min falls
    below -1e-8 * lambda_max; otherwise certifies (empirically).
    """
    if n_points > 500:
        raise ValueError("dense eigensolve capped at 500 points")
    m = int(m)
    rng = np.random.default_rng(seed)
    L = 3.0 * max(d.beta1, d.beta2)
    kernel = RadialKernel.difference(d)
    for _ in range(8):
        pts = rng.uniform(0.0, L, size=(n_points, m))
        dists = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        if n_points > 1 and np.min(dists[~np.eye(n_points, dtype=bool)]) < 1e-9 * L:
            continue  # degenerate draw; resample
        flat = kernel(dists.ravel())
        gram = np.asarray(flat, dtype=float).reshape(n_points, n_points)
        gram = 0.5 * (gram + gram.T)
        eigs = np.linalg.eigvalsh(gram)
        lam_min, lam_max = float(eigs[0]), float(eigs[-1])
        if lam_max <= 0.0 and lam_min == 0.0:
            return Certificate(CERTIFIED, "degenerate: zero kernel", m, (lam_min, lam_max))
        if lam_min < -1e-8 * lam_max:
            return Certificate(REFUTED, "negative Gram eigenvalue", m, (lam_min, lam_max))
        return Certificate(CERTIFIED, "empirical Gram PSD", m, (lam_min, lam_max))
    raise RuntimeError("failed to draw a non-degenerate point set")
