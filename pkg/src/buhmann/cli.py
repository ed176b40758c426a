"""Command-line interface.

Subcommands: eval, spectrum, certify, smoothness, table1, figure1, interp,
selftest.  All delimited output is CSV on stdout (header row, comma
separated, decimal dot, LF, 17 significant digits); diagnostics go to
stderr.  The figure-producing paths also render PNG files next to the CSV
artifacts.  The environment variable BUHMANN_TOL overrides the default
relative tolerance.
"""

import argparse
import math
import sys

import numpy as np

from . import certify as cert
from . import interp as interp_mod
from . import smoothness as smooth
from .kernels import BuhmannParams, DiffParams, RadialKernel, kernel_eval, wendland_normalized
from .operators import difference_eval
from .spectral import SpectralDensity
from .specfn import EvaluationError

_FAMILY_FIELDS = {
    "askey": ("mu",),
    "wendland": ("mu", "k"),
    "h": ("mu", "nu"),
    "buhmann": ("delta", "mu", "nu", "alpha"),
    "diff": ("mu", "nu", "eps", "b1", "b2"),
}


class SpecError(ValueError):
    pass


def parse_kernel_spec(text):
    """Parse a textual kernel spec like ``wendland:mu=3,k=1`` or
    ``diff:mu=4.5,nu=1,eps=1,b1=0.75,b2=1`` (optionally ``,beta=...`` to
    rescale the support)."""
    family, sep, rest = text.partition(":")
    family = family.strip().lower()
    if family not in _FAMILY_FIELDS:
        raise SpecError(
            f"unknown kernel family {family!r}; expected one of {sorted(_FAMILY_FIELDS)}"
        )
    fields = {}
    if sep and rest.strip():
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            key = key.strip().lower()
            if not eq:
                raise SpecError(f"{family}: malformed field {item!r} (expected key=value)")
            if key in fields:
                raise SpecError(f"{family}: duplicate field {key!r}")
            try:
                fields[key] = float(val)
            except ValueError:
                raise SpecError(f"{family}: field {key!r} has non-numeric value {val!r}") from None
    beta = fields.pop("beta", None)
    expected = _FAMILY_FIELDS[family]
    for name in expected:
        if name not in fields:
            raise SpecError(f"{family}: missing field {name!r}")
    extra = set(fields) - set(expected)
    if extra:
        raise SpecError(f"{family}: unknown field(s) {sorted(extra)}")

    try:
        if family == "askey":
            kernel = RadialKernel.askey(fields["mu"])
        elif family == "wendland":
            k = fields["k"]
            if k != int(k) or k < 0:
                raise SpecError(f"wendland: field 'k' must be a nonnegative integer, got {k}")
            kernel = RadialKernel.wendland(fields["mu"], int(k))
        elif family == "h":
            kernel = RadialKernel.h(fields["mu"], fields["nu"])
        elif family == "buhmann":
            kernel = RadialKernel.buhmann(
                BuhmannParams(fields["delta"], fields["mu"], fields["nu"], fields["alpha"])
            )
        else:
            kernel = RadialKernel.difference(
                DiffParams(fields["mu"], fields["nu"], fields["eps"], fields["b1"], fields["b2"])
            )
    except ValueError as exc:
        raise SpecError(f"{family}: {exc}") from None
    if beta is not None:
        if not beta > 0:
            raise SpecError(f"{family}: field 'beta' must be positive, got {beta}")
        kernel = RadialKernel.scaled(kernel, beta)
    return kernel


def format_kernel_spec(kernel):
    """Inverse of :func:`parse_kernel_spec` (round-trips to an equal kernel)."""
    if kernel.family == "scaled":
        inner, beta = kernel.params
        return f"{format_kernel_spec(inner)},beta={_fmt(beta)}"
    if kernel.family == "askey":
        return f"askey:mu={_fmt(kernel.params[0])}"
    if kernel.family == "wendland":
        return f"wendland:mu={_fmt(kernel.params[0])},k={int(kernel.params[1])}"
    if kernel.family == "h":
        return f"h:mu={_fmt(kernel.params[0])},nu={_fmt(kernel.params[1])}"
    if kernel.family == "buhmann":
        d, mu, nu, al = kernel.params
        return f"buhmann:delta={_fmt(d)},mu={_fmt(mu)},nu={_fmt(nu)},alpha={_fmt(al)}"
    if kernel.family == "difference":
        p = kernel.params
        return (
            f"diff:mu={_fmt(p.mu)},nu={_fmt(p.nu)},eps={_fmt(p.eps)},"
            f"b1={_fmt(p.beta1)},b2={_fmt(p.beta2)}"
        )
    raise SpecError(f"family {kernel.family!r} has no textual form")


def _fmt(x):
    return f"{x:.17g}"


def parse_grid(text, default=None):
    if text is None:
        return default
    parts = text.split(":")
    if len(parts) != 3:
        raise SpecError(f"grid must be min:max:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise SpecError(f"grid must be numeric min:max:n, got {text!r}") from None
    if n < 2:
        raise SpecError(f"grid needs n >= 2 points, got {n}")
    if not hi > lo:
        raise SpecError(f"grid needs max > min, got {text!r}")
    return np.linspace(lo, hi, n)


def _write_csv(header, rows, out=None):
    out = out or sys.stdout
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _maybe_plot(path, x, curves, title):
    if path:
        from .plotting import render_curves

        render_curves(path, x, curves, title=title)
        print(f"wrote {path}", file=sys.stderr)


def cmd_eval(args):
    kernel = parse_kernel_spec(args.spec)
    xs = parse_grid(args.grid, default=np.linspace(0.0, kernel.support, 256))
    values = np.asarray(kernel_eval(kernel, xs), dtype=float)
    if args.normalize:
        v0 = kernel_eval(kernel, 0.0)
        if v0 == 0.0:
            raise EvaluationError("cannot normalize: kernel vanishes at the origin")
        values = values / v0
    _write_csv(["x", "value"], [(float(x), float(v)) for x, v in zip(xs, values)])
    _maybe_plot(args.plot, xs, {format_kernel_spec(kernel): values}, "kernel")
    return 0


def cmd_spectrum(args):
    kernel = parse_kernel_spec(args.spec)
    ts = parse_grid(args.grid, default=np.linspace(0.0, kernel.support, 256))
    if args.check_cross:
        quad_vals = SpectralDensity(kernel, args.m, "quad")(ts)
        closed_vals = SpectralDensity(kernel, args.m, "closed")(ts)
        scale = np.max(np.abs(quad_vals)) + 1e-300
        dev = float(np.max(np.abs(quad_vals - closed_vals)) / scale)
        _write_csv(
            ["t", "density_quad", "density_closed"],
            [(float(t), float(q), float(c)) for t, q, c in zip(ts, quad_vals, closed_vals)],
        )
        print(f"max relative cross-backend deviation: {dev:.3e}", file=sys.stderr)
        values = quad_vals
    else:
        values = SpectralDensity(kernel, args.m, args.backend)(ts)
        _write_csv(["t", "density"], [(float(t), float(v)) for t, v in zip(ts, values)])
    floor = -1e-10 * float(np.max(np.abs(values))) - 1e-13
    neg = np.where(values < floor)[0]
    if neg.size:
        i = int(neg[int(np.argmin(values[neg]))])
        print(
            f"negative spectral density at t={_fmt(float(ts[i]))}: {_fmt(float(values[i]))}",
            file=sys.stderr,
        )
    _maybe_plot(args.plot, ts, {"density": np.asarray(values)}, f"spectrum (m={args.m})")
    return 0


def cmd_certify(args):
    if args.a is not None:
        result = cert.certify_fixed_scale(args.m, args.mu, args.nu, args.eps, args.a)
    else:
        result = cert.certify_sufficient(args.m, args.mu, args.nu, args.eps)
        if result.verdict == cert.UNDECIDED and args.numeric:
            result = _numeric_escalation(args)
    print(f"verdict: {result.verdict}")
    print(f"rule: {result.rule}")
    if result.witness is not None:
        print(f"witness: {result.witness}")
    return {"Certified": 0, "Refuted": 1, "Undecided": 2}[result.verdict]


def _numeric_escalation(args):
    spectral = cert.check_spectral_monotone(args.m, args.mu, args.nu, args.eps)
    if spectral.refuted:
        return spectral
    cm = cert.check_cm_numeric(cert.monotone_candidate(args.m, args.mu, args.nu, args.eps))
    if not cm.consistent:
        return cert.Certificate(
            cert.REFUTED, "numeric-CM violation (evidence)", int(args.m), cm.witness
        )
    return cert.Certificate(
        cert.CERTIFIED, "numeric: spectral monotone + CM consistent (evidence)", int(args.m)
    )


def cmd_smoothness(args):
    if args.spec:
        kernel = parse_kernel_spec(args.spec)
        if kernel.family != "difference":
            print("smoothness requires a diff:... kernel spec", file=sys.stderr)
            return 1
        d = kernel.params
    else:
        for name in ("mu", "nu", "eps"):
            if getattr(args, name) is None:
                print(f"smoothness: missing --{name} (or provide a diff: spec)", file=sys.stderr)
                return 1
        d = DiffParams(args.mu, args.nu, args.eps, args.b1, args.b2)
    if d.nu != int(d.nu):
        print(
            f"smoothness prediction is only stated for integer nu; got nu={d.nu}",
            file=sys.stderr,
        )
        return 1
    if d.degenerate:
        print("degenerate kernel (b1 == b2): identically zero", file=sys.stderr)
        return 1
    predicted = smooth.predict_order(d.mu, d.nu, d.eps)
    if predicted is smooth.INFINITE:
        degree = int(d.mu + 2 * d.nu - 2)
        print(f"predicted: infinity (even polynomial, degree <= {degree})")
    else:
        print(f"predicted: {predicted}")
    if args.estimate:
        report = smooth.smoothness_report(d)
        est = "infinity" if report.estimated is smooth.INFINITE else int(report.estimated)
        print(f"estimated: {est}")
        print(f"agrees: {'yes' if report.agrees else 'no'}")
    return 0


def cmd_table1(args):
    rows = [(k, 2 * k, 2 * k + 2) for k in (0, 1, 2)]
    _write_csv(["k", "D_before", "D_after"], rows)
    print("note: for mu in {1, 2} the difference kernel is an even polynomial "
          "and D_after = infinity", file=sys.stderr)
    return 0


def cmd_figure1(args):
    xs = np.linspace(0.0, 1.05, 512)
    panels = []
    for k in (0, 1, 2):
        mu = 0.5 * (args.d + 1) + k + 3
        d = DiffParams(mu, k + 1, 2 * k + 1, 0.75, 1.0)
        w1 = wendland_normalized(mu, k, xs)
        w075 = wendland_normalized(mu, k, xs / 0.75)
        diff = np.asarray(difference_eval(d, xs), dtype=float)
        diff = diff / difference_eval(d, 0.0)
        path = f"{args.out_prefix}_k{k}.csv"
        with open(path, "w", newline="\n") as fh:
            _write_csv(
                ["x", "wendland_b1", "wendland_b075", "difference"],
                [
                    (float(x), float(a), float(b), float(c))
                    for x, a, b, c in zip(xs, w1, w075, diff)
                ],
                out=fh,
            )
        print(f"wrote {path}", file=sys.stderr)
        panels.append(
            {
                "title": f"k={k}, mu={mu:g}",
                "x": xs,
                "curves": {
                    "difference": diff,
                    "wendland (support 1)": w1,
                    "wendland (support 0.75)": w075,
                },
            }
        )
    if not args.no_plot:
        from .plotting import render_kernel_panels

        png = f"{args.out_prefix}.png"
        render_kernel_panels(png, panels)
        print(f"wrote {png}", file=sys.stderr)
    return 0


def cmd_interp(args):
    kernel = parse_kernel_spec(args.spec)
    if kernel.family == "difference" and kernel.params.degenerate:
        print("degenerate kernel (b1 == b2): Gram matrix is identically zero", file=sys.stderr)
        return 1
    ps, values = interp_mod.load_points_csv(args.points)
    if values is None:
        print("points CSV must include a 'value' column", file=sys.stderr)
        return 1
    gs = interp_mod.build_gram(ps, kernel)
    try:
        weights = interp_mod.solve_interpolate(gs, values)
    except interp_mod.GramNotPositiveDefinite as exc:
        print(f"interpolation failed: {exc}", file=sys.stderr)
        return 1
    report = interp_mod.condition_report(ps, [kernel])[0]
    print(
        "condition report: lambda_min={lambda_min:.6e} lambda_max={lambda_max:.6e} "
        "condition={condition:.6e} bandwidth={bandwidth} fill_ratio={fill_ratio:.3f}".format(
            **report
        ),
        file=sys.stderr,
    )
    coords = [f"x{i + 1}" for i in range(ps.dim)]
    if args.predict:
        targets, _ = interp_mod.load_points_csv(args.predict)
        if targets.dim != ps.dim:
            print("prediction grid dimension differs from the data", file=sys.stderr)
            return 1
        preds = interp_mod.predict(ps, kernel, weights, targets.points)
        rows = [tuple(map(float, p)) + (float(v),) for p, v in zip(targets.points, preds)]
        _write_csv(coords + ["prediction"], rows)
    else:
        rows = [tuple(map(float, p)) + (float(w),) for p, w in zip(ps.points, weights)]
        _write_csv(coords + ["weight"], rows)
    return 0


def cmd_selftest(args):
    from .kernels import buhmann_eval, h_eval
    from .spectral import hankel_h_closed, hankel_quadrature

    checks = []

    def check(name, fn):
        try:
            ok = bool(fn())
        except Exception as exc:  # report, don't crash the suite
            print(f"FAIL {name}: {exc}")
            checks.append(False)
            return
        print(("PASS" if ok else "FAIL") + f" {name}")
        checks.append(ok)

    check(
        "identity: buhmann(1,2,1,1)(0.5) == (1-0.5)^2/2",
        lambda: abs(buhmann_eval(BuhmannParams(1, 2, 1, 1), 0.5) - 0.125) < 1e-10,
    )
    check(
        "identity: h(3,2) matches buhmann(1,3,2,3) at 0.3",
        lambda: abs(h_eval(3, 2, 0.3) - buhmann_eval(BuhmannParams(1, 3, 2, 3), 0.3))
        < 1e-9 * abs(h_eval(3, 2, 0.3)),
    )
    check(
        "spectral: closed vs quadrature backend at (m=1, mu=2, nu=1, t=1)",
        lambda: abs(
            hankel_h_closed(1, 2, 1, 1.0) - hankel_quadrature(RadialKernel.h(2, 1), 1, 1.0)
        )
        < 1e-8,
    )
    check(
        "certify: (m=1, nu=1, eps=1, mu=4) certified by rule",
        lambda: cert.certify_sufficient(1, 4, 1, 1).certified,
    )
    check(
        "certify: eps below the necessary bound refuted",
        lambda: cert.certify_sufficient(1, 10, 1, 0.5).refuted,
    )
    check(
        "smoothness: prediction matches estimate for (mu=3, nu=1, eps=1)",
        lambda: smooth.smoothness_report(DiffParams(3, 1, 1, 0.75, 1.0)).agrees,
    )
    check(
        "psd: certified difference kernel has PSD Gram matrix",
        lambda: cert.psd_matrix_check(
            DiffParams(4.5, 1, 1, 0.75, 1.0), m=2, n_points=60, seed=args.seed
        ).certified,
    )
    failed = checks.count(False)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="buhmann",
        description="Compactly supported radial kernels: evaluation, spectra, "
        "certification, smoothness, interpolation.",
        epilog="Kernel specs: askey:mu=2 | wendland:mu=3,k=1 | h:mu=2,nu=1 | "
        "buhmann:delta=1,mu=2,nu=1,alpha=1 | diff:mu=4.5,nu=1,eps=1,b1=0.75,b2=1 "
        "(append ,beta=B to rescale). Set BUHMANN_TOL to override the default "
        "relative tolerance.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a kernel on a grid (CSV x,value)")
    p.add_argument("spec", help="kernel spec")
    p.add_argument("--grid", default=None, help="grid min:max:n (default 0:support:256)")
    p.add_argument("--normalize", action="store_true", help="divide by the value at x=0")
    p.add_argument("--plot", default=None, help="also render a PNG to this path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("spectrum", help="Hankel spectral density (CSV t,density)")
    p.add_argument("spec", help="kernel spec")
    p.add_argument("--m", type=int, default=1, help="ambient dimension")
    p.add_argument("--grid", default=None, help="t-grid min:max:n (default 0:support:256)")
    p.add_argument(
        "--backend", choices=("quad", "closed", "auto"), default="auto", help="evaluation backend"
    )
    p.add_argument(
        "--check-cross",
        action="store_true",
        help="emit both backends and report their max relative deviation",
    )
    p.add_argument("--plot", default=None, help="also render a PNG to this path")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser(
        "certify",
        help="positive-definiteness certificate (exit 0 Certified, 1 Refuted, 2 Undecided)",
    )
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--m", type=int, default=1, help="ambient dimension")
    p.add_argument("--a", type=float, default=None, help="fixed scale ratio beta2/beta1 > 1")
    p.add_argument(
        "--numeric",
        action="store_true",
        help="escalate Undecided verdicts through numeric spectral/CM checks",
    )
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("smoothness", help="origin smoothness: prediction and estimate")
    p.add_argument("--spec", default=None, help="diff:... kernel spec")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--b1", type=float, default=0.75)
    p.add_argument("--b2", type=float, default=1.0)
    p.add_argument("--estimate", action="store_true", help="also estimate numerically")
    p.set_defaults(func=cmd_smoothness)

    p = sub.add_parser("table1", help="smoothness gain table (CSV k,D_before,D_after)")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser(
        "figure1", help="kernel comparison curves per k (CSV files + PNG figure)"
    )
    p.add_argument("out_prefix", nargs="?", default="figure1", help="output file prefix")
    p.add_argument("--d", type=int, default=1, help="ambient dimension parameter")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("interp", help="kernel interpolation from a points CSV")
    p.add_argument("points", help="CSV with header x1,...,xm,value")
    p.add_argument("spec", help="kernel spec")
    p.add_argument("--predict", default=None, help="CSV of points to predict at")
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("selftest", help="run a quick built-in verification suite")
    p.add_argument("--seed", type=int, default=1234, help="seed for randomized checks")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3 if args.command == "certify" else 1
    except (EvaluationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3 if args.command == "certify" else 1


if __name__ == "__main__":
    sys.exit(main())
