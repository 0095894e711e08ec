"""Command-line driver: ``qbox <command> [options]``.

Every data command writes a table, either CSV (first line
``# qbox-schema v1``, floats with 17 significant digits) or JSON. Output goes
to ``--output`` or stdout. Files are written to a temporary sibling and
moved into place only on success.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import classical, propagator, spectrum, verify
from .errors import QBoxError
from .qcore import Deformation, PhysicalConfig

SCHEMA = "qbox-schema v1"
COMMANDS = ("spectrum", "piq", "kernel", "trajectory", "phase-portrait", "verify")
DEFAULT_TOL = 1e-10


@dataclass
class RunConfig:
    command: str
    q: float = 1.5
    hbar: float = 1.0
    mass: float = 1.0
    L: float = 1.0
    n_max: int = 4
    tol: float = DEFAULT_TOL
    output_path: str = None
    format: str = "csv"
    options: dict = field(default_factory=dict)

    def physical(self):
        return PhysicalConfig(Deformation(self.q, tol=self.tol), self.hbar, self.mass, self.L)


@dataclass
class Table:
    columns: tuple
    rows: list
    notes: dict = field(default_factory=dict)


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _json_value(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else None


def render(table, fmt, command):
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# {SCHEMA}\n")
        for k, v in table.notes.items():
            buf.write(f"# {k}: {v}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        writer.writerows([_fmt(v) for v in row] for row in table.rows)
        return buf.getvalue()
    rows = [{c: _json_value(v) for c, v in zip(table.columns, row)} for row in table.rows]
    doc = {
        "schema": SCHEMA,
        "command": command,
        "notes": table.notes,
        "columns": {c: [r[c] for r in rows] for c in table.columns},
        "rows": rows,
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".qbox-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


# commands


def cmd_spectrum(rc):
    levels = spectrum.box_spectrum(rc.n_max, rc.physical())
    rows = [(e.n, e.pi_q, e.k_n, e.E_n, e.N_n) for e in levels]
    return Table(("n", "pi_q", "k_n", "E_n", "N_n"), rows)


def cmd_piq(rc):
    d = Deformation(rc.q, tol=rc.tol)
    table = spectrum.lagrange_table(d)
    nus = np.linspace(0.0, rc.options["nu_max"], rc.options["samples"] + 1)[1:]
    rows = []
    for nu in nus:
        root = spectrum.pi_q(nu, d)
        ser = spectrum.pi_q_series(nu, table)
        rows.append((nu, root, ser, abs(ser - root) / root))
    notes = {f"b{k}": _fmt(b) for k, b in zip((1, 3, 5, 7), table.b_coeffs)}
    return Table(("nu", "pi_q_root", "pi_q_series", "rel_diff"), rows, notes)


def cmd_kernel(rc):
    cfg = rc.physical()
    o = rc.options
    xs = np.linspace(o["x_min"], o["x_max"], o["nx"])
    X, XP = np.meshgrid(xs, xs, indexing="ij")
    K = propagator.kernel_grid(X, XP, o["T"], cfg)
    pair = propagator.dilation_pair_value(o["T"], cfg)
    rows = [(X[i, j], XP[i, j], K[i, j].real, K[i, j].imag) for i in range(xs.size) for j in range(xs.size)]
    notes = {"T": _fmt(o["T"]), "dilation_pair_re": _fmt(pair.real), "dilation_pair_im": _fmt(pair.imag)}
    if o["pair_check"]:
        worst = 0.0
        for x in np.linspace(0.5, 2.0, 16):
            for xp in (cfg.q * x, x / cfg.q):
                v = propagator.kernel(propagator.KernelRequest(x, xp, o["T"], cfg)).value
                worst = max(worst, abs(v - pair))
        notes["pair_check_max_error"] = _fmt(worst)
        notes["pair_check"] = "pass" if worst <= 1e-10 else "fail"
    return Table(("x", "x_prime", "re", "im"), rows, notes)


def cmd_trajectory(rc):
    cfg = rc.physical()
    o = rc.options
    if o["x0"] is None:
        omega, X, V, _ = classical.sine_solution(o["amplitude"], cfg)
        init = classical.TrajectoryState(0.0, 0.0, float(V(0.0)), 1)
        period = 2.0 * math.pi / omega
    else:
        init = classical.TrajectoryState(0.0, o["x0"], o["v0"], o["sheet"])
        C = classical.first_integral(init.x, init.xdot, cfg, init.sheet)
        kappa = cfg.m_q * cfg.d.lam / cfg.hbar
        period = 2.0 * math.pi * abs(kappa / C) if C != 0.0 else 1.0
    t_end = o["t_end"] if o["t_end"] is not None else o["periods"] * period
    step = o["step"] if o["step"] is not None else period / o["steps_per_period"]
    tr = classical.integrate_trajectory(init, t_end, step, cfg, method=o["method"])
    rows = [(s.t, s.x, s.xdot, c, s.sheet) for s, c in zip(tr.states, tr.C_values)]
    notes = {
        "C": _fmt(tr.C),
        "C_drift": _fmt(tr.C_drift),
        "error_estimate": _fmt(tr.error_estimate),
        "reason": tr.reason,
        "label": "effective-model extrapolation",
    }
    return Table(("t", "x", "xdot", "C", "sheet"), rows, notes)


def cmd_phase_portrait(rc):
    cfg = rc.physical()
    o = rc.options
    E = o["E"]
    P0 = classical.p0(E, cfg)
    curve = classical.equi_energy_trajectory(E, cfg, (0.0, o["p_max_over_p0"] * P0), o["samples"])
    pts = sorted(curve.points + curve.stationary_points, key=lambda p: (p.p, p.x))
    rows = [(p.x, p.p, p.branch, p.stationary) for p in pts]
    notes = {"E": _fmt(E), "p0": _fmt(curve.p0), "x_max": _fmt(curve.x_max), "skipped": str(len(curve.skipped))}
    return Table(("x", "p", "branch", "stationary"), rows, notes)


def cmd_verify(rc):
    o = rc.options
    results = verify.run_acceptance(o["criteria"], limit_q=o["limit_q"])
    report = verify.format_report(results)
    rows = []
    for r in results:
        for c in r.checks:
            rows.append((r.number, c.name, c.passed, c.value, c.threshold, r.gating))
    return report, results, Table(("criterion", "check", "passed", "value", "threshold", "gating"), rows)


_DISPATCH = {
    "spectrum": cmd_spectrum,
    "piq": cmd_piq,
    "kernel": cmd_kernel,
    "trajectory": cmd_trajectory,
    "phase-portrait": cmd_phase_portrait,
}


def run(rc):
    """Execute one command; returns the process exit status."""
    try:
        if rc.command == "verify":
            report, results, table = cmd_verify(rc)
            print(report)
            ok = verify.all_gating_passed(results)
            print("verify: " + ("all gating criteria passed" if ok else "FAILED"))
            if rc.output_path is not None:
                _write(_render_verify(table, rc.format), rc.output_path)
            return 0 if ok else 1
        table = _DISPATCH[rc.command](rc)
        _write(render(table, rc.format, rc.command), rc.output_path)
        if table.notes.get("pair_check") == "fail":
            print(f"pair check failed: max error {table.notes['pair_check_max_error']}", file=sys.stderr)
            return 1
        return 0
    except QBoxError as exc:
        print(f"qbox {rc.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _render_verify(table, fmt):
    return render(table, fmt, "verify")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return conv


def build_parser():
    parser = argparse.ArgumentParser(prog="qbox", description="q-deformed free particle and box toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, q_default=1.5):
        p.add_argument("--q", type=_positive(float), default=q_default)
        p.add_argument("--hbar", type=_positive(float), default=1.0)
        p.add_argument("--mass", type=_positive(float), default=1.0)
        p.add_argument("--L", type=_positive(float), default=1.0, dest="L")
        p.add_argument("--tol", type=_positive(float), default=None, help="series tolerance (env QBOX_TOL)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("spectrum", help="box levels pi_q(n), k_n, E_n, N_n")
    common(p)
    p.add_argument("--n-max", type=_positive(int), default=4)

    p = sub.add_parser("piq", help="pi_q(nu) by root finding vs the Lagrange series")
    common(p)
    p.add_argument("--nu-max", type=_positive(float), default=4.0)
    p.add_argument("--samples", type=_positive(int), default=40)

    p = sub.add_parser("kernel", help="propagation kernel on an (x, x') grid")
    common(p)
    p.add_argument("--T", type=_positive(float), default=1.0)
    p.add_argument("--x-min", type=float, default=0.25)
    p.add_argument("--x-max", type=float, default=2.0)
    p.add_argument("--nx", type=_positive(int), default=8)
    p.add_argument("--pair-check", action="store_true")

    p = sub.add_parser("trajectory", help="integrate the effective equation of motion")
    common(p)
    p.add_argument("--amplitude", type=_positive(float), default=1.0, help="sine solution launched from x=0")
    p.add_argument("--x0", type=float, default=None)
    p.add_argument("--v0", type=float, default=0.0)
    p.add_argument("--sheet", type=int, choices=(1, -1), default=1)
    p.add_argument("--periods", type=_positive(float), default=1.0)
    p.add_argument("--steps-per-period", type=_positive(int), default=200)
    p.add_argument("--t-end", type=_positive(float), default=None)
    p.add_argument("--step", type=_positive(float), default=None)
    p.add_argument("--method", choices=("first_integral", "direct"), default="first_integral")

    p = sub.add_parser("phase-portrait", help="points on H(x, p) = E with stationary points")
    common(p)
    p.add_argument("--E", type=_positive(float), default=1.0)
    p.add_argument("--p-max-over-p0", type=_positive(float), default=12.0)
    p.add_argument("--samples", type=_positive(int), default=400)

    p = sub.add_parser("verify", help="run the acceptance suite")
    common(p, q_default=None)
    p.add_argument("--criteria", type=int, nargs="+", default=None)
    return parser


def _resolve_tol(flag):
    if flag is not None:
        return flag
    env = os.environ.get("QBOX_TOL")
    if env:
        try:
            v = float(env)
        except ValueError:
            raise SystemExit(f"qbox: QBOX_TOL={env!r} is not a number")
        if not v > 0:
            raise SystemExit(f"qbox: QBOX_TOL must be positive, got {env!r}")
        return v
    return DEFAULT_TOL


def config_from_args(args):
    opts = {k: v for k, v in vars(args).items()
            if k not in ("command", "q", "hbar", "mass", "L", "tol", "format", "output", "n_max")}
    if args.command == "verify":
        opts["limit_q"] = args.q
        q = args.q if args.q is not None else 1.5
    else:
        q = args.q
    return RunConfig(
        command=args.command,
        q=q,
        hbar=args.hbar,
        mass=args.mass,
        L=args.L,
        n_max=getattr(args, "n_max", 4),
        tol=_resolve_tol(args.tol),
        output_path=args.output,
        format=args.format,
        options=opts,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rc = config_from_args(args)
        rc.physical()
    except QBoxError as exc:
        print(f"qbox: {exc}", file=sys.stderr)
        return 2
    return run(rc)


if __name__ == "__main__":
    sys.exit(main())
