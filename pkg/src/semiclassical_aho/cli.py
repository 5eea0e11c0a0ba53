"""Command-line front end: ``aho <subcommand> [options]``.

Exit status 0 on success, 1 on a numerical or domain failure, 2 on bad
input.  Failures print a JSON object {"error", "message"} on stderr.
Primary output goes to ``--out`` (or stdout) and is byte-stable for a fixed
configuration; run metadata with timestamps goes to ``<out>.meta.json``.
Grid scans fan out over ``AHO_WORKERS`` processes (default 1).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from . import approximant as apx
from . import flucton as fl
from . import generalized_bloch as gb
from . import reference_solver as ref
from . import riccati_bloch as rb
from .errors import AHOError, ConfigParse
from .potential import load_potential, quartic_aho

WORKERS_ENV = "AHO_WORKERS"


@dataclass
class RunConfig:
    subcommand: str
    pot_path: str | None = None
    params: dict = field(default_factory=dict)
    fmt: str = "csv"
    out: str | None = None
    precision: str = "double"
    tol: float = 1e-12

    def __post_init__(self):
        if not (self.tol > 0):
            raise ConfigParse("tolerances must be positive")
        if self.fmt not in ("csv", "json"):
            raise ConfigParse(f"unknown format {self.fmt!r}")
        if self.precision not in ("double", "extended"):
            raise ConfigParse(f"unknown precision {self.precision!r}")


def parse_grid(text: str) -> np.ndarray:
    """'a:b:n' -> n equally spaced points from a to b (n >= 2, a < b); a
    single number is a one-point grid."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigParse(f"grid must be 'a:b:n', got {text!r}") from None
    if n < 2 or not a < b:
        raise ConfigParse(f"grid {text!r} needs n >= 2 and a < b")
    return np.linspace(a, b, n)


def parse_state(text: str) -> tuple[int, int]:
    try:
        n, p = (int(s) for s in text.split(","))
    except ValueError:
        raise ConfigParse(f"state must be 'n,p', got {text!r}") from None
    if n < 0 or p not in (0, 1):
        raise ConfigParse("state needs n >= 0 and p in {0, 1}")
    return n, p


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        w = int(raw)
    except ValueError:
        raise ConfigParse(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if w < 1:
        raise ConfigParse(f"{WORKERS_ENV} must be >= 1")
    return w


def _fan_out(fn, items):
    """Order-preserving map over a bounded process pool."""
    items = list(items)
    w = min(_workers(), len(items))
    if w <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=w) as pool:
        return list(pool.map(fn, items))


def _fmt(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _json_value(v):
    """Native JSON numbers and booleans; exact fractions stay strings."""
    if isinstance(v, Fraction):
        return _fmt(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def render(rows: list[dict], fmt: str, extra: dict | None = None) -> str:
    if fmt == "json":
        payload = {"rows": [{k: _json_value(v) for k, v in r.items()} for r in rows]}
        payload.update(extra or {})
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    cols: list[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands; each returns (rows, extra json payload)
# ---------------------------------------------------------------------------

def _pot(cfg: RunConfig):
    return load_potential(cfg.pot_path) if cfg.pot_path else quartic_aho()


def cmd_pt_series(cfg: RunConfig):
    pot = _pot(cfg)
    s = rb.rb_ground_series(pot, cfg.params["order"])
    def degree(y):  # -1 for the zero polynomial
        return max((j for j, c in enumerate(y) if c), default=-1)

    rows = [{"n": n, "eps_exact": e, "eps": float(e), "deg_Y": degree(s.Y[n])}
            for n, e in enumerate(s.eps)]
    extra = {"Y": [{str(j): _fmt(c) for j, c in enumerate(y) if c} for y in s.Y]}
    return rows, extra


def _eps_input(cfg: RunConfig, pot, N: int):
    if cfg.params.get("eps"):
        return [float(x) for x in cfg.params["eps"].split(",")]
    if pot.is_normalized:
        return list(rb.rb_ground_series(pot, max(N - 2, 0)).eps)
    return []


def cmd_gb_series(cfg: RunConfig):
    pot = _pot(cfg)
    N = cfg.params["order"]
    series = gb.gb_series(pot, _eps_input(cfg, pot, N), N)
    rows = []
    for u in parse_grid(cfg.params["grid"]):
        row = {"u": float(u)}
        row.update({f"Z_{n}": float(z) for n, z in enumerate(series.terms(float(u)))})
        rows.append(row)
    return rows, {}


def cmd_asymptotics(cfg: RunConfig):
    pot = _pot(cfg)
    eps = cfg.params.get("eps")
    eps = float(eps) if eps else 1.0
    lam = cfg.params.get("lam")
    lam = float(lam) if lam is not None else pot.lam
    depth = cfg.params["depth"] or 2 * pot.p + 2
    table = gb.large_u_series(pot, depth, eps, lam)
    rows = [{"power": j, "coefficient": c, "lam_free": lf, "eps_free": ef}
            for j, c, lf, ef in table.rows()]
    return rows, {"p": table.p, "lam": lam, "eps": eps}


def cmd_flucton(cfg: RunConfig):
    pot = _pot(cfg)
    what, u0 = cfg.params["what"], cfg.params["u0"]
    if what == "path":
        path = fl.flucton_path(pot, u0, cfg.params["tmax"], cfg.params["samples"])
        prof = fl.fluctuation_profile(path)
        rows = [{"tau": float(t), "u": float(u), "W": float(w)}
                for t, u, w in zip(path.tau, path.u, prof.W)]
        return rows, {"u0": u0, "omega2": prof.omega2}
    if what == "action":
        rows = []
        for arms in (1, 2):
            a = fl.flucton_action(pot, u0, arms)
            rows.append({"u0": u0, "arms": arms, "s": a.reduced, "S_fl": a.total})
        return rows, {}
    gy = fl.gy_log_det_arm(pot, u0)
    pred = fl.det_log_prediction(pot, u0)
    return [{"u0": u0, "gy_log_det_arm": gy, "z2_prediction": pred, "difference": gy - pred}], {}


def _variational_point(args):
    n, p, g, tol = args
    res = apx.optimize_params(n, p, g, tol=tol)
    e_ref = float(ref.eigensolve_spectral(quartic_aho(g), k_max=2 * n + p).energies[-1])
    A = res.A if math.isfinite(res.A) else None  # A = a/g**2 is undefined at g = 0
    return {"g": g, "n": n, "p": p, "A": A, "B": res.B, "a": res.a, "E_var": res.E_var,
            "E_ref": e_ref, "rel_err": abs(res.E_var - e_ref) / e_ref,
            "converged": res.converged, "poly": list(res.psi.poly)}


def cmd_variational(cfg: RunConfig):
    if cfg.pot_path:
        pot = _pot(cfg)
        if pot.exact != quartic_aho().exact or pot.hbar != 1 or pot.mass_convention != "half":
            raise ConfigParse("variational needs the quartic profile u^2 + u^4 with hbar = 1, m = 1/2")
    n, p = parse_state(cfg.params["state"])
    grid = parse_grid(cfg.params["g_grid"])
    if np.any(grid < 0):
        raise ConfigParse("couplings must be >= 0")
    rows = _fan_out(_variational_point, [(n, p, float(g), cfg.tol) for g in grid])
    table = [{k: r[k] for k in ("g", "n", "p", "A", "B", "E_var", "E_ref", "rel_err")} for r in rows]
    warm = [{k: r[k] for k in ("g", "n", "p", "a", "B", "poly")} for r in rows]
    if cfg.params.get("params_out"):
        with open(cfg.params["params_out"], "w") as fh:
            json.dump(warm, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return table, {"parameters": warm}


def cmd_reference(cfg: RunConfig):
    pot = _pot(cfg)
    g = cfg.params["g"] if cfg.params["g"] is not None else pot.g
    k_max = cfg.params["levels"]
    method = cfg.params["method"]
    rows = []
    spec = None
    if method in ("spectral", "both"):
        spec = ref.eigensolve_spectral(pot, g=g, k_max=k_max, tol=max(cfg.tol, 1e-13))
    for k in range(k_max + 1):
        row = {"k": k}
        if spec is not None:
            row.update(E_spectral=float(spec.energies[k]), basis_size=spec.basis_size,
                       drift=spec.drift)
        if method in ("shooting", "both"):
            sh = ref.shoot_level(pot, k, g=g, tol=max(cfg.tol, 1e-12))
            row.update(E_shooting=sh.energy, nodes=sh.nodes)
        if method == "both":
            row["rel_diff"] = abs(row["E_spectral"] - row["E_shooting"]) / abs(row["E_spectral"])
        rows.append(row)
    return rows, {"g": g, "hbar": pot.hbar}


def _flucton_exponent_check(u0: float = 1.0) -> float:
    """Relative gap between the path integral of 2 V̂ and the one-arm action."""
    pot = quartic_aho()
    path = fl.flucton_path(pot, u0, tau_max=30.0, n_samples=11)
    val, _ = quad(lambda t: 2.0 * float(pot.eval(float(path(t)))), 0.0, 30.0,
                  epsabs=0.0, epsrel=1e-12, limit=400)
    s = fl.flucton_action(pot, u0).reduced
    return abs(val - s) / s


def _det_check() -> float:
    pot = quartic_aho()
    gy = fl.gy_log_det_arm(pot, 2.0) - fl.gy_log_det_arm(pot, 1.0)
    pred = fl.det_log_prediction(pot, 2.0) - fl.det_log_prediction(pot, 1.0)
    return abs(gy - pred)


def _compare_point(args):
    g, var_tol = args
    series = rb.rb_ground_series(quartic_aho(), 24)
    ps = rb.eps_partial_sum(series, g)
    nz = [t for t in ps.terms if t != 0]
    smallest = min(abs(t) for t in nz) if g > 0 else 0.0
    e_ref = float(ref.eigensolve_spectral(quartic_aho(g)).energies[0])
    var = apx.optimize_params(0, 0, g)
    rel = abs(var.E_var - e_ref) / e_ref
    pt_err = abs(ps.optimal_value - e_ref)
    return {"kind": "energy", "g": g, "E_pt": ps.optimal_value, "pt_order": ps.optimal_index,
            "pt_smallest_term": smallest, "E_var": var.E_var, "E_ref": e_ref,
            "var_rel_err": rel, "pt_abs_err": pt_err,
            "pass": bool(rel <= var_tol and pt_err <= max(3 * smallest, 1e-12))}


def cmd_compare(cfg: RunConfig):
    grid = parse_grid(cfg.params["g_grid"])
    if np.any(grid < 0):
        raise ConfigParse("couplings must be >= 0")
    var_tol = cfg.params["var_tol"]
    rows = _fan_out(_compare_point, [(float(g), var_tol) for g in grid])
    f_check = _flucton_exponent_check()
    d_check = _det_check()
    for r in rows:
        r["flucton_check"] = f_check
        r["det_check"] = d_check
        r["pass"] = bool(r["pass"] and f_check < 1e-9 and d_check < 1e-4)
    for g in grid:
        if g <= 0:
            continue
        g = float(g)
        e_a = float(ref.eigensolve_spectral(quartic_aho(g, 1.0)).energies[0])
        e_b = float(ref.eigensolve_spectral(quartic_aho(2 * g, 0.25)).energies[0]) / 0.25
        diff = abs(e_a - e_b) / e_a
        rows.append({"kind": "lambda-equivalence", "g": g, "eps_a": e_a, "eps_b": e_b,
                     "lam_rel_diff": diff, "pass": bool(diff <= 1e-11)})
    return rows, {"all_pass": all(r["pass"] for r in rows)}


COMMANDS = {
    "pt-series": cmd_pt_series,
    "gb-series": cmd_gb_series,
    "asymptotics": cmd_asymptotics,
    "flucton": cmd_flucton,
    "variational": cmd_variational,
    "reference": cmd_reference,
    "compare": cmd_compare,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigParse(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--pot", dest="pot_path", help="potential JSON file (default: quartic AHO)")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--precision", choices=("double", "extended"), default="double")
    common.add_argument("--tol", type=float, default=1e-12)

    parser = _Parser(prog="aho", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("pt-series", parents=[common], help="exact energy series")
    p.add_argument("--order", type=int, default=10)

    p = sub.add_parser("gb-series", parents=[common], help="semiclassical terms Z_n on a grid")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--grid", default="0.2:3:15")
    p.add_argument("--eps", help="comma-separated eps_0..eps_{N-2} (default: from the PT series)")

    p = sub.add_parser("asymptotics", parents=[common], help="large-u coefficient table")
    p.add_argument("--depth", type=int, default=0)
    p.add_argument("--eps")
    p.add_argument("--lam", type=float)

    p = sub.add_parser("flucton", parents=[common], help="flucton path, action or determinant")
    p.add_argument("what", choices=("path", "action", "det"))
    p.add_argument("--u0", type=float, default=1.0)
    p.add_argument("--tmax", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=201)

    p = sub.add_parser("variational", parents=[common], help="optimized trial-function energies")
    p.add_argument("--state", default="0,0")
    p.add_argument("--g-grid", dest="g_grid", default="1")
    p.add_argument("--params-out", dest="params_out")

    p = sub.add_parser("reference", parents=[common], help="reference eigenvalues")
    p.add_argument("--g", type=float)
    p.add_argument("--levels", type=int, default=0)
    p.add_argument("--method", choices=("spectral", "shooting", "both"), default="both")

    p = sub.add_parser("compare", parents=[common], help="cross-method report")
    p.add_argument("--g-grid", dest="g_grid", default="0:1:3")
    p.add_argument("--var-tol", dest="var_tol", type=float, default=1e-7)
    return parser


_GLOBAL = ("subcommand", "pot_path", "fmt", "out", "precision", "tol")


def config_from_args(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    params = {k: v for k, v in ns.items() if k not in _GLOBAL}
    cfg = RunConfig(ns["subcommand"], ns["pot_path"], params, ns["fmt"], ns["out"],
                    ns["precision"], ns["tol"])
    if cfg.pot_path and not os.path.exists(cfg.pot_path):
        raise ConfigParse(f"potential file {cfg.pot_path!r} not found")
    for key in ("order", "samples"):
        if key in params and params[key] is not None and params[key] < 0:
            raise ConfigParse(f"--{key} must be non-negative")
    if cfg.precision == "extended" and cfg.subcommand not in ("pt-series", "asymptotics"):
        raise ConfigParse("extended precision is only available for the exact series commands")
    return cfg


def run(cfg: RunConfig) -> int:
    t0 = time.time()
    rows, extra = COMMANDS[cfg.subcommand](cfg)
    text = render(rows, cfg.fmt, extra)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        meta = {"subcommand": cfg.subcommand, "started": t0, "elapsed_s": time.time() - t0,
                "workers": _workers(), "precision": cfg.precision}
        with open(cfg.out + ".meta.json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
    else:
        sys.stdout.write(text)
    return 0


def _fail(exc: Exception, status: int) -> int:
    code = getattr(exc, "code", "module_error")
    sys.stderr.write(json.dumps({"error": code, "type": type(exc).__name__,
                                 "message": str(exc)}, sort_keys=True) + "\n")
    return status


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except ConfigParse as exc:
        return _fail(exc, 2)
    try:
        return run(cfg)
    except ConfigParse as exc:
        return _fail(exc, 2)
    except (AHOError, ArithmeticError, ValueError) as exc:
        return _fail(exc, 1)


if __name__ == "__main__":
    sys.exit(main())
