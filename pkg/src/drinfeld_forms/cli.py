"""Command-line front end.

Exit status: 0 on success (and all checks passing), 1 on a failed check or a
computational error (reported as a JSON object with ``error`` and ``message``),
2 on a usage error.  Defaults for the global flags can be placed in a JSON file
named by the DRINFELD_FORMS_CONFIG environment variable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import building, forms, tau, verify
from .errors import DrinfeldError, UnsupportedParams, UsageError
from .lattice import ALatticeFrame
from .scalars import GroundParams, PolyA, carlitz_coeffs
from .scalars import ground as make_ground

CONFIG_ENV = "DRINFELD_FORMS_CONFIG"
GLOBAL_DEFAULTS = {"q": 2, "m": None, "e": 2, "prec": 240, "seed": 0, "format": "json"}


@dataclass
class RunConfig:
    """Validated ground parameters, command, arguments, output format and seed."""

    params: GroundParams
    command: str
    args: dict = field(default_factory=dict)
    fmt: str = "json"
    seed: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def ground(self):
        return make_ground(self.params)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_config_defaults() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    unknown = set(data) - set(GLOBAL_DEFAULTS)
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    return data


def _point(text: str) -> building.ApartmentPoint:
    try:
        return building.ApartmentPoint.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad apartment point {text!r}: {exc}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def build_parser(defaults: dict) -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--q", type=int, default=defaults["q"])
    common.add_argument("--m", type=int, default=defaults["m"],
                        help="residue degree (default: rank of the frame)")
    common.add_argument("--e", type=int, default=defaults["e"], help="ramification index")
    common.add_argument("--prec", type=int, default=defaults["prec"], help="relative precision N")
    common.add_argument("--seed", type=int, default=defaults["seed"])
    common.add_argument("--format", choices=["json", "csv"], default=defaults["format"])
    common.add_argument("--out", default=None, help="write output to this file")

    parser = _Parser(prog="drinfeld-forms", description="Drinfeld modular forms toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def frame_args(p):
        p.add_argument("--x", help="apartment point; a frame is sampled over it")
        p.add_argument("--frame", help="JSON file holding a frame {\"omega\": [...]}")

    p = sub.add_parser("carlitz", parents=[common], help="Carlitz coefficients of a")
    p.add_argument("--a", required=True)
    p = sub.add_parser("forms", parents=[common], help="alpha, beta, g at a frame")
    frame_args(p)
    p.add_argument("--kmax", type=int, default=None)
    p = sub.add_parser("eisenstein", parents=[common], help="E_k at a frame")
    frame_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, default=None,
                   help="truncation degree for the direct sum (default: exponential route)")
    p = sub.add_parser("coeffs", parents=[common], help="coefficient forms of phi_a")
    frame_args(p)
    p.add_argument("--a", required=True)
    p = sub.add_parser("spectrum", parents=[common], help="inseparability multiset of a point")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--len", type=int, required=True, dest="length")
    p = sub.add_parser("np", parents=[common], help="spectrum <-> Newton polygon")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--spectrum", help="comma-separated logs")
    grp.add_argument("--vertices", help="comma-separated x:y pairs")
    p = sub.add_parser("wk", parents=[common], help="vertices of W(k) in a box")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--box", type=int, required=True)
    p = sub.add_parser("map", parents=[common], help="building map of a frame")
    frame_args(p)
    p = sub.add_parser("fiber", parents=[common], help="sample frames over a point and log|Delta|")
    p.add_argument("--x", required=True)
    p.add_argument("--count", type=int, default=5)
    p = sub.add_parser("converge", parents=[common], help="normalized convergence table")
    frame_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--degrees", required=True)
    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("suite", choices=sorted(verify.SUITES) + ["all"])
    return parser


def _frame_file_m(path) -> int:
    """Residue degree recorded in a frame file, or 1."""
    if not path:
        return 1
    try:
        with open(path) as fh:
            omega = json.load(fh)["omega"]
        return int(omega[0]["m"])
    except (OSError, ValueError, KeyError, IndexError, TypeError) as exc:
        raise UsageError(f"cannot read frame file {path}: {exc}") from exc


def parse_config(argv) -> RunConfig:
    defaults = dict(GLOBAL_DEFAULTS)
    defaults.update(_load_config_defaults())
    ns = vars(build_parser(defaults).parse_args(argv))
    command = ns.pop("command")
    q, m, e, N = ns.pop("q"), ns.pop("m"), ns.pop("e"), ns.pop("prec")
    if m is None:
        m = ns.get("r") or (_point(ns["x"]).r if ns.get("x") else _frame_file_m(ns.get("frame")))
    try:
        params = GroundParams.for_q(q, m, e, N)
    except UnsupportedParams as exc:
        raise UsageError(str(exc)) from exc
    fmt, seed = ns.pop("format"), ns.pop("seed")
    return RunConfig(params, command, ns, fmt, seed)


# -- commands --

def _frame(cfg: RunConfig) -> ALatticeFrame:
    args = cfg.args
    g = cfg.ground()
    if args.get("frame"):
        with open(args["frame"]) as fh:
            return ALatticeFrame.from_dict(g, json.load(fh))
    if not args.get("x"):
        raise UsageError("give --x or --frame")
    return building.fiber_sample(g, _point(args["x"]), 1, cfg.rng())[0]


def _series(x) -> dict:
    v = x.val if hasattr(x, "val") else x
    out = v.to_dict()
    out["log"] = str(v.logq_abs()) if v.has_visible() else None
    return out


def cmd_carlitz(cfg):
    a = PolyA.parse(cfg.args["a"], cfg.params.q)
    coeffs = carlitz_coeffs(a)
    return {"a": a.to_expr(), "coefficients": [c.to_expr() for c in coeffs],
            "degrees": [c.deg() for c in coeffs]}


def cmd_forms(cfg):
    prof = forms.alpha_series(_frame(cfg), kmax=cfg.args["kmax"])
    return prof.to_dict()


def cmd_eisenstein(cfg):
    frame = _frame(cfg)
    k, d = cfg.args["k"], cfg.args["d"]
    if d is not None:
        return {"k": k, "d": d, "route": "direct", "value": _series(forms.eisenstein_direct(frame, k, d))}
    q = cfg.params.q
    j = 0
    while q**j - 1 < k:
        j += 1
    if q**j - 1 != k:
        raise UsageError("the exponential route needs k = q^j - 1; pass --d for a direct sum")
    prof = forms.alpha_series(frame, kmax=max(j, frame.r))
    return {"k": k, "route": "exponential", "value": _series(prof.eisenstein(j))}


def cmd_coeffs(cfg):
    frame = _frame(cfg)
    a = PolyA.parse(cfg.args["a"], cfg.params.q)
    prof = forms.alpha_series(frame, kmax=frame.r * a.deg())
    return {"a": a.to_expr(), "coefficients": [_series(c) for c in forms.coefficient_forms(prof, a)]}


def cmd_spectrum(cfg):
    x = _point(cfg.args["x"])
    if x.r != cfg.args["r"]:
        raise UsageError(f"point has {x.r} coordinates, expected {cfg.args['r']}")
    vals = building.insep_multiset(x, cfg.args["length"])
    return {"x": x.to_list(), "multiset": [str(v) for v in vals]}


def cmd_np(cfg):
    q = cfg.params.q
    if cfg.args["spectrum"]:
        try:
            spec = tau.Spectrum.from_list(cfg.args["spectrum"].split(","))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return {"spectrum": spec.to_list(), "polygon": tau.spectrum_to_np(spec, q).to_dict()}
    try:
        verts = tuple((int(a), Fraction(b)) for a, b in
                      (t.split(":") for t in cfg.args["vertices"].split(",")))
    except ValueError as exc:
        raise UsageError(f"bad vertex list: {exc}") from exc
    poly = tau.NewtonPolygon(verts)
    return {"polygon": poly.to_dict(), "spectrum": tau.np_to_spectrum(poly, q).to_list()}


def cmd_wk(cfg):
    verts = building.wk_vertices(cfg.args["r"], cfg.args["k"], cfg.args["box"])
    return {"r": cfg.args["r"], "k": cfg.args["k"], "box": cfg.args["box"],
            "vertices": [{"n": list(v.n), "label": v.label(), "x": v.point().to_list()}
                         for v in verts]}


def cmd_map(cfg):
    frame = _frame(cfg)
    ok, cert = building.is_fundamental(frame)
    point = building.building_map(frame) if ok else None
    return {"fundamental": ok, "point": point.to_list() if point else None, "certificate": cert}


def cmd_fiber(cfg):
    x = _point(cfg.args["x"])
    frames = building.fiber_sample(cfg.ground(), x, cfg.args["count"], cfg.rng())
    logs = [str(forms.alpha_series(fr).delta.logq_abs()) for fr in frames]
    return {"x": x.to_list(), "log_delta": logs, "constant": len(set(logs)) == 1,
            "frames": [fr.to_dict() for fr in frames]}


def cmd_converge(cfg):
    frame = _frame(cfg)
    k = cfg.args["k"]
    prof = forms.alpha_series(frame, kmax=k)
    rows = forms.convergence_report(prof, k, _int_list(cfg.args["degrees"]))
    return {"k": k, "rows": [{"d": r.d, "v_diff": None if r.v_diff is None else str(r.v_diff),
                              "v_carlitz": str(r.v_carlitz), "prec": r.prec} for r in rows]}


def cmd_verify(cfg):
    names = sorted(verify.SUITES) if cfg.args["suite"] == "all" else [cfg.args["suite"]]
    return verify.run(names, cfg.seed)


COMMANDS = {
    "carlitz": cmd_carlitz, "forms": cmd_forms, "eisenstein": cmd_eisenstein,
    "coeffs": cmd_coeffs, "spectrum": cmd_spectrum, "np": cmd_np, "wk": cmd_wk,
    "map": cmd_map, "fiber": cmd_fiber, "converge": cmd_converge, "verify": cmd_verify,
}


# -- output --

def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def render(command: str, result: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result, indent=2, sort_keys=True) + "\n"
    if command == "wk":
        n = result["r"] - 1
        return _csv([v["n"] for v in result["vertices"]], [f"n{i + 1}" for i in range(n)])
    if command == "converge":
        return _csv([[r["d"], r["v_diff"] or "", r["v_carlitz"]] for r in result["rows"]],
                    ["d", "v_diff", "v_carlitz"])
    if command == "spectrum":
        return ",".join(result["multiset"]) + "\n"
    if command == "verify":
        rows = [[s["suite"], c["name"], "PASS" if c["passed"] else "FAIL"]
                for s in result["suites"] for c in s["checks"]]
        return _csv(rows, ["suite", "check", "result"])
    raise UsageError(f"csv output is not available for {command}")


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    out = None
    try:
        cfg = parse_config(argv)
        out = cfg.args.pop("out", None)
        result = COMMANDS[cfg.command](cfg)
        _emit(render(cfg.command, result, cfg.fmt), out)
        if cfg.command == "verify" and not result["passed"]:
            return 1
        return 0
    except UsageError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return 2
    except DrinfeldError as exc:
        _emit(json.dumps({"error": exc.code, "message": str(exc)}) + "\n", out)
        return 1


if __name__ == "__main__":
    sys.exit(main())
