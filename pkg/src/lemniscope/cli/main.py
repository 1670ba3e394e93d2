"""``lemniscope analyze | render | fingerprint | verify``.

Exit codes: 0 success, 1 numeric failure, 2 verification failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from .. import __version__
from ..conformal import (
    DEFAULT_SAMPLES,
    FINGERPRINT_TOL,
    ConformalError,
    PreconditionError,
    fingerprint_component,
)
from ..graphbuilder import GraphError, build_graph, domain_configurations, lemniscate_components
from ..oracle import Window, default_window, grid_level, grid_level_enclosing, winding_number
from ..polyfield import RootFindingError
from ..qdmodel import (
    MODULUS_RTOL,
    ModelError,
    RationalMap,
    build,
    connectivity_predicate,
    critical_values,
    properness_test,
)
from ..teichcheck import ANGLE_SNAP, verify_configuration
from ..tracer import DEFAULT_OPTIONS, TraceError, arg_monotonicity_check, level_loops
from .inputs import InputError, load
from .svg import PALETTE, render_svg

EXIT_OK, EXIT_NUMERIC, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2, 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(sp: argparse.ArgumentParser):
    sp.add_argument("--input", "-i", default="-", help="JSON file with the map, or - for stdin")
    sp.add_argument("--out", "-o", default="-", help="output file, or - for stdout")
    sp.add_argument("--level", type=float, action="append", default=None, help="level c (repeatable)")
    sp.add_argument("--window", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    sp.add_argument("--pitch", type=float, default=None, help="grid pitch of the marching-squares cross-check")
    sp.add_argument("--tol-trace", type=float, default=DEFAULT_OPTIONS.trace_tol)
    sp.add_argument("--tol-modulus", type=float, default=MODULUS_RTOL)
    sp.add_argument("--tol-fingerprint", type=float, default=FINGERPRINT_TOL)
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lemniscope", description="Lemniscates as trajectories of -(r'/r)^2 dz^2.")
    ap.add_argument("--version", action="version", version=f"lemniscope {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    a = sub.add_parser("analyze", help="critical data, critical graph, domains, Teichmüller checks")
    _common(a)
    a.add_argument("--fingerprint", action="store_true", help="add fingerprints of the level curve components")
    _common(sub.add_parser("render", help="SVG of the critical graph and level curves"))
    f = sub.add_parser("fingerprint", help="fingerprints and theorem residuals of |p| = c")
    _common(f)
    f.add_argument("--around", type=float, nargs=2, metavar=("RE", "IM"), help="only the component enclosing this point")
    _common(sub.add_parser("verify", help="run every consistency check; exit 2 on any failure"))
    return ap


def _tolerances(args) -> dict:
    return {
        "trace": args.tol_trace,
        "modulus": args.tol_modulus,
        "fingerprint": args.tol_fingerprint,
        "angle_snap_deg": math.degrees(ANGLE_SNAP),
        "samples": args.samples,
    }


def _provenance(args) -> dict:
    return {"tool": "lemniscope", "version": __version__, "tolerances": _tolerances(args)}


def _window(args, r) -> Window:
    return Window(*args.window) if args.window else default_window(r)


def _emit(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _pipeline(r: RationalMap, args):
    opts = replace(DEFAULT_OPTIONS, trace_tol=args.tol_trace)
    qd = build(r)
    g = build_graph(qd, opts)
    dc = domain_configurations(g, qd)
    return qd, g, dc, opts


def _fingerprints(r: RationalMap, args, around=None) -> tuple[list[dict], bool]:
    if not r.is_polynomial:
        raise InputError("fingerprints are defined for polynomials (q = 1)")
    c = args.level[0] if args.level else 1.0
    p = r.p / c
    rn = RationalMap(p)
    qd = build(rn)
    for cv in critical_values(qd):
        if abs(cv.modulus - 1.0) <= args.tol_modulus:
            raise PreconditionError(
                f"level {c} is critical: |p({cv.point})| = {cv.modulus * c}; the lemniscate is not smooth"
            )
    entries, ok = [], True
    for loop in level_loops(rn, 1.0, qd=qd):
        if around is not None and winding_number(loop.points, complex(*around)) == 0:
            continue
        fp, rep, info = fingerprint_component(p, loop.points, 1.0, args.samples, args.tol_fingerprint)
        entry = {"level": c, "normalized": c != 1.0, **info}
        if rep is not None:
            entry["report"] = rep.to_json()
            ok = ok and rep.ok
        if fp is not None:
            entry["fingerprint"] = fp.to_json()
        entries.append(entry)
    return entries, ok


def cmd_analyze(args) -> int:
    data, r = load(args.input)
    qd, g, dc, _ = _pipeline(r, args)
    table = critical_values(qd)
    connected = connectivity_predicate(qd, args.tol_modulus)
    teich = verify_configuration(g, dc)
    report = {
        "input": data,
        "quadratic_differential": qd.to_json(),
        "critical_values": table.to_json(),
        "connectivity": {
            "predicate": "connected" if connected else "disconnected",
            "traced_components": len(g.components),
        },
        "graph": g.to_json(),
        "domains": dc.to_json(),
        "teichmuller": teich,
        "provenance": _provenance(args),
    }
    if r.is_polynomial:
        report["properness"] = properness_test(qd, args.level[0] if args.level else 1.0, args.tol_modulus).value
    ok = all(t["ok"] for t in teich) and dc.euler_ok and g.handshake_ok and (len(g.components) == 1) == connected
    if args.fingerprint:
        entries, fok = _fingerprints(r, args)
        report["fingerprints"] = entries
        ok = ok and fok
    report["ok"] = ok
    _emit(_dump(report), args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_render(args) -> int:
    data, r = load(args.input)
    qd, g, dc, opts = _pipeline(r, args)
    window = _window(args, r)
    levels = {}
    for c in args.level or []:
        levels[c] = lemniscate_components(r, c, window, opts).polylines
    caption = (f"vertices {len(g.vertices)}, edges {len(g.edges)}, components {len(g.components)}, "
               f"circle faces {dc.circle_count}, ring faces {dc.ring_count}")
    _emit(render_svg(r, qd, g, dc, levels, window, caption), args.out)
    return EXIT_OK


def cmd_fingerprint(args) -> int:
    data, r = load(args.input)
    entries, ok = _fingerprints(r, args, args.around)
    _emit(_dump({"input": data, "components": entries, "ok": ok, "provenance": _provenance(args)}), args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_verify(args) -> int:
    data, r = load(args.input)
    qd, g, dc, opts = _pipeline(r, args)
    checks = []

    def check(name, ok, **detail):
        checks.append({"check": name, "ok": bool(ok), **detail})

    check("ray_handshake", g.handshake_ok, edges=len(g.edges))
    check("euler", dc.euler_ok, euler=list(dc.euler))
    check("circle_faces_match_poles", dc.circle_count == len(qd.all_double_poles), circle=dc.circle_count)
    connected = connectivity_predicate(qd, args.tol_modulus)
    check("connectivity_predicate", (len(g.components) == 1) == connected,
          predicate=connected, traced_components=len(g.components))
    for t in verify_configuration(g, dc):
        check("teichmuller", t["ok"], face=t["face"], lhs=t["lhs"], rhs=t["rhs"])
    bad = [i for i, e in enumerate(g.edges) if not arg_monotonicity_check(e.trajectory, r).monotone]
    check("arg_monotone_edges", not bad, offending=bad)
    mods = critical_values(qd).moduli
    window = _window(args, r)
    for name, c, expected in (("small_level_count", 0.01 * mods.min(), r.zero_count()),
                              ("large_level_count", 100 * mods.max(), r.pole_count())):
        lc = lemniscate_components(r, c, None, opts)
        loops_ok = all(arg_monotonicity_check(
            _as_loop(pts, c), r).ok for pts in lc.polylines)
        if args.window or args.pitch:
            grid = grid_level(r, c, window, args.pitch)
        else:
            grid = grid_level_enclosing(r, c)
        # clipped arcs cannot be counted, so the oracle only votes when every contour closes
        oracle_ok = grid.touches_boundary or grid.component_count == expected
        check(name, lc.count == expected and loops_ok and oracle_ok, level=c, traced=lc.count, expected=expected,
              oracle=grid.component_count, oracle_window=grid.window.to_json())
    ok = all(c["ok"] for c in checks)
    _emit(_dump({"input": data, "checks": checks, "ok": ok, "provenance": _provenance(args)}), args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def _as_loop(pts, c):
    from ..tracer import LOOP, Trajectory

    return Trajectory(np.asarray(pts), c, LOOP, LOOP, 0.0)


COMMANDS = {"analyze": cmd_analyze, "render": cmd_render, "fingerprint": cmd_fingerprint, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, ModelError, PreconditionError) as exc:
        print(f"lemniscope: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TraceError, GraphError, ConformalError, RootFindingError, ValueError, ArithmeticError) as exc:
        print(f"lemniscope: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
