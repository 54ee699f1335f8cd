"""Command line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 unreadable input or unwritable output.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from importlib import metadata

import numpy as np

from . import curvature, distortion, generators, optimizer
from .geometry import read_curve, write_curve

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("gromovdist")


class UsageError(Exception):
    pass


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def _apply_threads():
    raw = os.environ.get("DISTORT_THREADS")
    if not raw:
        return
    try:
        n = int(raw)
        if n < 1:
            raise ValueError
    except ValueError:
        raise UsageError(f"DISTORT_THREADS must be a positive integer, got {raw!r}")
    import numba

    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def _dump(doc: dict, path: str | None):
    text = json.dumps(doc, indent=2, default=_finite) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _envelope(command: str, inputs: dict, body: dict) -> dict:
    return {"tool_version": tool_version(), "command": command, "inputs": inputs, **body}


def _load(path: str):
    try:
        return read_curve(path)
    except OSError:
        raise
    except ValueError as exc:
        raise OSError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------


def _given(value, default):
    return default if value is None else value


def cmd_generate(args) -> int:
    kind = args.kind
    if kind == "ngon":
        curve = generators.make_ngon(args.n or 64, args.radius)
    elif kind == "comet":
        curve = generators.make_comet(args.phi, args.segment_len, args.arc_radius, args.arc_samples)
    elif kind == "dragons_tooth":
        curve = generators.make_dragons_tooth(args.phi, _given(args.r, 1.0), _given(args.R, 10.0), args.arc_samples)
    elif kind == "torus_knot":
        curve = generators.make_torus_knot(args.p, args.q, args.n or 128, (_given(args.R, 2.0), _given(args.r, 1.0)))
    else:
        base = _load(args.base) if args.base else generators.make_ngon(4, math.sqrt(0.5))
        curve = generators.apply_twist(base, args.edge, args.eps_twist)
    write_curve(curve, args.out, comment=f"generate {kind}")
    return EXIT_OK


def cmd_compute(args) -> int:
    curve = _load(args.curve)
    rep = distortion.distortion(curve, args.density, args.b)
    inputs = {"curve": args.curve, "density": args.density, "b": args.b,
              "closed": curve.closed, "n_vertices": len(curve.vertices)}
    _dump(_envelope("compute", inputs, rep.to_dict()), args.report)
    if args.shadow_csv:
        rep.write_shadow_csv(args.shadow_csv)
    return EXIT_OK


def _verify_ds(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = []
    worst = 0.0
    for trial in range(args.trials):
        n = int(rng.integers(2, args.max_edges + 1))
        arc = curvature.random_arc(rng, n)
        res = curvature.ds_bound_check(arc, (0.0, arc.length))
        worst = max(worst, res.max_dq / res.bound)
        if res.ok is False:
            failures.append({"trial": trial, "bound": res.bound, "max_dq": res.max_dq,
                             "vertices": arc.vertices.tolist()})
    body = {"check": "ds-bound", "trials": args.trials, "violations": len(failures),
            "worst_ratio": worst, "counterexamples": failures}
    _dump(_envelope("verify", {"check": "ds-bound", "trials": args.trials, "seed": args.seed,
                               "max_edges": args.max_edges}, body), args.report)
    return EXIT_FAIL if failures else EXIT_OK


def _verify_measure(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = []
    for trial in range(args.trials):
        m = curvature.random_measure(rng)
        W = curvature.subdivision_scale(m)
        x, F = curvature._cumulative(m.density, 0.0, 1.0)
        cap = curvature.TWO_THIRDS * F[-1]
        below = curvature.max_window_mass(x, F, W * (1 - 1e-9)) <= cap * (1 + 1e-12)
        if not below:
            failures.append({"trial": trial, "scale": W, "measure": m.to_dict()})
        try:
            curvature.subdivision_scale(curvature.random_measure(rng, atoms=1))
            failures.append({"trial": trial, "error": "atomic measure accepted"})
        except ValueError:
            pass
    body = {"check": "measure-lemma", "trials": args.trials, "violations": len(failures),
            "counterexamples": failures}
    _dump(_envelope("verify", {"check": "measure-lemma", "trials": args.trials, "seed": args.seed},
                    body), args.report)
    return EXIT_FAIL if failures else EXIT_OK


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if args.check == "ds-bound":
        if args.max_edges < 2:
            raise UsageError("--max-edges must be at least 2")
        return _verify_ds(args)
    return _verify_measure(args)


def cmd_anneal(args) -> int:
    try:
        cfg = optimizer.AnnealConfig.from_file(args.config)
    except OSError:
        raise
    except (ValueError, IndexError) as exc:
        raise UsageError(f"{args.config}: {exc}")
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.validate()
    curve = _load(args.curve)
    try:
        best, trace = optimizer.anneal(curve, cfg)
    except optimizer.ConfigError as exc:
        raise UsageError(str(exc))
    write_curve(best, args.out, comment=f"anneal seed={cfg.seed} objective={cfg.objective}")
    trace.write_csv(args.trace)
    log.info("accepted %d of %d steps; best length %.6g", trace.accepted_count, len(trace), best.length)
    return EXIT_OK


def cmd_saturation(args) -> int:
    curve = _load(args.curve)
    rep = optimizer.saturation_report(curve, args.kappa_min, args.eta, args.window)
    inputs = {"curve": args.curve, "eta": args.eta, "window": args.window, "kappa_min": args.kappa_min}
    _dump(_envelope("saturation", inputs, rep.to_dict()), args.report)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gromovdist", description="Distortion of polygonal space curves.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write an example curve")
    g.add_argument("kind", choices=generators.KINDS)
    g.add_argument("--phi", type=float, default=2.0 * math.pi / 3.0)
    g.add_argument("--n", type=int, help="vertex count (ngon, torus_knot)")
    g.add_argument("--radius", type=float, default=1.0)
    g.add_argument("--r", type=float, help="small radius (dragons_tooth: 1, torus_knot tube: 1)")
    g.add_argument("--R", type=float, help="large radius (dragons_tooth: 10, torus_knot: 2)")
    g.add_argument("--p", type=int, default=2)
    g.add_argument("--q", type=int, default=3)
    g.add_argument("--segment-len", type=float, default=1.0)
    g.add_argument("--arc-radius", type=float)
    g.add_argument("--arc-samples", type=int)
    g.add_argument("--eps-twist", type=float, default=0.01)
    g.add_argument("--edge", type=int, default=0)
    g.add_argument("--base", help="curve file to twist (default: unit square)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("compute", help="distortion report for a curve file")
    c.add_argument("--curve", required=True)
    c.add_argument("--density", type=float, default=distortion.DEFAULT_DENSITY)
    c.add_argument("--b", type=float)
    c.add_argument("--report", help="JSON output (default: stdout)")
    c.add_argument("--shadow-csv")
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", help="randomized property checks")
    v.add_argument("check", choices=("ds-bound", "measure-lemma"))
    v.add_argument("--trials", type=int, default=200)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--max-edges", type=int, default=8)
    v.add_argument("--report", help="JSON output (default: stdout)")
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("anneal", help="simulated annealing inside U_C")
    a.add_argument("--config", required=True)
    a.add_argument("--curve", required=True)
    a.add_argument("--out", required=True)
    a.add_argument("--trace", required=True)
    a.add_argument("--seed", type=int, help="override the config seed")
    a.set_defaults(func=cmd_anneal)

    s = sub.add_parser("saturation", help="drc saturation diagnostic")
    s.add_argument("--curve", required=True)
    s.add_argument("--eta", type=float, default=1e-2)
    s.add_argument("--window", type=float)
    s.add_argument("--kappa-min", type=float, default=1e-6)
    s.add_argument("--report", help="JSON output (default: stdout)")
    s.set_defaults(func=cmd_saturation)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        _apply_threads()
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (ValueError, generators.ConstructionError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
