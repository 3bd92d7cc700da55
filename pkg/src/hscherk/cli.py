"""Command-line front end: JSON config in, JSON/CSV artifacts out.

Every command reads a single JSON config (envelope, dimension, solver block)
plus per-command flags, and exits 0 on success, 2 on validation errors, 3 on
numerical failures.  All emitted files carry a format_version field.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .barriers import SolverOptions, build_sub, build_super, eval_barrier, \
    radial_barrier, save_manifest, uniform_bound_experiment
from .envelope import DecaySpec, HeightSpec, PsiEnvelope
from .errors import NumericalError, ValidationError
from .hgeom import BoundaryPoint, GeodesicWall, ray_point, wall_concentric_at
from .radial import FSpec, RadialProblem, solve_radial_dirichlet
from .shooting import choose_d0, ell, find_gamma0, solve_height
from .verify import VerificationPlan, report_json, run_plan

FORMAT_VERSION = 1

SOLVER_DEFAULTS = {
    "rk_tol": 1e-10,
    "eps_g": 1e-9,
    "d_max": 30.0,
    "bisect_tol": 1e-12,
    "margin": 0.01,
    "record_hmax": 0.005,
}


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object")
    return cfg


def _solver_options(cfg: dict) -> SolverOptions:
    block = dict(SOLVER_DEFAULTS)
    extra = cfg.get("solver", {})
    if not isinstance(extra, dict):
        raise ValidationError("solver block must be a JSON object")
    unknown = set(extra) - set(block)
    if unknown:
        raise ValidationError(f"unknown solver keys: {sorted(unknown)}")
    block.update(extra)
    return SolverOptions(**{k: float(v) for k, v in block.items()})


def _envelope(cfg: dict, offset: float | None = None) -> PsiEnvelope:
    n = int(cfg.get("n", 2))
    phi = DecaySpec.from_json(cfg.get("phi", {"family": "zero"}))
    h = HeightSpec.from_json(cfg.get("h", {"family": "zero"}))
    if offset is None:
        offset = float(cfg.get("offset", 0.0))
    return PsiEnvelope(phi=phi, h=h, offset=offset, n=n)


def _wall(cfg: dict) -> GeodesicWall:
    n = int(cfg.get("n", 2))
    spec = cfg.get("wall")
    if spec is None:
        normal = np.zeros(n)
        normal[0] = 1.0
        return GeodesicWall("hyperplane", normal=normal)
    return GeodesicWall.from_json(spec)


def _emit(obj: dict) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _parse_range(text: str) -> np.ndarray:
    try:
        a, b, step = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise ValidationError(f"range must be a:b:step, got {text!r}") from exc
    if step <= 0.0 or b < a:
        raise ValidationError("range needs step > 0 and b >= a")
    return np.arange(a, b + 0.5 * step, step)


def _cmd_gamma0(args) -> int:
    cfg = _load_config(args.config)
    env = _envelope(cfg)
    opts = _solver_options(cfg)
    d0 = float(cfg["d0"]) if "d0" in cfg else choose_d0(env, env.n, opts.margin)
    scfg = opts.config(env.n, d0)
    res = find_gamma0(env, scfg, args.h, record_witnesses=False)
    value, tail = ell(env, scfg, args.h, gamma0_result=res)
    _emit({
        "format_version": FORMAT_VERSION,
        "n": env.n,
        "d0": d0,
        "h": args.h,
        "gamma0": res.gamma0,
        "bracket_width": res.bracket_width,
        "gamma_lo": res.gamma_lo,
        "gamma_hi": res.gamma_hi,
        "delta_est": res.delta_est,
        "ell": value,
        "ell_tail": tail,
    })
    return 0


def _cmd_barrier(args, builder) -> int:
    cfg = _load_config(args.config)
    env = _envelope(cfg)
    opts = _solver_options(cfg)
    wall = _wall(cfg)
    barrier = builder(env.phi, env.h, wall, args.c, env.n, opts)
    barrier.dump_profile_csv(args.out)
    manifest = args.manifest or args.out + ".json"
    save_manifest(barrier, manifest)
    _emit(barrier.to_manifest())
    return 0


def _cmd_radial_barrier(args) -> int:
    cfg = _load_config(args.config)
    n = int(cfg.get("n", 2))
    phi = DecaySpec.from_json(cfg.get("phi", {"family": "zero"}))
    rb = radial_barrier(n, phi, args.M)
    if args.out:
        rb.dump_csv(args.out)
    _emit({
        "format_version": FORMAT_VERSION,
        "n": n,
        "M": rb.M,
        "sup_rho": rb.sup_rho,
        "tail": rb.tail,
        "samples": int(rb.r_samples.size),
    })
    return 0


def _cmd_radial_bvp(args) -> int:
    cfg = _load_config(args.config)
    n = int(cfg.get("n", 2))
    fspec = cfg.get("f")
    if fspec is None:
        raise ValidationError("radial-bvp needs an 'f' block in the config")
    problem = RadialProblem(n, args.R, args.c, FSpec.from_json(fspec))
    sol = solve_radial_dirichlet(problem)
    if args.out:
        sol.dump_csv(args.out)
    _emit(sol.to_json())
    return 0


def _cmd_uniform_bound(args) -> int:
    cfg = _load_config(args.config)
    env = _envelope(cfg)
    opts = _solver_options(cfg)
    offsets = _parse_range(args.offsets)
    bound, per_offset = uniform_bound_experiment(
        env.phi, env.h, env.n, args.c, offsets, args.d1, opts)
    _emit({
        "format_version": FORMAT_VERSION,
        "n": env.n,
        "c": args.c,
        "d1": args.d1,
        "M_observed": bound,
        "per_offset": {repr(k): v for k, v in sorted(per_offset.items())},
    })
    return 0


def _cmd_squeeze(args) -> int:
    cfg = _load_config(args.config)
    env = _envelope(cfg)
    opts = _solver_options(cfg)
    coords = np.array([float(v) for v in args.p.split(",")])
    norm = float(np.linalg.norm(coords))
    if norm == 0.0:
        raise ValidationError("boundary point must be nonzero")
    p = BoundaryPoint(coords / norm)
    wall = wall_concentric_at(p, args.t0)
    barrier = build_super(env.phi, env.h, wall, args.c + args.eps, env.n, opts)
    ts = np.arange(args.t0 + 1.0, args.t0 + 25.0 + 1e-9, 0.5)
    rows = [(float(t), float(eval_barrier(barrier, ray_point(p, float(t)))))
            for t in ts]
    if args.out:
        import csv as _csv
        with open(args.out, "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["t", "value"])
            for t, v in rows:
                writer.writerow([repr(t), repr(v)])
    _emit({
        "format_version": FORMAT_VERSION,
        "c": args.c,
        "eps": args.eps,
        "t0": args.t0,
        "final_t": rows[-1][0],
        "final_excess": rows[-1][1] - (args.c + args.eps),
    })
    return 0


def _cmd_verify(args) -> int:
    if args.plan == "default":
        plan = VerificationPlan()
    else:
        spec = _load_config(args.plan)
        plan = VerificationPlan(
            seed=int(spec.get("seed", 42)),
            trials=int(spec.get("trials", 25)),
            dims=tuple(spec.get("dims", (2, 3, 5))),
            tolerances=tuple((k, float(v))
                             for k, v in spec.get("tolerances", {}).items()))
    if args.seed is not None:
        plan = VerificationPlan(seed=args.seed, trials=plan.trials,
                                dims=plan.dims, tolerances=plan.tolerances)
    report = run_plan(plan)
    text = report_json(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text, end="")
    return 0 if report["overall_pass"] else 1


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    opts = _solver_options(cfg)
    offsets = _parse_range(args.offsets)
    cs = [float(v) for v in args.cs.split(",")]
    import csv as _csv
    with open(args.out, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["offset", "c", "d0", "gamma0", "h_c", "ell", "tail"])
        for delta in offsets:
            env = _envelope(cfg, offset=float(delta))
            d0 = choose_d0(env, env.n, opts.margin)
            scfg = opts.config(env.n, d0)
            for c in cs:
                h_c, gamma0 = solve_height(env, scfg, c)
                res = find_gamma0(env, scfg, h_c, record_witnesses=False)
                value, tail = ell(env, scfg, h_c, gamma0_result=res)
                writer.writerow([repr(float(delta)), repr(c), repr(d0),
                                 repr(gamma0), repr(h_c), repr(value),
                                 repr(tail)])
    _emit({
        "format_version": FORMAT_VERSION,
        "rows": int(len(offsets) * len(cs)),
        "out": args.out,
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hscherk",
        description="Scherk-type barriers for prescribed mean curvature "
                    "graphs in hyperbolic space")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma0", help="critical shooting slope")
    p.add_argument("--config", required=True)
    p.add_argument("--h", type=float, default=0.0)
    p.set_defaults(fn=_cmd_gamma0)

    for name, builder in (("scherk", build_super), ("sub", build_sub)):
        p = sub.add_parser(name, help=f"build a {name} barrier profile")
        p.add_argument("--config", required=True)
        p.add_argument("--c", type=float, required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--manifest")
        p.set_defaults(fn=lambda a, b=builder: _cmd_barrier(a, b))

    p = sub.add_parser("radial-barrier", help="closed-form radial barrier")
    p.add_argument("--config", required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_radial_barrier)

    p = sub.add_parser("radial-bvp", help="radial Dirichlet problem")
    p.add_argument("--config", required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_radial_bvp)

    p = sub.add_parser("uniform-bound", help="per-offset sup experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--offsets", required=True, metavar="a:b:step")
    p.add_argument("--d1", type=float, default=4.0)
    p.set_defaults(fn=_cmd_uniform_bound)

    p = sub.add_parser("squeeze", help="barrier trace along a boundary ray")
    p.add_argument("--config", required=True)
    p.add_argument("--p", required=True, metavar="px,py,...")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_squeeze)

    p = sub.add_parser("verify", help="run the conformance plan")
    p.add_argument("--plan", default="default")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("sweep", help="grid runner emitting long-form CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--offsets", required=True, metavar="a:b:step")
    p.add_argument("--cs", required=True, metavar="c1,c2,...")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
