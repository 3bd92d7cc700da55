"""Timing comparison of the jitted kernels against the pure-numpy fallback.

The backend is chosen at import time from HSCHERK_DISABLE_NUMBA, so this
script re-executes itself in a subprocess for each backend and times a
representative workload: a critical-slope search plus a full wall profile
for a sech envelope in n = 2 and n = 3.

Usage: python benchmarks/compare_backends.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workload():
    from hscherk.envelope import DecaySpec, HeightSpec, PsiEnvelope
    from hscherk.shooting import ShootingConfig, find_gamma0, full_profile

    results = []
    for n in (2, 3):
        env = PsiEnvelope(phi=DecaySpec("sech", a=1.0, b=1.0),
                          h=HeightSpec("sech", c0=1.0, b=1.0), n=n)
        cfg = ShootingConfig(n=n, d0=2.0, rk_tol=1e-9, eps_g=1e-7,
                             bisect_tol=1e-9, d_max=20.0, record_hmax=0.02)
        res = find_gamma0(env, cfg, 0.0)
        prof = full_profile(env, cfg, 0.0, res)
        results.append((res.gamma0, float(prof.w[0])))
    return results


def run_child(repeat: int) -> None:
    # warm up once so jit compilation does not pollute the timings
    workload()
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        values = workload()
        times.append(time.perf_counter() - start)
    print(json.dumps({"best": min(times), "mean": sum(times) / len(times),
                      "values": values}))


def run_parent(repeat: int) -> None:
    reports = {}
    for label, disable in (("numba", ""), ("numpy", "1")):
        env = dict(os.environ, HSCHERK_DISABLE_NUMBA=disable)
        if not disable:
            env.pop("HSCHERK_DISABLE_NUMBA", None)
        out = subprocess.run(
            [sys.executable, __file__, "--child", "--repeat", str(repeat)],
            env=env, capture_output=True, text=True, check=True)
        reports[label] = json.loads(out.stdout.strip().splitlines()[-1])
    if reports["numba"]["values"] != reports["numpy"]["values"]:
        print("WARNING: backends disagree on the workload values")
    for label, rep in reports.items():
        print(f"{label:>6}: best {rep['best'] * 1e3:8.1f} ms   "
              f"mean {rep['mean'] * 1e3:8.1f} ms")
    speedup = reports["numpy"]["best"] / reports["numba"]["best"]
    print(f"speedup (numba over numpy): {speedup:.1f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--child", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.child:
        run_child(args.repeat)
    else:
        run_parent(args.repeat)


if __name__ == "__main__":
    main()
