"""Axis solution by both routes, with a tolerance and start-radius study.

    python3 scripts/maximal_domain.py [--out DIR]
"""

import argparse
import time
from pathlib import Path

from expnewton import io as xio
from expnewton.radial import SolveConfig, solve_from_axis
from expnewton.resistance import resistance_radial


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=None, help="write profile CSVs here")
    args = ap.parse_args()

    rows = []
    for method in ("parametric", "direct"):
        for rel in (1e-8, 1e-10, 1e-12):
            for eps0 in (1e-3, 5e-4):
                t0 = time.perf_counter()
                prof = solve_from_axis(SolveConfig(method=method, rel_tol=rel, abs_tol=rel * 1e-2, eps0=eps0))
                dt = time.perf_counter() - t0
                t = prof.terminal
                rows.append((method, rel, eps0, t.r, t.u, t.p, prof.diagnostics["accepted_steps"], dt))
                if args.out and rel == 1e-10 and eps0 == 1e-3:
                    xio.atomic_write(args.out / f"axis_{method}.csv", xio.profile_csv(prof))
    print(f"{'method':>10} {'rel_tol':>8} {'eps0':>7} {'r_M':>14} {'u(r_M)':>14} {'slope':>14} {'steps':>6} {'sec':>6}")
    for m, rel, e, r, u, p, n, dt in rows:
        print(f"{m:>10} {rel:8.0e} {e:7.0e} {r:14.10f} {u:14.10f} {p:14.10f} {n:6d} {dt:6.3f}")
    prof = solve_from_axis()
    print(f"\nresistance of the extremal graph over [0, r_M]: {resistance_radial(prof).value:.12f}")


if __name__ == "__main__":
    main()
