"""Phase-portrait data: orbits from (1, pi/2 - lambda), the axis orbit and loops around P1.

    python3 scripts/phase_portrait_data.py --out portrait/ [--jobs 4]

Writes one ``tau,x,theta,y`` CSV per orbit plus ``summary.csv`` with the class
of each orbit.  Nothing is plotted.
"""

import argparse
import math
from pathlib import Path

from expnewton import io as xio
from expnewton.cli import SWEEP_HEADER, sweep
from expnewton.model import M0, series_eval
from expnewton.phase import OrbitConfig, PhaseState, integrate_orbit

LAMBDAS = (0.1, 0.5, 0.8)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("portrait"))
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    field = OrbitConfig(orientation="field")
    starts = {f"lambda_{lam}": PhaseState(1.0, math.pi / 2 - lam) for lam in LAMBDAS}
    for d in (0.05, 0.1, 0.2):
        starts[f"loop_{d}"] = PhaseState(M0 + d, math.pi / 6)
    s = series_eval(1e-3)
    axis = integrate_orbit(PhaseState(s.r, math.atan(s.p), s.u), axis=True)
    xio.atomic_write(args.out / "axis.csv", xio.orbit_csv(axis))
    for name, st in starts.items():
        xio.atomic_write(args.out / f"{name}.csv", xio.orbit_csv(integrate_orbit(st, field)))
    rows = sweep(list(starts.values()), field, jobs=args.jobs)
    xio.atomic_write(args.out / "summary.csv", xio.to_csv(("name",) + SWEEP_HEADER,
                                                          [[n] + r for n, r in zip(starts, rows)]))
    for name, row in zip(starts, rows):
        print(f"{name:>12}: {row[3]:<18} termination={row[4]:<11} return_distance={row[10]}")
    print(f"{'axis':>12}: ends at x={axis.terminal.x:.6f}, y={axis.terminal.y:.6f}")


if __name__ == "__main__":
    main()
