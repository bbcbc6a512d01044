"""Timing comparison: compiled kernels versus the plain-Python fallback.

Run with no arguments to benchmark both modes (the script re-executes itself
in a subprocess with DIQKD_DISABLE_NUMBA=1 for the fallback column).  Use
--single to time only the mode of the current process.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _time(fn, min_seconds=0.2, max_reps=200000):
    fn()  # warm-up; triggers compilation on the accelerated path
    reps = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        dt = time.perf_counter() - t0
        if dt >= min_seconds or reps >= max_reps:
            return dt / reps
        scale = min_seconds / max(dt, 1e-9)
        reps = min(max_reps, max(reps * 2, int(reps * scale) + 1))


def run_workload():
    import diqkd._kernels as k
    from diqkd import OptimizerOptions, ProtocolSpec, optimize_rate, oracle_max_eve_info
    from diqkd._accel import NUMBA_ENABLED

    eta4 = np.full(4, 0.9)
    pdc4 = np.zeros(4)
    a = (1.9634954084936207, 0.0, 0.7853981633974483)
    b = (1.9634954084936207, -1.9634954084936207)

    out = {"mode": "compiled" if NUMBA_ENABLED else "fallback"}
    out["rate_spdc_n1"] = _time(
        lambda: k.rate_spdc_k(1, 0.4, 0.4, *a, *b, 0.0, eta4, pdc4, 1))
    out["rate_spdc_n4"] = _time(
        lambda: k.rate_spdc_k(1, 0.2, 0.2, *a, *b, 0.0, eta4, pdc4, 4))
    out["rate_qubit"] = _time(
        lambda: k.rate_qubit_k(2, 0.7853981633974483, *a, *b, 0.1, 0.9))
    out["eve_bound"] = _time(lambda: k.ip_bound_k(2.5, 0.05))
    out["oracle_scan"] = _time(
        lambda: oracle_max_eve_info(2.5, 0.05, grid=(16, 16, 16, 5)),
        min_seconds=0.5, max_reps=50)

    spec = ProtocolSpec("ma", source="qubit")
    opts = OptimizerOptions(seed=0, restarts=4)
    out["optimize_qubit"] = _time(
        lambda: optimize_rate(spec, 0.95, opts), min_seconds=0.5, max_reps=20)
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--single", action="store_true",
                        help="benchmark only the current process mode")
    parser.add_argument("--json", action="store_true",
                        help="emit machine-readable output")
    args = parser.parse_args(argv)

    if args.single:
        out = run_workload()
        print(json.dumps(out) if args.json else _table([out]))
        return 0

    rows = []
    for disable in ("0", "1"):
        env = dict(os.environ, DIQKD_DISABLE_NUMBA=disable)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--single", "--json"],
            env=env, capture_output=True, text=True, check=True)
        rows.append(json.loads(proc.stdout.strip().splitlines()[-1]))
    print(_table(rows))
    return 0


def _table(rows):
    names = [key for key in rows[0] if key != "mode"]
    width = max(len(n) for n in names) + 2
    header = "benchmark".ljust(width) + "".join(f"{r['mode']:>14}" for r in rows)
    if len(rows) == 2:
        header += f"{'speedup':>10}"
    lines = [header, "-" * len(header)]
    for name in names:
        cells = "".join(f"{r[name] * 1e6:>12.1f}us" for r in rows)
        if len(rows) == 2:
            cells += f"{rows[1][name] / rows[0][name]:>9.0f}x"
        lines.append(name.ljust(width) + cells)
    return "\n".join(lines)


if __name__ == "__main__":
    sys.exit(main())
