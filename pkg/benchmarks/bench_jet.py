"""Compiled jet kernel against the pure-Python fallback.

    python3 benchmarks/bench_jet.py [--repeat N]

Times the tape evaluator on random expressions, chart jets on the built-in
surfaces, and one theorem sweep, once per kernel. Both kernels must agree bit
for bit; the script exits non-zero if they do not.
"""
import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from conftest import random_expression  # noqa: E402

from isocurve import _jetkernel_py, jet  # noqa: E402
from isocurve.corpus import normal_curve  # noqa: E402
from isocurve.expr import parse  # noqa: E402
from isocurve.jet import Jet  # noqa: E402
from isocurve.surface import BUILTIN_SURFACES, builtin_surface, chart_jet  # noqa: E402
from isocurve.theorems import deviation_report  # noqa: E402

try:
    from isocurve import _jetkernel
except ImportError:
    _jetkernel = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads():
    rng = random.Random(7)
    tapes = []
    for _ in range(300):
        ops, args, names = parse(random_expression(rng, 4), {"u", "v"}).tape()
        seeds = {"u": Jet.variable(rng.uniform(-1, 1), 0, 2, 3).coeffs,
                 "v": Jet.variable(rng.uniform(-1, 1), 1, 2, 3).coeffs}
        tapes.append((ops, args, [seeds[n] for n in names]))
    points = [(random.Random(i).uniform(-1, 1), random.Random(-i).uniform(-1, 1)) for i in range(200)]
    pair, curve = normal_curve("offset-circle")

    def tape_eval():
        for ops, args, sd in tapes:
            jet.kernel.eval_tape(ops, args, sd, 3)

    def chart_jets():
        for name in BUILTIN_SURFACES:
            surf = builtin_surface(name)
            for u, v in points:
                chart_jet(surf, u, v, 3)

    def sweep():
        deviation_report("3.5", pair, curve, 200)

    return tapes, {"tape evaluation (300 tapes, order 3)": tape_eval,
                   "chart jets (200 points x builtins)": chart_jets,
                   "normal-component sweep (200 samples)": sweep}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _jetkernel is None:
        print("compiled kernel not built; run `pip install --no-build-isolation -e .`")
        return 1
    tapes, cases = workloads()
    mismatches = sum(_jetkernel.eval_tape(o, a, s, 3) != _jetkernel_py.eval_tape(o, a, s, 3)
                     for o, a, s in tapes)
    print(f"{'workload':40s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for label, fn in cases.items():
        jet.use_kernel("python")
        tp = best_of(fn, args.repeat)
        jet.use_kernel("cython")
        tc = best_of(fn, args.repeat)
        print(f"{label:40s} {tp * 1e3:8.1f}ms {tc * 1e3:8.1f}ms {tp / tc:7.1f}x")
    print(f"bitwise mismatches between kernels: {mismatches} of {len(tapes)}")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
