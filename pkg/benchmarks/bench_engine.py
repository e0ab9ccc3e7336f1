"""Compare the compiled event loop with the pure-Python fallback.

    python benchmarks/bench_engine.py [--seeds 1..10] [--repeat 3] [--scenario scenario2.cfg]

Both engines must produce identical reports; the script exits non-zero if they do not.
"""

import argparse
import sys
import time

from agsim.scenario_file import load, parse_seeds
from agsim.simcore import available_engines, run_detailed


def time_engine(scenario, seeds, engine, repeat):
    best = float("inf")
    reports = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        reports = [run_detailed(scenario, s, engine=engine).report.to_json() for s in seeds]
        best = min(best, time.perf_counter() - t0)
    return best, reports


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default="scenario2.cfg")
    ap.add_argument("--seeds", default="1..10")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    sf = load(args.scenario)
    seeds = parse_seeds(args.seeds)
    engines = available_engines()
    if "cython" not in engines:
        print("compiled engine not built; only the Python fallback is available", file=sys.stderr)

    results = {}
    for eng in engines:
        results[eng] = time_engine(sf.scenario, seeds, eng, args.repeat)

    print(f"{sf.name}: {len(seeds)} runs, best of {args.repeat}")
    print(f"{'engine':<8} {'total s':>9} {'ms/run':>9}")
    for eng, (t, _) in results.items():
        print(f"{eng:<8} {t:9.3f} {1e3 * t / len(seeds):9.2f}")
    if len(results) == 2:
        (tc, rc), (tp, rp) = results["cython"], results["python"]
        print(f"speedup  {tp / tc:.1f}x")
        if rc != rp:
            print("MISMATCH: engines disagree", file=sys.stderr)
            return 1
        print("reports identical")
    return 0


if __name__ == "__main__":
    sys.exit(main())
