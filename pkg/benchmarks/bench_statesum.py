"""Time the colored Jones state sum with the numba and numpy backends.

Each backend runs in its own interpreter because the backend is chosen at
import time from QHOLONOMIC_DISABLE_NUMBA.  The numba figure excludes the
one-off compilation, which is reported separately.

    python benchmarks/bench_statesum.py [--braid trefoil|figure8] [--nmax 10] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

BRAIDS = {"trefoil": (2, (1, 1, 1)), "figure8": (3, (1, -2, 1, -2))}

WORKER = r"""
import json, sys, time
from qholonomic.oracle import BraidWord, backend, colored_jones
from qholonomic.oracle.jones import r_matrix

strands, word, nmax, repeat = json.loads(sys.argv[1])
b = BraidWord(strands, tuple(word))
t0 = time.perf_counter()
colored_jones(b, 2)
warm = time.perf_counter() - t0
best, values = float("inf"), None
for _ in range(repeat):
    r_matrix.cache_clear()
    t0 = time.perf_counter()
    values = [str(colored_jones(b, n)) for n in range(1, nmax + 1)]
    best = min(best, time.perf_counter() - t0)
print(json.dumps({"backend": backend(), "warmup": warm, "best": best, "values": values}))
"""


def run(disable_numba: bool, payload: str) -> dict:
    env = dict(os.environ)
    env.pop("QHOLONOMIC_DISABLE_NUMBA", None)
    if disable_numba:
        env["QHOLONOMIC_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", WORKER, payload], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--braid", choices=sorted(BRAIDS), default="trefoil")
    ap.add_argument("--nmax", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    strands, word = BRAIDS[args.braid]
    payload = json.dumps([strands, list(word), args.nmax, args.repeat])
    fast, slow = run(False, payload), run(True, payload)
    if fast["values"] != slow["values"]:
        sys.exit("backends disagree")
    print(f"{args.braid}, J_1..J_{args.nmax}, best of {args.repeat}")
    for r in (fast, slow):
        print(f"  {r['backend']:6s} {r['best']:8.3f} s   (first call {r['warmup']:.3f} s)")
    print(f"  speedup {slow['best'] / fast['best']:.2f}x, outputs identical")


if __name__ == "__main__":
    main()
