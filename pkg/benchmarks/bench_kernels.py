"""Compare the numba and pure-numpy backends.

Each backend runs in its own interpreter because the choice is made at import
time from REGEN_EA_DISABLE_NUMBA.

    python3 benchmarks/bench_kernels.py [--rows 100] [--repeat 200]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from regen_ea import EngineConfig, backend, get_problem, grow_population, run
from regen_ea.epigenome import NO_TAG

rows, repeat, density = int(sys.argv[1]), int(sys.argv[2]), float(sys.argv[3])
rng = np.random.default_rng(0)
geno = rng.integers(0, 2, (rows, 360)).astype(np.uint8)
epi = np.where(rng.random((rows, 360)) < density, rng.integers(0, 256, (rows, 360)), NO_TAG).astype(np.int16)
grow_population(geno, epi)  # warm-up / JIT compile
t0 = time.perf_counter()
for _ in range(repeat):
    out = grow_population(geno, epi)
grow_s = (time.perf_counter() - t0) / repeat

cfg = EngineConfig(iterations=400, seed=1)
t0 = time.perf_counter()
trace = run(cfg, get_problem("deceptive3"))
run_s = time.perf_counter() - t0
print(json.dumps({"backend": backend(), "grow_ms": grow_s * 1e3, "run_s": run_s,
                  "checksum": int(out.sum()), "final": trace.final_fitness}))
"""


def measure(disable, rows, repeat, density):
    env = dict(os.environ)
    env.pop("REGEN_EA_DISABLE_NUMBA", None)
    if disable:
        env["REGEN_EA_DISABLE_NUMBA"] = "1"
    done = subprocess.run([sys.executable, "-c", WORKER, str(rows), str(repeat), str(density)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(done.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--rows", type=int, default=100)
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()
    print(f"{'density':>8} {'backend':>8} {'grow ms':>9} {'400-it run s':>13}")
    for density in (0.01, 0.05, 0.2):
        results = [measure(d, args.rows, args.repeat, density) for d in (False, True)]
        for r in results:
            print(f"{density:>8} {r['backend']:>8} {r['grow_ms']:>9.3f} {r['run_s']:>13.2f}")
        if results[0]["checksum"] != results[1]["checksum"] or results[0]["final"] != results[1]["final"]:
            sys.exit("backends disagree")
        print(f"{'':>8} speed-up on grow: {results[1]['grow_ms'] / results[0]['grow_ms']:.1f}x")


if __name__ == "__main__":
    main()
