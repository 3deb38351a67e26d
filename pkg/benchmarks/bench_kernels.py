"""Compare the numba and pure-numpy kernel backends.

Each backend runs in its own interpreter because the choice is fixed at import
time by ORBITCERT_DISABLE_NUMBA.  Numba timings exclude compilation (one warm-up
call per kernel).

    python3 benchmarks/bench_kernels.py [--repeat 200]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from orbitcert import kernels, models
from orbitcert import congruence as cg
from orbitcert import subalgebra as sa
from orbitcert.structure import cached_structure

repeat = int(sys.argv[1])
st = cached_structure("sl", 4)
m = st.model
sub = sa.build_s_Phi(st.dec, st.ps, (1,))
chart = cg.make_chart(m, sub, st.s)
rng = np.random.default_rng(0)
base = models.origin(m).column()
X = models.random_algebra_element(m, rng, "g")
targets = np.array([models.random_point(m, rng).column() for _ in range(64)])
x0 = np.zeros(sub.dim)
scale = m.metric_scale
p, q = targets[0], targets[1]

cases = {
    "expm": lambda: kernels.expm(X),
    "distance": lambda: kernels.distance(m.kind, p, q, scale),
    "nelder_mead": lambda: kernels.nelder_mead(x0, 0.25, m.kind, chart.mats, base, p, scale, 1e-11, 1e-10, 1e-14, 400),
    "batch_guess_distances": lambda: kernels.batch_guess_distances(m.kind, targets, base, scale, *chart.guess_args()),
}
out = {}
for name, fn in cases.items():
    fn()
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    out[name] = (time.perf_counter() - t0) / repeat
print(json.dumps(out))
"""


def run_backend(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("ORBITCERT_DISABLE_NUMBA", None)
    if disable:
        env["ORBITCERT_DISABLE_NUMBA"] = "1"
    t0 = time.perf_counter()
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, check=True, capture_output=True, text=True)
    data = json.loads(res.stdout.strip().splitlines()[-1])
    data["_wall"] = time.perf_counter() - t0
    return data


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    print(f"{'kernel':<24}{'numba (us)':>14}{'numpy (us)':>14}{'speedup':>10}")
    for name in (k for k in fast if not k.startswith("_")):
        a, b = fast[name] * 1e6, slow[name] * 1e6
        print(f"{name:<24}{a:>14.1f}{b:>14.1f}{b / a:>9.1f}x")
    print(f"{'process wall (s)':<24}{fast['_wall']:>14.2f}{slow['_wall']:>14.2f}")


if __name__ == "__main__":
    main()
