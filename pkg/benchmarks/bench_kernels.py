"""Compare the numba and NumPy backends on the bundled datasets.

    python benchmarks/bench_kernels.py [--repeat 3] [--datasets vehicle segment]

Each kernel is run once untimed per backend (JIT warm-up), then timed as the
best of ``--repeat`` runs. Results of the two backends are checked for
agreement before timings are printed.
"""

import argparse
import time

import numpy as np

from lamptune import _accel, kernels
from lamptune.dataset import bundled_path, load_csv, minmax_scale
from lamptune.lamp import (
    EPS_CONTROL, EPS_WEIGHT, default_control_count, seed_control_projection,
    select_control_points,
)


def _best_of(fn, repeat):
    fn()
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _cases(data):
    scaled = minmax_scale(data, 1.0)
    x = scaled.features
    codes, n_classes = data.label_codes()
    idx = select_control_points(data, default_control_count(data.n, n_classes), seed=0)
    anchors = seed_control_projection(scaled, idx, extent=1.0).anchors
    dist = kernels.pairwise_distances(x)
    return {
        "pairwise_distances": lambda: kernels.pairwise_distances(x),
        "knn_indices(k=7)": lambda: kernels.knn_indices(dist, 7),
        "silhouette_terms": lambda: kernels.silhouette_terms(dist, codes, n_classes),
        "lamp_map": lambda: kernels.lamp_map(x, x[idx], anchors, EPS_WEIGHT, EPS_CONTROL)[0],
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(p, q) for p, q in zip(a, b))
    return np.allclose(a, b, rtol=0, atol=1e-12)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--datasets", nargs="+", default=["vehicle", "segment"])
    args = ap.parse_args(argv)

    backends = [b for b in _accel.BACKENDS if b == "numpy" or _accel.HAS_NUMBA]
    print(f"{'dataset':<10}{'kernel':<22}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name in args.datasets:
        data = load_csv(bundled_path(name), name=name)
        results = {}
        for backend in backends:
            with _accel.use_backend(backend):
                for kernel, fn in _cases(data).items():
                    results[(backend, kernel)] = _best_of(fn, args.repeat)
        for kernel in ("pairwise_distances", "knn_indices(k=7)", "silhouette_terms", "lamp_map"):
            times = [results[(b, kernel)][0] for b in backends]
            outs = [results[(b, kernel)][1] for b in backends]
            if not all(_same(outs[0], o) for o in outs[1:]):
                raise SystemExit(f"backends disagree on {kernel} for {name}")
            speed = f"{times[-1] / times[0]:>9.1f}x" if len(times) > 1 else ""
            print(f"{name:<10}{kernel:<22}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
