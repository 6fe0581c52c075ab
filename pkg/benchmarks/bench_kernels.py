"""Time the numba kernels against their pure-numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--songs 200]

Both backends are imported side by side from ``tresillo._kernels``; the
``TRESILLO_DISABLE_NUMBA`` flag only picks which one the package uses.
The first numba call of each kernel is timed separately as compile time.
"""

import argparse
import time

import numpy as np

from tresillo import _kernels
from tresillo.fit import FitConfig, ValidationSet, fit_theta
from tresillo.rhythm import tresillo_template
from tresillo.synthetic import validation_corpus
from tresillo.onsets import build_onset_table
from tresillo.rhythm import rhythm_vector
from tresillo.smf import parse_smf


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def synthetic_set():
    corpus = validation_corpus(seed=42)

    def vec(name, data):
        return name, rhythm_vector(build_onset_table(parse_smf(data), name))

    return ValidationSet([vec(*s) for s in corpus["tresillo"]],
                         [vec(*s) for s in corpus["non_tresillo"]])


def cases(args):
    rng = np.random.default_rng(0)
    ref = tresillo_template()
    songs = rng.random((args.songs, 16))
    pos, neg = songs[: args.songs // 2], songs[args.songs // 2:]
    theta = rng.normal(size=16)
    values = rng.random(args.songs)
    idx = rng.integers(0, args.songs, size=(1000, args.songs))
    x0 = np.ones(16)
    return {
        "scaled_cosines": lambda k: k.scaled_cosines(songs, ref, theta),
        "objective_ratio": lambda k: k.objective_ratio(theta, ref, pos, neg),
        "resample_means (1000 draws)": lambda k: k.resample_means(values, idx),
        "nelder_mead (2000 iters)": lambda k: k.nelder_mead(x0, 0.25, ref, pos, neg, 0.0, 2000),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--songs", type=int, default=200)
    args = parser.parse_args()

    if _kernels.NUMBA is None:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<30} {'numpy s':>10} {'numba s':>10} {'compile s':>10} {'speedup':>8}")
    for name, call in cases(args).items():
        t0 = time.perf_counter()
        call(_kernels.NUMBA)
        compile_s = time.perf_counter() - t0
        t_np = best_of(lambda: call(_kernels.NUMPY), args.repeat)
        t_nb = best_of(lambda: call(_kernels.NUMBA), args.repeat)
        print(f"{name:<30} {t_np:10.5f} {t_nb:10.5f} {compile_s:10.3f} {t_np / t_nb:7.1f}x")

    # the full fit on the synthetic validation set, as the CLI runs it
    vset = synthetic_set()
    ref = tresillo_template()
    config = FitConfig(seed=42)
    for backend in (_kernels.NUMPY, _kernels.NUMBA):
        saved = _kernels.nelder_mead, _kernels.objective_ratio
        _kernels.nelder_mead, _kernels.objective_ratio = backend.nelder_mead, backend.objective_ratio
        try:
            t = best_of(lambda: fit_theta(ref, vset, config), 1)
            res = fit_theta(ref, vset, config)
        finally:
            _kernels.nelder_mead, _kernels.objective_ratio = saved
        print(f"fit_theta [{backend.name}]: {t:.3f} s, objective {res.objective:.6g}")


if __name__ == "__main__":
    main()
