"""Hot numeric kernels, compiled with numba when available.

Two interchangeable implementations of every kernel live here:

* ``NUMBA`` - explicit loops under ``@njit``;
* ``NUMPY`` - vectorized numpy, used when numba is missing or when the
  environment variable ``TRESILLO_DISABLE_NUMBA`` is set to 1/true/yes/on.

The module-level names (``scaled_cosines``, ``objective_ratio``,
``nelder_mead``, ``resample_means``) are bound to the selected backend at
import time. Both namespaces stay reachable so tests and the benchmark can
compare them directly.

Degenerate inputs are signalled in-band so the optimizer can step around
them: ``scaled_cosines`` yields NaN for a row whose scaled vector is zero,
``objective_ratio`` returns +inf.
"""

from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_TRUTHY = {"1", "true", "yes", "on"}
NUMBA_DISABLED = os.environ.get("TRESILLO_DISABLE_NUMBA", "").strip().lower() in _TRUTHY
NUMBA_AVAILABLE = numba is not None


# --------------------------------------------------------------------------
# numpy backend
# --------------------------------------------------------------------------

def _np_scaled_cosines(songs, ref, theta):
    a = songs * theta
    b = ref * theta
    na = np.sqrt((a * a).sum(axis=1))
    nb = math.sqrt(float(b @ b))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (a @ b) / (na * nb)
    out[(na == 0.0) | (nb == 0.0)] = np.nan
    return np.clip(out, -1.0, 1.0)


def _np_objective_ratio(theta, ref, pos, neg):
    sp = _np_scaled_cosines(pos, ref, theta)
    sn = _np_scaled_cosines(neg, ref, theta)
    if np.isnan(sp).any() or np.isnan(sn).any():
        return np.inf
    mp = sp.mean()
    if mp == 0.0:
        return np.inf
    return float(sn.mean() / mp)


def _np_resample_means(values, idx):
    return values[idx].mean(axis=1)


# --------------------------------------------------------------------------
# Nelder-Mead, written once and specialised per backend
# --------------------------------------------------------------------------

def _build_nelder_mead(objective):
    """Return a Nelder-Mead minimiser over ``objective(x, ref, pos, neg)``.

    Standard coefficients (reflect 1, expand 2, contract 1/2, shrink 1/2),
    axis-aligned initial simplex ``x0 + step * e_i``. Stops once the spread of
    objective values across the simplex drops below ``tol`` or after
    ``max_iter`` iterations. Returns ``(x_best, f_best, iterations, history)``
    where ``history[k]`` is the best value after ``k`` iterations.
    """

    def nelder_mead(x0, step, ref, pos, neg, tol, max_iter):
        n = x0.shape[0]
        sim = np.empty((n + 1, n))
        fs = np.empty(n + 1)
        for i in range(n + 1):
            for j in range(n):
                sim[i, j] = x0[j]
            if i > 0:
                sim[i, i - 1] += step
            fs[i] = objective(sim[i], ref, pos, neg)
        history = np.empty(max_iter + 1)
        xbar = np.empty(n)
        it = 0
        while True:
            order = np.argsort(fs, kind="mergesort")
            sim = sim[order]
            fs = fs[order]
            history[it] = fs[0]
            if it >= max_iter:
                break
            if not fs[0] < np.inf:
                break
            if fs[n] - fs[0] < tol:
                break
            it += 1

            for j in range(n):
                acc = 0.0
                for i in range(n):
                    acc += sim[i, j]
                xbar[j] = acc / n
            worst = sim[n].copy()
            xr = 2.0 * xbar - worst
            fr = objective(xr, ref, pos, neg)
            if fr < fs[0]:
                xe = 3.0 * xbar - 2.0 * worst
                fe = objective(xe, ref, pos, neg)
                if fe < fr:
                    sim[n] = xe
                    fs[n] = fe
                else:
                    sim[n] = xr
                    fs[n] = fr
                continue
            if fr < fs[n - 1]:
                sim[n] = xr
                fs[n] = fr
                continue
            if fr < fs[n]:
                xc = 0.5 * (xbar + xr)
                fc = objective(xc, ref, pos, neg)
                if fc <= fr:
                    sim[n] = xc
                    fs[n] = fc
                    continue
            else:
                xc = 0.5 * (xbar + worst)
                fc = objective(xc, ref, pos, neg)
                if fc < fs[n]:
                    sim[n] = xc
                    fs[n] = fc
                    continue
            for i in range(1, n + 1):
                sim[i] = 0.5 * (sim[0] + sim[i])
                fs[i] = objective(sim[i], ref, pos, neg)
        return sim[0].copy(), fs[0], it, history[:it + 1].copy()

    return nelder_mead


NUMPY = SimpleNamespace(
    name="numpy",
    scaled_cosines=_np_scaled_cosines,
    objective_ratio=_np_objective_ratio,
    nelder_mead=_build_nelder_mead(_np_objective_ratio),
    resample_means=_np_resample_means,
)


# --------------------------------------------------------------------------
# numba backend
# --------------------------------------------------------------------------

if NUMBA_AVAILABLE:
    njit = numba.njit

    @njit(cache=True)
    def _nb_cosine_row(row, ref, theta, nb):
        dot = 0.0
        na = 0.0
        for j in range(row.shape[0]):
            a = row[j] * theta[j]
            dot += a * ref[j] * theta[j]
            na += a * a
        if na == 0.0 or nb == 0.0:
            return np.nan
        c = dot / (math.sqrt(na) * nb)
        return min(max(c, -1.0), 1.0)

    @njit(cache=True)
    def _nb_ref_norm(ref, theta):
        s = 0.0
        for j in range(ref.shape[0]):
            b = ref[j] * theta[j]
            s += b * b
        return math.sqrt(s)

    @njit(cache=True)
    def _nb_scaled_cosines(songs, ref, theta):
        nb = _nb_ref_norm(ref, theta)
        out = np.empty(songs.shape[0])
        for i in range(songs.shape[0]):
            out[i] = _nb_cosine_row(songs[i], ref, theta, nb)
        return out

    @njit(cache=True)
    def _nb_objective_ratio(theta, ref, pos, neg):
        nb = _nb_ref_norm(ref, theta)
        if nb == 0.0:
            return np.inf
        sp = 0.0
        for i in range(pos.shape[0]):
            c = _nb_cosine_row(pos[i], ref, theta, nb)
            if math.isnan(c):
                return np.inf
            sp += c
        sn = 0.0
        for i in range(neg.shape[0]):
            c = _nb_cosine_row(neg[i], ref, theta, nb)
            if math.isnan(c):
                return np.inf
            sn += c
        mp = sp / pos.shape[0]
        if mp == 0.0:
            return np.inf
        return (sn / neg.shape[0]) / mp

    @njit(cache=True)
    def _nb_resample_means(values, idx):
        draws, n = idx.shape
        out = np.empty(draws)
        for d in range(draws):
            s = 0.0
            for k in range(n):
                s += values[idx[d, k]]
            out[d] = s / n
        return out

    NUMBA = SimpleNamespace(
        name="numba",
        scaled_cosines=_nb_scaled_cosines,
        objective_ratio=_nb_objective_ratio,
        # a closure cannot be cached on disk, so this one compiles once per process
        nelder_mead=njit(_build_nelder_mead(_nb_objective_ratio)),
        resample_means=_nb_resample_means,
    )
else:  # pragma: no cover
    NUMBA = None


ACTIVE = NUMBA if (NUMBA is not None and not NUMBA_DISABLED) else NUMPY
BACKEND = ACTIVE.name

scaled_cosines = ACTIVE.scaled_cosines
objective_ratio = ACTIVE.objective_ratio
nelder_mead = ACTIVE.nelder_mead
resample_means = ACTIVE.resample_means
