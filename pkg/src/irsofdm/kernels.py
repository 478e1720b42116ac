"""Coordinate-descent sweep kernels, jitted and pure-numpy twins.

The hot loop of reflect beamforming visits the elements in ascending order
and, for each, rescans the whole phase codebook against the current residual
field.  Cost per sweep is N * S * K log-rate evaluations, which dominates the
Monte Carlo experiments, so the default backend is a numba njit kernel.  Set
IRSOFDM_BACKEND=numpy to force the vectorized numpy fallback (used
automatically when numba is not importable); both twins implement the same
update order and tie-breaking (lowest codebook index wins).
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

ENV_VAR = "IRSOFDM_BACKEND"

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False


class SweepResult(NamedTuple):
    indices: np.ndarray       # final codebook index per element
    update_rates: np.ndarray  # objective after each single-element update
    sweep_rates: np.ndarray   # freshly recomputed objective after each sweep
    converged: bool           # a full sweep changed no index


def available_backends():
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def default_backend():
    """Backend chosen by the IRSOFDM_BACKEND environment flag.

    "numba" and "numpy" force a backend; unset or "auto" picks numba when it
    imports, numpy otherwise.
    """
    choice = os.environ.get(ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{ENV_VAR} must be auto, numba or numpy, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    if choice == "numba" and not HAVE_NUMBA:
        raise RuntimeError("IRSOFDM_BACKEND=numba but numba is not importable")
    return "numba" if HAVE_NUMBA else "numpy"


def _cd_sweeps_numpy(v, h_d, phi_table, p, sigma2, indices, max_sweeps):
    n_el = v.shape[0]
    update_rates = []
    sweep_rates = []
    converged = False
    base = h_d + (phi_table[indices] * v).sum(axis=0)
    for _ in range(max_sweeps):
        changed = False
        for n in range(n_el):
            partial = base - v[n] * phi_table[indices[n]]
            cand = partial[None, :] + v[n][None, :] * phi_table
            power = cand.real ** 2 + cand.imag ** 2
            rates = np.mean(np.log2(1.0 + p * power / sigma2), axis=1)
            s_best = int(np.argmax(rates))  # first max, lowest index on ties
            if s_best != indices[n]:
                changed = True
                indices[n] = s_best
            base = partial + v[n] * phi_table[s_best]
            update_rates.append(float(rates[s_best]))
        # rebuild from scratch so incremental updates cannot drift
        base = h_d + (phi_table[indices] * v).sum(axis=0)
        power = base.real ** 2 + base.imag ** 2
        sweep_rates.append(float(np.mean(np.log2(1.0 + p * power / sigma2))))
        if not changed:
            converged = True
            break
    return indices, np.asarray(update_rates), np.asarray(sweep_rates), converged


if HAVE_NUMBA:

    @njit(cache=True)
    def _rebuild_base(v, h_d, phi_table, indices, base):
        n_el, n_sc = v.shape
        for k in range(n_sc):
            acc = h_d[k]
            for n in range(n_el):
                acc = acc + v[n, k] * phi_table[indices[n], k]
            base[k] = acc

    @njit(cache=True)
    def _mean_rate(base, p, sigma2):
        n_sc = base.shape[0]
        acc = 0.0
        for k in range(n_sc):
            pw = base[k].real * base[k].real + base[k].imag * base[k].imag
            acc += np.log2(1.0 + p[k] * pw / sigma2)
        return acc / n_sc

    @njit(cache=True)
    def _cd_sweeps_numba(v, h_d, phi_table, p, sigma2, indices, max_sweeps):
        n_el, n_sc = v.shape
        n_cb = phi_table.shape[0]
        update_rates = np.empty(max_sweeps * n_el)
        sweep_rates = np.empty(max_sweeps)
        base = np.empty(n_sc, dtype=np.complex128)
        _rebuild_base(v, h_d, phi_table, indices, base)
        n_updates = 0
        n_sweeps = 0
        converged = False
        for _ in range(max_sweeps):
            changed = False
            for n in range(n_el):
                best_s = 0
                best_rate = -1.0
                for s in range(n_cb):
                    acc = 0.0
                    for k in range(n_sc):
                        c = (base[k] - v[n, k] * phi_table[indices[n], k]) + v[n, k] * phi_table[s, k]
                        pw = c.real * c.real + c.imag * c.imag
                        acc += np.log2(1.0 + p[k] * pw / sigma2)
                    rate = acc / n_sc
                    if rate > best_rate:  # strict, so ties keep the lowest s
                        best_rate = rate
                        best_s = s
                for k in range(n_sc):
                    base[k] = (base[k] - v[n, k] * phi_table[indices[n], k]) + v[n, k] * phi_table[best_s, k]
                if best_s != indices[n]:
                    changed = True
                    indices[n] = best_s
                update_rates[n_updates] = best_rate
                n_updates += 1
            _rebuild_base(v, h_d, phi_table, indices, base)
            sweep_rates[n_sweeps] = _mean_rate(base, p, sigma2)
            n_sweeps += 1
            if not changed:
                converged = True
                break
        return indices, update_rates[:n_updates], sweep_rates[:n_sweeps], converged


def coordinate_descent_sweeps(v, h_d, phi_table, p, noise_variance, init_indices,
                              max_sweeps=20, backend=None):
    """Run codebook coordinate-descent sweeps until no index changes.

    v : (N, K) complex cascade per element (conj(h_irs_user) * g_ap_irs)
    h_d : (K,) complex direct link
    phi_table : (S, K) complex reflection of each codebook entry
    p : (K,) nonnegative per-subcarrier powers
    init_indices : (N,) starting codebook indices (copied, not mutated)

    Returns a SweepResult; converged means the last sweep was a fixed point,
    which makes the returned indices coordinate-wise optimal for this p.
    """
    v = np.ascontiguousarray(v, dtype=np.complex128)
    h_d = np.ascontiguousarray(h_d, dtype=np.complex128)
    phi_table = np.ascontiguousarray(phi_table, dtype=np.complex128)
    p = np.ascontiguousarray(p, dtype=np.float64)
    indices = np.array(init_indices, dtype=np.int64).copy()
    sigma2 = float(noise_variance)

    n_el, n_sc = v.shape
    n_cb = phi_table.shape[0]
    if h_d.shape != (n_sc,) or phi_table.shape[1] != n_sc or p.shape != (n_sc,):
        raise ValueError("inconsistent subcarrier dimensions")
    if indices.shape != (n_el,):
        raise ValueError("init indices must have one entry per element")
    if n_cb < 1 or np.any(indices < 0) or np.any(indices >= n_cb):
        raise ValueError("init indices outside the codebook")
    if np.any(p < 0.0):
        raise ValueError("powers must be nonnegative")
    if sigma2 <= 0.0:
        raise ValueError("noise variance must be positive")
    if max_sweeps < 1:
        raise ValueError("need at least one sweep")

    if backend is None:
        backend = default_backend()
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        out = _cd_sweeps_numba(v, h_d, phi_table, p, sigma2, indices, int(max_sweeps))
    elif backend == "numpy":
        out = _cd_sweeps_numpy(v, h_d, phi_table, p, sigma2, indices, int(max_sweeps))
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return SweepResult(out[0], out[1], out[2], bool(out[3]))
