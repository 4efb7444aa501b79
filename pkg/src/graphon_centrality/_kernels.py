"""Hot numeric kernels with a numba path and a pure-numpy path.

Each kernel exists twice:

* a loop version in the subset of Python numba compiles, exported compiled as
  ``*_numba`` (None when numba is missing);
* ``*_numpy``, a vectorised formulation that never relies on numba.

The un-suffixed name is the dispatcher used by the rest of the package; it
follows ``_accel.USE_NUMBA``.
"""
import math

import numpy as np

from . import _accel

# ---------------------------------------------------------------------------
# Symmetric eigenproblem: Jacobi rotations
# ---------------------------------------------------------------------------


def _jacobi_loops(a, tol, max_sweeps):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j] * a[i, j]
    fro = math.sqrt(fro)
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if math.sqrt(2.0 * off) <= tol * fro:
            return np.diag(a).copy(), v, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return np.diag(a).copy(), v, -1


jacobi_eig_numba = _accel.njit(_jacobi_loops)


def _round_robin(n):
    """Pairings of a round-robin tournament on ``n`` (even) players.

    Every unordered pair appears in exactly one of the ``n - 1`` rounds and the
    pairs inside a round are disjoint.
    """
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        p = np.array([min(players[i], players[n - 1 - i]) for i in range(n // 2)])
        q = np.array([max(players[i], players[n - 1 - i]) for i in range(n // 2)])
        rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eig_numpy(a, tol, max_sweeps):
    """Parallel-ordering Jacobi: each round applies n/2 disjoint rotations at once."""
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    fro = np.linalg.norm(a)
    n_even = n + (n % 2)
    rounds = [(p[q < n], q[q < n]) for p, q in _round_robin(n_even)] if n > 1 else []
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps):
        if math.sqrt(2.0 * np.sum(a[iu] ** 2)) <= tol * fro:
            return np.diag(a).copy(), v, sweep
        for p, q in rounds:
            apq = a[p, q]
            live = apq != 0.0
            if not live.any():
                continue
            p, q, apq = p[live], q[live], apq[live]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            with np.errstate(over="ignore"):
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            huge = np.abs(theta) > 1e150
            t[huge] = 0.5 / theta[huge]
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * ap - s * aq
            a[:, q] = s * ap + c * aq
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v, -1


def jacobi_eig(a, tol=1e-14, max_sweeps=100):
    """Unsorted eigenpairs of a symmetric matrix; ``sweeps == -1`` flags non-convergence."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if _accel.USE_NUMBA:
        return jacobi_eig_numba(a, tol, max_sweeps)
    return jacobi_eig_numpy(a, tol, max_sweeps)


# ---------------------------------------------------------------------------
# Counter-based Bernoulli sampling of a symmetric 0/1 matrix
# ---------------------------------------------------------------------------
# The uniform attached to pair (i, j), i > j, is the c-th output of a SplitMix64
# stream keyed by the seed, with c = i(i-1)/2 + j.  Each pair therefore owns its
# random number regardless of evaluation order.

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TO_UNIT = 2.0 ** -53


def _pair_uniform_src(seed, c):
    z = seed + (c + np.uint64(1)) * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return float(z >> np.uint64(11)) * _TO_UNIT


_pair_uniform_numba = _accel.njit(_pair_uniform_src)


def _bernoulli_src(thresh, seed):
    n = thresh.shape[0]
    s = np.zeros((n, n), dtype=np.uint8)
    for i in range(1, n):
        base = np.uint64(i) * np.uint64(i - 1) // np.uint64(2)
        for j in range(i):
            u = _pair_uniform_numba(seed, base + np.uint64(j))
            if u < thresh[i, j]:
                s[i, j] = 1
                s[j, i] = 1
    return s


bernoulli_symmetric_numba = _accel.njit(_bernoulli_src)


def pair_uniforms_numpy(seed, counters):
    """Vectorised SplitMix64 outputs mapped to [0, 1)."""
    z = np.uint64(seed) + (counters.astype(np.uint64) + np.uint64(1)) * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def bernoulli_symmetric_numpy(thresh, seed, rows_per_chunk=256):
    n = thresh.shape[0]
    s = np.zeros((n, n), dtype=np.uint8)
    for start in range(1, n, rows_per_chunk):
        stop = min(n, start + rows_per_chunk)
        i, j = np.nonzero(np.tri(stop - start, n, start - 1, dtype=bool))
        i += start
        keep = j < i
        i, j = i[keep], j[keep]
        c = i.astype(np.uint64) * (i.astype(np.uint64) - np.uint64(1)) // np.uint64(2) + j.astype(np.uint64)
        hit = pair_uniforms_numpy(seed, c) < thresh[i, j]
        s[i[hit], j[hit]] = 1
    s |= s.T
    return s


def bernoulli_symmetric(thresh, seed):
    """Symmetric 0/1 matrix with S_ij ~ Bernoulli(thresh_ij) for i > j and zero diagonal."""
    thresh = np.ascontiguousarray(thresh, dtype=np.float64)
    seed = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
    if _accel.USE_NUMBA:
        return bernoulli_symmetric_numba(thresh, seed)
    return bernoulli_symmetric_numpy(thresh, seed)


def warmup():
    """Trigger JIT compilation so that later timings exclude it."""
    if _accel.USE_NUMBA:
        jacobi_eig(np.eye(2))
        bernoulli_symmetric(np.full((3, 3), 0.5), 1)
