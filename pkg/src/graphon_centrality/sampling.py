"""Latent variables, probability matrices and W-random graph sampling."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import DomainError, NumericError
from .graphon import ensure_valid, sample_kernel

MODES = ("deterministic", "stochastic")


@dataclass(frozen=True, eq=False)
class LatentVariables:
    u: np.ndarray
    mode: str
    seed: Optional[int] = None

    @property
    def N(self):
        return len(self.u)


@dataclass(frozen=True, eq=False)
class SampledGraph:
    N: int
    P: np.ndarray
    S: np.ndarray
    kappa: float
    tau: Optional[float]
    latents: LatentVariables
    seed: int

    def edges(self):
        """Edge list ``(i, j)`` with ``i < j``, 0-based."""
        i, j = np.nonzero(np.triu(self.S, 1))
        return np.column_stack([i, j])

    def header(self):
        return {
            "N": self.N,
            "kappa": self.kappa,
            "tau": self.tau,
            "mode": self.latents.mode,
            "seed": self.seed,
            "latents": self.latents.u.tolist(),
            "n_edges": int(np.triu(self.S, 1).sum()),
        }

    def to_dict(self):
        return {**self.header(), "edges": self.edges().tolist()}


def _seed_words(seed, stream):
    """Independent 64-bit keys for the latent and edge streams of one sample."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, stream])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_latents(N, mode="deterministic", seed=0):
    """``u_i = i / N`` or the sorted order statistics of N uniforms."""
    N = int(N)
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if mode == "deterministic":
        return LatentVariables(np.arange(1, N + 1) / N, mode, None)
    if mode != "stochastic":
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    rng = np.random.Generator(np.random.Philox(_seed_words(seed, 0)))
    u = np.sort(rng.random(N))
    if N > 1 and np.any(np.diff(u) <= 0):
        raise NumericError("tied latent variables drawn; use another seed")
    return LatentVariables(u, mode, int(seed))


def probability_matrix(W, lat, sbm_closed="right"):
    """``P_ij = W(u_i, u_j)`` including the diagonal.

    SBM graphons are read with right-closed blocks so that ``u_i = i / N``
    represents the cell ``[(i-1)/N, i/N)`` it closes.
    """
    ensure_valid(W)
    u = lat.u if isinstance(lat, LatentVariables) else np.asarray(lat, dtype=np.float64)
    return sample_kernel(W, u, sbm_closed)


def kappa_schedule(N, tau):
    if not 0.0 <= tau < 1.0:
        raise DomainError(f"tau must lie in [0, 1), got {tau}")
    return float(N) ** (-float(tau))


def sample_adjacency(P, kappa, seed):
    """Symmetric 0/1 matrix with independent ``Bernoulli(kappa P_ij)`` edges for i > j."""
    P = np.asarray(P, dtype=np.float64)
    if not 0.0 < kappa <= 1.0:
        raise DomainError(f"kappa must lie in (0, 1], got {kappa}")
    thresh = kappa * P
    if P.size and (thresh.max() > 1.0 + 1e-12 or P.min() < 0.0):
        raise DomainError(f"kappa * P must lie in [0, 1]; max is {thresh.max():.6g}")
    return _kernels.bernoulli_symmetric(thresh, _seed_words(seed, 1))


def sample_graph(W, N, mode="deterministic", tau=0.0, seed=0, kappa=None):
    """Draw one sampled graph; ``kappa`` overrides the ``N^-tau`` schedule."""
    lat = make_latents(N, mode, seed)
    P = probability_matrix(W, lat)
    k = kappa_schedule(N, tau) if kappa is None else float(kappa)
    S = sample_adjacency(P, k, seed)
    return SampledGraph(int(N), P, S, k, None if kappa is not None else float(tau), lat, int(seed))
