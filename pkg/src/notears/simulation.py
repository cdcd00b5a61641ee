"""Random DAGs and linear structural-equation data.

Randomness comes from numpy's PCG64 generator.  Every operation derives its
own stream from the spec seed through ``SeedSequence(seed, spawn_key=...)``,
so each sampler is a pure function of its spec: identical seeds give
bit-identical output, and weight and noise draws never share a stream.
"""

from dataclasses import dataclass

import numpy as np

from .acyclicity import is_dag_dfs
from .linalg import check_square

_STREAM_GRAPH = 0
_STREAM_WEIGHTS = 1
_STREAM_NOISE = 2

NOISE_KINDS = ("gauss", "exp", "gumbel")


@dataclass(frozen=True)
class GraphSpec:
    """Random-graph spec: ``kind`` is "er" or "sf"; the graph has about
    ``k * d`` edges in expectation."""

    kind: str
    d: int
    k: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("er", "sf"):
            raise ValueError(f"kind must be 'er' or 'sf', got {self.kind!r}")
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class SemSpec:
    """Edge-weight and noise spec for the linear SEM sampler."""

    noise: str = "gauss"
    w_low: float = 0.5
    w_high: float = 2.0
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.noise not in NOISE_KINDS:
            raise ValueError(f"noise must be one of {NOISE_KINDS}, got {self.noise!r}")
        if not 0 < self.w_low <= self.w_high:
            raise ValueError("need 0 < w_low <= w_high")
        if self.scale <= 0:
            raise ValueError("scale must be > 0")


def _rng(seed, stream):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def sample_er_dag(spec):
    """Erdos-Renyi DAG: independent strictly-lower-triangular edges with
    probability 2k/(d-1) (clamped to [0, 1]), then a uniform node relabeling.
    """
    if spec.kind != "er":
        raise ValueError("spec.kind must be 'er'")
    rng = _rng(spec.seed, _STREAM_GRAPH)
    d = spec.d
    prob = min(1.0, max(0.0, 2.0 * spec.k / (d - 1)))
    mask = np.tril(np.ones((d, d), dtype=bool), -1)
    B = np.zeros((d, d), dtype=int)
    B[mask] = rng.random(mask.sum()) < prob
    perm = rng.permutation(d)
    out = np.zeros_like(B)
    out[np.ix_(perm, perm)] = B
    return out


def sample_sf_dag(spec):
    """Scale-free DAG by linear preferential attachment.

    The first k+1 nodes form a directed path; every later node attaches k
    edges from existing nodes chosen without replacement with probability
    proportional to their current total degree.  Edges point existing -> new,
    so arrival order is a topological order and the edge count is exactly
    k * (d - k).
    """
    if spec.kind != "sf":
        raise ValueError("spec.kind must be 'sf'")
    k = int(spec.k)
    d = spec.d
    if d <= k:
        raise ValueError("need d > k for the attachment process")
    rng = _rng(spec.seed, _STREAM_GRAPH)
    B = np.zeros((d, d), dtype=int)
    degree = np.zeros(d)
    for i in range(k):
        B[i, i + 1] = 1
        degree[i] += 1
        degree[i + 1] += 1
    for new in range(k + 1, d):
        weights = degree[:new].copy()
        targets = []
        for _ in range(k):
            probs = weights / weights.sum()
            pick = int(rng.choice(new, p=probs))
            targets.append(pick)
            weights[pick] = 0.0
        for pick in targets:
            B[pick, new] = 1
            degree[pick] += 1
            degree[new] += 1
    return B


def assign_weights(B, spec):
    """Give every edge an independent weight from
    scale * Uniform([-w_high, -w_low] U [w_low, w_high]); non-edges stay 0."""
    B = check_square(B, "B")
    rng = _rng(spec.seed, _STREAM_WEIGHTS)
    rows, cols = np.nonzero(B)
    magnitudes = rng.uniform(spec.w_low, spec.w_high, size=rows.size)
    signs = np.where(rng.random(rows.size) < 0.5, -1.0, 1.0)
    W = np.zeros(B.shape)
    W[rows, cols] = spec.scale * signs * magnitudes
    return W


def topological_order(B, tol=0.0):
    """Topological order of the support of ``B`` (Kahn); raises on a cycle."""
    B = check_square(B, "B")
    d = B.shape[0]
    adj = np.abs(B) > tol
    indegree = adj.sum(axis=0)
    ready = [int(j) for j in np.flatnonzero(indegree == 0)]
    order = []
    while ready:
        node = ready.pop()
        order.append(node)
        for child in np.flatnonzero(adj[node]):
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(int(child))
    if len(order) != d:
        raise ValueError("matrix support contains a cycle")
    return order


def _draw_noise(rng, spec, shape):
    if spec.noise == "gauss":
        return rng.standard_normal(shape)
    if spec.noise == "exp":
        return rng.exponential(1.0, size=shape)
    # Standard Gumbel via -ln(-ln(U)); exact zeros of the uniform stream are
    # bumped to the smallest positive draw so the transform stays finite.
    u = rng.random(shape)
    u = np.where(u == 0.0, 2.0**-53, u)
    return -np.log(-np.log(u))


def sample_sem(W, n, spec):
    """Draw ``n`` i.i.d. samples of the linear SEM  x_j = w_j . x + z_j.

    Columns are filled by forward substitution in a topological order of the
    support of ``W``, so ``W`` must be acyclic.
    """
    W = check_square(W, "W")
    if n < 1:
        raise ValueError("n must be >= 1")
    if not is_dag_dfs(W, 0.0):
        raise ValueError("W must have acyclic support")
    rng = _rng(spec.seed, _STREAM_NOISE)
    d = W.shape[0]
    Z = _draw_noise(rng, spec, (n, d))
    X = np.zeros((n, d))
    for j in topological_order(W):
        X[:, j] = X @ W[:, j] + Z[:, j]
    return X
