"""Acyclicity measures for weighted adjacency matrices, plus a DFS oracle.

The production measure is :func:`acyclicity_expm`: smooth, exactly zero on
acyclic supports, with a closed-form gradient.  The trace-inverse and
finite-series variants are diagnostics only -- the former needs a spectral
radius below one and the latter overflows for modest ``d``.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import check_square, expm, spectral_radius


@dataclass(frozen=True)
class AcyclicityEval:
    """Value and gradient of the acyclicity measure at one point.

    ``value`` is nonnegative up to round-off and zero exactly when the support
    of the evaluated matrix is a DAG.  ``gradient`` vanishes wherever the
    matrix itself is zero.
    """

    value: float
    gradient: np.ndarray


def acyclicity_expm(W):
    """Smooth acyclicity measure tr(exp(W*W)) - d and its gradient.

    The Hadamard square makes the walk weights nonnegative, so the value sums
    weighted closed walks of every length: it is zero iff the support of ``W``
    is acyclic, and its magnitude quantifies how strongly cyclic ``W`` is.
    The gradient is ``exp(W*W)^T * 2W`` (entrywise product).
    """
    W = check_square(W, "W")
    E = expm(W * W)
    value = float(np.trace(E)) - W.shape[0]
    gradient = E.T * (2.0 * W)
    return AcyclicityEval(value, gradient)


def acyclicity_trace_inverse(B):
    """Closed-walk count tr((I - B)^{-1}) - d for nonnegative B with r(B) < 1.

    Zero iff the support of ``B`` is acyclic.  Raises when the spectral radius
    is too close to one for the geometric series to converge (a binary 2-cycle
    already has radius one).
    """
    B = check_square(B, "B")
    if (B < 0).any():
        raise ValueError("B must be entrywise nonnegative")
    radius = spectral_radius(B)
    if radius >= 1.0 - 1e-6:
        raise ValueError(
            f"spectral radius {radius:.6g} is too close to 1; "
            "the trace-inverse characterization does not apply"
        )
    d = B.shape[0]
    return float(np.trace(np.linalg.inv(np.eye(d) - B))) - d


def acyclicity_finite_series(B):
    """Finite closed-walk count sum_{k=1}^{d} tr(B^k) for nonnegative B.

    Zero iff the support is acyclic.  Entries of ``B^k`` can exceed machine
    range already for moderate ``d``, so this is a test/diagnostic tool only.
    """
    B = check_square(B, "B")
    if (B < 0).any():
        raise ValueError("B must be entrywise nonnegative")
    d = B.shape[0]
    total = float(np.trace(B))
    power = B
    for _ in range(2, d + 1):
        power = power @ B
        total += float(np.trace(power))
    return total


def is_dag_dfs(B, tol=0.0):
    """Combinatorial acyclicity check by depth-first search.

    Entries with ``|b_ij| > tol`` are treated as edges; returns True iff the
    resulting directed graph has no cycle.
    """
    B = check_square(B, "B")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    d = B.shape[0]
    children = [np.flatnonzero(np.abs(B[i]) > tol) for i in range(d)]
    # 0 = unvisited, 1 = on the current DFS path, 2 = finished
    color = np.zeros(d, dtype=np.int8)
    for start in range(d):
        if color[start]:
            continue
        stack = [(start, 0)]
        color[start] = 1
        while stack:
            node, pos = stack[-1]
            row = children[node]
            if pos < row.size:
                stack[-1] = (node, pos + 1)
                child = int(row[pos])
                if color[child] == 1:
                    return False
                if color[child] == 0:
                    color[child] = 1
                    stack.append((child, 0))
            else:
                color[node] = 2
                stack.pop()
    return True
