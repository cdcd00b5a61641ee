"""Inner unconstrained minimizers.

``minimize_composite`` is a proximal quasi-Newton loop for
``f(w) + lam * ||w||_1`` with a smooth callback ``f``: compact-form L-BFGS
model, exact coordinate updates on an aggressively shrunk active set, and an
Armijo backtracking line search on the composite objective.
``minimize_smooth`` is the same loop with the L1 terms dropped.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import CURVATURE_FLOOR, cd_sweeps
from .scoring import NumericalOverflowError


class LineSearchError(RuntimeError):
    """Backtracking exhausted its budget without sufficient decrease."""


def soft_threshold(x, t):
    """Shrink ``x`` toward zero by ``t``: sign(x) * max(|x| - t, 0)."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be >= 0")
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def coordinate_step(a, b, c, lam):
    """Exact minimizer of (a/2) z^2 + b z + lam |c + z| over z.

    ``a`` is floored at ``CURVATURE_FLOOR`` to guard the division.
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    a = max(float(a), CURVATURE_FLOOR)
    return float(-c + soft_threshold(c - b / a, lam / a))


def composite_subgradient(g, w, lam):
    """Minimum-norm subgradient of f + lam*||.||_1 given grad f = g at w."""
    if lam == 0:
        return np.asarray(g, dtype=float)
    g = np.asarray(g, dtype=float)
    w = np.asarray(w, dtype=float)
    at_zero = np.sign(g) * np.maximum(np.abs(g) - lam, 0.0)
    return np.where(w > 0, g + lam, np.where(w < 0, g - lam, at_zero))


class LbfgsMemory:
    """Curvature-pair store in the compact quasi-Newton form.

    Maintains up to ``m`` pairs (s, y) over a length-p parameter vector and
    the factors of  B = gamma*I - Q @ R @ Q^T  (``qhat_t`` holds (R Q^T)^T so
    kernel access is row-contiguous), plus diag(B).  Pairs with
    ``s.y <= curvature_rtol * ||s|| * ||y||`` are skipped, which keeps B
    positive definite on nonconvex objectives.
    """

    def __init__(self, p, m=10, curvature_rtol=1e-10):
        if p < 1 or m < 1:
            raise ValueError("need p >= 1 and m >= 1")
        self.p = p
        self.m = m
        self.curvature_rtol = curvature_rtol
        self._s = []
        self._y = []
        self.gamma = 1.0
        self._factorize()

    @property
    def size(self):
        return len(self._s)

    def reset(self):
        self._s = []
        self._y = []
        self.gamma = 1.0
        self._factorize()

    def update(self, s, y):
        """Insert the pair (s, y); returns False when the pair is skipped."""
        s = np.asarray(s, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if s.size != self.p or y.size != self.p:
            raise ValueError(f"pair length must be {self.p}")
        sy = float(s @ y)
        if sy <= self.curvature_rtol * np.linalg.norm(s) * np.linalg.norm(y):
            return False
        if len(self._s) == self.m:
            self._s.pop(0)
            self._y.pop(0)
        self._s.append(s.copy())
        self._y.append(y.copy())
        self.gamma = float(y @ y) / sy
        self._factorize()
        return True

    def _factorize(self):
        k = len(self._s)
        if k == 0:
            self.q = np.zeros((self.p, 0))
            self.qhat_t = np.zeros((self.p, 0))
            self.diag_b = np.full(self.p, self.gamma)
            return
        S = np.column_stack(self._s)
        Y = np.column_stack(self._y)
        sty = S.T @ Y
        lower = np.tril(sty, -1)
        middle = np.block(
            [
                [self.gamma * (S.T @ S), lower],
                [lower.T, -np.diag(np.diag(sty))],
            ]
        )
        Q = np.concatenate([self.gamma * S, Y], axis=1)
        try:
            qhat = np.linalg.solve(middle, Q.T)
        except np.linalg.LinAlgError:
            qhat = np.linalg.lstsq(middle, Q.T, rcond=None)[0]
        self.q = np.ascontiguousarray(Q)
        self.qhat_t = np.ascontiguousarray(qhat.T)
        self.diag_b = self.gamma - np.einsum("ij,ij->i", self.q, self.qhat_t)

    def matvec(self, v):
        """Apply the implicit Hessian model: B v = gamma*v - Q (Qhat v)."""
        v = np.asarray(v, dtype=float).ravel()
        return self.gamma * v - self.q @ (self.qhat_t.T @ v)

    def solve(self, v):
        """Apply the inverse model B^{-1} v by the two-loop recursion.

        The recursion with initial matrix (1/gamma) I is the exact inverse of
        the compact form, so ``solve(matvec(v)) == v`` up to round-off.
        """
        q = np.asarray(v, dtype=float).ravel().copy()
        pairs = list(zip(self._s, self._y))
        coeffs = []
        for s, y in reversed(pairs):
            a = (s @ q) / (s @ y)
            coeffs.append(a)
            q -= a * y
        r = q / self.gamma
        for (s, y), a in zip(pairs, reversed(coeffs)):
            b = (y @ r) / (s @ y)
            r += (a - b) * s
        return r


def _model_value(mem, g, w, lam, d):
    """Composite quadratic-model value of a candidate direction."""
    quad = mem.gamma * float(d @ d) - float((mem.q.T @ d) @ (mem.qhat_t.T @ d))
    value = float(g @ d) + 0.5 * quad
    if lam > 0:
        value += lam * (float(np.abs(w + d).sum()) - float(np.abs(w).sum()))
    return value


def solve_direction(mem, g, w, lam, active=None, sweeps=10):
    """Approximately minimize g.d + 0.5 d.B.d + lam*||w + d||_1 over d.

    The coordinate sweeps are warm-started at the exact smooth quasi-Newton
    step -B^{-1}g (restricted to ``active``); each sweep then applies exact
    coordinate updates for the L1 term.  Plain sweeps from zero crawl when B
    is ill-conditioned, while the warm start already solves the smooth part,
    so the sweeps only have to shape the sparsity.  If the warm-started
    candidate fails to improve the model (possible when the L1 term dominates)
    the sweeps are rerun from zero, whose output always has nonpositive model
    value.  With empty memory (B = gamma*I) and lam = 0 the result is exactly
    -g / gamma.
    """
    g = np.ascontiguousarray(g, dtype=float)
    w = np.ascontiguousarray(w, dtype=float)
    p = g.size
    if active is None:
        active = np.arange(p, dtype=np.int64)
    else:
        active = np.ascontiguousarray(active, dtype=np.int64)
    d0 = -mem.solve(g)
    if active.size < p:
        keep = np.zeros(p, dtype=bool)
        keep[active] = True
        d0[~keep] = 0.0
    dhat0 = np.ascontiguousarray(mem.qhat_t.T @ d0)
    d = cd_sweeps(
        mem.gamma, mem.q, mem.qhat_t, mem.diag_b, g, w, float(lam), active,
        sweeps, d0, dhat0,
    )
    if lam > 0 and _model_value(mem, g, w, lam, d) > 0:
        d = cd_sweeps(
            mem.gamma, mem.q, mem.qhat_t, mem.diag_b, g, w, float(lam), active,
            sweeps, np.zeros(p), np.zeros(mem.q.shape[1]),
        )
    return d


def _armijo(objective, w, d, lam, c1, f0, g0, max_halvings=50):
    """Backtrack eta over {1, 1/2, 1/4, ...} until sufficient composite decrease.

    Condition:  phi(w + eta*d) <= phi(w) + eta*c1*delta  with
    delta = g.d + lam*(||w + d||_1 - ||w||_1) and phi the composite
    objective.  Returns (eta, f, g) at the accepted point.
    """
    gd = float(g0 @ d)
    if lam > 0:
        l1_w = float(np.abs(w).sum())
        delta = gd + lam * (float(np.abs(w + d).sum()) - l1_w)
        phi0 = f0 + lam * l1_w
    else:
        delta = gd
        phi0 = f0
    eta = 1.0
    for _ in range(max_halvings + 1):
        trial = w + eta * d
        f_trial, g_trial = objective(trial)
        if np.isfinite(f_trial):
            phi_trial = f_trial + lam * float(np.abs(trial).sum()) if lam > 0 else f_trial
            if phi_trial <= phi0 + eta * c1 * delta:
                return eta, f_trial, g_trial
        eta *= 0.5
    raise LineSearchError(
        f"no sufficient decrease after {max_halvings} halvings (delta={delta:.3e})"
    )


def armijo_search(objective, w, d, lam=0.0, c1=1e-4, max_halvings=50):
    """Return the first step size in {1, 1/2, 1/4, ...} passing the Armijo rule."""
    w = np.asarray(w, dtype=float).ravel()
    d = np.asarray(d, dtype=float).ravel()
    f0, g0 = objective(w)
    eta, _, _ = _armijo(objective, w, d, lam, c1, f0, g0, max_halvings)
    return eta


@dataclass
class MinimizeResult:
    w: np.ndarray
    value: float
    converged: bool
    n_iters: int
    subgrad_norm: float


def minimize_composite(
    objective,
    lam,
    w0,
    tol=1e-6,
    max_iter=1000,
    memory=10,
    sweeps=10,
    c1=1e-4,
    shrink=True,
    rel_tol=0.0,
):
    """Proximal quasi-Newton minimization of objective(w) + lam*||w||_1.

    ``objective`` maps a flat vector to ``(value, gradient)``.  Terminates when
    the minimum-norm subgradient of the composite objective has infinity norm
    at most ``max(tol, rel_tol * initial subgradient norm)`` -- the relative
    part lets badly scaled instances (huge penalty weights) stop once the
    starting violation has been reduced by 1/rel_tol instead of chasing an
    absolute target below their attainable precision.  Zero coordinates with
    subgradient below a shrink tolerance are excluded from coordinate updates;
    when the shrunk problem converges before the full one, the active set and
    the curvature memory are reset and the tolerance is tightened tenfold, so
    shrinking accelerates but never changes the optimum.  On iteration
    exhaustion the best iterate is returned with ``converged=False``.
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    w = np.array(w0, dtype=float).ravel().copy()
    p = w.size
    f, g = objective(w)
    if not np.isfinite(f) or not np.isfinite(g).all():
        raise NumericalOverflowError("objective is not finite at the starting point")
    mem = LbfgsMemory(p, memory)
    sub = composite_subgradient(g, w, lam)
    shrink_tol = 0.1 * float(np.max(np.abs(sub))) if shrink else 0.0
    tol = max(tol, rel_tol * float(np.max(np.abs(sub))))
    n_iters = 0
    failed_once = False
    for n_iters in range(1, max_iter + 1):
        sub = composite_subgradient(g, w, lam)
        if float(np.max(np.abs(sub))) <= tol:
            break
        if shrink and shrink_tol > tol:
            # The bar tracks current progress so the worst violator is never
            # excluded; zero coordinates well below it sit this round out.
            bar = min(shrink_tol, 0.5 * float(np.max(np.abs(sub))))
            active = np.flatnonzero((w != 0.0) | (np.abs(sub) >= bar))
            if active.size == 0 or float(np.max(np.abs(sub[active]))) <= tol:
                # Shrunk problem is solved but the full one is not: widen.
                mem.reset()
                shrink_tol *= 0.1
                continue
        else:
            active = np.arange(p, dtype=np.int64)
        d = solve_direction(mem, g, w, lam, active, sweeps)
        try:
            eta, f_new, g_new = _armijo(objective, w, d, lam, c1, f, g)
        except LineSearchError:
            if not failed_once and (mem.size > 0 or active.size < p):
                # Retry once from a fresh metric on the full set.
                mem.reset()
                shrink_tol *= 0.1
                failed_once = True
                continue
            break
        failed_once = False
        step = eta * d
        w = w + step
        if float(np.max(np.abs(step))) <= 1e-15 * (1.0 + float(np.max(np.abs(w)))):
            f, g = f_new, g_new
            break
        mem.update(step, g_new - g)
        f, g = f_new, g_new
    sub = composite_subgradient(g, w, lam)
    sub_norm = float(np.max(np.abs(sub)))
    return MinimizeResult(
        w=w, value=f, converged=sub_norm <= tol, n_iters=n_iters, subgrad_norm=sub_norm
    )


def minimize_smooth(objective, w0, tol=1e-6, max_iter=1000, memory=10, sweeps=10, c1=1e-4):
    """Smooth L-BFGS minimization: the composite loop with the L1 terms dropped."""
    return minimize_composite(
        objective,
        0.0,
        w0,
        tol=tol,
        max_iter=max_iter,
        memory=memory,
        sweeps=sweeps,
        c1=c1,
    )
