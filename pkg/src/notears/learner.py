"""Outer loop: augmented-Lagrangian dual ascent with penalty escalation,
followed by hard thresholding of the stationary point."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .acyclicity import acyclicity_expm, is_dag_dfs
from .linalg import check_square
from .scoring import SmoothObjective, check_data, penalized_score
from .solver import minimize_composite


@dataclass
class NotearsConfig:
    """Knobs for one fit.

    ``lam`` is the L1 weight, ``omega`` the hard threshold applied to the
    numerical solution, ``progress_rate`` the required per-step shrink factor
    of the acyclicity value before the penalty is escalated, and
    ``constraint_tol`` the termination tolerance on that value.  The inner
    solver runs at ``inner_tol`` and is re-run at ``inner_tol_final`` on the
    final iteration (set both equal to disable the polish pass).
    """

    lam: float = 0.1
    omega: float = 0.3
    progress_rate: float = 0.25
    constraint_tol: float = 1e-8
    rho_init: float = 1.0
    rho_mult: float = 10.0
    rho_max: float = 1e16
    max_dual_iters: int = 100
    memory: int = 10
    sweeps: int = 10
    c1: float = 1e-4
    inner_tol: float = 1e-6
    inner_tol_final: float = 1e-8
    inner_rel_tol: float = 1e-6
    inner_max_iter: int = 1000
    shrink: bool = True

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.omega < 0:
            raise ValueError("omega must be >= 0")
        if not 0.0 < self.progress_rate < 1.0:
            raise ValueError("progress_rate must lie in (0, 1)")
        if self.constraint_tol <= 0:
            raise ValueError("constraint_tol must be > 0")
        if self.rho_init <= 0 or self.rho_init > self.rho_max:
            raise ValueError("need 0 < rho_init <= rho_max")
        if self.rho_mult <= 1:
            raise ValueError("rho_mult must be > 1")
        if self.max_dual_iters < 1:
            raise ValueError("max_dual_iters must be >= 1")


@dataclass(frozen=True)
class DualIterationRecord:
    """One accepted dual iteration: the multipliers used for the primal solve
    and the acyclicity/score of its result."""

    t: int
    rho: float
    alpha: float
    acyclicity: float
    score: float


@dataclass
class LearnResult:
    w_ecp: np.ndarray
    w_hat: np.ndarray
    acyclicity_final: float
    converged: bool
    omega_used: float
    omega_raised: bool
    trace: list = field(default_factory=list)

    @property
    def n_dual_iters(self):
        return len(self.trace)


def threshold(W, omega):
    """Zero every entry with ``|w_ij| <= omega``; others pass through."""
    W = check_square(W, "W")
    if omega < 0:
        raise ValueError("omega must be >= 0")
    out = W.copy()
    out[np.abs(out) <= omega] = 0.0
    return out


def min_dag_threshold(W):
    """Smallest omega in {0} U {|w_ij|} whose thresholded support is acyclic."""
    W = check_square(W, "W")
    candidates = np.concatenate(([0.0], np.unique(np.abs(W[W != 0.0]))))
    for omega in candidates:
        if is_dag_dfs(threshold(W, omega), 0.0):
            return float(omega)
    # Unreachable: thresholding at max|w| leaves the empty graph.
    return float(candidates[-1])


def _inner_minimize(objective, cfg, w0, tol):
    return minimize_composite(
        objective,
        cfg.lam,
        w0,
        tol=tol,
        max_iter=cfg.inner_max_iter,
        memory=cfg.memory,
        sweeps=cfg.sweeps,
        c1=cfg.c1,
        shrink=cfg.shrink,
        rel_tol=cfg.inner_rel_tol,
    )


def notears_fit(X, cfg=None):
    """Learn a sparse weighted DAG from data.

    Repeats: solve the penalized smooth subproblem warm-started at the previous
    iterate, escalating the penalty (restarting from the same warm start) until
    the acyclicity value drops below ``progress_rate`` times its previous
    value or the penalty cap is hit; then take one dual-ascent step on the
    multiplier.  Stops when the acyclicity value falls below
    ``constraint_tol``.  The first iteration accepts any penalty since the
    zero start is already feasible.  The stationary point is hard-thresholded
    at ``omega``; if the result still contains a cycle the threshold is raised
    to the smallest value that breaks all cycles and this is recorded.
    """
    cfg = cfg if cfg is not None else NotearsConfig()
    X = check_data(X)
    d = X.shape[1]
    objective = SmoothObjective(X)

    w = np.zeros(d * d)
    alpha = 0.0
    rho = cfg.rho_init
    acyc_prev = np.inf
    acyc_val = np.inf
    trace = []
    converged = False

    # The escalation loop targets an extra margin beyond the accept test so
    # each dual iteration buys roughly two penalty decades; the accepted step
    # then satisfies the progress contract with room to spare.
    escalation_target = cfg.progress_rate**2
    for t in range(cfg.max_dual_iters):
        while True:
            objective.set_multipliers(alpha, rho)
            result = _inner_minimize(objective, cfg, w, cfg.inner_tol)
            acyc_val = acyclicity_expm(result.w.reshape(d, d)).value
            if acyc_val < escalation_target * acyc_prev or rho >= cfg.rho_max:
                break
            rho *= cfg.rho_mult
        if acyc_val < cfg.constraint_tol and cfg.inner_tol_final < cfg.inner_tol:
            result = _inner_minimize(objective, cfg, result.w, cfg.inner_tol_final)
            acyc_val = acyclicity_expm(result.w.reshape(d, d)).value
        w = result.w
        trace.append(
            DualIterationRecord(
                t=t,
                rho=rho,
                alpha=alpha,
                acyclicity=acyc_val,
                score=penalized_score(w.reshape(d, d), X, cfg.lam),
            )
        )
        alpha += rho * acyc_val
        if acyc_val < cfg.constraint_tol:
            converged = True
            break
        if rho >= cfg.rho_max and acyc_val >= acyc_prev:
            break  # penalty exhausted without progress
        acyc_prev = acyc_val

    w_ecp = w.reshape(d, d)
    omega_used = cfg.omega
    w_hat = threshold(w_ecp, omega_used)
    omega_raised = False
    if not is_dag_dfs(w_hat, 0.0):
        omega_used = min_dag_threshold(w_ecp)
        w_hat = threshold(w_ecp, omega_used)
        omega_raised = True
        warnings.warn(
            f"thresholded graph still contained a cycle; omega raised from "
            f"{cfg.omega:.6g} to {omega_used:.6g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return LearnResult(
        w_ecp=w_ecp,
        w_hat=w_hat,
        acyclicity_final=acyc_val,
        converged=converged,
        omega_used=omega_used,
        omega_raised=omega_raised,
        trace=trace,
    )
