"""Concrete stochastic games and one-shot matrix-game solving.

A :class:`GameSpec` describes a game symbolically (expressions over action
coordinates); :func:`discretize` turns it into a :class:`DiscretizedGame`
holding dense payoff and transition tensors over uniform action grids.  The
kernel of everything downstream is :func:`solve_matrix_game`, which returns a
gap-certified mixed value of a finite zero-sum matrix game.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import expr as ex
from .errors import EvalDomainError, GameSpecError, MatrixGameError

__all__ = [
    "GameSpec", "DiscretizedGame", "MatrixGameSolution",
    "action_variables", "uniform_grid", "discretize",
    "solve_matrix_game", "matrix_game_bruteforce",
]

# pre-normalization row-sum deviations beyond this signal a wrong transition
# formula rather than float noise
ROW_SUM_TOLERANCE = 1e-6
_NEGATIVE_CLAMP = 1e-12


def action_variables(prefix: str, dim: int) -> tuple[str, ...]:
    """Variable names for one player's action box: ``x`` if scalar, else
    ``x1..xp``."""
    if dim == 1:
        return (prefix,)
    return tuple(f"{prefix}{i + 1}" for i in range(dim))


@dataclass(frozen=True)
class GameSpec:
    """Symbolic stochastic game over rectangular action boxes.

    ``payoff[k]`` and ``transition[k][k2]`` are expressions in the action
    variables of both players (``x``/``x1..xp`` and ``y``/``y1..yq``).
    ``controller[k]`` optionally tags who controls state ``k`` ("p1"/"p2")
    for the perfect-information / switching / MDP operator forms.
    """
    states: int
    x_box: tuple[tuple[float, float], ...]
    y_box: tuple[tuple[float, float], ...]
    payoff: tuple[ex.Expr, ...]
    transition: tuple[tuple[ex.Expr, ...], ...]
    controller: tuple[str | None, ...] | None = None

    def __post_init__(self):
        d = self.states
        if d < 1:
            raise GameSpecError("state count must be >= 1")
        if len(self.payoff) != d:
            raise GameSpecError("need one payoff expression per state")
        if len(self.transition) != d or any(len(row) != d for row in self.transition):
            raise GameSpecError("transition must be a d x d expression table")
        if self.controller is not None and len(self.controller) != d:
            raise GameSpecError("controller tags must cover every state")
        for lo, hi in self.x_box + self.y_box:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise GameSpecError(f"bad box bounds ({lo}, {hi})")

    @property
    def x_vars(self) -> tuple[str, ...]:
        return action_variables("x", len(self.x_box))

    @property
    def y_vars(self) -> tuple[str, ...]:
        return action_variables("y", len(self.y_box))


@dataclass(frozen=True)
class DiscretizedGame:
    """Finite tensors of a stochastic game on action grids.

    ``g[k]`` has shape (nx_k, ny_k); ``rho[k]`` has shape (nx_k, ny_k, d)
    with rows summing to one exactly.  Immutable after construction.
    """
    states: int
    grids_x: tuple[np.ndarray, ...]  # each (nx_k, p)
    grids_y: tuple[np.ndarray, ...]  # each (ny_k, q)
    g: tuple[np.ndarray, ...]
    rho: tuple[np.ndarray, ...]
    controller: tuple[str | None, ...] | None = None

    def __post_init__(self):
        for k in range(self.states):
            nx, ny = self.g[k].shape
            if self.rho[k].shape != (nx, ny, self.states):
                raise GameSpecError(f"tensor shape mismatch in state {k}")

    def payoff_bound(self) -> float:
        return max(float(np.abs(gk).max()) for gk in self.g)


@dataclass(frozen=True)
class MatrixGameSolution:
    """Certified mixed solution of a zero-sum matrix game.

    The certificate brackets the true value:
    ``min_j (row_strategy @ A)_j >= value - duality_gap`` and
    ``max_i (A @ col_strategy)_i <= value + duality_gap``.
    """
    value: float
    row_strategy: np.ndarray
    col_strategy: np.ndarray
    duality_gap: float


def uniform_grid(box: Sequence[tuple[float, float]], resolution) -> np.ndarray:
    """Product of uniform per-coordinate meshes including box endpoints.

    ``resolution`` is an int or a per-coordinate sequence of ints (>= 2).
    Returns an (n_points, dim) array in row-major order of the coordinate
    meshes.
    """
    dim = len(box)
    if np.isscalar(resolution):
        resolution = [int(resolution)] * dim
    if len(resolution) != dim:
        raise GameSpecError("resolution must match the box dimension")
    axes = []
    for (lo, hi), r in zip(box, resolution):
        r = int(r)
        if r < 2:
            raise GameSpecError("grid resolution must be >= 2 per dimension")
        axes.append(np.linspace(lo, hi, r))
    pts = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=-1)
    return pts.reshape(-1, dim)


def _eval_on_grid(e: ex.Expr, xs: np.ndarray, ys: np.ndarray,
                  x_vars: Sequence[str], y_vars: Sequence[str],
                  what: str) -> np.ndarray:
    """Evaluate an expression on the product of two point lists.

    Vectorized recursion over numpy arrays; any NaN/Inf in the result is
    reported as a domain error at the first offending grid node.
    """
    nx, ny = len(xs), len(ys)
    bind: dict[str, np.ndarray] = {}
    for i, name in enumerate(x_vars):
        bind[name] = np.broadcast_to(xs[:, i][:, None], (nx, ny))
    for j, name in enumerate(y_vars):
        bind[name] = np.broadcast_to(ys[:, j][None, :], (nx, ny))

    def rec(node: ex.Expr) -> np.ndarray:
        if isinstance(node, ex.Num):
            return np.full((nx, ny), node.value)
        if isinstance(node, ex.Var):
            return bind[node.name]
        if isinstance(node, ex.Neg):
            return -rec(node.arg)
        if isinstance(node, ex.Call):
            return np.log(rec(node.arg)) if node.func == "log" else np.exp(rec(node.arg))
        a, b = rec(node.left), rec(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return np.power(a, b)

    with np.errstate(all="ignore"):
        out = np.asarray(rec(e), dtype=float)
    bad = ~np.isfinite(out)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise EvalDomainError(
            f"{what}: nonfinite value at grid node x={xs[i]}, y={ys[j]}")
    return out


def discretize(spec: GameSpec, resolution) -> DiscretizedGame:
    """Evaluate a symbolic game on uniform action grids.

    ``resolution`` may be a single int (shared by both boxes), a pair
    ``(rx, ry)``, or a pair of per-coordinate lists.  Transition rows whose
    pre-normalization sum deviates from one by more than ``ROW_SUM_TOLERANCE``
    (or with entries below ``-1e-12``) raise :class:`GameSpecError`; smaller
    deviations are silently renormalized to sum exactly to one.
    """
    if np.isscalar(resolution):
        res_x = res_y = resolution
    else:
        res_x, res_y = resolution
    xs = uniform_grid(spec.x_box, res_x)
    ys = uniform_grid(spec.y_box, res_y)
    d = spec.states
    g, rho = [], []
    for k in range(d):
        gk = _eval_on_grid(spec.payoff[k], xs, ys, spec.x_vars, spec.y_vars,
                           f"payoff[{k}]")
        rk = np.empty((len(xs), len(ys), d))
        for k2 in range(d):
            rk[:, :, k2] = _eval_on_grid(spec.transition[k][k2], xs, ys,
                                         spec.x_vars, spec.y_vars,
                                         f"transition[{k}][{k2}]")
        if rk.min() < -_NEGATIVE_CLAMP:
            raise GameSpecError(
                f"state {k}: negative transition probability {rk.min():.3e}")
        sums = rk.sum(axis=2)
        dev = float(np.abs(sums - 1.0).max())
        if dev > ROW_SUM_TOLERANCE:
            raise GameSpecError(
                f"state {k}: transition row sums deviate from 1 by {dev:.3e}")
        rk = np.clip(rk, 0.0, None)
        rk /= rk.sum(axis=2, keepdims=True)
        # push the float residual into the largest entry so rows sum to 1.0
        # exactly; repeat in case the correction itself rounds
        for _ in range(4):
            resid = 1.0 - rk.sum(axis=2)
            if not resid.any():
                break
            idx = rk.argmax(axis=2)[:, :, None]
            np.put_along_axis(rk, idx,
                              np.take_along_axis(rk, idx, 2) + resid[:, :, None], 2)
        g.append(gk)
        rho.append(rk)
    return DiscretizedGame(
        states=d,
        grids_x=tuple(xs for _ in range(d)),
        grids_y=tuple(ys for _ in range(d)),
        g=tuple(g),
        rho=tuple(rho),
        controller=spec.controller,
    )


def _exact_sum_one(v: np.ndarray) -> np.ndarray:
    v = np.clip(v, 0.0, None)
    s = v.sum()
    v = v / s if s > 0 else np.full_like(v, 1.0 / len(v))
    v[np.argmax(v)] += 1.0 - v.sum()
    return v


def _saddle_point(A: np.ndarray):
    row_min = A.min(axis=1)
    col_max = A.max(axis=0)
    maximin = row_min.max()
    minimax = col_max.min()
    if maximin == minimax:  # exact pure saddle, certificate gap 0
        i = int(row_min.argmax())
        j = int(col_max.argmin())
        p = np.zeros(A.shape[0]); p[i] = 1.0
        q = np.zeros(A.shape[1]); q[j] = 1.0
        return MatrixGameSolution(float(maximin), p, q, 0.0)
    return None


def _certify(A: np.ndarray, p: np.ndarray, q: np.ndarray) -> MatrixGameSolution:
    lower = float((p @ A).min())
    upper = float((A @ q).max())
    return MatrixGameSolution(0.5 * (lower + upper), p, q,
                              max(0.5 * (upper - lower), 0.0))


def _lp_solve(A: np.ndarray, **options):
    """One LP pass: maximize v s.t. p^T A >= v 1, p in the simplex."""
    m, n = A.shape
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-A.T, np.ones((n, 1))])
    A_eq = np.zeros((1, m + 1))
    A_eq[0, :m] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * m + [(None, None)], **options)
    if not res.success:
        return None
    p = _exact_sum_one(res.x[:m])
    q = _exact_sum_one(np.abs(np.asarray(res.ineqlin.marginals, dtype=float)))
    return _certify(A, p, q)


def _equalizing_mix(B: np.ndarray) -> np.ndarray | None:
    """Row mix equalizing the columns of the square kernel B, or None."""
    k = B.shape[0]
    M = np.zeros((k + 1, k + 1))
    M[:k, :k] = B.T
    M[:k, k] = -1.0
    M[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        return None
    if sol[:k].min() < -1e-10:
        return None
    return np.clip(sol[:k], 0.0, None)


def _polish(A: np.ndarray, sol: MatrixGameSolution,
            threshold: float = 1e-9) -> MatrixGameSolution:
    """Re-solve the equalization system on the LP supports.

    Degenerate games leave simplex basic solutions with certificate gaps
    far above machine precision; solving the square support subsystem
    directly usually repairs them.  The re-derived strategies are verified
    against the full matrix, so a failed polish can only be discarded.
    """
    rows = np.flatnonzero(sol.row_strategy > threshold)
    cols = np.flatnonzero(sol.col_strategy > threshold)
    k = min(len(rows), len(cols))
    if k == 0:
        return sol
    if len(rows) > k:
        rows = rows[np.argsort(sol.row_strategy[rows])[::-1][:k]]
        rows.sort()
    if len(cols) > k:
        cols = cols[np.argsort(sol.col_strategy[cols])[::-1][:k]]
        cols.sort()
    B = A[np.ix_(rows, cols)]
    p_s = _equalizing_mix(B)
    q_s = _equalizing_mix(B.T)
    if p_s is None or q_s is None:
        return sol
    p = np.zeros(A.shape[0])
    p[rows] = p_s
    q = np.zeros(A.shape[1])
    q[cols] = q_s
    polished = _certify(A, _exact_sum_one(p), _exact_sum_one(q))
    return polished if polished.duality_gap < sol.duality_gap else sol


def solve_matrix_game(A, tol: float = 1e-9) -> MatrixGameSolution:
    """Gap-certified mixed value of the zero-sum game with payoff matrix A.

    Solved by linear programming; the returned strategies are re-checked
    against A so the certificate is independent of the solver internals.
    Raises :class:`MatrixGameError` if no attempt certifies a duality gap
    within ``tol``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise MatrixGameError("payoff matrix must be 2-D and nonempty")
    if not np.isfinite(A).all():
        raise MatrixGameError("payoff matrix contains nonfinite entries")
    if tol <= 0:
        raise MatrixGameError("tol must be positive")

    sol = _saddle_point(A)
    if sol is not None:
        return sol

    best = None
    # presolve off is markedly faster on dense game LPs; keep slower
    # configurations as fallbacks for numerically awkward matrices
    for opts in ({"method": "highs", "options": {"presolve": False}},
                 {"method": "highs", "options": {"presolve": True}},
                 {"method": "highs-ds", "options": {"presolve": True}},
                 {"method": "highs-ipm", "options": {"presolve": True}}):
        sol = _lp_solve(A, **opts)
        if sol is None:
            continue
        sol = _polish(A, sol)
        if best is None or sol.duality_gap < best.duality_gap:
            best = sol
        if best.duality_gap <= tol:
            return best
    if best is None:
        raise MatrixGameError("linear program failed on all attempts")
    raise MatrixGameError("could not certify requested duality gap",
                          best_gap=best.duality_gap)


def matrix_game_bruteforce(A, max_size: int = 6) -> float:
    """Exact mixed value by exhaustive support enumeration (test oracle).

    Solves the square equalization systems of every support pair and returns
    the first value whose strategies certify optimality against the whole
    matrix.  Only intended for matrices up to ``max_size`` x ``max_size``.
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    if m > max_size or n > max_size:
        raise MatrixGameError(f"bruteforce limited to {max_size}x{max_size}")
    sol = _saddle_point(A)
    if sol is not None:
        return sol.value

    feas = 1e-10
    cert = 1e-9
    for k in range(2, min(m, n) + 1):
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                B = A[np.ix_(rows, cols)]
                # [B^T -1; 1 0] (p, v) = (0, 1): row mix equalizes the support
                M = np.zeros((k + 1, k + 1))
                M[:k, :k] = B.T
                M[:k, k] = -1.0
                M[k, :k] = 1.0
                rhs = np.zeros(k + 1)
                rhs[k] = 1.0
                try:
                    pv = np.linalg.solve(M, rhs)
                except np.linalg.LinAlgError:
                    continue
                p_s, v = pv[:k], pv[k]
                if p_s.min() < -feas:
                    continue
                M[:k, :k] = B
                try:
                    qu = np.linalg.solve(M, rhs)
                except np.linalg.LinAlgError:
                    continue
                q_s, u = qu[:k], qu[k]
                if q_s.min() < -feas or abs(u - v) > cert:
                    continue
                p = np.zeros(m)
                p[list(rows)] = np.clip(p_s, 0.0, None)
                q = np.zeros(n)
                q[list(cols)] = np.clip(q_s, 0.0, None)
                p /= p.sum()
                q /= q.sum()
                lower = (p @ A).min()
                upper = (A @ q).max()
                if lower >= v - cert and upper <= v + cert:
                    return float(0.5 * (lower + upper))
    raise MatrixGameError("support enumeration found no certified solution")
