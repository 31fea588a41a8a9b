"""Parametric one-shot games: separable payoffs via moment convexification,
the convex-payoff finite-support reduction, and the rational-payoff
benchmark game whose value is transcendental in the parameter.

The benchmark payoff is ``(1+x)(1+yz) / (2(1+xy)^2)`` on the unit square;
its mixed value is ``z / (2 ln(1+z))`` for z in (0, 1], which the grid
solver must reproduce as the mesh refines.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import expr as ex
from .errors import GameSpecError
from .game import action_variables, solve_matrix_game, uniform_grid

__all__ = [
    "SeparableSpec", "separable_value",
    "ConvexGameSpec", "convexity_spot_check", "convex_value",
    "payoff_grid",
    "mckinsey_payoff_matrix", "mckinsey_value", "mckinsey_grid_value",
]

CONVEX_SUPPORT_POINT_LIMIT = 65  # grids past this blow up the enumeration


@dataclass(frozen=True)
class SeparableSpec:
    """Payoff sum_{ij} m_ij(z) * a_i(x, z) * b_j(y, z) over action boxes.

    ``a`` are expressions in the x-variables (plus parameters), ``b`` in the
    y-variables, and the coefficient table ``m`` in the parameters alone.
    """
    a: tuple[ex.Expr, ...]
    b: tuple[ex.Expr, ...]
    m: tuple[tuple[ex.Expr, ...], ...]
    x_box: tuple[tuple[float, float], ...]
    y_box: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.a or not self.b:
            raise GameSpecError("basis sizes must be >= 1")
        if len(self.m) != len(self.a) or any(len(r) != len(self.b) for r in self.m):
            raise GameSpecError("coefficient table must be I x J")


def _grid_bindings(points: np.ndarray, prefix: str) -> list[dict[str, float]]:
    names = action_variables(prefix, points.shape[1])
    return [dict(zip(names, map(float, pt))) for pt in points]


def separable_value(spec: SeparableSpec, z: Mapping[str, float],
                    resolution: int, tol: float = 1e-9) -> float:
    """Grid value of a separable parametric game at parameter z.

    Builds the bilinear matrix over the basis images of the action grids
    and solves the induced finite matrix game; by linearity of mixing this
    equals the minimax over the (discretized) moment polytopes, so no
    polytope is ever materialized.
    """
    xs = uniform_grid(spec.x_box, resolution)
    ys = uniform_grid(spec.y_box, resolution)
    zb = dict(z)
    A = np.array([[ex.evaluate(ai, {**b, **zb}) for b in _grid_bindings(xs, "x")]
                  for ai in spec.a])  # (I, nx)
    B = np.array([[ex.evaluate(bj, {**b, **zb}) for b in _grid_bindings(ys, "y")]
                  for bj in spec.b])  # (J, ny)
    M = np.array([[ex.evaluate(mij, zb) for mij in row] for row in spec.m])
    G = A.T @ M @ B
    return solve_matrix_game(G, tol).value


@dataclass(frozen=True)
class ConvexGameSpec:
    """One-shot game whose payoff is declared convex in the minimizer's
    action; the declaration is trusted but spot-checkable."""
    payoff: ex.Expr  # in x-vars, y-vars, and parameter names
    x_box: tuple[tuple[float, float], ...]
    y_box: tuple[tuple[float, float], ...]
    convex_in_y: bool = True


def convexity_spot_check(spec: ConvexGameSpec, z: Mapping[str, float],
                         segments: int = 64, seed: int = 0,
                         slack: float = 1e-9) -> float:
    """Worst midpoint-convexity violation of y -> g(x, y, z) on random
    segments; <= slack for genuinely convex payoffs."""
    rng = np.random.default_rng(seed)
    p, q = len(spec.x_box), len(spec.y_box)
    zb = dict(z)
    xv, yv = action_variables("x", p), action_variables("y", q)
    worst = 0.0
    for _ in range(segments):
        x = [rng.uniform(lo, hi) for lo, hi in spec.x_box]
        y1 = [rng.uniform(lo, hi) for lo, hi in spec.y_box]
        y2 = [rng.uniform(lo, hi) for lo, hi in spec.y_box]
        ym = [(u + v) / 2 for u, v in zip(y1, y2)]

        def g(y):
            return ex.evaluate(spec.payoff,
                               {**zb, **dict(zip(xv, x)), **dict(zip(yv, y))})

        worst = max(worst, g(ym) - (g(y1) + g(y2)) / 2)
    if worst > slack:
        raise GameSpecError(
            f"payoff declared convex in y violates midpoint convexity by {worst:.3e}")
    return worst


def payoff_grid(spec: ConvexGameSpec, z: Mapping[str, float],
                 resolution: int) -> np.ndarray:
    xs = uniform_grid(spec.x_box, resolution)
    ys = uniform_grid(spec.y_box, resolution)
    xv, yv = action_variables("x", xs.shape[1]), action_variables("y", ys.shape[1])
    zb = dict(z)
    G = np.empty((len(xs), len(ys)))
    for i, x in enumerate(xs):
        bx = dict(zip(xv, map(float, x)))
        for j, y in enumerate(ys):
            G[i, j] = ex.evaluate(spec.payoff, {**zb, **bx, **dict(zip(yv, map(float, y)))})
    return G


def convex_value(spec: ConvexGameSpec, z: Mapping[str, float],
                 resolution: int, tol: float = 1e-9,
                 max_points: int = CONVEX_SUPPORT_POINT_LIMIT) -> float:
    """Value via maximizer supports of at most q+1 grid points.

    With the payoff convex in y, the maximizer has an optimal mixture
    supported on q+1 points (q = dimension of the minimizer's box), so the
    value is the best restricted matrix game over all such supports.  Each
    restriction can only lower the value, so the result never exceeds the
    full grid value; convexity makes the two agree up to discretization.
    """
    if not spec.convex_in_y:
        raise GameSpecError("convexity declaration flag is not set")
    q = len(spec.y_box)
    if q > 2:
        raise GameSpecError("convex-payoff reduction supports y-dimension <= 2")
    G = payoff_grid(spec, z, resolution)
    nx = G.shape[0]
    if nx > max_points:
        raise GameSpecError(
            f"support enumeration budget exceeded: {nx} > {max_points} grid points")
    best = -math.inf
    for support in itertools.combinations(range(nx), min(q + 1, nx)):
        sub = G[list(support), :]
        # cheap upper bound: the restricted value is at most min_j max_i
        if sub.max(axis=0).min() <= best:
            continue
        val = solve_matrix_game(sub, tol).value
        best = max(best, val)
    return best


def mckinsey_payoff_matrix(z: float, resolution: int) -> np.ndarray:
    """Benchmark payoff (1+x)(1+yz) / (2(1+xy)^2) on uniform unit grids."""
    x = np.linspace(0.0, 1.0, resolution)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return (1 + X) * (1 + Y * z) / (2 * (1 + X * Y) ** 2)


def mckinsey_value(z: float) -> float:
    """Closed-form value z / (2 ln(1+z)) of the benchmark game, z in (0, 1]."""
    if not 0.0 < z <= 1.0:
        raise ValueError(f"parameter must be in (0, 1], got {z}")
    return z / (2.0 * math.log1p(z))


def mckinsey_grid_value(z: float, resolution: int = 201,
                        tol: float = 1e-6) -> float:
    """Mixed value of the benchmark game on a uniform grid; converges to
    the closed form as the grid refines."""
    if not 0.0 < z <= 1.0:
        raise ValueError(f"parameter must be in (0, 1], got {z}")
    return solve_matrix_game(mckinsey_payoff_matrix(z, resolution), tol).value
