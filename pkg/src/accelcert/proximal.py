"""Proximal value / subgradient for composite objectives.

For step size s in (0, 1/L), the proximal value P(x) minimizes
(1/2s)||y - (x - s*grad f(x))||^2 + g(y) over y, and the proximal
subgradient is G(x) = (x - P(x))/s, which reduces to grad f(x) when g is
identically zero. For the l1 regularizer P(x) has the closed soft-threshold
form; an independent grid-search oracle is provided for testing it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StepSizeError, UnsupportedRegularizerError
from .problems import CompositeObjective, Vector, _as_vector, _normalized


def require_step(s: float, lipschitz: float) -> None:
    """Enforce the standing assumption 0 < s < 1/L (both bounds strict)."""
    if not 0.0 < s < 1.0 / lipschitz:
        raise StepSizeError(
            f"step {s} outside (0, {1.0 / lipschitz}) for L={lipschitz}"
        )


@dataclass(frozen=True)
class ProxResult:
    """Proximal value and subgradient computed from one gradient step."""

    p_value: Vector
    subgradient: Vector
    step: float


def soft_threshold(u, theta: float) -> Vector:
    """Componentwise shrinkage (|u_i| - theta)_+ * sgn(u_i).

    Entries with |u_i| <= theta map to exact zeros.
    """
    if theta < 0.0:
        raise ParameterError("threshold must be nonnegative")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    return np.sign(u) * np.maximum(np.abs(u) - theta, 0.0)


def prox_value(problem: CompositeObjective, x, s: float) -> Vector:
    """Proximal value P(x) for a zero or l1 regularizer.

    Zero regularizer: the plain gradient step x - s*grad f(x). l1: the
    soft threshold of the gradient step at level l1_weight*s.
    """
    require_step(s, problem.smooth.lipschitz)
    x = _as_vector(x, problem.dim)
    u = x - s * problem.smooth.gradient(x)
    if problem.regularizer_kind == "zero":
        return u
    return soft_threshold(u, problem.l1_weight * s)


def prox_subgradient(problem: CompositeObjective, x, s: float) -> Vector:
    """Proximal subgradient G(x) = (x - P(x))/s.

    The zero-regularizer path returns grad f(x) itself: the reduction is
    exact, and routing through the subtraction would only destroy the
    bit-level identity with the smooth algorithms.
    """
    require_step(s, problem.smooth.lipschitz)
    x = _as_vector(x, problem.dim)
    if problem.regularizer_kind == "zero":
        return problem.smooth.gradient(x)
    return (x - prox_value(problem, x, s)) / s


def prox_eval(problem: CompositeObjective, x, s: float) -> ProxResult:
    """Bundle P(x) and G(x) computed from a single gradient evaluation."""
    require_step(s, problem.smooth.lipschitz)
    x = _as_vector(x, problem.dim)
    g = problem.smooth.gradient(x)
    if problem.regularizer_kind == "zero":
        return ProxResult(p_value=x - s * g, subgradient=g, step=s)
    p = soft_threshold(x - s * g, problem.l1_weight * s)
    return ProxResult(p_value=p, subgradient=(x - p) / s, step=s)


def prox_bruteforce(
    problem: CompositeObjective,
    x,
    s: float,
    radius: float | None = None,
    grid_step: float = 1e-6,
    npts: int = 4001,
) -> Vector:
    """Independent proximal oracle: per-coordinate grid minimization.

    Minimizes (1/2s)(y - u_i)^2 + l1_weight*|y| over y for each coordinate
    of the gradient step u = x - s*grad f(x), by evaluating the objective on
    successively refined uniform grids (the objective is strictly convex in
    y, so the grid argmin brackets the true minimizer within one cell).
    ``radius`` defaults to 10*(1 + |u_i|); refinement stops once the cell
    width is at most ``grid_step``. Never uses the closed form.
    """
    if problem.regularizer_kind not in ("zero", "l1"):
        raise UnsupportedRegularizerError(
            f"grid oracle needs a separable regularizer, got {problem.regularizer_kind!r}"
        )
    if grid_step <= 0.0:
        raise ParameterError("grid step must be positive")
    if npts < 5:
        raise ParameterError("need at least 5 grid points per stage")
    require_step(s, problem.smooth.lipschitz)
    x = _as_vector(x, problem.dim)
    u = x - s * problem.smooth.gradient(x)
    lam = problem.l1_weight if problem.regularizer_kind == "l1" else 0.0

    out = np.empty_like(u)
    for i, ui in enumerate(u):
        rad = 10.0 * (1.0 + abs(ui)) if radius is None else radius
        lo, hi = ui - rad, ui + rad
        while True:
            grid = np.linspace(lo, hi, npts)
            vals = (grid - ui) ** 2 / (2.0 * s) + lam * np.abs(grid)
            best = grid[int(np.argmin(vals))]
            cell = (hi - lo) / (npts - 1)
            if cell <= grid_step:
                break
            lo, hi = best - 2.0 * cell, best + 2.0 * cell
        out[i] = best
    return out


def composite_fundamental_slack(problem: CompositeObjective, x, y, s: float) -> float:
    """Slack of the composite descent inequality (proximal counterpart of the
    smooth one in problems.fundamental_inequality_slack):

    phi(y - s G(y)) - phi(x) <= <G(y), y - x> - (mu/2)||y - x||^2
                                - (s - L s^2 / 2)||G(y)||^2
    """
    x = _as_vector(x, problem.dim)
    y = _as_vector(y, problem.dim)
    res = prox_eval(problem, y, s)
    g = res.subgradient
    lhs = problem.phi_value(y - s * g) - problem.phi_value(x)
    diff = y - x
    mu = problem.smooth.mu
    lipschitz = problem.smooth.lipschitz
    rhs = (
        float(np.dot(g, diff))
        - 0.5 * mu * float(np.dot(diff, diff))
        - (s - lipschitz * s * s / 2.0) * float(np.dot(g, g))
    )
    return _normalized(rhs, lhs)


def composite_key_slack(problem: CompositeObjective, y, s: float, phi_star: float) -> float:
    """Slack of ||G(y)||^2 >= 2 mu (phi(y - s G(y)) - phi*)."""
    y = _as_vector(y, problem.dim)
    g = prox_eval(problem, y, s).subgradient
    lhs = float(np.dot(g, g))
    rhs = 2.0 * problem.smooth.mu * (problem.phi_value(y - s * g) - phi_star)
    return _normalized(lhs, rhs)
