"""Objective oracles and benchmark problems with known optimum data.

Oracles are pure functions of their input vector and never mutate internal
state after construction, so problem objects can be shared freely across
concurrent runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _core
from .errors import InvalidProblemError

Vector = np.ndarray

#: Desk-scale cap on the problem dimension; keeps exact eigen-solves cheap.
MAX_DIM = 50

#: Length of the proximal-gradient reference run that pins lasso optima.
REFERENCE_ITERS = 1_000_000


@dataclass(frozen=True)
class SmoothOracle:
    """A strongly convex differentiable objective.

    ``mu`` is the strong-convexity modulus and ``lipschitz`` the gradient
    Lipschitz constant; admissible step sizes live in (0, 1/lipschitz).
    """

    dim: int
    value: Callable[[Vector], float]
    gradient: Callable[[Vector], Vector]
    mu: float
    lipschitz: float

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidProblemError("dimension must be positive")
        if not 0.0 < self.mu <= self.lipschitz:
            raise InvalidProblemError(
                f"need 0 < mu <= L, got mu={self.mu}, L={self.lipschitz}"
            )


@dataclass(frozen=True)
class CompositeObjective:
    """Composite objective phi = f + g with a proximable regularizer g.

    ``regularizer_kind`` is "zero" (g identically 0) or "l1"
    (g = l1_weight * ||x||_1).
    """

    smooth: SmoothOracle
    regularizer_kind: str
    l1_weight: float = 0.0

    def __post_init__(self):
        if self.regularizer_kind not in ("zero", "l1"):
            raise InvalidProblemError(
                f"unknown regularizer kind {self.regularizer_kind!r}"
            )
        if self.l1_weight < 0.0:
            raise InvalidProblemError("l1 weight must be nonnegative")
        if self.regularizer_kind == "zero" and self.l1_weight != 0.0:
            raise InvalidProblemError("zero regularizer cannot carry a weight")

    @property
    def dim(self) -> int:
        return self.smooth.dim

    def g_value(self, x: Vector) -> float:
        if self.regularizer_kind == "zero":
            return 0.0
        return float(self.l1_weight * np.sum(np.abs(x)))

    def phi_value(self, x: Vector) -> float:
        return self.smooth.value(x) + self.g_value(x)


@dataclass(frozen=True)
class OptimumInfo:
    """Minimizer data used by certificates.

    ``source`` is "analytic" for closed-form optima and "reference-run" when
    the optimum was pinned numerically; reference runs record their solver
    parameters in ``solver_params``.
    """

    x_star: Vector
    f_star: float
    source: str
    solver_params: dict | None = None


Problem = SmoothOracle | CompositeObjective


def _as_vector(x, dim: int | None = None) -> Vector:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise InvalidProblemError(f"expected a vector, got shape {x.shape}")
    if dim is not None and x.size != dim:
        raise InvalidProblemError(f"dimension mismatch: expected {dim}, got {x.size}")
    return x


def smooth_part(problem: Problem) -> SmoothOracle:
    return problem.smooth if isinstance(problem, CompositeObjective) else problem


def as_composite(oracle: SmoothOracle) -> CompositeObjective:
    """Wrap a smooth oracle as a composite problem with g identically zero."""
    return CompositeObjective(smooth=oracle, regularizer_kind="zero")


def make_quadratic(coefficients) -> tuple[SmoothOracle, OptimumInfo]:
    """Diagonal quadratic f(x) = sum_i c_i x_i^2 with mu = 2 min c, L = 2 max c.

    The minimizer is the origin with value 0, reported as an analytic optimum.
    """
    c = _as_vector(coefficients)
    if c.size == 0 or c.size > MAX_DIM:
        raise InvalidProblemError(f"need 1..{MAX_DIM} coefficients, got {c.size}")
    if np.any(c <= 0.0):
        raise InvalidProblemError("quadratic coefficients must all be positive")
    c = c.copy()
    c.setflags(write=False)

    def value(x):
        return float(np.dot(c, np.asarray(x, dtype=float) ** 2))

    def gradient(x):
        return 2.0 * c * np.asarray(x, dtype=float)

    oracle = SmoothOracle(
        dim=c.size,
        value=value,
        gradient=gradient,
        mu=2.0 * float(c.min()),
        lipschitz=2.0 * float(c.max()),
    )
    optimum = OptimumInfo(x_star=np.zeros(c.size), f_star=0.0, source="analytic")
    return oracle, optimum


def make_lasso(
    design, target, l1_weight: float, *, ref_iters: int = REFERENCE_ITERS
) -> tuple[CompositeObjective, OptimumInfo]:
    """Lasso problem phi(x) = 0.5*||Ax - b||^2 + l1_weight*||x||_1.

    A must have full column rank so the smooth part is strongly convex; mu
    and L are the extreme eigenvalues of A^T A, computed exactly at desk
    scale. The optimum is pinned by ``ref_iters`` proximal-gradient steps
    with step 0.9/L from the origin and reported as a reference run.
    """
    A = np.asarray(design, dtype=float)
    if A.ndim != 2:
        raise InvalidProblemError("design must be a 2-d matrix")
    m, d = A.shape
    b = _as_vector(target, m)
    if d < 1 or d > MAX_DIM:
        raise InvalidProblemError(f"need 1..{MAX_DIM} columns, got {d}")
    if l1_weight < 0.0:
        raise InvalidProblemError("l1 weight must be nonnegative")
    if ref_iters < 1:
        raise InvalidProblemError("reference run needs at least one iteration")

    AtA = A.T @ A
    Atb = A.T @ b
    eigvals = np.linalg.eigvalsh(AtA)
    mu, lipschitz = float(eigvals[0]), float(eigvals[-1])
    if mu <= 1e-12 * max(lipschitz, 1.0):
        raise InvalidProblemError("design is rank deficient: smooth part not strongly convex")

    def value(x):
        r = A @ np.asarray(x, dtype=float) - b
        return float(0.5 * np.dot(r, r))

    def gradient(x):
        return AtA @ np.asarray(x, dtype=float) - Atb

    oracle = SmoothOracle(dim=d, value=value, gradient=gradient, mu=mu, lipschitz=lipschitz)
    problem = CompositeObjective(smooth=oracle, regularizer_kind="l1", l1_weight=float(l1_weight))

    ref_step = 0.9 / lipschitz
    x_star = _core.ista_solve(AtA, Atb, l1_weight, ref_step, np.zeros(d), ref_iters)
    optimum = OptimumInfo(
        x_star=x_star,
        f_star=problem.phi_value(x_star),
        source="reference-run",
        solver_params={"iterations": int(ref_iters), "step": ref_step},
    )
    return problem, optimum


def oracle_eval(oracle: SmoothOracle, x) -> tuple[float, Vector]:
    """Evaluate (f(x), grad f(x)) with dimension checking."""
    x = _as_vector(x, oracle.dim)
    return oracle.value(x), oracle.gradient(x)


def finite_diff_gradient(oracle: SmoothOracle, x, h: float) -> Vector:
    """Central-difference gradient, the independent check on oracle gradients."""
    if h <= 0.0:
        raise InvalidProblemError("finite-difference step must be positive")
    x = _as_vector(x, oracle.dim)
    out = np.empty(oracle.dim)
    for i in range(oracle.dim):
        e = np.zeros(oracle.dim)
        e[i] = h
        out[i] = (oracle.value(x + e) - oracle.value(x - e)) / (2.0 * h)
    return out


# Runtime numeric checks for the inequalities the convergence analysis rests
# on. Each returns a normalized slack ((satisfied side) - (other side),
# scaled by 1 + |lhs| + |rhs|); a valid oracle keeps it above roughly -1e-9.

def _normalized(satisfied: float, other: float) -> float:
    return (satisfied - other) / (1.0 + abs(satisfied) + abs(other))


def strong_convexity_slack(oracle: SmoothOracle, x, y) -> float:
    """Slack of f(x) >= f(y) + <grad f(y), x - y> + (mu/2)||x - y||^2."""
    x = _as_vector(x, oracle.dim)
    y = _as_vector(y, oracle.dim)
    lhs = oracle.value(x)
    diff = x - y
    rhs = (
        oracle.value(y)
        + float(np.dot(oracle.gradient(y), diff))
        + 0.5 * oracle.mu * float(np.dot(diff, diff))
    )
    return _normalized(lhs, rhs)


def gradient_lipschitz_slack(oracle: SmoothOracle, x, y) -> float:
    """Slack of L||x - y|| >= ||grad f(x) - grad f(y)||."""
    x = _as_vector(x, oracle.dim)
    y = _as_vector(y, oracle.dim)
    lhs = oracle.lipschitz * float(np.linalg.norm(x - y))
    rhs = float(np.linalg.norm(oracle.gradient(x) - oracle.gradient(y)))
    return _normalized(lhs, rhs)


def fundamental_inequality_slack(oracle: SmoothOracle, x, y, s: float) -> float:
    """Slack of the descent inequality behind the potential-energy estimates.

    f(y - s*grad f(y)) - f(x) <= <grad f(y), y - x> - (mu/2)||y - x||^2
                                 - (s - L s^2 / 2)||grad f(y)||^2
    """
    x = _as_vector(x, oracle.dim)
    y = _as_vector(y, oracle.dim)
    g = oracle.gradient(y)
    lhs = oracle.value(y - s * g) - oracle.value(x)
    diff = y - x
    rhs = (
        float(np.dot(g, diff))
        - 0.5 * oracle.mu * float(np.dot(diff, diff))
        - (s - oracle.lipschitz * s * s / 2.0) * float(np.dot(g, g))
    )
    return _normalized(rhs, lhs)


def key_inequality_slack(oracle: SmoothOracle, y, s: float, f_star: float) -> float:
    """Slack of ||grad f(y)||^2 >= 2 mu (f(y - s*grad f(y)) - f*)."""
    y = _as_vector(y, oracle.dim)
    g = oracle.gradient(y)
    lhs = float(np.dot(g, g))
    rhs = 2.0 * oracle.mu * (oracle.value(y - s * g) - f_star)
    return _normalized(lhs, rhs)


def resolve_problem(name: str) -> tuple[Problem, OptimumInfo]:
    """Resolve a problem preset.

    Supported names: "quad2d" (the figure quadratic 5e-3*x1^2 + x2^2),
    "quad-diag:<c1,c2,...>", and "lasso:<path>" where the JSON file holds
    {"A": [[...]], "b": [...], "lambda": x} plus an optional "ref_iters".
    """
    if name == "quad2d":
        return make_quadratic((5e-3, 1.0))
    if name.startswith("quad-diag:"):
        body = name[len("quad-diag:"):]
        try:
            coeffs = [float(tok) for tok in body.split(",") if tok.strip()]
        except ValueError as exc:
            raise InvalidProblemError(f"bad quad-diag coefficients {body!r}") from exc
        if not coeffs:
            raise InvalidProblemError("quad-diag needs at least one coefficient")
        return make_quadratic(coeffs)
    if name.startswith("lasso:"):
        path = name[len("lasso:"):]
        try:
            with open(path) as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise InvalidProblemError(f"cannot read lasso file {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidProblemError(f"bad JSON in lasso file {path!r}: {exc}") from exc
        try:
            design = payload["A"]
            target = payload["b"]
            weight = float(payload["lambda"])
        except (KeyError, TypeError) as exc:
            raise InvalidProblemError(
                f"lasso file {path!r} must define A, b and lambda"
            ) from exc
        ref_iters = int(payload.get("ref_iters", REFERENCE_ITERS))
        return make_lasso(design, target, weight, ref_iters=ref_iters)
    raise InvalidProblemError(f"unknown problem {name!r}")
