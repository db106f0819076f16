"""Canonical sequences, energies, and convergence certificates.

The analysis never re-evaluates oracles along a trajectory: sequences and
energies read the first-order map stored in the trace, so they see exactly
the quantities the algorithm consumed. All operations are pure functions of
an immutable trace and can run concurrently across k and across traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algorithms import MONOTONE_ALGOS, Trace
from .errors import ParameterError
from .problems import OptimumInfo, Problem, Vector, smooth_part

#: Algorithms covered by the rate and decrease certificates.
CERTIFIABLE_ALGOS = frozenset({"nag", "nag-phase", "m-nag", "fista", "m-fista"})

#: Default certification slack: theorem inequalities are exact in reals, the
#: slack only absorbs rounding accumulated over hundreds of iterations.
ANALYTIC_TOLS = (1e-8, 1e-12)
#: Loosened slack when the optimum comes from a reference run.
REFERENCE_TOLS = (1e-6, 1e-9)


def _record(trace: Trace, k: int):
    if not 0 <= k < len(trace.records):
        raise IndexError(f"k={k} outside trace range 0..{len(trace.records) - 1}")
    return trace.records[k]


def seq_R(trace: Trace, k: int, s: float, r: float) -> Vector:
    """Canonical position sequence (k-1)*sqrt(s)*v_k + r*x_k."""
    rec = _record(trace, k)
    return (k - 1.0) * math.sqrt(s) * rec.v + r * rec.x


def seq_S(trace: Trace, k: int, s: float, r: float) -> Vector:
    """Gradient-corrected sequence R_k - (k+r)*s*m_k, with m_k the stored
    first-order map at y_k."""
    rec = _record(trace, k)
    return seq_R(trace, k, s, r) - (k + r) * s * rec.first_order_at_y


def seq_T(trace: Trace, k: int, s: float, r: float) -> Vector:
    """Velocity-free form (k+r)*y_k - k*x_k - (k+r)*s*m_k; identical to S_k
    whenever the position-velocity relation holds."""
    rec = _record(trace, k)
    return (k + r) * rec.y - k * rec.x - (k + r) * s * rec.first_order_at_y


@dataclass(frozen=True)
class SequenceSample:
    """One canonical-sequence vector tagged with its kind and index."""

    kind: str
    k: int
    value: Vector


def sample_sequence(trace: Trace, kind: str, k: int, s: float, r: float) -> SequenceSample:
    fns = {"R": seq_R, "S": seq_S, "T": seq_T}
    if kind not in fns:
        raise ParameterError(f"unknown sequence kind {kind!r}; expected R, S or T")
    return SequenceSample(kind=kind, k=k, value=fns[kind](trace, k, s, r))


def tau(k: int, r: float) -> float:
    """Dynamic coefficient (k+1)(k+r+1) of the potential energy."""
    return (k + 1.0) * (k + r + 1.0)


@dataclass(frozen=True)
class EnergyBreakdown:
    k: int
    tau: float
    potential: float
    mixed: float

    @property
    def total(self) -> float:
        return self.potential + self.mixed


def energy(
    trace: Trace,
    k: int,
    s: float,
    r: float,
    optimum: OptimumInfo,
    form: str,
) -> EnergyBreakdown:
    """Lyapunov energy E(k) = s*tau(k)*(f(x_{k+1}) - f*) + mixed(k).

    ``form`` selects the mixed term: "velocity" uses
    0.5*||(k-1)*sqrt(s)*v_k + r*(x_k - x*) - s*(k+r)*m_k||^2 and applies to
    schemes that maintain the position-velocity relation; "xy" uses
    0.5*||k*(y_k - x_k) + r*(y_k - x*) - (k+r)*s*m_k||^2 and is the only
    form defined for the monotone schemes (their velocity is not part of
    the analysis).
    """
    if optimum is None:
        raise ParameterError("energy evaluation requires an optimum")
    if form not in ("velocity", "xy"):
        raise ParameterError(f"unknown energy form {form!r}")
    if form == "velocity" and trace.params.algo in MONOTONE_ALGOS:
        raise ParameterError(
            f"velocity-form energy undefined for {trace.params.algo}; use form='xy'"
        )
    rec = _record(trace, k)
    nxt = _record(trace, k + 1)
    x_star = optimum.x_star
    pot = s * tau(k, r) * (nxt.f_or_phi_at_x - optimum.f_star)
    m = rec.first_order_at_y
    if form == "velocity":
        vec = (k - 1.0) * math.sqrt(s) * rec.v + r * (rec.x - x_star) - s * (k + r) * m
    else:
        vec = k * (rec.y - rec.x) + r * (rec.y - x_star) - (k + r) * s * m
    mixed = 0.5 * float(np.dot(vec, vec))
    return EnergyBreakdown(k=k, tau=tau(k, r), potential=pot, mixed=mixed)


def threshold_K(r: float) -> int:
    """Iteration threshold max{0, ceil((3r^2 - 4r - 12)/8)}.

    The raw formula is generally fractional; taking the ceiling before the
    max only shrinks the certified range, the conservative direction.
    """
    if r < 2.0:
        raise ParameterError(f"momentum parameter r must be >= 2, got {r}")
    return max(0, math.ceil((3.0 * r * r - 4.0 * r - 12.0) / 8.0))


def rate_factor(mu: float, s: float, lipschitz: float) -> float:
    """Per-step contraction base 1 + (1 - L*s) * mu*s/4 of the rate bound."""
    return 1.0 + (1.0 - lipschitz * s) * mu * s / 4.0


def theorem_bound(
    k: int,
    r: float,
    s: float,
    mu: float,
    lipschitz: float,
    f1_gap: float,
    x1_dist_sq: float,
) -> float:
    """Certified optimality-gap bound at iteration k >= 1:

    [(r+1)*(f(x_1) - f*) + r^2*L*||x_1 - x*||^2]
        / [k*(k+r)*(1 + (1 - L*s)*mu*s/4)^k]

    The numerator is built from the first iterate x_1, not the start point.
    """
    if k < 1:
        raise ParameterError("the rate bound starts at k >= 1")
    numerator = (r + 1.0) * f1_gap + r * r * lipschitz * x1_dist_sq
    denominator = k * (k + r) * rate_factor(mu, s, lipschitz) ** k
    return numerator / denominator


@dataclass(frozen=True)
class CertRow:
    k: int
    f_gap: float
    bound: float | None
    bound_ok: bool
    energy: float | None
    decrease_margin: float | None
    decrease_ok: bool


@dataclass(frozen=True)
class Certificate:
    """Per-iteration theorem checks along one trace.

    ``overall_pass`` conjoins the rate-bound flags for k >= max{1, K} and
    the energy-decrease flags for k >= K, each over the range the trace
    covers; flags outside those ranges are vacuously true.
    """

    threshold_K: int
    rows: tuple[CertRow, ...]
    overall_pass: bool


def resolve_form(algo: str, form: str = "auto") -> str:
    if form == "auto":
        return "xy" if algo in MONOTONE_ALGOS else "velocity"
    return form


def certify(
    trace: Trace,
    problem: Problem,
    optimum: OptimumInfo,
    form: str = "auto",
    rel_tol: float | None = None,
    abs_tol: float | None = None,
) -> Certificate:
    """Check the rate bound and per-step energy decrease along a trace.

    Row k carries the optimality gap f(x_k) - f*, the theorem bound (from
    k = 1), the energy E(k), and the raw decrease margin
    E(k)/(1 + mu*s*(1-L*s)/4) - E(k+1). Flags apply relative plus absolute
    slack; defaults are (1e-8, 1e-12) for analytic optima and (1e-6, 1e-9)
    for reference-run optima, whose f* carries solver error.
    """
    algo = trace.params.algo
    if algo not in CERTIFIABLE_ALGOS:
        raise ParameterError(f"no certificate available for algorithm {algo!r}")
    if optimum is None:
        raise ParameterError("certification requires an optimum")
    oracle = smooth_part(problem)
    s = trace.params.step
    r = trace.params.momentum_r
    mu, lipschitz = oracle.mu, oracle.lipschitz
    form = resolve_form(algo, form)
    defaults = REFERENCE_TOLS if optimum.source == "reference-run" else ANALYTIC_TOLS
    rel = defaults[0] if rel_tol is None else rel_tol
    absolute = defaults[1] if abs_tol is None else abs_tol

    big_k = threshold_K(r)
    n = trace.iters
    if n < max(1, big_k) + 1:
        raise ParameterError(
            f"trace too short to certify: need at least {max(1, big_k) + 2} records, "
            f"got {n + 1}"
        )

    f_star = optimum.f_star
    f1_gap = trace.records[1].f_or_phi_at_x - f_star
    diff1 = trace.records[1].x - optimum.x_star
    x1_dist_sq = float(np.dot(diff1, diff1))
    shrink = 1.0 + mu * s * (1.0 - lipschitz * s) / 4.0

    energies = [energy(trace, k, s, r, optimum, form).total for k in range(n)]

    rows = []
    overall = True
    for k in range(n + 1):
        f_gap = trace.records[k].f_or_phi_at_x - f_star
        bound = None
        bound_ok = True
        if k >= 1:
            bound = theorem_bound(k, r, s, mu, lipschitz, f1_gap, x1_dist_sq)
            if k >= max(1, big_k):
                bound_ok = f_gap <= bound * (1.0 + rel) + absolute
        e_k = energies[k] if k < n else None
        margin = None
        decrease_ok = True
        if k < n - 1:
            margin = energies[k] / shrink - energies[k + 1]
            if k >= big_k:
                decrease_ok = energies[k + 1] <= (energies[k] / shrink) * (1.0 + rel) + absolute
        overall = overall and bound_ok and decrease_ok
        rows.append(
            CertRow(
                k=k,
                f_gap=f_gap,
                bound=bound,
                bound_ok=bound_ok,
                energy=e_k,
                decrease_margin=margin,
                decrease_ok=decrease_ok,
            )
        )
    return Certificate(threshold_K=big_k, rows=tuple(rows), overall_pass=overall)


def first_failing_k(certificate: Certificate) -> int | None:
    for row in certificate.rows:
        if not (row.bound_ok and row.decrease_ok):
            return row.k
    return None


def certificate_to_dict(certificate: Certificate) -> dict:
    """Serializable form: {"K", "pass", "rows": [{k, gap, bound, energy,
    decrease_margin}]} with nulls where a quantity is undefined."""
    return {
        "K": certificate.threshold_K,
        "pass": certificate.overall_pass,
        "rows": [
            {
                "k": row.k,
                "gap": row.f_gap,
                "bound": row.bound,
                "energy": row.energy,
                "decrease_margin": row.decrease_margin,
            }
            for row in certificate.rows
        ],
    }
