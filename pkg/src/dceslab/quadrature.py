"""Adaptive quadrature over finite and semi-infinite domains.

A 7/15-point Gauss-Kronrod pair drives greedy bisection of the panel
with the worst embedded-rule discrepancy.  Integrands are evaluated on
node arrays (one vectorized call per panel) and may be vector-valued:
``f(x) -> (n_components, len(x))``, in which case every component is
integrated on one shared panel tree.  That batch mode is what makes the
nested emission integrals affordable; the public operations below expose
the plain scalar contract.

Semi-infinite integration follows an explicit cutoff policy: a hard
upper limit, or geometrically expanding windows accumulated until the
tail stops contributing, with detection of integrands that keep growing
(the expected outcome for local-model wavenumber integrals).

Accumulation order is fixed by construction, so results are
bit-reproducible for a given spec.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "HardCutoff",
    "AdaptiveConverged",
    "QuadratureSpec",
    "IntegralResult",
    "integrate_finite",
    "integrate_semi_infinite",
    "convergence_scan",
    "policy_to_jsonable",
]

# 15-point Kronrod nodes on [-1, 1]; odd indices are the embedded 7-point
# Gauss nodes.
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_GAUSS_IDX = np.arange(1, 15, 2)
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])

# Windows whose |contribution| has not decreased this many times in a row
# mark the integral as divergent.
_DIVERGENCE_RUN = 5


@dataclass(frozen=True)
class HardCutoff:
    """Truncate the semi-infinite axis at a fixed upper limit."""

    q_c: float

    def __post_init__(self):
        if not self.q_c > 0:
            raise ValueError("q_c must be > 0")


@dataclass(frozen=True)
class AdaptiveConverged:
    """Expand the upper limit geometrically until the tail is negligible.

    The first window ends at ``a + initial_window``; every later window
    multiplies the upper limit by ``window_factor``.  Convergence requires
    two consecutive windows each contributing less than ``rel_change`` of
    the running total.  Callers integrating kernels with interior
    structure should set ``initial_window`` beyond that structure so the
    rising flank is not mistaken for divergence.
    """

    window_factor: float = 2.0
    rel_change: float = 1e-3
    initial_window: float = 1.0

    def __post_init__(self):
        if not self.window_factor > 1:
            raise ValueError("window_factor must be > 1")
        if not self.rel_change > 0:
            raise ValueError("rel_change must be > 0")
        if not self.initial_window > 0:
            raise ValueError("initial_window must be > 0")


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-4
    abs_tol: float = 0.0
    max_subdivisions: int = 200
    cutoff_policy: HardCutoff | AdaptiveConverged = field(
        default_factory=AdaptiveConverged
    )

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be >= 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool
    effective_upper_limit: float


class _BatchResult:
    """Vector-valued integral: per-component values and error estimates."""

    __slots__ = ("values", "errors", "evaluations", "converged", "upper")

    def __init__(self, values, errors, evaluations, converged, upper):
        self.values = values
        self.errors = errors
        self.evaluations = evaluations
        self.converged = converged
        self.upper = upper


def _panel_eval(f, lo, hi):
    """Kronrod/Gauss pair on one panel; returns (k, err, n_eval)."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    y = np.atleast_2d(np.asarray(f(mid + half * _XK), dtype=float))
    if y.shape[-1] != _XK.size:
        raise ValueError("integrand must return one value per node")
    k = half * (y @ _WK)
    g = half * (y[:, _GAUSS_IDX] @ _WG)
    return k, np.abs(k - g), y.shape[0] * _XK.size


def _within_tolerance(errors, totals, spec):
    """Per-component acceptance; negligible components ride along."""
    scale = np.max(np.abs(totals), initial=0.0)
    limit = np.maximum(
        spec.rel_tol * np.abs(totals),
        max(spec.abs_tol, 0.01 * spec.rel_tol * scale),
    )
    return errors <= limit


def _adapt_finite(f, a, b, spec, breakpoints=(), min_panels=8):
    """Adaptive batch integration of f over [a, b].

    Panels start from the interior breakpoints, refined to at least
    ``min_panels`` equal parts per region (a narrow interior feature
    that no node samples would otherwise look converged); afterwards the
    panel with the largest error is bisected until every component meets
    max(rel_tol * |value|, abs_tol) or the subdivision budget is spent.
    """
    seeds = [a]
    for x in sorted(set(float(p) for p in breakpoints)):
        if a < x < b:
            seeds.append(x)
    seeds.append(b)
    per_region = max(1, -(-min_panels // (len(seeds) - 1)))
    edges = []
    for lo, hi in zip(seeds[:-1], seeds[1:]):
        edges.extend(np.linspace(lo, hi, per_region + 1)[:-1])
    edges.append(b)

    lows: list[float] = []
    highs: list[float] = []
    vals: list[np.ndarray] = []
    errs: list[np.ndarray] = []
    evaluations = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        k, e, n = _panel_eval(f, lo, hi)
        lows.append(lo)
        highs.append(hi)
        vals.append(k)
        errs.append(e)
        evaluations += n

    splits = 0
    while splits < spec.max_subdivisions:
        totals = np.sum(vals, axis=0)
        total_err = np.sum(errs, axis=0)
        if np.all(_within_tolerance(total_err, totals, spec)):
            break
        worst = int(np.argmax([np.max(e) for e in errs]))
        lo, hi = lows[worst], highs[worst]
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # interval at floating-point resolution
        k1, e1, n1 = _panel_eval(f, lo, mid)
        k2, e2, n2 = _panel_eval(f, mid, hi)
        evaluations += n1 + n2
        lows[worst], highs[worst], vals[worst], errs[worst] = lo, mid, k1, e1
        lows.append(mid)
        highs.append(hi)
        vals.append(k2)
        errs.append(e2)
        splits += 1

    totals = np.sum(vals, axis=0)
    total_err = np.sum(errs, axis=0)
    converged = bool(np.all(_within_tolerance(total_err, totals, spec)))
    return _BatchResult(totals, total_err, evaluations, converged, float(b))


def _adapt_semi_infinite(f, a, spec, breakpoints=()):
    """Batch semi-infinite integration under spec.cutoff_policy."""
    policy = spec.cutoff_policy
    if isinstance(policy, HardCutoff):
        if policy.q_c <= a:
            raise ValueError("hard cutoff must exceed the lower limit")
        return _adapt_finite(f, a, policy.q_c, spec, breakpoints), False

    lo = float(a)
    hi = lo + policy.initial_window
    totals = None
    total_err = None
    evaluations = 0
    all_panels_ok = True
    contributions: list[float] = []
    small_run = 0
    converged = False
    divergent = False
    windows = 0
    while windows < spec.max_subdivisions:
        # structure lives in the first window; tails stay cheap
        part = _adapt_finite(
            f, lo, hi, spec, breakpoints, min_panels=8 if windows == 0 else 2
        )
        evaluations += part.evaluations
        all_panels_ok = all_panels_ok and part.converged
        if totals is None:
            totals = part.values.copy()
            total_err = part.errors.copy()
        else:
            totals += part.values
            total_err += part.errors
        contrib = float(np.max(np.abs(part.values)))
        contributions.append(contrib)
        scale = float(np.max(np.abs(totals)))
        if contrib <= max(policy.rel_change * scale, spec.abs_tol):
            small_run += 1
            if small_run >= 2:
                converged = True
                break
        else:
            small_run = 0
        tail = contributions[-_DIVERGENCE_RUN:]
        if len(tail) == _DIVERGENCE_RUN and all(
            tail[i + 1] >= tail[i] for i in range(len(tail) - 1)
        ):
            divergent = True
            break
        lo, hi = hi, hi * policy.window_factor
        windows += 1

    result = _BatchResult(
        totals,
        total_err,
        evaluations,
        converged and all_panels_ok,
        float(hi),
    )
    return result, divergent


def _scalar_wrap(f):
    def batched(x):
        y = np.asarray(f(x), dtype=float)
        return np.broadcast_to(y, np.shape(x)).reshape(1, -1)

    return batched


def integrate_finite(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec,
    breakpoints: Sequence[float] = (),
) -> IntegralResult:
    """Integrate a real integrand over [a, b].

    ``f`` is called with a numpy array of abscissae and must return the
    matching array of values.  ``breakpoints`` seed initial panel edges
    (sharp peaks narrower than a panel are otherwise easy to miss).
    """
    if not a < b:
        raise ValueError("require a < b")
    res = _adapt_finite(_scalar_wrap(f), a, b, spec, breakpoints)
    return IntegralResult(
        value=float(res.values[0]),
        error_estimate=float(res.errors[0]),
        evaluations=res.evaluations,
        converged=res.converged,
        effective_upper_limit=float(b),
    )


def integrate_semi_infinite(
    f: Callable,
    a: float,
    spec: QuadratureSpec,
    breakpoints: Sequence[float] = (),
) -> IntegralResult:
    """Integrate f over [a, inf) under the spec's cutoff policy.

    HardCutoff integrates [a, q_c] and reports q_c as the effective
    limit.  AdaptiveConverged expands windows until the tail contributes
    less than ``rel_change`` of the total twice in a row; integrands
    whose window contributions keep growing are reported with
    ``converged=False`` (divergence) instead of being silently truncated.
    """
    if a < 0:
        raise ValueError("require a >= 0")
    res, _ = _adapt_semi_infinite(_scalar_wrap(f), a, spec, breakpoints)
    return IntegralResult(
        value=float(res.values[0]),
        error_estimate=float(res.errors[0]),
        evaluations=res.evaluations,
        converged=res.converged,
        effective_upper_limit=res.upper,
    )


def policy_to_jsonable(policy) -> dict:
    """Cutoff policy as a plain dict for sidecar/config serialization."""
    if isinstance(policy, HardCutoff):
        return {"policy": "hard", "q_c": policy.q_c}
    if isinstance(policy, AdaptiveConverged):
        return {
            "policy": "adaptive",
            "window_factor": policy.window_factor,
            "rel_change": policy.rel_change,
        }
    raise TypeError(f"unknown cutoff policy {policy!r}")


def convergence_scan(
    f: Callable,
    cutoffs: Sequence[float],
    spec: QuadratureSpec,
    a: float = 0.0,
) -> list[tuple[float, float]]:
    """Integral value of f on [a, q_c] for each cutoff, as (q_c, value).

    Cutoffs must be strictly increasing; segments between consecutive
    cutoffs are integrated once and accumulated.
    """
    cutoffs = [float(c) for c in cutoffs]
    if any(c2 <= c1 for c1, c2 in zip(cutoffs, cutoffs[1:])):
        raise ValueError("cutoffs must be strictly increasing")
    if cutoffs and cutoffs[0] <= a:
        raise ValueError("cutoffs must exceed the lower limit")
    table: list[tuple[float, float]] = []
    running = 0.0
    lo = a
    for q_c in cutoffs:
        running += integrate_finite(f, lo, q_c, spec).value
        table.append((q_c, running))
        lo = q_c
    return table
