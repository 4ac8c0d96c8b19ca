"""Symmetric Nash-set analysis of the complete-information ultimatum game.

Closed-form bounds (tau, the acceptance threshold, the offer upper bound),
a numeric upper endpoint rho, and a grid best-response verifier that serves
as ground truth for the equilibrium segment.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .beliefs import BeliefDistribution  # noqa: F401  (re-exported context type)
from .curves import PayoffCurve
from .errors import ValidationError
from .numerics import bisect_boundary
from .params import PreferenceParams, Strategy, validate_endowment
from .solver import constrained_threshold
from .utility import eval_expost_symmetric

SET_KINDS = ("SymmetricSegment", "SegmentPlusAsymmetricStub")

_DEFAULT_GRID_DIVISOR = 400  # deviation lattice step = w / 400
_NASH_TOL = 1e-9


@dataclass(frozen=True)
class NashCheck:
    """Verifier verdict for one symmetric profile."""

    is_nash: bool
    gain: float
    best_deviation: Strategy | None


@dataclass(frozen=True)
class NashBounds:
    """Equilibrium-set summary: closed-form bounds plus the verified segment."""

    tau: float
    x2_lower: float
    x1_upper: float
    rho: float
    set_kind: str
    segment: tuple[float, float] | None
    formula_segment: tuple[float, float] | None
    asymmetric_stub: tuple[float, tuple[float, float]] | None
    flags: tuple[str, ...]


def _check_step(grid_step: float | None, w: float) -> float:
    if grid_step is None:
        return w / _DEFAULT_GRID_DIVISOR
    if not grid_step > 0.0:
        raise ValidationError("grid_step must be positive")
    return float(grid_step)


def tau_of_kappa(kappa: float, curve: PayoffCurve, w: float) -> float:
    """Smallest x where keeping less stops paying: min{x: v'(w-x) >= kappa v'(x)}.

    The left side rises and the right side falls in x, so the inequality
    region is an upper interval and bisection on the flip point applies.
    """
    validate_endowment(w)
    if not 0.0 <= kappa <= 1.0:
        raise ValidationError("kappa must lie in [0, 1]")
    if kappa == 0.0:
        return 0.0  # v'(w - x) >= 0 holds at x = 0; avoids 0 * inf at a v'(0) pole
    pred = lambda x: curve.derivative(w - x) >= kappa * curve.derivative(x)
    if pred(0.0):
        return 0.0
    # pred(w/2) reduces to (1 - kappa) v'(w/2) >= 0, always true
    return bisect_boundary(pred, 0.0, 0.5 * w, x_tol=1e-12)


def x2_lower_of(kappa: float, alpha: float, curve: PayoffCurve, w: float) -> float:
    """Lowest acceptable offer; the solver threshold, with the kappa = 1 limit.

    At kappa = 1 the indifference equation degenerates to v(x) = v(w-x),
    whose minimal solution set gives w/2 for alpha > 0 and 0 otherwise.
    """
    if kappa == 1.0:
        return 0.5 * w if alpha > 0.0 else 0.0
    return constrained_threshold(kappa, alpha, curve, w)


def x1_upper_of(kappa: float, alpha: float, curve: PayoffCurve, w: float) -> float:
    """Largest sustainable offer: max{x: (1-kappa+alpha) v(w-x) >= v(x)}."""
    validate_endowment(w)
    coef = 1.0 - kappa + alpha
    pred = lambda x: coef * curve.value(w - x) >= curve.value(x)
    if not pred(0.0):
        return 0.0
    if pred(w):
        return w
    # the inequality holds on a lower interval; bisect its right edge
    return bisect_boundary(lambda x: not pred(x), 0.0, w, x_tol=1e-12)


def verify_nash(
    profile: Strategy,
    kappa: float,
    alpha: float,
    curve: PayoffCurve,
    w: float,
    grid_step: float | None = None,
    tol: float = _NASH_TOL,
) -> NashCheck:
    """Best-response check of a symmetric profile on the deviation lattice.

    Both players hold `profile`; a deviation is any lattice (x1, x2) pair.
    Passes iff no deviation raises the ex-post utility by more than tol.
    """
    validate_endowment(w)
    step = _check_step(grid_step, w)
    p = PreferenceParams(alpha=alpha, kappa=kappa)
    n = int(round(w / step))
    axis = np.linspace(0.0, w, n + 1)

    v_keep = curve.value(w - axis)
    v_give = curve.value(axis)
    pa = (
        (1.0 - kappa) * v_keep
        - alpha * np.maximum(v_give - v_keep, 0.0)
        - p.beta * np.maximum(v_keep - v_give, 0.0)
    )
    c = kappa * (v_keep + v_give)
    vo_own = curve.value(profile.x1)
    vo_oth = curve.value(w - profile.x1)
    racc = (
        (1.0 - kappa) * vo_own
        - alpha * max(vo_oth - vo_own, 0.0)
        - p.beta * max(vo_own - vo_oth, 0.0)
    )

    u_best, i, j = kernels.deviation_best(pa, racc, c, axis, axis, profile.x1, profile.x2)
    current = eval_expost_symmetric(p, curve, profile, profile, w)
    gain = u_best - current
    if gain <= tol:
        return NashCheck(True, gain, None)
    return NashCheck(False, gain, Strategy(float(axis[i]), float(axis[j])))


def rho_of_kappa(
    kappa: float, curve: PayoffCurve, w: float, grid_step: float | None = None
) -> float:
    """Upper end of the symmetric branch at alpha = 0, by verifier scan.

    Largest x on the [w/2, w] grid whose profile (x, x) survives the
    best-response check. Numeric surrogate: no closed form is available.
    Returns nan (with a warning) if nothing on the grid passes.
    """
    validate_endowment(w)
    step = _check_step(grid_step, w)
    half = 0.5 * w
    n = int(round((w - half) / step))
    for x in np.linspace(w, half, n + 1):
        if verify_nash(Strategy(float(x), float(x)), kappa, 0.0, curve, w, step).is_nash:
            return float(x)
    warnings.warn("no symmetric profile on [w/2, w] passes the verifier", stacklevel=2)
    return math.nan


def nash_set(
    kappa: float,
    alpha: float,
    curve: PayoffCurve,
    w: float,
    grid_step: float | None = None,
) -> NashBounds:
    """Symmetric equilibrium set: verified diagonal segment plus bounds.

    The segment is the maximal contiguous diagonal run passing verify_nash;
    the closed-form composition [max(x2_lower, tau), min(x1_upper, rho)] is
    reported alongside as formula_segment (the offer upper bound is loose in
    concave configurations, so the verifier run is authoritative). When
    tau > x2_lower the set additionally carries the asymmetric stub
    {x1 = tau, x2 in [0, tau]}, confirmed by probing both stub directions.
    """
    validate_endowment(w)
    if not 0.0 < kappa <= 1.0:
        raise ValidationError("nash_set needs kappa in (0, 1]")
    if alpha < 0.0:
        raise ValidationError("nash_set needs alpha >= 0")
    step = _check_step(grid_step, w)
    flags: list[str] = []

    tau = tau_of_kappa(kappa, curve, w)
    x2lo = x2_lower_of(kappa, alpha, curve, w)
    x1hi = x1_upper_of(kappa, alpha, curve, w)
    rho = rho_of_kappa(kappa, curve, w, step)

    lo_f = max(x2lo, tau)
    hi_f = min(x1hi, rho) if not math.isnan(rho) else x1hi
    formula_segment = (lo_f, hi_f) if lo_f <= hi_f else None

    n = int(round(w / step))
    axis = np.linspace(0.0, w, n + 1)
    passing = np.array(
        [
            verify_nash(Strategy(float(x), float(x)), kappa, alpha, curve, w, step).is_nash
            for x in axis
        ]
    )
    segment = None
    if passing.any():
        # maximal contiguous run of passing diagonal points
        best_len, best_lo, run_lo = 0, 0, None
        for idx, ok in enumerate(passing):
            if ok and run_lo is None:
                run_lo = idx
            if (not ok or idx == n) and run_lo is not None:
                run_hi = idx if ok else idx - 1
                if run_hi - run_lo + 1 > best_len:
                    best_len, best_lo = run_hi - run_lo + 1, run_lo
                run_lo = None
        segment = (float(axis[best_lo]), float(axis[best_lo + best_len - 1]))
    else:
        flags.append("no symmetric equilibrium on grid")

    stub = None
    set_kind = SET_KINDS[0]
    if tau > x2lo + 1e-12:
        below = verify_nash(Strategy(tau, 0.5 * tau), kappa, alpha, curve, w, step).is_nash
        below &= verify_nash(Strategy(tau, 0.0), kappa, alpha, curve, w, step).is_nash
        above = verify_nash(
            Strategy(tau, min(tau + 2.0 * step, w)), kappa, alpha, curve, w, step
        ).is_nash
        if below:
            stub = (tau, (0.0, tau))
            set_kind = SET_KINDS[1]
            flags.append("stub-direction-x2-below")
        if above:
            flags.append("stub-direction-x2-above")

    return NashBounds(
        tau=tau,
        x2_lower=x2lo,
        x1_upper=x1hi,
        rho=rho,
        set_kind=set_kind,
        segment=segment,
        formula_segment=formula_segment,
        asymmetric_stub=stub,
        flags=tuple(flags),
    )
