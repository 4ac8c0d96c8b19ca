"""Utility evaluation: veil-of-ignorance expected utility, ex-post payoffs,
and the dictator transfer problem.
"""

from __future__ import annotations

import numpy as np

from .beliefs import BeliefDistribution
from .curves import PayoffCurve
from .errors import ValidationError
from .numerics import scan_then_golden
from .params import PreferenceParams, Strategy, validate_endowment


def _check_strategy(s: Strategy, w: float) -> None:
    if not (0.0 <= s.x1 <= w and 0.0 <= s.x2 <= w):
        raise ValidationError(f"strategy {s} outside [0, {w}]^2")


def social_expost(p: PreferenceParams, curve: PayoffCurve, own_money: float, other_money: float) -> float:
    """Ex-post social utility of one realized split, universalization excluded."""
    v_own = curve.value(own_money)
    v_oth = curve.value(other_money)
    return (
        (1.0 - p.kappa) * v_own
        - p.alpha * max(v_oth - v_own, 0.0)
        - p.beta * max(v_own - v_oth, 0.0)
    )


def eval_expected_utility(
    p: PreferenceParams,
    curve: PayoffCurve,
    thresholds: BeliefDistribution,
    offers: BeliefDistribution,
    s: Strategy,
    w: float,
) -> float:
    """Expected utility of strategy s under role uncertainty.

    Three-term sum: proposer term (1-kappa) v(w-x1) F(x1); responder
    integral of (1-kappa+alpha) v(y) - alpha v(w-y) over offers y in
    [x2, w/2]; universalization term kappa [v(w-x1)+v(x1)] iff x1 >= x2
    (inclusive indicator, no smoothing).
    """
    validate_endowment(w)
    _check_strategy(s, w)
    if thresholds.w != w or offers.w != w:
        raise ValidationError("belief endowment does not match w")
    ka = p.kappa
    proposer = (1.0 - ka) * curve.value(w - s.x1) * thresholds.cdf(s.x1)
    coef = 1.0 - ka + p.alpha
    i_own = offers.tail_expectation(curve.value, s.x2)
    i_oth = offers.tail_expectation(lambda y: curve.value(w - y), s.x2)
    responder = coef * i_own - p.alpha * i_oth
    universal = ka * (curve.value(w - s.x1) + curve.value(s.x1)) if s.x1 >= s.x2 else 0.0
    return proposer + responder + universal


def eval_expost_symmetric(
    p: PreferenceParams,
    curve: PayoffCurve,
    own: Strategy,
    other: Strategy,
    w: float,
) -> float:
    """Indicator-based ex-post utility of `own` against `other`.

    Sum over both roles plus the self-matched universalization term;
    each role's inequality branch depends on which side of w/2 the
    realized offer falls (the two displayed branch forms agree with
    this on symmetric profiles).
    """
    validate_endowment(w)
    _check_strategy(own, w)
    _check_strategy(other, w)
    total = 0.0
    if own.x1 >= other.x2:  # own proposal accepted
        total += social_expost(p, curve, w - own.x1, own.x1)
    if other.x1 >= own.x2:  # own threshold accepts the incoming offer
        total += social_expost(p, curve, other.x1, w - other.x1)
    if own.x1 >= own.x2:
        total += p.kappa * (curve.value(w - own.x1) + curve.value(own.x1))
    return total


class TailIntegrals:
    """Precomputed tail integrals of v(y) and v(w-y) under an offer distribution.

    own(x) = integral of v(y) dF(y) over [x, w/2]; other(x) likewise for
    v(w-y). Continuous beliefs use a dense cumulative-trapezoid table
    (adaptive quadrature in tail_expectation stays the reference route);
    empirical beliefs use exact suffix sums over the atoms; a degenerate
    always-accept belief is a point mass at zero.
    """

    def __init__(self, offers: BeliefDistribution, curve: PayoffCurve, w: float, n_fine: int = 100_001):
        validate_endowment(w)
        if offers.w != w:
            raise ValidationError("belief endowment does not match w")
        self.w = w
        half = 0.5 * w
        if offers.kind == "empirical":
            pts = np.sort(np.asarray(offers.sample, dtype=float))
            n = pts.size
            self._pts = pts
            self._sfx_own = np.concatenate([np.cumsum(curve.value(pts)[::-1])[::-1] / n, [0.0]])
            self._sfx_oth = np.concatenate([np.cumsum(curve.value(w - pts)[::-1])[::-1] / n, [0.0]])
            self._mode = "atoms"
        elif offers.is_degenerate:
            self._mass_own = float(curve.value(0.0))
            self._mass_oth = float(curve.value(w))
            self._mode = "point"
        else:
            from scipy.integrate import cumulative_trapezoid

            grid = np.linspace(0.0, half, n_fine)
            dens = offers.pdf(grid)
            cum_own = cumulative_trapezoid(curve.value(grid) * dens, grid, initial=0.0)
            cum_oth = cumulative_trapezoid(curve.value(w - grid) * dens, grid, initial=0.0)
            self._grid = grid
            self._tail_own = cum_own[-1] - cum_own
            self._tail_oth = cum_oth[-1] - cum_oth
            self._mode = "table"

    def _eval(self, x, own: bool):
        xa = np.asarray(x, dtype=float)
        if self._mode == "atoms":
            sfx = self._sfx_own if own else self._sfx_oth
            out = sfx[np.searchsorted(self._pts, xa, side="left")]
        elif self._mode == "point":
            mass = self._mass_own if own else self._mass_oth
            out = np.where(xa <= 0.0, mass, 0.0)
        else:
            tail = self._tail_own if own else self._tail_oth
            out = np.interp(xa, self._grid, tail, left=tail[0], right=0.0)
        return float(out) if np.isscalar(x) else out

    def own(self, x):
        return self._eval(x, True)

    def other(self, x):
        return self._eval(x, False)

    def responder_term(self, p: PreferenceParams, x2):
        """Responder-role expected utility at acceptance threshold x2."""
        return (1.0 - p.kappa + p.alpha) * self.own(x2) - p.alpha * self.other(x2)


def dg_objective(p: PreferenceParams, curve: PayoffCurve, x: float, w: float) -> float:
    """Dictator objective at transfer x (half-weight on each role's term)."""
    v_keep = curve.value(w - x)
    v_give = curve.value(x)
    return 0.5 * (
        (1.0 - p.kappa) * v_keep
        - p.alpha * max(v_give - v_keep, 0.0)
        - p.beta * max(v_keep - v_give, 0.0)
        + p.kappa * (v_keep + v_give)
    )


def dg_transfer(p: PreferenceParams, curve: PayoffCurve, w: float, n_scan: int = 200) -> float:
    """Argmax of the dictator objective over [0, w].

    The objective is kinked at w/2, so each branch is searched separately
    (coarse scan + golden section) and the better branch wins.
    """
    validate_endowment(w)
    half = 0.5 * w
    f = lambda x: dg_objective(p, curve, x, w)
    lo_best = scan_then_golden(f, 0.0, half, n_scan=n_scan)
    hi_best = scan_then_golden(f, half, w, n_scan=n_scan)
    best = lo_best if f(lo_best) >= f(hi_best) else hi_best
    return min(max(best, 0.0), w)


def dg_transfer_shiftedlog_interior(p: PreferenceParams, w: float) -> float:
    """Closed-form ShiftedLog transfer for an interior advantageous-region optimum.

    max(0, ((beta+kappa)(w+1) - (1-beta)) / (1+kappa)), valid when the
    advantageous branch (x <= w/2) governs; callers clamp to [0, w/2].
    """
    raw = ((p.beta + p.kappa) * (w + 1.0) - (1.0 - p.beta)) / (1.0 + p.kappa)
    return max(0.0, raw)
