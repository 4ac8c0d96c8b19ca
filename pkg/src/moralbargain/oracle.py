"""Independent brute-force oracles for the solver and the dictator problem.

The responder integral here is a midpoint Riemann sum on a refinement of
the argmax grid, deliberately not the adaptive quadrature used by the
analytic path, so the two routes cross-check each other.
"""

from __future__ import annotations

import numpy as np

from .beliefs import BeliefDistribution
from .curves import PayoffCurve
from .errors import IndeterminateError, ValidationError
from .kernels import grid_argmax
from .params import GridSpec, PreferenceParams, Strategy, validate_endowment
from .utility import dg_objective, eval_expected_utility


def _as_step(grid: float | GridSpec) -> float:
    step = grid.step if isinstance(grid, GridSpec) else float(grid)
    if step <= 0.0:
        raise ValidationError("grid_step must be positive")
    return step


def riemann_tail_pair(
    offers: BeliefDistribution,
    curve: PayoffCurve,
    w: float,
    nodes: np.ndarray,
    fine_factor: int = 100,
) -> tuple[np.ndarray, np.ndarray]:
    """Tail integrals I1(t) = int_t^{w/2} v(y) dF, I2(t) = int_t^{w/2} v(w-y) dF
    at each grid node t, via midpoint sums on a fine sub-grid (continuous
    kinds) or exact finite sums (empirical / point-mass kinds).
    """
    half = 0.5 * w
    nodes = np.asarray(nodes, dtype=float)
    if offers.kind == "always_accept":
        own = np.where(nodes <= 0.0, curve.value(0.0), 0.0)
        oth = np.where(nodes <= 0.0, curve.value(w), 0.0)
        return own, oth
    if offers.kind == "empirical":
        pts = np.asarray(offers.sample)
        vals_own = curve.value(pts)
        vals_oth = curve.value(w - pts)
        n = len(pts)
        i1 = np.array([vals_own[pts >= t].sum() / n for t in nodes])
        i2 = np.array([vals_oth[pts >= t].sum() / n for t in nodes])
        return i1, i2

    inside = nodes[nodes < half]
    edges = np.unique(np.concatenate([inside, [half]]))
    i1 = np.zeros_like(nodes)
    i2 = np.zeros_like(nodes)
    acc1 = acc2 = 0.0
    cum: dict[float, tuple[float, float]] = {float(edges[-1]): (0.0, 0.0)}
    for lo, hi in zip(edges[-2::-1], edges[::-1]):
        mids = np.linspace(lo, hi, fine_factor, endpoint=False) + (hi - lo) / (2 * fine_factor)
        wts = offers.pdf(mids) * (hi - lo) / fine_factor
        acc1 += float(np.sum(curve.value(mids) * wts))
        acc2 += float(np.sum(curve.value(w - mids) * wts))
        cum[float(lo)] = (acc1, acc2)
    for idx, t in enumerate(nodes):
        if t >= half:
            i1[idx] = i2[idx] = 0.0
        else:
            i1[idx], i2[idx] = cum[float(t)]
    return i1, i2


def brute_force_ug(
    p: PreferenceParams,
    curve: PayoffCurve,
    thresholds: BeliefDistribution,
    offers: BeliefDistribution,
    w: float,
    grid_step: float | GridSpec,
    fine_factor: int = 100,
) -> tuple[Strategy, float]:
    """Exhaustive grid argmax of the expected utility over [0, w]^2.

    Ties break to the lowest x1, then lowest x2. The grid contains the
    diagonal, so x1 = x2 cells are evaluated explicitly.
    """
    validate_endowment(w)
    step = _as_step(grid_step)
    n = int(round(w / step))
    xs = np.linspace(0.0, w, n + 1)
    ka = p.kappa
    v_keep = curve.value(w - xs)
    a = (1.0 - ka) * v_keep * thresholds.cdf(xs)
    i1, i2 = riemann_tail_pair(offers, curve, w, xs, fine_factor)
    b = (1.0 - ka + p.alpha) * i1 - p.alpha * i2
    c = ka * (v_keep + curve.value(xs))
    i, j, u = grid_argmax(a, b, c, xs, xs)
    return Strategy(float(xs[i]), float(xs[j])), float(u)


def brute_force_symmetric(
    p: PreferenceParams,
    curve: PayoffCurve,
    thresholds: BeliefDistribution,
    offers: BeliefDistribution,
    w: float,
    grid_step: float | GridSpec,
    lo: float = 0.0,
    hi: float | None = None,
    fine_factor: int = 100,
) -> tuple[float, float]:
    """Grid argmax of u(y, y) on the diagonal segment [lo, hi]."""
    validate_endowment(w)
    step = _as_step(grid_step)
    top = 0.5 * w if hi is None else hi
    n = max(1, int(round((top - lo) / step)))
    ys = np.linspace(lo, top, n + 1)
    ka = p.kappa
    v_keep = curve.value(w - ys)
    v_give = curve.value(ys)
    a = (1.0 - ka) * v_keep * thresholds.cdf(ys)
    i1, i2 = riemann_tail_pair(offers, curve, w, ys, fine_factor)
    b = (1.0 - ka + p.alpha) * i1 - p.alpha * i2
    u = a + b + ka * (v_keep + v_give)  # diagonal indicator is always on
    k = int(np.argmax(u))
    return float(ys[k]), float(u[k])


def brute_force_dg(
    p: PreferenceParams, curve: PayoffCurve, w: float, grid_step: float | GridSpec
) -> tuple[float, float]:
    """Exhaustive scan of the dictator objective on [0, w]."""
    validate_endowment(w)
    n = int(round(w / _as_step(grid_step)))
    xs = np.linspace(0.0, w, n + 1)
    vals = np.array([dg_objective(p, curve, float(x), w) for x in xs])
    k = int(np.argmax(vals))
    return float(xs[k]), float(vals[k])


def expected_utility_riemann(
    p: PreferenceParams,
    curve: PayoffCurve,
    thresholds: BeliefDistribution,
    offers: BeliefDistribution,
    s: Strategy,
    w: float,
    fine_step: float = 1e-4,
) -> float:
    """Expected utility with the responder integral done by midpoint Riemann
    sum at `fine_step` resolution; the oracle counterpart of the adaptive
    quadrature evaluation."""
    validate_endowment(w)
    half = 0.5 * w
    ka = p.kappa
    proposer = (1.0 - ka) * curve.value(w - s.x1) * thresholds.cdf(s.x1)
    if s.x2 < half and offers.kind not in ("empirical", "always_accept"):
        m = max(1, int(round((half - s.x2) / fine_step)))
        mids = np.linspace(s.x2, half, m, endpoint=False) + (half - s.x2) / (2 * m)
        wts = offers.pdf(mids) * (half - s.x2) / m
        i1 = float(np.sum(curve.value(mids) * wts))
        i2 = float(np.sum(curve.value(w - mids) * wts))
    else:
        i1 = offers.tail_expectation(curve.value, s.x2)
        i2 = offers.tail_expectation(lambda y: curve.value(w - y), s.x2)
    responder = (1.0 - ka + p.alpha) * i1 - p.alpha * i2
    universal = ka * (curve.value(w - s.x1) + curve.value(s.x1)) if s.x1 >= s.x2 else 0.0
    return proposer + responder + universal


def foc_residual(
    p: PreferenceParams,
    curve: PayoffCurve,
    thresholds: BeliefDistribution,
    offers: BeliefDistribution,
    s: Strategy,
    w: float,
    fd_step: float | None = None,
) -> tuple[float, float]:
    """Central finite-difference gradient minus the analytic first-order
    expressions; returns both components. Undefined on the diagonal."""
    validate_endowment(w)
    h = fd_step if fd_step is not None else 1e-5 * w
    if abs(s.x1 - s.x2) <= 2.0 * h:
        raise IndeterminateError("gradient undefined at the x1 = x2 kink")
    if not (h < s.x1 < w - h and h < s.x2 < w - h):
        raise ValidationError("finite differences need an interior point")

    def u(x1: float, x2: float) -> float:
        return eval_expected_utility(p, curve, thresholds, offers, Strategy(x1, x2), w)

    fd1 = (u(s.x1 + h, s.x2) - u(s.x1 - h, s.x2)) / (2.0 * h)
    fd2 = (u(s.x1, s.x2 + h) - u(s.x1, s.x2 - h)) / (2.0 * h)
    ka = p.kappa
    an1 = -(1.0 - ka) * curve.derivative(w - s.x1) * thresholds.cdf(s.x1) + (
        1.0 - ka
    ) * curve.value(w - s.x1) * thresholds.pdf(s.x1)
    if s.x1 >= s.x2:
        an1 += ka * (curve.derivative(s.x1) - curve.derivative(w - s.x1))
    an2 = (
        -((1.0 - ka + p.alpha) * curve.value(s.x2) - p.alpha * curve.value(w - s.x2))
        * offers.pdf(s.x2)
    )
    return fd1 - an1, fd2 - an2
