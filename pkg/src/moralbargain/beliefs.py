"""Belief distributions over opponent thresholds and offers.

Support is the interval [0, w/2]: beliefs put no mass on offers or
thresholds above the half-split, so cdf(w/2) = 1 for every kind.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import betainc
from scipy.stats import beta as _beta_dist

from .errors import DomainError, ValidationError
from .params import validate_endowment

_KINDS = ("scaled_beta", "uniform", "always_accept", "empirical")


@dataclass(frozen=True)
class BeliefDistribution:
    """Distribution on [0, w/2] for one side of the game."""

    kind: str
    w: float
    a: float | None = None
    b: float | None = None
    sample: tuple[float, ...] | None = None
    hist_bin_width: float | None = None

    def __post_init__(self):
        validate_endowment(self.w)
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown belief kind {self.kind!r}")
        if self.kind == "scaled_beta":
            if self.a is None or self.b is None or self.a <= 0 or self.b <= 0:
                raise ValidationError("scaled_beta needs shape parameters a, b > 0")
        if self.kind == "empirical":
            if not self.sample:
                raise ValidationError("empirical belief needs a nonempty sample")
            arr = np.asarray(self.sample, dtype=float)
            if arr.min() < 0.0 or arr.max() > self.half + 1e-12:
                raise ValidationError("empirical sample must lie in [0, w/2]")

    # -- constructors ------------------------------------------------------

    @classmethod
    def scaled_beta(cls, a: float, b: float, w: float) -> "BeliefDistribution":
        return cls("scaled_beta", w=w, a=a, b=b)

    @classmethod
    def uniform_on_half(cls, w: float) -> "BeliefDistribution":
        return cls("uniform", w=w)

    @classmethod
    def always_accept(cls, w: float) -> "BeliefDistribution":
        """Point mass at zero; as a threshold belief every offer is accepted."""
        return cls("always_accept", w=w)

    @classmethod
    def empirical(cls, sample, w: float, hist_bin_width: float | None = None) -> "BeliefDistribution":
        pts = tuple(sorted(float(s) for s in sample))
        return cls("empirical", w=w, sample=pts, hist_bin_width=hist_bin_width)

    # -- properties --------------------------------------------------------

    @property
    def half(self) -> float:
        return 0.5 * self.w

    @property
    def is_degenerate(self) -> bool:
        return self.kind == "always_accept"

    # -- distribution functions -------------------------------------------

    def cdf(self, x):
        """F(x) for x >= 0; negative amounts are a domain error."""
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0.0):
            raise DomainError("belief cdf evaluated at negative amount")
        if self.kind == "scaled_beta":
            u = np.clip(arr / self.half, 0.0, 1.0)
            out = betainc(self.a, self.b, u)
        elif self.kind == "uniform":
            out = np.clip(arr / self.half, 0.0, 1.0)
        elif self.kind == "always_accept":
            out = np.ones_like(arr)
        else:
            pts = np.asarray(self.sample)
            out = np.searchsorted(pts, arr, side="right") / len(pts)
            out = out.astype(float)
        return float(out) if np.isscalar(x) or arr.ndim == 0 else out

    def pdf(self, x):
        """Density on [0, w/2]; 0 outside. Empirical uses a histogram density."""
        arr = np.asarray(x, dtype=float)
        inside = (arr >= 0.0) & (arr <= self.half)
        if self.kind == "scaled_beta":
            u = np.clip(arr / self.half, 0.0, 1.0)
            out = _beta_dist.pdf(u, self.a, self.b) / self.half
        elif self.kind == "uniform":
            out = np.full_like(arr, 1.0 / self.half)
        elif self.kind == "always_accept":
            out = np.zeros_like(arr)  # atom at 0 carries the mass, no density
        else:
            width = self.hist_bin_width or self.w / 100.0
            edges = np.arange(0.0, self.half + width, width)
            if edges[-1] < self.half:
                edges = np.append(edges, self.half)
            counts, edges = np.histogram(np.asarray(self.sample), bins=edges)
            dens = counts / (len(self.sample) * np.diff(edges))
            idx = np.clip(np.searchsorted(edges, arr, side="right") - 1, 0, len(dens) - 1)
            out = dens[idx]
        out = np.where(inside, out, 0.0)
        return float(out) if np.isscalar(x) or arr.ndim == 0 else out

    def tail_expectation(self, fn: Callable, lo: float) -> float:
        """Exact-or-adaptive integral of fn against this distribution on [lo, w/2].

        Continuous kinds use adaptive quadrature (abs tol 1e-10); empirical
        beliefs are finite sums over sample points, atoms at lo included;
        the always-accept point mass contributes fn(0) iff lo <= 0.
        """
        hi = self.half
        if lo >= hi and self.kind != "empirical":
            if self.kind == "always_accept" and lo <= 0.0:
                return float(fn(0.0))
            return 0.0
        if self.kind == "always_accept":
            return float(fn(0.0)) if lo <= 0.0 else 0.0
        if self.kind == "empirical":
            pts = np.asarray(self.sample)
            keep = pts[pts >= lo]
            if keep.size == 0:
                return 0.0
            return float(np.sum(fn(keep)) / len(pts))
        val, _ = integrate.quad(
            lambda y: fn(y) * self.pdf(y), lo, hi, epsabs=1e-10, epsrel=1e-10, limit=200
        )
        return float(val)
