"""Symmetric Nash-set bounds and the grid best-response verifier.

The verifier is the ground truth for the equilibrium segment; the printed
offer upper bound is loose in concave configurations (see nash_set docs),
so segment assertions go through the verifier and the bound functions keep
formula-level checks only.
"""

import numpy as np
import pytest

from moralbargain import (
    PayoffCurve,
    constrained_threshold,
    nash_set,
    rho_of_kappa,
    tau_of_kappa,
    verify_nash,
    x1_upper_of,
    x2_lower_of,
)
from moralbargain.errors import ValidationError
from moralbargain.params import Strategy

W = 10.0
X1_UPPER_SL = 5.461264910281898  # root of 1.09 ln(11-x) = ln(x+1)
RHO_06_CRRA = 9.65  # kappa=0.6, step w/200


class TestTau:
    def test_corners(self, crra, shifted_log):
        assert tau_of_kappa(0.0, shifted_log, W) == 0.0
        assert tau_of_kappa(0.0, crra, W) == 0.0
        # strictly concave v: v'(w-x) >= v'(x) first holds at the half-split
        assert tau_of_kappa(1.0, crra, W) == pytest.approx(W / 2, abs=1e-9)

    def test_shifted_log_closed_form(self, shifted_log):
        # 1/(11-x) = 0.5/(x+1) solves to x = 3
        assert tau_of_kappa(0.5, shifted_log, W) == pytest.approx(3.0, abs=1e-9)

    def test_defining_inequality_flips_at_tau(self, shifted_log):
        tau = tau_of_kappa(0.5, shifted_log, W)
        ok = lambda x: shifted_log.derivative(W - x) >= 0.5 * shifted_log.derivative(x)
        assert ok(tau + 1e-9)
        assert not ok(tau - 1e-6)

    def test_nondecreasing_in_kappa(self, crra):
        ks = np.linspace(0.0, 1.0, 21)
        taus = [tau_of_kappa(float(k), crra, W) for k in ks]
        assert np.all(np.diff(taus) >= -1e-12)
        assert all(t <= W / 2 + 1e-12 for t in taus)

    def test_validation(self, crra):
        with pytest.raises(ValidationError):
            tau_of_kappa(1.5, crra, W)


class TestX1Upper:
    def test_alpha_equals_kappa_is_half(self, crra, shifted_log):
        assert x1_upper_of(0.3, 0.3, crra, W) == pytest.approx(W / 2, abs=1e-9)
        assert x1_upper_of(0.7, 0.7, shifted_log, W) == pytest.approx(W / 2, abs=1e-9)

    def test_linear_closed_form(self, linear, rng):
        for _ in range(25):
            k = rng.uniform(0.0, 1.0)
            a = rng.uniform(0.0, 2.0)
            want = W * (1.0 + a - k) / (2.0 + a - k)
            assert x1_upper_of(k, a, linear, W) == pytest.approx(want, abs=1e-9)

    def test_shifted_log_frozen_root(self, shifted_log):
        got = x1_upper_of(0.19, 0.28, shifted_log, W)
        assert got == pytest.approx(X1_UPPER_SL, abs=1e-6)
        assert 1.09 * np.log(11.0 - got) - np.log(got + 1.0) == pytest.approx(0.0, abs=1e-9)

    def test_defining_inequality_flips(self, crra):
        got = x1_upper_of(0.4, 0.9, crra, W)
        ok = lambda x: (1.0 - 0.4 + 0.9) * crra.value(W - x) >= crra.value(x)
        assert ok(got - 1e-9)
        assert not ok(got + 1e-6)
        # above the half-split only when alpha covers the kappa drag
        assert got >= W / 2


class TestX2Lower:
    def test_matches_solver_threshold(self, crra, rng):
        for _ in range(20):
            k = rng.uniform(0.0, 0.99)
            a = rng.uniform(1e-3, 3.0)
            assert x2_lower_of(k, a, crra, W) == pytest.approx(
                constrained_threshold(k, a, crra, W), abs=1e-9
            )

    def test_full_universalization_limit(self, crra):
        assert x2_lower_of(1.0, 0.5, crra, W) == W / 2
        assert x2_lower_of(1.0, 0.0, crra, W) == 0.0

    def test_nondecreasing_in_alpha(self, crra):
        alphas = np.linspace(0.05, 2.5, 15)
        vals = [x2_lower_of(0.3, float(a), crra, W) for a in alphas]
        assert np.all(np.diff(vals) > 0)


class TestVerifier:
    def test_equal_split_passes(self, crra, shifted_log):
        for curve in (crra, shifted_log):
            for k, a in ((0.5, 0.5), (0.2, 0.0), (0.9, 1.5)):
                chk = verify_nash(Strategy(W / 2, W / 2), k, a, curve, W)
                assert chk.is_nash
                assert chk.gain <= 1e-9
                assert chk.best_deviation is None

    def test_failing_profile_reports_deviation(self, crra):
        chk = verify_nash(Strategy(0.5, 4.0), 0.3, 1.0, crra, W)
        assert not chk.is_nash
        assert chk.gain > 1e-9
        assert chk.best_deviation is not None
        # the reported deviation realizes the reported gain on the lattice
        assert 0.0 <= chk.best_deviation.x1 <= W

    def test_offers_below_the_threshold_bound_never_survive(self, crra, rng):
        # 200 sampled profiles one lattice step clear of the boundary layer
        step = W / 400
        done = 0
        while done < 200:
            k = rng.uniform(0.05, 0.95)
            a = rng.uniform(1e-2, 2.0)
            x2lo = x2_lower_of(k, a, crra, W)
            if x2lo <= step:
                continue
            profile = Strategy(rng.uniform(0.0, x2lo - step), rng.uniform(0.0, W))
            assert not verify_nash(profile, k, a, crra, W).is_nash
            done += 1

    def test_grid_step_validation(self, crra):
        with pytest.raises(ValidationError):
            verify_nash(Strategy(5.0, 5.0), 0.5, 0.5, crra, W, grid_step=-0.1)


class TestRho:
    def test_full_universalization_shrinks_to_half(self, crra):
        assert rho_of_kappa(1.0, crra, W, 0.1) == pytest.approx(W / 2)

    def test_frozen_value_and_definition(self, crra):
        step = W / 200
        rho = rho_of_kappa(0.6, crra, W, step)
        assert rho == pytest.approx(RHO_06_CRRA, abs=1e-9)
        assert verify_nash(Strategy(rho, rho), 0.6, 0.0, crra, W, step).is_nash
        beyond = rho + step
        assert not verify_nash(Strategy(beyond, beyond), 0.6, 0.0, crra, W, step).is_nash

    def test_nonincreasing_in_kappa(self, crra):
        step = W / 100
        rhos = [rho_of_kappa(float(k), crra, W, step) for k in (0.2, 0.4, 0.6, 0.8, 1.0)]
        assert np.all(np.diff(rhos) <= 1e-12)


class TestNashSet:
    def test_validation(self, crra):
        with pytest.raises(ValidationError):
            nash_set(0.0, 0.5, crra, W)
        with pytest.raises(ValidationError):
            nash_set(0.5, -0.1, crra, W)

    def test_segment_composition_and_verifier_consistency(self, crra):
        step = W / 100
        ns = nash_set(0.6, 0.5, crra, W, grid_step=step)
        assert ns.set_kind == "SymmetricSegment"
        assert ns.x2_lower == pytest.approx(constrained_threshold(0.6, 0.5, crra, W), abs=1e-9)
        assert ns.formula_segment[0] == pytest.approx(max(ns.x2_lower, ns.tau), abs=1e-12)
        assert ns.formula_segment[1] == pytest.approx(min(ns.x1_upper, ns.rho), abs=1e-12)
        lo, hi = ns.segment
        # the verified run brackets the formula segment to within a step
        assert lo <= ns.formula_segment[0] + step
        assert hi >= ns.formula_segment[1] - step
        # endpoints pass, one step beyond each endpoint fails
        assert verify_nash(Strategy(lo, lo), 0.6, 0.5, crra, W, step).is_nash
        assert verify_nash(Strategy(hi, hi), 0.6, 0.5, crra, W, step).is_nash
        assert not verify_nash(Strategy(lo - step, lo - step), 0.6, 0.5, crra, W, step).is_nash
        assert not verify_nash(Strategy(hi + step, hi + step), 0.6, 0.5, crra, W, step).is_nash

    def test_interior_grid_points_pass(self, crra):
        step = W / 100
        ns = nash_set(0.6, 0.5, crra, W, grid_step=step)
        lo, hi = ns.segment
        for x in np.linspace(lo, hi, 7):
            x = round(x / step) * step
            assert verify_nash(Strategy(x, x), 0.6, 0.5, crra, W, step).is_nash

    def test_asymmetric_stub_when_tau_exceeds_threshold(self, shifted_log):
        # alpha=0 puts the acceptance bound at 0 while tau=3: the stub
        # {x1 = tau, x2 <= tau} survives and is reported
        ns = nash_set(0.5, 0.0, shifted_log, W, grid_step=0.1)
        assert ns.set_kind == "SegmentPlusAsymmetricStub"
        assert ns.tau == pytest.approx(3.0, abs=1e-9)
        stub_x1, (stub_lo, stub_hi) = ns.asymmetric_stub
        assert stub_x1 == ns.tau
        assert (stub_lo, stub_hi) == (0.0, ns.tau)
        assert "stub-direction-x2-below" in ns.flags
        assert ns.segment[0] == pytest.approx(3.0, abs=1e-9)

    def test_alpha_zero_shape(self, shifted_log):
        # either x2 <= x1 = tau, or tau < x1 = x2 <= rho
        ns = nash_set(0.5, 0.0, shifted_log, W, grid_step=0.1)
        assert ns.asymmetric_stub is not None
        lo, hi = ns.segment
        assert lo == pytest.approx(ns.tau, abs=0.1)
        assert hi <= ns.rho + 1e-12

    def test_lower_edge_monotone_in_alpha(self, crra):
        # enlarging alpha weakly raises the segment's lower edge
        edges = []
        for a in (0.0, 0.5, 1.0, 1.5):
            ns = nash_set(0.6, a, crra, W, grid_step=0.1)
            edges.append(max(ns.x2_lower, ns.tau))
        assert np.all(np.diff(edges) >= -1e-12)
