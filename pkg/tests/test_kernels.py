"""Grid-kernel tests: reference semantics, numpy/numba parity, env fallback.

Both kernel paths add terms in the same order, so parity checks use exact
equality rather than tolerances.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from moralbargain import kernels


def _argmax_slow(a, b, c, x1s, x2s):
    best_u, best_i, best_j = -np.inf, 0, 0
    for i in range(len(a)):
        for j in range(len(b)):
            u = a[i] + b[j] + (c[i] if x1s[i] >= x2s[j] else 0.0)
            if u > best_u:
                best_u, best_i, best_j = u, i, j
    return best_i, best_j, best_u


def _deviation_slow(pa, racc, c, x1s, x2s, y1, y2):
    best_u, best_i, best_j = -np.inf, 0, 0
    for i in range(len(x1s)):
        for j in range(len(x2s)):
            u = (pa[i] if x1s[i] >= y2 else 0.0)
            u += racc if y1 >= x2s[j] else 0.0
            u += c[i] if x1s[i] >= x2s[j] else 0.0
            if u > best_u:
                best_u, best_i, best_j = u, i, j
    return best_u, best_i, best_j


def _random_case(rng, n=17, m=23):
    a = rng.normal(size=n)
    b = rng.normal(size=m)
    c = rng.normal(size=n)
    x1s = np.sort(rng.uniform(0.0, 10.0, size=n))
    x2s = np.sort(rng.uniform(0.0, 10.0, size=m))
    return a, b, c, x1s, x2s


class TestGridArgmax:
    def test_matches_slow_reference(self, rng):
        for _ in range(20):
            a, b, c, x1s, x2s = _random_case(rng)
            got = kernels.grid_argmax(a, b, c, x1s, x2s)
            assert got == _argmax_slow(a, b, c, x1s, x2s)

    def test_indicator_inclusive_at_equality(self):
        one = np.array([0.0])
        got = kernels.grid_argmax(one, one, np.array([5.0]), np.array([2.0]), np.array([2.0]))
        assert got == (0, 0, 5.0)

    def test_ties_break_to_first_cell(self):
        # all-zero utility surface: every cell ties, first hit wins
        a = np.zeros(4)
        b = np.zeros(5)
        got = kernels.grid_argmax(a, b, np.zeros(4), np.arange(4.0), np.arange(5.0) + 10.0)
        assert got == (0, 0, 0.0)

    def test_ties_break_lowest_j_within_row(self):
        a = np.array([1.0, 0.0])
        b = np.array([0.0, 0.0, 0.0])
        got = kernels.grid_argmax(a, b, np.zeros(2), np.zeros(2), np.ones(3))
        assert (got[0], got[1]) == (0, 0)


class TestDeviationBest:
    def test_matches_slow_reference(self, rng):
        for _ in range(20):
            a, b, c, x1s, x2s = _random_case(rng, n=13, m=11)
            pa = np.abs(a)
            racc = float(rng.uniform(0.0, 2.0))
            y1 = float(rng.uniform(0.0, 10.0))
            y2 = float(rng.uniform(0.0, 10.0))
            got = kernels.deviation_best(pa, racc, c, x1s, x2s, y1, y2)
            assert got == _deviation_slow(pa, racc, c, x1s, x2s, y1, y2)

    def test_opponent_boundaries_inclusive(self):
        # x1 == y2 earns the proposer term; y1 == x2 earns the responder term
        pa = np.array([3.0])
        c = np.array([0.0])
        u, i, j = kernels.deviation_best(pa, 7.0, c, np.array([2.0]), np.array([4.0]), 4.0, 2.0)
        assert (u, i, j) == (10.0, 0, 0)


@pytest.mark.skipif(not kernels.HAS_NUMBA, reason="numba unavailable")
class TestNumbaParity:
    def test_grid_argmax_identical(self, rng):
        for _ in range(20):
            a, b, c, x1s, x2s = _random_case(rng)
            fast = kernels.grid_argmax_numba(a, b, c, x1s, x2s)
            slow = kernels.grid_argmax_numpy(a, b, c, x1s, x2s)
            assert fast == slow

    def test_deviation_best_identical(self, rng):
        for _ in range(20):
            a, b, c, x1s, x2s = _random_case(rng, n=13, m=11)
            pa = np.abs(a)
            racc = float(rng.uniform(0.0, 2.0))
            y1 = float(rng.uniform(0.0, 10.0))
            y2 = float(rng.uniform(0.0, 10.0))
            fast = kernels.deviation_best_numba(pa, racc, c, x1s, x2s, y1, y2)
            slow = kernels.deviation_best_numpy(pa, racc, c, x1s, x2s, y1, y2)
            assert fast == slow


class TestDispatch:
    def test_use_numba_mirrors_availability(self):
        assert kernels.USE_NUMBA == kernels.HAS_NUMBA

    def test_active_kernels_match_flag(self):
        if kernels.USE_NUMBA:
            assert kernels.grid_argmax is kernels.grid_argmax_numba
            assert kernels.deviation_best is kernels.deviation_best_numba
        else:
            assert kernels.grid_argmax is kernels.grid_argmax_numpy
            assert kernels.deviation_best is kernels.deviation_best_numpy

    def test_env_flag_forces_numpy_path(self):
        code = (
            "import numpy as np\n"
            "import moralbargain.kernels as k\n"
            "print(k.HAS_NUMBA, k.USE_NUMBA,"
            " k.grid_argmax is k.grid_argmax_numpy,"
            " k.deviation_best is k.deviation_best_numpy)\n"
            "a = np.array([0.0, 1.0]); b = np.array([0.0, 2.0])\n"
            "c = np.array([3.0, 0.0])\n"
            "print(k.grid_argmax(a, b, c, np.array([1.0, 2.0]), np.array([0.0, 1.5])))\n"
        )
        env = dict(os.environ, MORALBARGAIN_NO_NUMBA="1")
        proc = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert proc.returncode == 0, proc.stderr
        lines = proc.stdout.strip().splitlines()
        assert lines[0] == "False False True True"
        expected = kernels.grid_argmax_numpy(
            np.array([0.0, 1.0]),
            np.array([0.0, 2.0]),
            np.array([3.0, 0.0]),
            np.array([1.0, 2.0]),
            np.array([0.0, 1.5]),
        )
        assert lines[1] == str(expected)
