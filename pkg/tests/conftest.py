"""Shared fixtures: the w=10 benchmark configuration used across test modules."""

import numpy as np
import pytest

from moralbargain import BeliefDistribution, PayoffCurve

W = 10.0


@pytest.fixture(scope="session")
def crra():
    return PayoffCurve.crra(0.05)


@pytest.fixture(scope="session")
def linear():
    return PayoffCurve.linear()


@pytest.fixture(scope="session")
def shifted_log():
    return PayoffCurve.shifted_log()


@pytest.fixture(scope="session")
def thresholds():
    return BeliefDistribution.scaled_beta(2.0, 4.0, W)


@pytest.fixture(scope="session")
def offers():
    return BeliefDistribution.scaled_beta(2.0, 4.0, W)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260815)
