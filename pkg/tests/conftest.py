"""Shared fixtures: models, profiles, and cached expensive solves."""

import math

import numpy as np
import pytest

import specbound as sb

SQRT_4PI = math.sqrt(4.0 * math.pi)
# Euclidean isoperimetric constant n * (unit ball volume)^{1/n}, a valid
# lower bound on nonpositively curved simply connected 3-manifolds
D3_EUCLIDEAN = 3.0 * (4.0 * math.pi / 3.0) ** (1.0 / 3.0)


@pytest.fixture(scope="session")
def e2():
    return sb.WarpingModel.euclidean(2)


@pytest.fixture(scope="session")
def e3():
    return sb.WarpingModel.euclidean(3)


@pytest.fixture(scope="session")
def h2():
    return sb.WarpingModel.hyperbolic(2, 1.0)


@pytest.fixture(scope="session")
def h3():
    return sb.WarpingModel.hyperbolic(3, 1.0)


@pytest.fixture(scope="session")
def croke2():
    return sb.PowerLawProfile(2)


@pytest.fixture(scope="session")
def croke2_aif(croke2):
    return sb.AifEvaluator(croke2)


@pytest.fixture(scope="session")
def tab_h2():
    """Sharp hyperbolic-plane relation H(v) = sqrt(4 pi v + v^2), tabulated."""
    v = np.logspace(-6, math.log10(25.0), 2000)
    return sb.TabulatedProfile(v, np.sqrt(4.0 * math.pi * v + v * v))


@pytest.fixture(scope="session")
def disk_pair(e2):
    return sb.solve_dirichlet_eigenpair(e2, 1.0)


@pytest.fixture(scope="session")
def disk_pair_r2(e2):
    return sb.solve_dirichlet_eigenpair(e2, 2.0)


@pytest.fixture(scope="session")
def ball3_pair(e3):
    return sb.solve_dirichlet_eigenpair(e3, math.pi)


@pytest.fixture(scope="session")
def torsion_e2_r1(e2):
    return sb.solve_torsion(e2, 1.0)


@pytest.fixture(scope="session")
def torsion_h2_r1(h2):
    return sb.solve_torsion(h2, 1.0)
