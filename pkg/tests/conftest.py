"""Shared fixtures: expensive solves computed once per session."""

import pytest

from henon import HenonParams, solve_radial


@pytest.fixture(scope="session")
def params_default():
    return HenonParams(3, 1.0, 2.0)


@pytest.fixture(scope="session")
def profile_p2():
    return solve_radial(HenonParams(3, 1.0, 2.0))


@pytest.fixture(scope="session")
def profile_p5():
    return solve_radial(HenonParams(3, 1.0, 5.0))


@pytest.fixture(scope="session")
def profile_p65():
    return solve_radial(HenonParams(3, 1.0, 6.5))
