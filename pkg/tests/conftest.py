"""Shared fixtures: the expensive scan artifacts are built once per session."""

import numpy as np
import pytest

from cqnls.curves import (default_omega_grid, differentiate, locate_critical,
                          scan)
from cqnls.profiles import ShootingConfig
from cqnls.shooting import solve_cubic_reference, solve_ground_state


@pytest.fixture(scope="session")
def cfg():
    return ShootingConfig()


@pytest.fixture(scope="session")
def curve(cfg):
    """60-node production scan with mass derivatives and identity checks."""
    grid = default_omega_grid(60, 0.004, 0.185)
    swept = scan(grid, cfg)
    assert not swept.failures, f"scan failures: {swept.failures}"
    return differentiate(swept, cfg)


@pytest.fixture(scope="session")
def crit(curve, cfg):
    return locate_critical(curve, cfg)


@pytest.fixture(scope="session")
def cubic_g(cfg):
    return solve_cubic_reference(cfg)


@pytest.fixture(scope="session")
def ground_009(cfg):
    return solve_ground_state(0.09, cfg)
