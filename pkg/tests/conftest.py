"""Shared fixtures: small datasets and posteriors reused across test modules."""
from __future__ import annotations

import numpy as np
import pytest

from seqdes import Dataset, MHConfig, PosteriorSample, PriorSpec, mh_sample, scenario, simulate_counts, TimeGrid

FAST_MH = MHConfig(kept=1_500, burn_in=400)


@pytest.fixture(scope="session")
def normal_params():
    return scenario("normal")


@pytest.fixture(scope="session")
def early_data(normal_params) -> Dataset:
    """Counts on days 1..5 of a normal-growth simulation."""
    grid = TimeGrid(tuple(range(1, 6)), horizon=100)
    return simulate_counts(normal_params, grid, seed=7)


@pytest.fixture(scope="session")
def season_data(normal_params) -> Dataset:
    """Counts on every day of the season."""
    grid = TimeGrid.full(100)
    return simulate_counts(normal_params, grid, seed=7)


@pytest.fixture(scope="session")
def early_posterior(early_data) -> PosteriorSample:
    return mh_sample(early_data, PriorSpec(), FAST_MH, n0=10.0, seed=7, seed_path=(3, 5))


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)


def synthetic_posterior(rng: np.random.Generator, n: int = 400) -> PosteriorSample:
    """A PosteriorSample with draws that did not come from a chain."""
    r = rng.lognormal(mean=-2.3, sigma=0.2, size=n)
    k = rng.lognormal(mean=7.6, sigma=0.05, size=n)
    return PosteriorSample(
        draws=np.column_stack([r, k]),
        acceptance_rate=1.0,
        seed_path=(),
        proposal_scales=(0.1, 0.1),
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance criterion lines where capture cannot eat them."""
    import sys as _sys

    acceptance = _sys.modules.get("tests.test_acceptance")
    lines = getattr(acceptance, "REPORTED", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
