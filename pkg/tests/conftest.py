import numpy as np
import pytest

from crossvote.neural.mlp import Mlp
from crossvote.sim.models import Preference, Road, ScenarioConfig
from crossvote.sim.world import SimWorld


@pytest.fixture
def default_cfg():
    return ScenarioConfig()


@pytest.fixture
def short_cfg():
    """Two minutes of the low-unbalanced demand."""
    return ScenarioConfig(n_ns=11, n_we=6, horizon_steps=120, seed=3)


@pytest.fixture
def tiny_nets():
    """Randomly initialised 6-8-2 stops and wait nets."""
    return {
        "stops": Mlp.initialize((6, 8, 2), np.random.default_rng(11)),
        "wait": Mlp.initialize((6, 8, 2), np.random.default_rng(12)),
    }


def make_world(placements, **cfg_kwargs):
    """World from (road, dist, speed, preference) tuples; counts are filled in."""
    placements = list(placements)
    n_ns = sum(1 for p in placements if p[0] == Road.NS)
    cfg = ScenarioConfig(n_ns=n_ns, n_we=len(placements) - n_ns, **cfg_kwargs)
    return SimWorld.with_vehicles(cfg, placements)


@pytest.fixture
def world_factory():
    return make_world
