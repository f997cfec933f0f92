import numpy as np
import pytest

from crowd_contagion.scenario import (Domain, ExitRegion, Population, SubBlock, ModelParams, OutputControls,
                                      Scenario)


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run the full-length corridor scenarios')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: full-length corridor scenario (needs --runslow)')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20221)


@pytest.fixture
def corridor():
    return Domain.corridor(100., 50., [ExitRegion('left', 'left', (0., 50.)),
                                       ExitRegion('right', 'right', (0., 50.))])


def small_scenario(name='small', t_end=0.05, obstacles=(), populations=None, **params) -> Scenario:
    """A 30 x 20 corridor with a small crowd; quick enough for a few hundred steps."""
    domain = Domain.corridor(30., 20., [ExitRegion('left', 'left', (0., 20.)),
                                        ExitRegion('right', 'right', (0., 20.))])
    if populations is None:
        populations = [Population(id='walkers', goal_id='right', seeding_block=(2., 4., 12., 16.), spacing=1.5,
                                  sub_blocks=[SubBlock(block=(6., 9., 8., 11.), fractions=(0., 0., 1.))])]
    scenario = Scenario(name=name, domain=domain, populations=list(populations), obstacles=list(obstacles),
                        params=ModelParams(t_end=t_end, **params),
                        output=OutputControls(frame_interval=0.01, trajectory_interval=0.01))
    scenario.validate()
    return scenario


@pytest.fixture
def small():
    return small_scenario()


@pytest.fixture
def make_scenario():
    return small_scenario
