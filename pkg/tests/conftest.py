"""Shared fixtures: the benchmark grid, disturbance, limits and IBR fleet."""

import pytest

import vppfreq as v

BENCH_ALPHAS = (3.0, 4.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0)
BENCH_BETAS = (2.0, 3.0, 1.0, 1.0, 1.5, 1.0, 1.0, 1.0)
BENCH_RATINGS = (0.13, 0.10, 0.04, 0.05, 0.05, 0.10, 0.02, 0.01)


def make_grid(**overrides) -> v.GridParams:
    base = dict(d0=2.0, h0=10.0, r=25.0, t_sg=5.0, f0=50.0, f_db1=0.03, f_db2=0.033)
    base.update(overrides)
    return v.GridParams(**base)


def make_fleet(h_min: float = 0.1, d_min: float = 0.1) -> tuple[v.IbrSpec, ...]:
    return tuple(
        v.IbrSpec(alpha=a, beta=b, p_rated=p, h_min=h_min, d_min=d_min)
        for a, b, p in zip(BENCH_ALPHAS, BENCH_BETAS, BENCH_RATINGS)
    )


@pytest.fixture
def grid() -> v.GridParams:
    return make_grid()


@pytest.fixture
def dist() -> v.Disturbance:
    return v.Disturbance(delta_p=0.25)


@pytest.fixture
def limits() -> v.SecurityLimits:
    return v.SecurityLimits(rocof_lim=0.4, nadir_lim=0.5, qss_lim=0.35)


@pytest.fixture
def published_vpp() -> v.VppParams:
    """The rounded minimal requirement pair quoted for the benchmark case."""
    return v.VppParams(h_vpp=19.125, d_vpp=12.109)


@pytest.fixture
def fleet() -> tuple[v.IbrSpec, ...]:
    return make_fleet()
