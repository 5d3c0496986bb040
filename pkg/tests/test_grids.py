import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infft_dcf.grids import KINDS, GridSpec, generate

POLAR_KINDS = ("spiral", "polar", "modified_polar", "log_modified_polar")


def test_equispaced_count():
    s = generate(GridSpec("equispaced", 8))
    assert s.N == 64
    # lattice j / R - 1/2 in each axis
    assert set(np.round(s.points[:, 0] * 8).astype(int)) == set(range(-4, 4))


def test_equispaced_other_dimension():
    assert generate(GridSpec("equispaced", 5, d=3)).N == 125


def test_polar_stays_in_disk():
    s = generate(GridSpec("polar", 12, 24))
    assert np.all(np.linalg.norm(s.points, axis=1) <= 0.5 + 1e-15)


def test_polar_count_accounts_for_shared_origin():
    # R radii per ray, one of them the origin shared by all T rays
    s = generate(GridSpec("polar", 12, 24))
    assert s.N == (12 - 1) * 24 + 1


def test_spiral_count():
    assert generate(GridSpec("spiral", 16)).N == 16 * 32


@pytest.mark.parametrize("kind", KINDS)
def test_points_inside_half_open_square(kind):
    s = generate(GridSpec(kind, 10))
    assert np.all(s.points >= -0.5) and np.all(s.points < 0.5)


@pytest.mark.parametrize("kind", KINDS)
def test_no_exact_duplicates(kind):
    pts = generate(GridSpec(kind, 14)).points
    assert np.unique(pts, axis=0).shape[0] == pts.shape[0]


@pytest.mark.parametrize("kind", KINDS)
def test_deterministic(kind):
    a = generate(GridSpec(kind, 9, seed=4))
    b = generate(GridSpec(kind, 9, seed=4))
    assert np.array_equal(a.points, b.points)


def test_jitter_depends_on_seed():
    a = generate(GridSpec("jittered", 6, seed=1))
    b = generate(GridSpec("jittered", 6, seed=2))
    assert not np.array_equal(a.points, b.points)


@pytest.mark.parametrize("kind", POLAR_KINDS)
def test_count_nondecreasing_in_R(kind):
    counts = [generate(GridSpec(kind, R)).N for R in range(4, 40, 2)]
    assert all(a <= b for a, b in zip(counts, counts[1:]))


@settings(max_examples=25, deadline=None)
@given(R=st.integers(2, 40), kind=st.sampled_from(POLAR_KINDS))
def test_count_monotone_property(R, kind):
    assert generate(GridSpec(kind, R)).N <= generate(GridSpec(kind, R + 2)).N


@pytest.mark.parametrize("R", [8, 12, 16, 32])
def test_modified_grids_cover_corners(R):
    def outside_disk(kind):
        r = np.linalg.norm(generate(GridSpec(kind, R)).points, axis=1)
        return np.count_nonzero(r > 0.5 + 1e-12)

    assert outside_disk("polar") == 0
    assert outside_disk("modified_polar") > 0
    assert outside_disk("log_modified_polar") > 0


def test_log_grid_is_denser_near_origin():
    lin = np.linalg.norm(generate(GridSpec("modified_polar", 24)).points, axis=1)
    log = np.linalg.norm(generate(GridSpec("log_modified_polar", 24)).points, axis=1)
    assert np.mean(log < 0.1) > np.mean(lin < 0.1)
    assert log[log > 0].min() < 0.75 * lin[lin > 0].min()


def test_log_grid_size_near_reference():
    # the reference count for R = 40, T = 80 is 3565; conventions differ
    N = generate(GridSpec("log_modified_polar", 40)).N
    assert abs(N - 3565) / 3565 < 0.15


def test_T_defaults_to_twice_R():
    assert GridSpec("polar", 7).T == 14


@pytest.mark.parametrize("kwargs", [dict(kind="hexagonal", R=4), dict(kind="polar", R=1),
                                    dict(kind="polar", R=4, T=0),
                                    dict(kind="spiral", R=4, d=3)])
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        GridSpec(**kwargs)
