import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xlirs.channel import (
    CHUNK_ELEMENTS,
    PhaseProfile,
    Scenario,
    amplitude_sum,
    channel_vector,
    element_gain,
    optimal_phases,
    snr_exact_sum,
    snr_exact_sum_direct,
    snr_with_phases,
    worker_count,
)
from xlirs.errors import ValidationError
from xlirs.geometry import IrsGeometry, NodePosition

LAM = 0.125
D = LAM / 5
A = (D / 2) ** 2


def scenario(m_y=5, m_z=7, tx=(3.0, 1.2, 0.3), rx=(8.0, 2.0, -0.4), pbar=1e9):
    return Scenario(IrsGeometry(m_y, m_z, D, A, LAM), NodePosition(*tx), NodePosition(*rx), pbar)


def test_exact_sum_matches_direct_distances():
    sc = scenario(9, 11, tx=(0.5, 1.0, 0.6))
    assert snr_exact_sum(sc).value == pytest.approx(snr_exact_sum_direct(sc), rel=1e-12)


def test_optimal_phases_reach_exact_sum():
    sc = scenario(15, 9)
    assert snr_with_phases(sc, optimal_phases(sc)).value == pytest.approx(snr_exact_sum(sc).value, rel=1e-12)


def test_channel_vector_layout_and_gain():
    sc = scenario(3, 5)
    h = channel_vector(sc.tx, sc.geom)
    assert h.shape == (15,)
    # row-major with i_z outer: entry 0 is (i_y, i_z) = (-1, -2), entry 1 is (0, -2)
    assert abs(h[1]) ** 2 == pytest.approx(element_gain(sc.tx, sc.geom, 0, -2), rel=1e-14)
    assert abs(h[0]) ** 2 == pytest.approx(element_gain(sc.tx, sc.geom, -1, -2), rel=1e-14)


def test_phase_profile_shape_checked():
    sc = scenario(3, 5)
    with pytest.raises(ValidationError):
        snr_with_phases(sc, PhaseProfile(np.zeros((3, 5))))
    assert PhaseProfile(np.full((1, 1), 7.0)).values[0, 0] == pytest.approx(7.0 - 2 * math.pi)


def test_single_element_far_field_gain():
    sc = scenario(1, 1, tx=(10.0, math.pi / 2, 0.0), rx=(20.0, math.pi / 2, 0.0), pbar=1.0)
    expected = (A / (4 * math.pi * 100.0)) * (A / (4 * math.pi * 400.0))
    assert snr_exact_sum(sc).value == pytest.approx(expected, rel=1e-14)


def test_parallel_sum_is_bitwise_identical(monkeypatch):
    # more than one chunk so the pool really splits the work
    sc = scenario(1001, 2 * (CHUNK_ELEMENTS // 1001) + 101)
    serial = amplitude_sum(sc, threads=1)
    assert amplitude_sum(sc, threads=3) == serial
    monkeypatch.setenv("XLIRS_THREADS", "2")
    assert amplitude_sum(sc) == serial


def test_worker_count(monkeypatch):
    monkeypatch.setenv("XLIRS_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("XLIRS_THREADS", "0")
    assert worker_count() >= 1
    monkeypatch.setenv("XLIRS_THREADS", "many")
    with pytest.raises(ValidationError):
        worker_count()
    with pytest.raises(ValidationError):
        worker_count(-1)


nodes = st.tuples(st.floats(0.3, 60.0), st.floats(0.05, math.pi - 0.05), st.floats(-1.45, 1.45))


@settings(max_examples=60, deadline=None)
@given(tx=nodes, rx=nodes, m_y=st.integers(0, 15), m_z=st.integers(0, 15))
def test_symmetry(tx, rx, m_y, m_z):
    sc = scenario(2 * m_y + 1, 2 * m_z + 1, tx=tx, rx=rx)
    assert snr_exact_sum(sc.swapped()).value == pytest.approx(snr_exact_sum(sc).value, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_random_profiles_never_beat_optimal(seed):
    sc = scenario(5, 5)
    rng = np.random.default_rng(seed)
    best = snr_exact_sum(sc).value
    prof = PhaseProfile(rng.uniform(0, 2 * math.pi, (5, 5)))
    assert snr_with_phases(sc, prof).value <= best * (1 + 1e-12)


@settings(max_examples=30, deadline=None)
@given(m=st.integers(0, 30))
def test_sum_grows_with_elements(m):
    small = snr_exact_sum(scenario(2 * m + 1, 2 * m + 1)).value
    large = snr_exact_sum(scenario(2 * m + 3, 2 * m + 3)).value
    assert large > small
