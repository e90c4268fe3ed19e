import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gnqkz.errors import DomainError
from gnqkz.qkz import KinematicFrame
from gnqkz.scattering import CouplingModel
from gnqkz.yang_baxter import (check_transfer_commute, check_transfer_commute_unequal,
                               check_transport_compat, check_yb_instantaneous,
                               check_yb_instantaneous_printed, check_yb_mixed,
                               check_yb_mixed_mirror, check_yb_same, random_frame,
                               run_transport_suite, run_yb_suite, summarize)

MODEL = CouplingModel(1.0, 2.0)
xs = st.floats(-5, 5, allow_nan=False)


@given(xs, xs, xs, st.floats(0.2, 3.0), st.floats(-3, 3))
def test_mixed_families(a, b, c, alpha, beta):
    m = CouplingModel(alpha, beta)
    assert check_yb_mixed(a, b, c, m).residual < 1e-12
    assert check_yb_mixed_mirror(a, b, c, m).residual < 1e-12
    assert check_yb_same(a, b, c, alpha).residual < 1e-12


@given(st.floats(0.01, 1.1))
def test_instantaneous_limit(g):
    assert check_yb_instantaneous(g).passed


def test_printed_index_placement_is_a_witness():
    rep = check_yb_instantaneous_printed(0.5)
    assert rep.expected_failure and rep.passed
    assert rep.residual > 0.1


def test_pole_is_reported_not_raised():
    # R(lam; 1/alpha) has its pole at lam = i/alpha
    rep = check_yb_same(0.0, 1j, 2.0, 1.0)
    assert not rep.passed and rep.error


def test_suite_counts_and_determinism():
    a = run_yb_suite(samples=10, seed=3)
    b = run_yb_suite(samples=10, seed=3)
    assert len(a) == 40
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    s = summarize(a)
    assert s["all_pass"] and s["n"] == 40
    assert set(s["max_residual"]) == {"YB_mixed_1", "YB_mixed_2", "YB_same_chirality", "YB_instantaneous"}
    json.loads(a[0].to_json())


@pytest.mark.parametrize("nl,nr", [(1, 1), (1, 2), (2, 1), (2, 2), (3, 3)])
def test_transport_compatibility(nl, nr):
    reps = run_transport_suite(nl, nr, samples=1, seed=nl + 10 * nr)
    assert all(r.residual <= 1e-9 for r in reps)


def test_transport_compat_rejects_equal_particles():
    frame = random_frame(1, 1, np.random.default_rng(0), MODEL)
    with pytest.raises(DomainError):
        check_transport_compat(frame, 1, 1)


@pytest.mark.parametrize("nl,nr", [(1, 1), (2, 2), (3, 3)])
def test_equal_time_commutation(nl, nr):
    assert check_transfer_commute(1.3, nl, nr, MODEL).residual <= 1e-9


@pytest.mark.parametrize("nl,nr", [(2, 2), (3, 3)])
def test_unequal_time_witness(nl, nr):
    rep = check_transfer_commute_unequal(1.0, 3.0, nl, nr, MODEL)
    assert rep.residual >= 1e-3 and rep.passed


def test_unequal_time_witness_is_blind_for_two_particles():
    # all 4x4 instantaneous S-matrices are functions of P, so they commute
    assert check_transfer_commute_unequal(1.0, 3.0, 1, 1, MODEL).residual < 1e-14
