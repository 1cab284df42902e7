import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrgates.measurement import detect_polarization, discrimination_error, homodyne_x, postselect_paths
from kerrgates.state import ModeId, OccupationConfig, PhotonicState, ProbeSpec, declare_state, logical_state

MODES = (ModeId("a", "H"), ModeId("a", "V"))
P = (ProbeSpec("p"),)


def probe_state(terms):
    return PhotonicState(MODES, P, {OccupationConfig(occ, (k,)): amp for occ, k, amp in terms})


def test_homodyne_merges_plus_and_minus_k():
    s = probe_state([((1, 0), 0, 1 / math.sqrt(2)), ((0, 1), 1, 0.5), ((1, 0), -1, 0.5)])
    out = homodyne_x(s, "p")
    assert [o.k for o in out] == [0, 1]
    assert out[0].probability == pytest.approx(0.5)
    assert out[1].probability == pytest.approx(0.5)
    assert out[1].indices == frozenset({1, -1})
    post = {cfg.occupations: a for cfg, a in out[1].post_state}
    assert post == pytest.approx({(0, 1): 1 / math.sqrt(2), (1, 0): 1 / math.sqrt(2)})
    assert out[1].post_state.probes == ()
    assert out[1].class_value(0.01) == pytest.approx(math.cos(0.01))


def test_homodyne_constant_probe_is_identity_on_photons():
    s = logical_state(["a"], [0.6, 0.8j], probes=P)
    (only,) = homodyne_x(s, "p")
    assert only.probability == pytest.approx(1.0)
    expected = {(occ, ()): v for (occ, _), v in s.canonical().items()}
    assert only.post_state.canonical() == pytest.approx(expected)


def test_homodyne_random_phase_keeps_probabilities():
    s = probe_state([((1, 0), 0, 0.6), ((0, 1), 2, 0.48), ((1, 0), -2, 0.64)])
    ideal = homodyne_x(s, "p")
    noisy = homodyne_x(s, "p", rng=np.random.default_rng(1))
    assert [o.k for o in noisy] == [o.k for o in ideal]
    for a, b in zip(ideal, noisy):
        # distinct (photon, k) configurations do not interfere
        assert a.probability == pytest.approx(b.probability)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 2 * math.pi))
def test_homodyne_global_phase_invariance(phi):
    terms = [((1, 0), 0, 0.6), ((0, 1), 1, 0.48), ((1, 0), -1, 0.64)]
    a = homodyne_x(probe_state(terms), "p")
    b = homodyne_x(probe_state([(o, k, amp * np.exp(1j * phi)) for o, k, amp in terms]), "p")
    assert sum(o.probability for o in b) == pytest.approx(1.0, abs=1e-12)
    for x, y in zip(a, b):
        assert x.probability == pytest.approx(y.probability, abs=1e-12)


def test_detect_polarization_hv_and_da():
    s = declare_state([("a", (0.6, 0.8)), ("b", (1, 0))])
    hv = detect_polarization(s, "a")
    assert [(lab, round(p, 12)) for lab, p, _ in hv] == [("H", 0.36), ("V", 0.64)]
    assert not hv[0][2].has_path("a")
    da = detect_polarization(s, "a", "DA")
    assert da[0][1] == pytest.approx((0.6 + 0.8) ** 2 / 2)
    assert da[1][1] == pytest.approx((0.6 - 0.8) ** 2 / 2)
    with pytest.raises(ValueError):
        detect_polarization(s, "a", "RL")


def test_postselect_paths_groups_by_counts():
    s = PhotonicState(
        [ModeId("a", "H"), ModeId("a", "V"), ModeId("b", "H"), ModeId("b", "V")],
        (),
        {OccupationConfig((1, 0, 1, 0)): 0.6, OccupationConfig((2, 0, 0, 0)): 0.8},
    )
    out = postselect_paths(s, ["a", "b"])
    assert [(k, round(p, 12)) for k, p, _ in out] == [((1, 1), 0.36), ((2, 0), 0.64)]
    assert out[0][2].norm() == pytest.approx(1.0)


def _reference_error(alpha, theta, k1, k2):
    mpmath.mp.dps = 30
    delta = 2 * alpha * (mpmath.cos(k1 * theta) - mpmath.cos(k2 * theta))
    return float(mpmath.erfc(abs(delta) / (2 * mpmath.sqrt(2))) / 2)


def test_discrimination_error_matches_independent_erfc():
    assert discrimination_error(100, 0.1, 0, 1) == pytest.approx(_reference_error(100, 0.1, 0, 1), rel=1e-12)
    assert discrimination_error(5, 0.2, 3, 1) == pytest.approx(_reference_error(5, 0.2, 3, 1), rel=1e-12)


def test_discrimination_error_identical_classes():
    assert discrimination_error(200, 0.01, 2, 2) == 0.5


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 1e4), st.floats(1e-3, 1.0), st.integers(0, 4), st.integers(0, 4))
def test_discrimination_error_symmetric(alpha, theta, k1, k2):
    assert discrimination_error(alpha, theta, k1, k2) == discrimination_error(alpha, theta, k2, k1)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 1e4), st.floats(1.0, 10.0), st.floats(1e-3, 1.0))
def test_discrimination_error_non_increasing_in_alpha(alpha, factor, theta):
    assert discrimination_error(alpha * factor, theta, 0, 1) <= discrimination_error(alpha, theta, 0, 1)


def test_discrimination_error_domain():
    with pytest.raises(ValueError):
        discrimination_error(0, 0.1, 0, 1)
