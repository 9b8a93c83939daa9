import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entbell import experiment
from entbell.config import load_config
from entbell.experiment import MeasurementSetting, outcome_probability
from entbell.qstate import StateVector, fidelity, marginal

import oracle

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


@pytest.fixture(scope="module")
def prepared():
    return experiment.default_prepared()


def oracle_pipeline(qwp_angles, phase=0.0):
    """Source -> parity filter -> QWPs -> trigger H -> phase, all by hand."""
    k = oracle.kron(oracle.phi_plus(), oracle.phi_plus())    # a1 b1 a2 b2
    k = {key: v for key, v in k.items() if key[0] == key[2]}
    k = oracle.permute(k, (0, 2, 1, 3))                      # T a b1 b2
    for pos, phi in enumerate(qwp_angles):
        k = oracle.apply_2x2(oracle.qwp_matrix(phi), k, pos)
    k = {key[1:]: v for key, v in k.items() if key[0] == "H"}
    k = oracle.apply_2x2([[1, 0], [0, oracle.phase(phase)]], k, 0)
    return k


def test_source_amplitudes():
    s = experiment.build_source()
    assert s.labels == experiment.SOURCE_MODES
    assert s.amplitude("HHHH") == pytest.approx(0.5)
    assert s.amplitude("HVHH") == 0
    assert s.norm == pytest.approx(1)


def test_fusion_gives_four_photon_ghz():
    s, p = experiment.fuse_source()
    assert p == pytest.approx(0.5)
    assert fidelity(s, experiment.ghz4_state()) == pytest.approx(1, abs=1e-12)


def test_preparation_probability_matches_oracle_bookkeeping():
    angles = [np.pi / 4] * 4
    k = oracle_pipeline(angles)
    prep = experiment.prepare_state(angles)
    # source norm 1, so the surviving squared norm is the success probability
    assert oracle.norm2(k) == pytest.approx(0.25, abs=1e-12)
    assert prep.preparation_probability == pytest.approx(oracle.norm2(k), abs=1e-12)
    assert prep.state.norm_weight == pytest.approx(0.25, abs=1e-12)


def test_calibration_reproduces_target():
    cal = experiment.calibrate_preparation()
    prep = experiment.prepare_state(cal.qwp_angles, cal.calibration_phase)
    assert fidelity(prep.state, experiment.target_state()) >= 1 - 1e-9
    # the oracle pipeline agrees with the calibrated configuration
    k = oracle_pipeline(cal.qwp_angles, cal.calibration_phase)
    assert oracle.fidelity(k, oracle.target()) == pytest.approx(1, abs=1e-12)


def test_calibration_is_deterministic_and_frozen_in_config():
    c1, c2 = experiment.calibrate_preparation(), experiment.calibrate_preparation()
    assert c1 == c2
    cfg = load_config()
    np.testing.assert_allclose(np.deg2rad(cfg.qwp_angles_deg), c1.qwp_angles, atol=1e-12)
    assert math.radians(cfg.calibration_phase_deg) == pytest.approx(c1.calibration_phase)
    assert tuple(cfg.bob_analyzer_pair) == experiment.calibrate_analyzer()


def test_uncalibrated_waveplates_do_not_give_target():
    # all QWPs at 0 leave the H/V GHZ form; the trigger projection then
    # collapses it to a product state
    prep = experiment.prepare_state([0, 0, 0, 0])
    assert fidelity(prep.state, experiment.target_state()) < 1 - 1e-9


def test_broken_quarter_wave_convention_fails_calibration():
    with pytest.raises(experiment.CalibrationError):
        experiment.calibrate_preparation(qwp_retardance=np.pi / 3)


def test_target_equals_circular_ghz():
    assert fidelity(experiment.target_state(), experiment.ghz_circular_state()) \
        == pytest.approx(1, abs=1e-12)
    vec = oracle.to_vector(oracle.circular_ghz(), 3)
    assert abs(abs(np.vdot(vec, experiment.target_state().amplitudes)) - 1) < 1e-12


@pytest.mark.parametrize("t1,sign,expected", [
    (0, 1, [[1, 0], [0, 0]]),
    (0, -1, [[0, 0], [0, 1]]),
    (np.pi / 4, 1, [[0.5, 0.5], [0.5, 0.5]]),
])
def test_alice_projector(t1, sign, expected):
    np.testing.assert_allclose(experiment.alice_projector(t1, sign).matrix, expected, atol=1e-15)


def test_bob_projector_examples():
    s2 = 1 / np.sqrt(2)
    phi_m = np.array([s2, 0, 0, -s2])
    psi_p = np.array([0, s2, s2, 0])
    np.testing.assert_allclose(experiment.bob_projector(0, 1), np.outer(phi_m, phi_m), atol=1e-15)
    np.testing.assert_allclose(experiment.bob_projector(np.pi / 2, 1), np.outer(psi_p, psi_p),
                               atol=1e-15)
    for t in np.linspace(0, np.pi, 13):
        prod = experiment.bob_projector(t, 1) @ experiment.bob_projector(t, -1)
        assert np.max(np.abs(prod)) < 1e-15
        # the minus outcome is the plus projector at theta2 + pi/2
        np.testing.assert_allclose(experiment.bob_projector(t, -1),
                                   experiment.bob_projector(t + np.pi / 2, 1), atol=1e-15)


def test_measurement_setting_angles():
    s = MeasurementSetting(0.2, 0.6, -1, -1)
    assert s.alice_polarizer_angle == pytest.approx(0.2 + np.pi / 2)
    assert s.bob_hwp_angle == pytest.approx((0.6 + np.pi / 2) / 2)
    with pytest.raises(ValueError):
        MeasurementSetting(0, 0, 0, 1)


@pytest.mark.parametrize("t1,t2,sa,sb,expected", [
    (0, 0, 1, 1, 0.5),
    (0, 0, 1, -1, 0.0),
    (np.pi / 8, np.pi / 8, 1, 1, 0.25),
])
def test_outcome_probability_examples(prepared, t1, t2, sa, sb, expected):
    p = outcome_probability(prepared, MeasurementSetting(t1, t2, sa, sb))
    assert p == pytest.approx(expected, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(angles, angles)
def test_outcome_probabilities_sum_to_one(t1, t2):
    p = experiment.outcome_probabilities(experiment.default_prepared(), t1, t2)
    assert abs(p.sum() - 1) < 1e-12
    assert np.all(p >= -1e-15)


@pytest.mark.parametrize("t1,t2,expected", [
    (0, 0, 1.0),
    (np.pi / 4, np.pi / 4, -1.0),
    (0, np.pi / 8, math.cos(math.pi / 4)),
])
def test_correlation_examples(prepared, t1, t2, expected):
    assert experiment.correlation_exact(prepared, t1, t2) == pytest.approx(expected, abs=1e-9)


def test_correlation_law_on_grid(prepared):
    g1 = np.linspace(0, np.pi, 9)
    g2 = np.linspace(0, np.pi, 8)
    err = max(abs(experiment.correlation_exact(prepared, a, b) - oracle.e_closed_form(a, b))
              for a in g1 for b in g2)
    assert err < 1e-9


@settings(max_examples=50, deadline=None)
@given(angles, angles, angles)
def test_correlation_depends_only_on_sum(t1, t2, delta):
    p = experiment.default_prepared()
    e1 = experiment.correlation_exact(p, t1, t2)
    e2 = experiment.correlation_exact(p, t1 + delta, t2 - delta)
    assert abs(e1 - e2) < 1e-9


def test_no_single_particle_information(prepared):
    for t1 in np.linspace(0, np.pi, 13):
        p_plus = sum(outcome_probability(prepared, MeasurementSetting(t1, t2, 1, sb))
                     for t2 in [0.3] for sb in (1, -1))
        assert p_plus == pytest.approx(0.5, abs=1e-12)
    for mode in ("b1", "b2"):
        np.testing.assert_allclose(marginal(prepared.state, mode), [0.5, 0.5], atol=1e-12)


def test_verify_rotated_expansion_grid():
    g = np.linspace(-np.pi, np.pi, 13)
    assert min(experiment.verify_rotated_expansion(a, b) for a in g for b in g) >= 1 - 1e-9
    assert experiment.verify_rotated_expansion(0, 0) == pytest.approx(1, abs=1e-12)
    assert experiment.verify_rotated_expansion(np.pi / 8, np.pi / 8) == pytest.approx(1, abs=1e-12)


def test_correlated_branch_weight_follows_cos_squared():
    target = experiment.target_state()
    for a, b in [(0.1, 0.2), (np.pi / 8, np.pi / 8), (1.0, -0.3), (np.pi / 3, np.pi / 6)]:
        w = fidelity(experiment.correlated_branch(a, b), target)
        assert w == pytest.approx(math.cos(a + b) ** 2, abs=1e-12)


def test_analyzer_calibration_picks_parallel_diagonal_pair(prepared):
    # with the HWP in the path the (+,-) pair of the bare analyzer no longer
    # detects the projector state; (+,+) does under this HWP convention
    assert experiment.calibrate_analyzer(prepared) == (1, 1)


def test_analyzer_circuit_matches_projector(prepared):
    rng = np.random.default_rng(7)
    for t1, t2 in rng.uniform(0, 2 * np.pi, size=(20, 2)):
        circ = experiment.circuit_outcome_probabilities(prepared, t1, t2, (1, 1))
        proj = experiment.outcome_probabilities(prepared, t1, t2)
        assert np.max(np.abs(circ - proj)) < 1e-9


def test_analyzer_circuit_on_generic_states():
    # same check on random three-qubit states, which exercise the whole
    # even-parity subspace rather than only the prepared state
    rng = np.random.default_rng(11)
    for _ in range(10):
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        s = StateVector(experiment.TARGET_MODES, v / np.linalg.norm(v))
        t1, t2 = rng.uniform(0, np.pi, 2)
        w = experiment.analyzer_circuit_weights(s, t1, t2, (1, 1))
        for (sa, sb), wk in zip(experiment.SIGN_PAIRS, w):
            p = outcome_probability(s, MeasurementSetting(t1, t2, sa, sb))
            assert wk == pytest.approx(p / 2, abs=1e-12)


def test_prepare_state_argument_checks():
    with pytest.raises(ValueError):
        experiment.prepare_state([0, 0, 0])


def test_trigger_probability_is_half_for_any_trigger_waveplate():
    # GHZ marginal on T is maximally mixed, so |H>_T always fires half the time
    for phi in np.linspace(0, np.pi, 7):
        prep = experiment.prepare_state([phi, 0, 0, 0])
        assert prep.preparation_probability == pytest.approx(0.25, abs=1e-12)
