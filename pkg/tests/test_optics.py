import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entbell import optics
from entbell.qstate import (StateVector, bell_state, fidelity, make_ket, project,
                            projection_probability, tensor)

import oracle

grid = np.linspace(0, 2 * np.pi, 100)


def random_state(seed, labels):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2 ** len(labels)) + 1j * rng.normal(size=2 ** len(labels))
    return StateVector(labels, v / np.linalg.norm(v))


def up_to_phase(a, b):
    return abs(abs(np.vdot(a, b)) - 1) < 1e-12


def test_hwp_zero_fast_axis_eigenstates():
    h = optics.hwp(0).matrix
    np.testing.assert_allclose(h @ [1, 0], [1, 0])
    np.testing.assert_allclose(h @ [0, 1], [0, -1])


def test_hwp_quarter_turn_swaps_h_v():
    np.testing.assert_allclose(optics.hwp(np.pi / 4).matrix @ [1, 0], [0, 1], atol=1e-15)


def test_hwp_eighth_turn_makes_diagonal():
    out = optics.hwp(np.pi / 8).matrix @ [1, 0]
    np.testing.assert_allclose(out, oracle.to_vector(oracle.ket(H=oracle.S2, V=oracle.S2), 1),
                               atol=1e-15)


def test_hwp_matches_hand_matrix_and_general_retarder():
    for phi in grid:
        np.testing.assert_allclose(optics.hwp(phi).matrix, oracle.hwp_matrix(phi), atol=1e-15)
        w = optics.waveplate(np.pi, phi).matrix
        assert up_to_phase(w.reshape(-1) / 2 ** 0.5, optics.hwp(phi).matrix.reshape(-1) / 2 ** 0.5)


def test_hwp_rotates_polarization_by_twice_the_mount_angle():
    for phi in grid:
        out = optics.hwp(phi).matrix @ [1, 0]
        np.testing.assert_allclose(out, [np.cos(2 * phi), np.sin(2 * phi)], atol=1e-12)


def test_hwp_involution_and_unitary():
    for phi in grid:
        h = optics.hwp(phi).matrix
        assert np.max(np.abs(h @ h - np.eye(2))) < 1e-12
        assert optics.hwp(phi).is_unitary()


def test_qwp_matches_hand_matrix():
    for phi in grid:
        np.testing.assert_allclose(optics.qwp(phi).matrix, oracle.qwp_matrix(phi), atol=1e-12)


def test_qwp_unitary_and_eigenvalues():
    for phi in grid:
        q = optics.qwp(phi)
        assert q.is_unitary()
        np.testing.assert_allclose(np.sort_complex(np.linalg.eigvals(q.matrix)),
                                   np.sort_complex([1, 1j]), atol=1e-12)


def test_qwp_zero_keeps_h():
    assert up_to_phase(optics.qwp(0).matrix @ [1, 0], [1, 0])


def test_qwp_45_gives_circular_light():
    # fast axis eigenvalue 1, slow axis i: H goes to (|H> - i|V>)/sqrt2 = |L>
    out = optics.qwp(np.pi / 4).matrix @ [1, 0]
    assert up_to_phase(out, make_ket(["a"], "L").amplitudes)
    assert up_to_phase(optics.qwp(np.pi / 4).matrix @ [0, 1], make_ket(["a"], "R").amplitudes)
    assert up_to_phase(optics.qwp(3 * np.pi / 4).matrix @ [1, 0], make_ket(["a"], "R").amplitudes)


def test_two_quarter_waves_make_a_half_wave():
    for phi in grid:
        qq = (optics.qwp(phi) @ optics.qwp(phi)).matrix
        assert up_to_phase(qq.reshape(-1) / 2 ** 0.5, optics.hwp(phi).matrix.reshape(-1) / 2 ** 0.5)


def test_polarizer_examples():
    np.testing.assert_allclose(optics.polarizer_projector(0).matrix, [[1, 0], [0, 0]])
    plus = make_ket(["a"], "+")
    assert projection_probability(plus, optics.polarizer_projector(np.pi / 4), ("a",)) \
        == pytest.approx(1)
    for t in grid:
        p = optics.polarizer_projector(t)
        assert p.is_projector()
        np.testing.assert_allclose(p.matrix + optics.polarizer_projector(t + np.pi / 2).matrix,
                                   np.eye(2), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-np.pi, np.pi))
def test_polarizer_outcomes_complete(seed, theta):
    s = random_state(seed, ("a", "b"))
    p1 = projection_probability(s, optics.polarizer_projector(theta), ("b",))
    p2 = projection_probability(s, optics.polarizer_projector(theta + np.pi / 2), ("b",))
    assert abs(p1 + p2 - 1) < 1e-12


def test_pbs_rejects_odd_parity():
    s = make_ket(["a1", "a2"], "HV")
    with pytest.raises(optics.PostSelectionError):
        optics.pbs_parity_check(s, optics.PbsPorts(("a1", "a2"), ("T", "a")))


def test_pbs_diagonal_inputs():
    s = make_ket(["a1", "a2"], "++")
    out, p = optics.pbs_parity_check(s, optics.PbsPorts(("a1", "a2"), ("T", "a")))
    assert p == pytest.approx(0.5)
    assert out.labels == ("T", "a")
    assert fidelity(out, bell_state("phi+", ("T", "a"))) == pytest.approx(1, abs=1e-12)
    assert out.norm_weight == pytest.approx(0.5)


def test_pbs_fuses_two_pairs_into_ghz_oracle():
    src = tensor(bell_state("phi+", ("a1", "b1")), bell_state("phi+", ("a2", "b2")))
    out, p = optics.pbs_parity_check(src, optics.PbsPorts(("a1", "a2"), ("T", "a")))
    # brute force: keep terms with equal letters at positions 0 and 2 (a1, a2)
    full = oracle.kron(oracle.phi_plus(), oracle.phi_plus())
    kept = {k: v for k, v in full.items() if k[0] == k[2]}
    assert p == pytest.approx(oracle.norm2(kept), abs=1e-12) and p == pytest.approx(0.5)
    # (T, b1, a, b2) -> order as output labels
    ghz = oracle.ket(HHHH=oracle.S2, VVVV=oracle.S2)
    ref = StateVector(("T", "b1", "a", "b2"), oracle.to_vector(ghz, 4))
    assert fidelity(out, ref) == pytest.approx(1, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_pbs_success_is_even_parity_weight(seed):
    s = random_state(seed, ("a1", "b1", "a2", "b2"))
    direct = projection_probability(s, np.diag([1, 0, 0, 1]), ("a1", "a2"))
    out, p = optics.pbs_parity_check(s, optics.PbsPorts(("a1", "a2"), ("x", "y")))
    assert abs(p - direct) < 1e-12
    # no odd-parity component survives on the checked pair
    t = np.moveaxis(out.tensor_view(), [out.axis("x"), out.axis("y")], [0, 1])
    assert np.max(np.abs(t[0, 1])) < 1e-12 and np.max(np.abs(t[1, 0])) < 1e-12
    assert abs(out.norm - 1) < 1e-12


def test_pbs_ports_validation():
    with pytest.raises(ValueError):
        optics.PbsPorts(("a",), ("b", "c"))


def test_phase_shifter():
    out = optics.phase_shifter(np.pi / 2).matrix @ [1, 1]
    np.testing.assert_allclose(out, [1, 1j], atol=1e-15)
