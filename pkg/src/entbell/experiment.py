"""The three-photon experiment: preparation from two Bell pairs and the
measurements made by Alice (a polarizer) and Bob (a restricted Bell-state
analyzer on two photons).

Setting angles are real-space angles in radians.  Alice's ``theta1`` is the
polarizer orientation; Bob's ``theta2`` is the mixing angle of his
projection onto ``cos(theta2)|phi-> + sin(theta2)|psi+>``, which the
half-wave plate in mode b2 realizes when mounted at ``theta2 / 2``.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from . import optics
from .qstate import (BellKind, StateVector, apply_single, bell_state, fidelity,
                     make_ket, project, projection_probability, reorder,
                     tensor)

FIDELITY_TOL = 1e-9
SOURCE_MODES = ("a1", "b1", "a2", "b2")
FUSION_PORTS = optics.PbsPorts(("a1", "a2"), ("T", "a"))
GHZ_MODES = ("T", "a", "b1", "b2")
TARGET_MODES = ("a", "b1", "b2")
BOB_MODES = ("b1", "b2")
SIGN_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

_QWP_GRID = tuple(k * np.pi / 4 for k in range(4))
_PHASE_GRID = tuple(k * np.pi / 2 for k in range(4))


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class MeasurementSetting:
    theta1: float
    theta2: float
    sign_a: int = 1
    sign_b: int = 1

    def __post_init__(self):
        if self.sign_a not in (1, -1) or self.sign_b not in (1, -1):
            raise ValueError("outcome signs must be +1 or -1")

    @property
    def alice_polarizer_angle(self) -> float:
        return self.theta1 if self.sign_a == 1 else self.theta1 + np.pi / 2

    @property
    def bob_hwp_angle(self) -> float:
        return self.theta2 / 2 if self.sign_b == 1 else (self.theta2 + np.pi / 2) / 2


@dataclass(frozen=True)
class PreparedState:
    state: StateVector
    preparation_probability: float
    calibration_phase: float
    qwp_angles: tuple = (0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Calibration:
    qwp_angles: tuple
    calibration_phase: float
    fidelity: float


# -- reference states ------------------------------------------------------

def target_state() -> StateVector:
    """(|H>_a |phi->_{b1,b2} - |V>_a |psi+>_{b1,b2}) / sqrt(2)."""
    h = tensor(make_ket(["a"], "H"), bell_state(BellKind.PHI_MINUS, BOB_MODES))
    v = tensor(make_ket(["a"], "V"), bell_state(BellKind.PSI_PLUS, BOB_MODES))
    return StateVector(TARGET_MODES, (h.amplitudes - v.amplitudes) / np.sqrt(2))


def ghz_circular_state() -> StateVector:
    """(|RRR> + |LLL>) / sqrt(2) on (a, b1, b2)."""
    r = make_ket(TARGET_MODES, "RRR").amplitudes
    l = make_ket(TARGET_MODES, "LLL").amplitudes
    return StateVector(TARGET_MODES, (r + l) / np.sqrt(2))


def ghz4_state() -> StateVector:
    """(|HHHH> + |VVVV>) / sqrt(2) on (T, a, b1, b2)."""
    amps = np.zeros(16, dtype=complex)
    amps[0] = amps[15] = 1 / np.sqrt(2)
    return StateVector(GHZ_MODES, amps)


# -- preparation -------------------------------------------------------------

def build_source() -> StateVector:
    """|phi+>_{a1,b1} (x) |phi+>_{a2,b2}, ordered (a1, b1, a2, b2)."""
    return tensor(bell_state(BellKind.PHI_PLUS, ("a1", "b1")),
                  bell_state(BellKind.PHI_PLUS, ("a2", "b2")))


def fuse_source() -> tuple:
    """Source after PBS1, reordered to (T, a, b1, b2), and the PBS success
    probability."""
    fused, p = optics.pbs_parity_check(build_source(), FUSION_PORTS)
    return reorder(fused, GHZ_MODES), p


def prepare_state(qwp_angles, calibration_phase: float = 0.0,
                  qwp_retardance: float = optics.QUARTER) -> PreparedState:
    """QWPs on (T, a, b1, b2), trigger projected on |H>_T, then a relative
    phase on mode a.  Raises ``PostSelectionError`` if the trigger
    projection is empty."""
    qwp_angles = tuple(float(x) for x in qwp_angles)
    if len(qwp_angles) != 4:
        raise ValueError("need one QWP angle per mode T, a, b1, b2")
    s, p_fuse = fuse_source()
    for mode, angle in zip(GHZ_MODES, qwp_angles):
        s = apply_single(optics.qwp(angle, qwp_retardance), mode, s)
    s, p_trig = project(s, optics.polarizer_projector(0.0), ("T",))
    if s.empty:
        raise optics.PostSelectionError("trigger never transmits |H>_T")
    # the trigger is now |H>_T: drop it
    amps = s.tensor_view()[0].reshape(-1)
    out = StateVector(TARGET_MODES, amps, s.norm_weight)
    out = apply_single(optics.phase_shifter(calibration_phase), "a", out)
    return PreparedState(out, p_fuse * p_trig, float(calibration_phase), qwp_angles)


def calibrate_preparation(qwp_retardance: float = optics.QUARTER) -> Calibration:
    """First grid point (QWP angles in multiples of pi/4 on [0, pi), phase in
    multiples of pi/2; T varies slowest, phase fastest) whose prepared state
    matches the target to 1e-9 in fidelity."""
    target = target_state()
    for *angles, phase in itertools.product(*[_QWP_GRID] * 4, _PHASE_GRID):
        try:
            prepared = prepare_state(angles, phase, qwp_retardance)
        except optics.PostSelectionError:
            continue
        f = fidelity(target, prepared.state)
        if f >= 1 - FIDELITY_TOL:
            return Calibration(tuple(angles), phase, f)
    raise CalibrationError(
        "no QWP/phase configuration reproduces the target state; "
        "check wave-plate conventions")


@functools.lru_cache(maxsize=None)
def default_prepared() -> PreparedState:
    """Prepared state using the calibration frozen in the default config."""
    from .config import load_config
    cfg = load_config()
    return prepare_state(np.deg2rad(cfg.qwp_angles_deg),
                         np.deg2rad(cfg.calibration_phase_deg),
                         np.deg2rad(cfg.qwp_retardance_deg))


# -- measurements ------------------------------------------------------------

def alice_projector(theta1: float, sign: int = 1):
    return optics.polarizer_projector(theta1 if sign == 1 else theta1 + np.pi / 2)


def bob_ket(theta2: float, sign: int = 1) -> np.ndarray:
    """Bob's analyzer state on (b1, b2) as a length-4 vector."""
    phi_m = bell_state(BellKind.PHI_MINUS, BOB_MODES).amplitudes
    psi_p = bell_state(BellKind.PSI_PLUS, BOB_MODES).amplitudes
    c, s = np.cos(theta2), np.sin(theta2)
    if sign == 1:
        return c * phi_m + s * psi_p
    return -s * phi_m + c * psi_p


def bob_projector(theta2: float, sign: int = 1) -> np.ndarray:
    v = bob_ket(theta2, sign)
    return np.outer(v, v.conj())


def outcome_probability(prepared, setting: MeasurementSetting) -> float:
    """Joint probability ``<Psi| A (x) B |Psi>`` for one sign pair."""
    state = getattr(prepared, "state", prepared)
    after_a = apply_single(alice_projector(setting.theta1, setting.sign_a), "a", state)
    return projection_probability(after_a, bob_projector(setting.theta2, setting.sign_b),
                                  BOB_MODES)


def outcome_probabilities(prepared, theta1: float, theta2: float) -> np.ndarray:
    """Probabilities ordered ``(++, +-, -+, --)``."""
    return np.array([outcome_probability(prepared, MeasurementSetting(theta1, theta2, a, b))
                     for a, b in SIGN_PAIRS])


def correlation_exact(prepared, theta1: float, theta2: float) -> float:
    p = outcome_probabilities(prepared, theta1, theta2)
    return float(p[0] + p[3] - p[1] - p[2])


# -- Bob's analyzer as an optical circuit ------------------------------------

def analyzer_circuit_weights(prepared, theta1: float, theta2: float,
                             analyzer_pair=(1, 1)) -> np.ndarray:
    """Unnormalized four-fold coincidence weights ``(++, +-, -+, --)``.

    For Bob's +1 (-1) outcome the HWP in b2 sits at ``theta2/2``
    (``(theta2 + pi/2)/2``); PBS2 keeps even H/V parity; the photons then
    pass polarizers along the diagonal (+1) or antidiagonal (-1) directions
    given by ``analyzer_pair``.
    """
    state = getattr(prepared, "state", prepared)
    pol = {1: optics.polarizer_projector(np.pi / 4),
           -1: optics.polarizer_projector(-np.pi / 4)}
    weights = []
    for sign_a, sign_b in SIGN_PAIRS:
        setting = MeasurementSetting(theta1, theta2, sign_a, sign_b)
        s = apply_single(optics.hwp(setting.bob_hwp_angle), "b2", state)
        try:
            s, p_pbs = optics.pbs_parity_check(s, optics.PbsPorts(BOB_MODES, BOB_MODES))
        except optics.PostSelectionError:
            weights.append(0.0)
            continue
        w = p_pbs
        for mode, proj in (("b1", pol[analyzer_pair[0]]), ("b2", pol[analyzer_pair[1]]),
                           ("a", alice_projector(theta1, sign_a))):
            s, p = project(s, proj, (mode,))
            w *= p
            if s.empty:
                break
        weights.append(w)
    return np.array(weights)


def circuit_outcome_probabilities(prepared, theta1, theta2, analyzer_pair=(1, 1)):
    """Circuit weights renormalized over accepted coincidences."""
    w = analyzer_circuit_weights(prepared, theta1, theta2, analyzer_pair)
    total = w.sum()
    if total <= 0:
        raise optics.PostSelectionError("analyzer accepted no events")
    return w / total


def calibrate_analyzer(prepared=None, n_checks: int = 8):
    """Polarizer pair for which the circuit reproduces Bob's rank-1
    projector statistics.  Candidates are tried in the order (+,-), (-,+),
    (+,+), (-,-) on a fixed deterministic angle set."""
    prepared = default_prepared() if prepared is None else prepared
    angles = [(0.1 + 0.37 * k, 0.23 + 0.61 * k) for k in range(n_checks)]
    def matches(pair, t1, t2):
        try:
            p = circuit_outcome_probabilities(prepared, t1, t2, pair)
        except optics.PostSelectionError:
            return False
        return np.max(np.abs(p - outcome_probabilities(prepared, t1, t2))) < FIDELITY_TOL

    for pair in ((1, -1), (-1, 1), (1, 1), (-1, -1)):
        if all(matches(pair, t1, t2) for t1, t2 in angles):
            return pair
    raise CalibrationError("no analyzer polarizer pair matches Bob's projectors")


# -- the rotated-settings expansion -------------------------------------------

def rotated_expansion(theta1: float, theta2: float) -> StateVector:
    """The target state written out term by term in the rotated bases::

        cos(t1+t2) (|H'>|phi'> - |V'>|psi'>)/sqrt2
      + sin(t1+t2) (|V'>|phi'> + |H'>|psi'>)/sqrt2

    with H' at t1, phi' = cos t2 phi- + sin t2 psi+, and the orthogonal
    kets V', psi' taken at ``angle - pi/2``.  That choice of phase for the
    orthogonal kets is what makes the sine branch enter with a plus sign.
    """
    h = np.array([np.cos(theta1), np.sin(theta1)])
    v = np.array([np.cos(theta1 - np.pi / 2), np.sin(theta1 - np.pi / 2)])
    phi = bob_ket(theta2, 1)
    psi = bob_ket(theta2 - np.pi / 2, 1)
    c, s = np.cos(theta1 + theta2), np.sin(theta1 + theta2)
    amps = (c * (np.kron(h, phi) - np.kron(v, psi))
            + s * (np.kron(v, phi) + np.kron(h, psi))) / np.sqrt(2)
    return StateVector(TARGET_MODES, amps)


def correlated_branch(theta1: float, theta2: float) -> StateVector:
    """(|H'>|phi'> - |V'>|psi'>)/sqrt2 in the rotated bases."""
    h = np.array([np.cos(theta1), np.sin(theta1)])
    v = np.array([np.cos(theta1 - np.pi / 2), np.sin(theta1 - np.pi / 2)])
    phi = bob_ket(theta2, 1)
    psi = bob_ket(theta2 - np.pi / 2, 1)
    return StateVector(TARGET_MODES, (np.kron(h, phi) - np.kron(v, psi)) / np.sqrt(2))


def verify_rotated_expansion(theta1: float, theta2: float, state: StateVector | None = None) -> float:
    """Fidelity between ``state`` (default: the ideal target) and its
    rotated-basis expansion."""
    state = target_state() if state is None else state
    return fidelity(rotated_expansion(theta1, theta2), state)
