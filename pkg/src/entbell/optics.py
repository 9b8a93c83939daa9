"""Jones-matrix models of the optical elements in the setup.

Angles are physical mount angles in radians, measured in real space from
the horizontal.  A half-wave plate mounted at ``phi`` rotates linear
polarization by ``2 * phi`` in real space.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import (EMPTY_TOL, SingleQubitOp, StateError, StateVector,
                     project, relabel)

QUARTER = np.pi / 2


class PostSelectionError(RuntimeError):
    """A post-selection step has (numerically) zero success probability."""


def _rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def waveplate(retardance: float, angle: float) -> SingleQubitOp:
    """Linear retarder with eigenvalue 1 on the fast axis (at ``angle``) and
    ``exp(1j * retardance)`` on the slow axis."""
    rot = _rotation(angle)
    core = np.diag([1.0, np.exp(1j * retardance)])
    return SingleQubitOp(rot @ core @ rot.T, name=f"WP({retardance:.4g},{angle:.4g})")


def hwp(angle: float) -> SingleQubitOp:
    """Half-wave plate: ``[[cos 2a, sin 2a], [sin 2a, -cos 2a]]``.

    Real, symmetric and an involution; equal to ``waveplate(pi, angle)``.
    """
    c, s = np.cos(2 * angle), np.sin(2 * angle)
    return SingleQubitOp(np.array([[c, s], [s, -c]]), name=f"HWP({angle:.4g})")


def qwp(angle: float, retardance: float = QUARTER) -> SingleQubitOp:
    """Quarter-wave plate with eigenvalues (1, i), fast axis at ``angle``.

    ``retardance`` exists so a broken convention can be injected in tests.
    """
    return waveplate(retardance, angle)


def phase_shifter(phase: float) -> SingleQubitOp:
    """``diag(1, exp(1j*phase))``: a relative phase on the V component."""
    return SingleQubitOp(np.diag([1.0, np.exp(1j * phase)]), name=f"PS({phase:.4g})")


def polarizer_projector(angle: float) -> SingleQubitOp:
    """Rank-1 projector onto ``cos(angle)|H> + sin(angle)|V>``."""
    v = np.array([np.cos(angle), np.sin(angle)])
    return SingleQubitOp(np.outer(v, v), name=f"POL({angle:.4g})")


#: projector onto span{|HH>, |VV>} of two modes
EVEN_PARITY = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)


@dataclass(frozen=True)
class PbsPorts:
    input_modes: tuple
    output_modes: tuple

    def __post_init__(self):
        if len(self.input_modes) != 2 or len(self.output_modes) != 2:
            raise StateError("a PBS has two input and two output ports")


def pbs_parity_check(s: StateVector, ports: PbsPorts):
    """Coincidence-post-selected polarizing beamsplitter.

    H is transmitted and V reflected, so one photon in each output port
    requires equal H/V polarization of the two inputs.  The even-parity
    component is kept, renormalized and moved to the output labels
    (first input -> first output).  Returns ``(state, success_probability)``.
    """
    for m in ports.input_modes:
        s.axis(m)
    out, p = project(s, EVEN_PARITY, ports.input_modes)
    if out.empty or p < EMPTY_TOL:
        raise PostSelectionError(
            f"no even-parity component on {ports.input_modes}")
    return relabel(out, dict(zip(ports.input_modes, ports.output_modes))), p
