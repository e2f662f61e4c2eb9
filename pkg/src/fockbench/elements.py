"""Optical bench components reducible to the state-engine primitives.

Every element compiles to a short list of primitive actions: a 2x2 unitary
on a mode pair, a per-mode phase, or a mode permutation.  The same actions
feed both the state propagation and the composed single-photon transfer
matrix used by brute-force checks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import fock
from .errors import BadParam, BadWiring, PolarizationMismatch
from .fock import FockState, ModeId, Polarization

H, V = Polarization.H, Polarization.V


class ElementKind(Enum):
    BEAM_SPLITTER = "bs"
    PHASE_SHIFTER = "phase"
    POCKELS_CELL = "eop"
    POLARIZING_BS = "pbs"
    HALF_WAVE_PLATE = "hwp"
    QUARTER_WAVE_PLATE = "qwp"
    DELAY_LINE = "delay"
    MIRROR = "mirror"


@dataclass(frozen=True)
class Action:
    """One primitive: kind is 'u2', 'phase' or 'perm'."""

    kind: str
    modes: tuple[ModeId, ...]
    matrix: tuple = ()  # row-major 2x2 for 'u2', (phi,) for 'phase'
    mapping: tuple = ()  # ((src, dst), ...) for 'perm'


@dataclass(frozen=True)
class Element:
    kind: ElementKind
    paths: tuple[int, ...]
    params: tuple = ()
    is_knob: bool = False
    actions: tuple[Action, ...] = field(default=(), compare=True)

    def delay_ns(self, ns_per_m: float) -> float:
        if self.kind is ElementKind.DELAY_LINE:
            return self.params[0] * ns_per_m
        return 0.0


def _u2(m1: ModeId, m2: ModeId, u: np.ndarray) -> Action:
    rows = tuple(tuple(complex(x) for x in row) for row in u)
    return Action("u2", (m1, m2), matrix=rows)


def beam_splitter(path_a: int, path_b: int, theta: float) -> Element:
    """Non-polarizing splitter: the same rotation on the H pair and V pair.

    ``u = [[cos t, -sin t], [sin t, cos t]]``; a photon entering path_a of a
    45-degree splitter exits as ``2**-0.5 (|1,0> - |0,1>)``.
    """
    if not (0.0 <= theta <= math.pi / 2):
        raise BadParam(f"beam splitter theta {theta} outside [0, pi/2]")
    if path_a == path_b:
        raise BadWiring("beam splitter needs two distinct paths")
    c, s = math.cos(theta), math.sin(theta)
    u = np.array([[c, -s], [s, c]], dtype=complex)
    acts = (
        _u2(ModeId(path_a, H), ModeId(path_b, H), u),
        _u2(ModeId(path_a, V), ModeId(path_b, V), u),
    )
    return Element(ElementKind.BEAM_SPLITTER, (path_a, path_b), (theta,), actions=acts)


def phase_shifter(path: int, phi: float = 0.0, knob: bool = False) -> Element:
    """Path-length phase: both polarizations of the path get exp(i phi n)."""
    acts = (
        Action("phase", (ModeId(path, H),), matrix=(phi,)),
        Action("phase", (ModeId(path, V),), matrix=(phi,)),
    )
    return Element(ElementKind.PHASE_SHIFTER, (path,), (phi,), knob, acts)


def polarizing_bs(path_in_1: int, path_in_2: int, path_out_1: int, path_out_2: int) -> Element:
    """H transmits (in1->out1, in2->out2), V reflects (in1->out2, in2->out1)."""
    paths = (path_in_1, path_in_2, path_out_1, path_out_2)
    if len(set(paths)) != 4:
        raise BadWiring(f"polarizing splitter paths collide: {paths}")
    mapping = (
        (ModeId(path_in_1, H), ModeId(path_out_1, H)),
        (ModeId(path_out_1, H), ModeId(path_in_1, H)),
        (ModeId(path_in_2, H), ModeId(path_out_2, H)),
        (ModeId(path_out_2, H), ModeId(path_in_2, H)),
        (ModeId(path_in_1, V), ModeId(path_out_2, V)),
        (ModeId(path_out_2, V), ModeId(path_in_1, V)),
        (ModeId(path_in_2, V), ModeId(path_out_1, V)),
        (ModeId(path_out_1, V), ModeId(path_in_2, V)),
    )
    act = Action("perm", tuple(m for m, _ in mapping), mapping=mapping)
    return Element(ElementKind.POLARIZING_BS, paths, actions=(act,))


def _rot(x: float) -> np.ndarray:
    c, s = math.cos(x), math.sin(x)
    return np.array([[c, -s], [s, c]], dtype=complex)


def quarter_wave_plate(path: int, angle: float) -> Element:
    """Standard quarter-wave Jones unitary, fast axis at ``angle`` to H.

    ``Q(a) = R(a) diag(1, i) R(-a)``; at angle 0 this is diag(1, i).
    """
    q = _rot(angle) @ np.diag([1.0, 1j]) @ _rot(-angle)
    act = _u2(ModeId(path, H), ModeId(path, V), q)
    return Element(ElementKind.QUARTER_WAVE_PLATE, (path,), (angle,), actions=(act,))


def half_wave_plate(path: int, angle: float) -> Element:
    """Half-wave Jones unitary ``R(a) diag(1, -1) R(-a)``; at 45 deg swaps H/V."""
    hw = _rot(angle) @ np.diag([1.0, -1.0]) @ _rot(-angle)
    act = _u2(ModeId(path, H), ModeId(path, V), hw)
    return Element(ElementKind.HALF_WAVE_PLATE, (path,), (angle,), actions=(act,))


def pockels_cell(path: int) -> Element:
    """V-only half-wave switch; the armed/disarmed decision is made per trial."""
    return Element(ElementKind.POCKELS_CELL, (path,))


def delay_line(path: int, length_m: float) -> Element:
    """No amplitude change; contributes length * ns_per_m to the timing race."""
    if length_m <= 0:
        raise BadParam(f"delay length {length_m} m must be positive")
    return Element(ElementKind.DELAY_LINE, (path,), (length_m,))


@dataclass(frozen=True)
class EopConfig:
    """Pockels-cell drive: the 1.4 kV amplitude is metadata, arming is state."""

    v_half_wave_kv: float = 1.4
    armed: bool = False


def apply_eop(state: FockState, config: EopConfig, mode_v: ModeId) -> FockState:
    """sigma_z on the vacuum/one-photon qubit of ``mode_v`` when armed.

    The pi phase is applied as an exact (-1)**n sign so that arming twice
    returns the input bit-for-bit; H-polarized amplitudes are untouched.
    """
    if mode_v.pol is not V:
        raise PolarizationMismatch(f"Pockels cell acts on V modes, got {mode_v}")
    state.index_of(mode_v)
    if not config.armed:
        return state
    i = state.index_of(mode_v)
    out = {
        occ: (-amp if occ[i] % 2 else amp) for occ, amp in state.amplitudes.items()
    }
    return state._replace(out)


def apply_element(state: FockState, element: Element, armed: bool = False) -> FockState:
    """Run one element; ``armed`` is only consulted by the Pockels cell."""
    if element.kind is ElementKind.POCKELS_CELL:
        return apply_eop(state, EopConfig(armed=armed), ModeId(element.paths[0], V))
    for act in element.actions:
        if act.kind == "u2":
            state = fock.apply_two_mode_unitary(state, act.modes[0], act.modes[1], act.matrix)
        elif act.kind == "phase":
            state = fock.apply_phase(state, act.modes[0], act.matrix[0])
        elif act.kind == "perm":
            state = fock.relabel_modes(state, dict(act.mapping))
    return state


def single_photon_matrix(
    element: Element, modes: tuple[ModeId, ...], armed: bool = False
) -> np.ndarray:
    """Creation-operator transfer matrix of this element on the full mode set.

    Rows are input modes, columns output modes; composing a pipeline is the
    left-to-right matrix product.
    """
    n = len(modes)
    idx = {m: i for i, m in enumerate(modes)}
    mat = np.eye(n, dtype=complex)
    if element.kind is ElementKind.POCKELS_CELL:
        if armed:
            mat[idx[ModeId(element.paths[0], V)], idx[ModeId(element.paths[0], V)]] = -1.0
        return mat
    for act in element.actions:
        step = np.eye(n, dtype=complex)
        if act.kind == "u2":
            i1, i2 = idx[act.modes[0]], idx[act.modes[1]]
            (a, b), (c, d) = act.matrix
            step[i1, i1], step[i1, i2] = a, b
            step[i2, i1], step[i2, i2] = c, d
        elif act.kind == "phase":
            i = idx[act.modes[0]]
            step[i, i] = cmath.exp(1j * act.matrix[0])
        elif act.kind == "perm":
            for src, dst in act.mapping:
                step[idx[src], idx[src]] = 0.0
            for src, dst in act.mapping:
                step[idx[src], idx[dst]] = 1.0
        mat = mat @ step
    return mat
