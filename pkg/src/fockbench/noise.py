"""Randomness-bearing models: detection, dark counts, channel dephasing.

All draws go through a caller-supplied ``numpy.random.Generator`` so trial
streams are reproducible; parallel workers must each own an independent
stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fock
from .errors import BadCalibration, BadParam, NotNormalized
from .fock import FockState, ModeId, Occupation


@dataclass(frozen=True)
class NoiseModel:
    """Detector and channel noise knobs.

    qe: per-photon detection probability (the bench detectors are ~0.45).
    dephasing_sigma: std-dev in radians of the Gaussian phase kicked onto
        the nonlocal channel's delay-line branch each trial.
    dark_count_prob: per-detector per-trial false-click probability.
    """

    qe: float = 1.0
    dephasing_sigma: float = 0.0
    dark_count_prob: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.qe <= 1.0:
            raise BadParam(f"qe {self.qe} outside [0, 1]")
        if self.dephasing_sigma < 0.0:
            raise BadParam(f"dephasing sigma {self.dephasing_sigma} negative")
        if not 0.0 <= self.dark_count_prob < 1.0:
            raise BadParam(f"dark count prob {self.dark_count_prob} outside [0, 1)")


@dataclass
class ClickPattern:
    """Which detectors clicked, and when (ns); timestamps iff clicked."""

    clicks: dict[str, bool] = field(default_factory=dict)
    timestamps_ns: dict[str, float] = field(default_factory=dict)

    def clicked(self) -> list[str]:
        return [name for name, hit in self.clicks.items() if hit]

    def exactly_one(self) -> str | None:
        hits = self.clicked()
        return hits[0] if len(hits) == 1 else None


def sample_occupations(state: FockState, rng: np.random.Generator) -> Occupation:
    """Draw one basis entry with Born-rule probability |amplitude|**2."""
    if abs(state.norm_sq() - 1.0) > 1e-9:
        raise NotNormalized(f"state norm^2 = {state.norm_sq():.9f}")
    entries = sorted(state.amplitudes.items())
    probs = np.array([abs(a) ** 2 for _, a in entries])
    cdf = np.cumsum(probs)
    i = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return entries[min(i, len(entries) - 1)][0]


def sample_mode_pattern(
    state: FockState, modes: list[ModeId], rng: np.random.Generator
) -> tuple[int, ...]:
    """Born-rule draw of the joint occupation of ``modes`` (marginal)."""
    if abs(state.norm_sq() - 1.0) > 1e-9:
        raise NotNormalized(f"state norm^2 = {state.norm_sq():.9f}")
    idx = [state.index_of(m) for m in modes]
    marginal: dict[tuple[int, ...], float] = {}
    for occ, amp in state.amplitudes.items():
        key = tuple(occ[i] for i in idx)
        marginal[key] = marginal.get(key, 0.0) + abs(amp) ** 2
    keys = sorted(marginal)
    cdf = np.cumsum([marginal[k] for k in keys])
    i = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return keys[min(i, len(keys) - 1)]


def click_probability(n_photons: int, qe: float) -> float:
    """Chance a non-number-resolving detector fires on n photons."""
    return 1.0 - (1.0 - qe) ** n_photons


def thin_by_efficiency(
    pattern_ideal: dict[str, int],
    qe: float,
    rng: np.random.Generator,
    dark_count_prob: float = 0.0,
    at_time_ns: float = 0.0,
) -> ClickPattern:
    """Each photon registers independently with probability qe.

    A detector clicks when at least one photon registers or a dark count
    fires; non-number-resolving, so the click carries no photon count.
    """
    if not 0.0 <= qe <= 1.0:
        raise BadParam(f"qe {qe} outside [0, 1]")
    out = ClickPattern()
    for name, n in pattern_ideal.items():
        hit = rng.random() < click_probability(n, qe) if n else False
        if dark_count_prob and rng.random() < dark_count_prob:
            hit = True
        out.clicks[name] = bool(hit)
        if hit:
            out.timestamps_ns[name] = at_time_ns
    return out


def apply_channel_dephasing(
    state: FockState, mode: ModeId, sigma: float, rng: np.random.Generator
) -> FockState:
    """Random relative phase theta ~ N(0, sigma^2) on the channel branch.

    Averaged over trials this multiplies fringe visibility by
    exp(-sigma^2 / 2); the per-trial state stays pure and normalized.
    """
    if sigma < 0:
        raise BadParam(f"sigma {sigma} negative")
    if sigma == 0.0:
        return state
    theta = rng.normal(0.0, sigma)
    return fock.apply_phase(state, mode, theta)


def calibrate_sigma(v_in: float, v_out: float) -> float:
    """Dephasing sigma that degrades visibility v_in to v_out.

    From E[exp(i theta)] = exp(-sigma^2/2): sigma = sqrt(2 ln(v_in/v_out)).
    """
    if not (0.0 < v_out <= v_in <= 1.0):
        raise BadCalibration(f"need 0 < v_out <= v_in <= 1, got {v_in}, {v_out}")
    return math.sqrt(2.0 * math.log(v_in / v_out))
