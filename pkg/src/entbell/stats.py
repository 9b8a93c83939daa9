"""Noise, coincidence counting and CHSH statistics.

Random numbers come from numpy's ``PCG64`` bit generator.  Every simulated
setting gets its own generator seeded by ``SeedSequence([*seed, index])``,
so a result depends only on ``(seed, index)`` and never on evaluation
order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import experiment

LHV_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
#: (theta1, theta1~, theta2, theta2~) maximizing S for the ideal state
OPTIMAL_SETTINGS = (0.0, math.pi / 4, math.pi / 8, 3 * math.pi / 8)


class EstimationError(ValueError):
    pass


def basis_family(theta2: float) -> str:
    """``"hv"`` for Bob projections onto phi-/psi+ themselves (theta2 a
    multiple of pi/2), ``"pm"`` otherwise."""
    r = math.remainder(theta2, math.pi / 2)
    return "hv" if abs(r) < 1e-9 else "pm"


@dataclass(frozen=True)
class NoiseModel:
    """White-noise admixture ``p -> v p + (1 - v)/4``.

    In ``per_basis`` mode ``v`` is chosen by :func:`basis_family`; in
    ``uniform`` mode ``visibility_hv`` is used everywhere.
    """

    visibility_hv: float = 1.0
    visibility_pm: float = 1.0
    mode: str = "per_basis"

    def __post_init__(self):
        if self.mode not in ("per_basis", "uniform"):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        for v in (self.visibility_hv, self.visibility_pm):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"visibility {v} outside [0, 1]")

    @classmethod
    def uniform(cls, v: float) -> "NoiseModel":
        return cls(v, v, "uniform")

    @classmethod
    def per_basis(cls, v_hv: float, v_pm: float) -> "NoiseModel":
        return cls(v_hv, v_pm, "per_basis")

    def visibility(self, family: str) -> float:
        if self.mode == "uniform" or family == "hv":
            return self.visibility_hv
        if family == "pm":
            return self.visibility_pm
        raise ValueError(f"unknown basis family {family!r}")


IDEAL = NoiseModel.uniform(1.0)


def apply_noise(ideal_probs, model: NoiseModel, basis_family: str = "hv") -> np.ndarray:
    p = np.asarray(ideal_probs, dtype=float)
    v = model.visibility(basis_family)
    return v * p + (1.0 - v) * 0.25


def noisy_probabilities(prepared, theta1, theta2, noise: NoiseModel = IDEAL) -> np.ndarray:
    """Noisy outcome probabilities ``(++, +-, -+, --)``."""
    ideal = experiment.outcome_probabilities(prepared, theta1, theta2)
    return apply_noise(ideal, noise, basis_family(theta2))


@dataclass(frozen=True)
class SettingCounts:
    n_pp: float
    n_pm: float
    n_mp: float
    n_mm: float
    duration: float = 1800.0

    @property
    def total(self):
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm

    def as_tuple(self):
        return (self.n_pp, self.n_pm, self.n_mp, self.n_mm)


@dataclass(frozen=True)
class CorrelationEstimate:
    e_value: float
    sigma: float

    def __post_init__(self):
        if abs(self.e_value) > 1 + 1e-12:
            raise ValueError(f"|E| = {abs(self.e_value)} exceeds 1")


def correlation_from_counts(c: SettingCounts) -> CorrelationEstimate:
    """``E = (N++ + N-- - N+- - N-+) / N`` with first-order Poisson errors,
    ``sigma = 2 sqrt(N_same N_diff / N**3)``."""
    same = c.n_pp + c.n_mm
    diff = c.n_pm + c.n_mp
    total = same + diff
    if total <= 0:
        raise EstimationError("no coincidences recorded; E is undefined")
    return CorrelationEstimate((same - diff) / total,
                               2.0 * math.sqrt(same * diff / total ** 3))


@dataclass(frozen=True)
class ChshResult:
    e1: CorrelationEstimate
    e2: CorrelationEstimate
    e3: CorrelationEstimate
    e4: CorrelationEstimate
    s_value: float
    s_sigma: float
    sigmas_of_violation: float

    @property
    def correlations(self):
        return (self.e1, self.e2, self.e3, self.e4)

    @property
    def violates(self) -> bool:
        return self.s_value > LHV_BOUND


def chsh_value(e1, e2, e3, e4) -> float:
    """``|-E1 + E2 + E3 + E4|`` for E1=E(t1,t2), E2=E(t1~,t2), E3=E(t1,t2~),
    E4=E(t1~,t2~)."""
    return abs(-e1 + e2 + e3 + e4)


def chsh(e1, e2, e3, e4) -> ChshResult:
    es = [e if isinstance(e, CorrelationEstimate) else CorrelationEstimate(float(e), 0.0)
          for e in (e1, e2, e3, e4)]
    s = chsh_value(*(e.e_value for e in es))
    sigma = math.sqrt(sum(e.sigma ** 2 for e in es))
    if sigma > 0:
        nsig = (s - LHV_BOUND) / sigma
    else:
        nsig = math.copysign(math.inf, s - LHV_BOUND) if s != LHV_BOUND else 0.0
    return ChshResult(*es, s_value=s, s_sigma=sigma, sigmas_of_violation=nsig)


def setting_rng(seed, index: int = 0) -> np.random.Generator:
    """PCG64 generator for one setting.  ``seed`` is an int or a tuple of
    ints (e.g. ``(seed, replica)``); ``index`` numbers the setting."""
    words = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    entropy = [int(w) for w in words] + [int(index)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def simulate_counts(prepared, setting_pair, noise: NoiseModel, mean_total: float,
                    seed, index: int = 0, exact: bool = False) -> SettingCounts:
    """Four independent Poisson counts with means ``mean_total * p_noisy``.

    ``exact=True`` returns the means themselves (no sampling).
    """
    theta1, theta2 = setting_pair
    # clip rounding residue such as -1e-17 on exact zeros
    means = mean_total * np.clip(noisy_probabilities(prepared, theta1, theta2, noise), 0, None)
    if exact:
        return SettingCounts(*(float(m) for m in means))
    counts = setting_rng(seed, index).poisson(means)
    return SettingCounts(*(int(n) for n in counts))


def fringe_scan(prepared, theta2: float, theta1_list, noise: NoiseModel,
                mean_total: float, seed, exact: bool = False):
    """``[(theta1, N++)]``: coincidences with both Alice and Bob at +1 while
    Alice's polarizer turns."""
    theta1_list = list(theta1_list)
    if not theta1_list:
        raise ValueError("empty angle list")
    return [(t1, simulate_counts(prepared, (t1, theta2), noise, mean_total, seed,
                                 index=i, exact=exact).n_pp)
            for i, t1 in enumerate(theta1_list)]


@dataclass(frozen=True)
class FringeFit:
    offset: float
    visibility: float
    phase: float

    def __call__(self, theta):
        return self.offset * (1 + self.visibility * np.cos(2 * np.asarray(theta) + self.phase))


def fit_fringe(scan) -> FringeFit:
    """Least-squares fit of ``A (1 + V cos(2 theta + phi0))``.

    Linear in ``(A, A V cos phi0, -A V sin phi0)``, so it is solved directly.
    """
    theta = np.array([t for t, _ in scan], dtype=float)
    counts = np.array([n for _, n in scan], dtype=float)
    distinct = np.unique(np.round(np.exp(2j * theta), 9))
    if distinct.size < 4:
        raise EstimationError("need at least 4 distinct polarizer angles (mod pi)")
    if np.ptp(counts) == 0:
        raise EstimationError("constant counts: visibility fit is degenerate")
    design = np.column_stack([np.ones_like(theta), np.cos(2 * theta), np.sin(2 * theta)])
    (a0, ac, as_), *_ = np.linalg.lstsq(design, counts, rcond=None)
    if a0 <= 0:
        raise EstimationError("fitted mean count is not positive")
    amp = math.hypot(ac, as_)
    return FringeFit(float(a0), float(amp / a0), float(math.atan2(-as_, ac)))


def fit_visibility(scan) -> float:
    """(max - min) / (max + min) of the fitted sinusoid."""
    return fit_fringe(scan).visibility


# -- CHSH runs ---------------------------------------------------------------

def chsh_setting_pairs(settings=OPTIMAL_SETTINGS):
    """Setting pairs for E1..E4 given ``(t1, t1~, t2, t2~)``."""
    t1, t1t, t2, t2t = settings
    return ((t1, t2), (t1t, t2), (t1, t2t), (t1t, t2t))


def expected_correlations(prepared, settings=OPTIMAL_SETTINGS, noise: NoiseModel = IDEAL):
    out = []
    for t1, t2 in chsh_setting_pairs(settings):
        p = noisy_probabilities(prepared, t1, t2, noise)
        out.append(float(p[0] + p[3] - p[1] - p[2]))
    return out


def quantum_chsh(prepared, settings=OPTIMAL_SETTINGS, noise: NoiseModel = IDEAL) -> float:
    return chsh_value(*expected_correlations(prepared, settings, noise))


def mean_total_for_sigma(prepared, target_sigma: float, settings=OPTIMAL_SETTINGS,
                         noise: NoiseModel = IDEAL) -> float:
    """Mean coincidences per setting pair giving ``sigma_E ~ target_sigma``,
    from ``sigma_E**2 = (1 - E**2) / N`` at the mean expected ``|E|``."""
    e = np.mean(np.abs(expected_correlations(prepared, settings, noise)))
    return float((1.0 - e ** 2) / target_sigma ** 2)


def run_chsh(prepared, noise: NoiseModel, mean_total: float, seed,
             settings=OPTIMAL_SETTINGS, exact: bool = False):
    """Simulate the four setting pairs; returns ``(counts, ChshResult)``."""
    counts = [simulate_counts(prepared, pair, noise, mean_total, seed, index=i, exact=exact)
              for i, pair in enumerate(chsh_setting_pairs(settings))]
    return counts, chsh(*(correlation_from_counts(c) for c in counts))


# -- bounds ------------------------------------------------------------------

def lhv_strategies():
    """All 16 deterministic local strategies ``(a, a~, b, b~)`` with their
    signed CHSH sum ``-a b + a~ b + a b~ + a~ b~``."""
    for a, at, b, bt in itertools.product((1, -1), repeat=4):
        yield (a, at, b, bt), -a * b + at * b + a * bt + at * bt


def lhv_max_chsh() -> float:
    return float(max(abs(s) for _, s in lhv_strategies()))


def tsirelson_grid_max(prepared, n: int = 20) -> float:
    """Largest S over all setting quadruples drawn from an ``n``-point grid
    on [0, pi) for both parties."""
    grid = np.arange(n) * np.pi / n
    e = np.array([[experiment.correlation_exact(prepared, t1, t2) for t2 in grid]
                  for t1 in grid])
    # S[i, k, j, l] with t1=grid[i], t1~=grid[k], t2=grid[j], t2~=grid[l]
    s = (-e[:, None, :, None] + e[None, :, :, None]
         + e[:, None, None, :] + e[None, :, None, :])
    return float(np.max(np.abs(s)))


def critical_visibility(prepared=None, xtol: float = 1e-12) -> float:
    """Uniform white-noise visibility at which the optimal-settings S is 2."""
    prepared = experiment.default_prepared() if prepared is None else prepared

    def excess(v):
        return quantum_chsh(prepared, OPTIMAL_SETTINGS, NoiseModel.uniform(v)) - LHV_BOUND

    return float(optimize.bisect(excess, 0.0, 1.0, xtol=xtol))
