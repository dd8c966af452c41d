"""Gaussian mutual information of the schemes, pre-log slopes and rank audits.

All information quantities are in bits. Symbols are i.i.d. CN(0, P/m) and
the receiver noise covariance is the identity, so every quantity reduces to
differences of ``log2 det(I + (P/m) F F^H)`` for suitable column subsets of
a receiver's observation map ``F``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._linalg import DEFAULT_RANK_TOL, logdet_factor_bits, numeric_rank
from .ana_schemes import (
    SchemeKind,
    SchemeMatrices,
    build_precoders,
    build_scheme,
    phase_plan,
)
from .channel_model import sample_states
from .sdof_theory import AntennaConfig, bcc_sum_point, sdof_wiretap_delayed, sdof_wiretap_partial

__all__ = [
    "DEFAULT_GRID_DB",
    "MiCurve",
    "RankCheck",
    "RankReport",
    "SdofEstimate",
    "SlopeEstimate",
    "SnrGrid",
    "fit_slope",
    "leakage_eaves",
    "leakage_projected",
    "monte_carlo_sdof",
    "mutual_info",
    "mutual_info_curve",
    "mutual_info_legit",
    "numeric_rank",
    "rank_lemma_check",
    "theory_value",
    "trial_seed",
    "verify_ranks",
]

DEFAULT_GRID_DB = (40.0, 60.0, 80.0, 100.0)


@dataclass(frozen=True)
class SnrGrid:
    powers: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.powers)
        if len(p) < 2:
            raise ValueError("an SNR grid needs at least two points")
        if any(x <= 0 for x in p):
            raise ValueError("powers must be positive")
        if any(b <= a for a, b in zip(p, p[1:])):
            raise ValueError("powers must be strictly ascending")
        object.__setattr__(self, "powers", p)

    @classmethod
    def from_db(cls, db: Sequence[float] = DEFAULT_GRID_DB) -> "SnrGrid":
        return cls(tuple(10.0 ** (float(x) / 10.0) for x in db))

    @property
    def db(self) -> tuple[float, ...]:
        return tuple(10.0 * math.log10(p) for p in self.powers)

    @property
    def log2_powers(self) -> np.ndarray:
        return np.log2(np.asarray(self.powers))

    @property
    def span_db(self) -> float:
        return self.db[-1] - self.db[0]


@dataclass(frozen=True)
class MiCurve:
    grid: SnrGrid
    values: tuple[float, ...]


@dataclass(frozen=True)
class SlopeEstimate:
    slope: float
    intercept: float
    residual: float


@dataclass(frozen=True)
class RankCheck:
    name: str
    expected: int
    observed: int

    @property
    def passed(self) -> bool:
        return self.expected == self.observed


@dataclass(frozen=True)
class RankReport:
    checks: tuple[RankCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> RankCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def fit_slope(grid: SnrGrid, values) -> SlopeEstimate:
    """Least-squares line of ``values`` against ``log2 P``."""
    x = grid.log2_powers
    y = np.asarray(values, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return SlopeEstimate(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))


def rank_lemma_check(a, grid: SnrGrid) -> SlopeEstimate:
    """Slope of ``log2 det(I + P A A^H)`` against ``log2 P``; tends to rank(A)."""
    if grid.span_db < 40.0:
        raise ValueError(f"grid spans {grid.span_db:.1f} dB; need at least 40 dB")
    a = np.asarray(a)
    values = [logdet_factor_bits(a, p) for p in grid.powers]
    return fit_slope(grid, values)


# ---------------------------------------------------------------------------
# mutual information


def _columns(scheme: SchemeMatrices, names) -> np.ndarray:
    idx = [np.arange(scheme.source_dim)[scheme.source_slice(n)] for n in names]
    return np.concatenate(idx) if idx else np.zeros(0, dtype=int)


def mutual_info(
    scheme: SchemeMatrices,
    power: float,
    receiver: str,
    target: Sequence[str],
    given: Sequence[str] = (),
    silent: Sequence[str] = (),
    route: str = "block",
) -> float:
    """``I(target ; obs | given)`` in bits at one receiver.

    Sources listed in ``silent`` get zero power, which is how the artificial
    noise is switched off. Sources in ``given`` are known to the receiver and
    drop out of both covariances.
    """
    if power <= 0:
        raise ValueError("power must be positive")
    F = scheme.observation_map(receiver, route)
    names = [n for n, _ in scheme.sources]
    for n in list(target) + list(given) + list(silent):
        if n not in names:
            raise KeyError(n)
    target = [n for n in target if n not in silent and n not in given]
    background = [n for n in names if n not in target and n not in given and n not in silent]
    var = power / scheme.cfg.m_eff
    full = F[:, _columns(scheme, background + target)]
    rest = F[:, _columns(scheme, background)]
    return logdet_factor_bits(full, var) - logdet_factor_bits(rest, var)


def mutual_info_legit(
    scheme: SchemeMatrices,
    power: float,
    receiver: str = "A",
    artificial_noise: bool = True,
    route: str = "block",
) -> float:
    """Information the intended receiver gets about its own confidential block.

    In the two-user schemes the other user's block is treated as unknown
    interference.
    """
    silent = () if artificial_noise else ("u",)
    return mutual_info(scheme, power, receiver, [scheme.confidential(receiver)], silent=silent, route=route)


def leakage_eaves(
    scheme: SchemeMatrices,
    power: float,
    receiver: str = "A",
    artificial_noise: bool = True,
    route: str = "direct",
) -> float:
    """Information about ``receiver``'s message leaked to the other receiver.

    Wiretap: ``I(v; Z)``. Two-user schemes: ``I(vA; Z | vB)`` (and mirrored),
    i.e. the unintended receiver is also handed its own message.
    """
    silent = () if artificial_noise else ("u",)
    other = "B" if receiver == "A" else "A"
    target = scheme.confidential(receiver)
    given = (scheme.confidential(other),) if scheme.kind.two_users else ()
    return mutual_info(scheme, power, other, [target], given=given, silent=silent, route=route)


def leakage_projected(scheme: SchemeMatrices, power: float, artificial_noise: bool = True) -> float:
    """``I(G2 v; Z)`` for the wiretap schemes, computed on ``Ge`` with ``G2 v`` as the input."""
    if scheme.kind.two_users:
        raise ValueError("projected leakage is defined for the wiretap schemes")
    m_u = scheme.signal_dims["artificial_noise"]
    Ge = np.asarray(scheme.effective_eaves)
    TZ = np.asarray(scheme.eaves_input_map)
    var = power / scheme.cfg.m_eff
    # eaves input is [u; G2 v]; the second block has covariance var * G2 W W^H G2^H
    noise_part = Ge[:, :m_u] if artificial_noise else Ge[:, :0]
    proj = Ge[:, m_u:] @ TZ[m_u:, m_u:]
    full = np.hstack([noise_part, proj])
    return logdet_factor_bits(full, var) - logdet_factor_bits(noise_part, var)


def mutual_info_curve(scheme: SchemeMatrices, grid: SnrGrid, fn=mutual_info_legit, **kwargs) -> MiCurve:
    return MiCurve(grid, tuple(fn(scheme, p, **kwargs) for p in grid.powers))


# ---------------------------------------------------------------------------
# rank audits


def verify_ranks(scheme: SchemeMatrices, tol: float = 1e-8) -> RankReport:
    """Evaluate every alignment rank identity for the scheme's kind."""
    m, nA, nB = scheme.cfg.m_eff, scheme.cfg.nA, scheme.cfg.nB
    H, G, pre = scheme.H_phase, scheme.G_phase, scheme.precoders
    checks = []

    def add(name, mat, expected):
        checks.append(RankCheck(name, int(expected), numeric_rank(mat, tol)))

    kind = scheme.kind
    if kind is SchemeKind.WIRETAP_THREE_PHASE:
        add("legit [H2; H3 Phi G2]", np.vstack([H[1], H[2] @ pre.phi @ G[1]]), m * nA * (m - nB))
        add("eaves [G1; G2 Theta H1]", np.vstack([G[0], G[1] @ pre.theta @ H[0]]), m * nA * nB)
    elif kind is SchemeKind.WIRETAP_PARTIAL_TWO_PHASE:
        tau2 = scheme.plan.taus[1]
        add("legit H2 W", H[1] @ pre.v_precoder, nA * tau2)
        add("eaves [G1; G2 Theta H1]", np.vstack([G[0], G[1] @ pre.theta @ H[0]]), m * nA * nB)
    else:
        add("A legit [H2; H4 PhiA G2]", np.vstack([H[1], H[3] @ pre.phi_A @ G[1]]), m * nA * (m - nB))
        add("A eaves [G1; G2 ThetaA H1]", np.vstack([G[0], G[1] @ pre.theta_A @ H[0]]), m * nA * nB)
        add("B legit [G3; G4 PhiB H3]", np.vstack([G[2], G[3] @ pre.phi_B @ H[2]]), m * nB * (m - nA))
        add("B eaves [H1; H3 ThetaB G1]", np.vstack([H[0], H[2] @ pre.theta_B @ G[0]]), m * nA * nB)
    return RankReport(tuple(checks))


def is_invertible(mat, tol: float = 1e-8) -> bool:
    mat = np.asarray(mat)
    return mat.shape[0] == mat.shape[1] and numeric_rank(mat, tol) == mat.shape[0]


# ---------------------------------------------------------------------------
# Monte-Carlo SDoF


def theory_value(kind: SchemeKind, cfg: AntennaConfig) -> tuple[Fraction, ...]:
    if kind is SchemeKind.WIRETAP_THREE_PHASE:
        return (sdof_wiretap_delayed(cfg),)
    if kind is SchemeKind.WIRETAP_PARTIAL_TWO_PHASE:
        return (sdof_wiretap_partial(cfg),)
    return bcc_sum_point(cfg)


def trial_seed(seed: int, trial: int) -> int:
    """64-bit channel seed for trial ``trial`` of a run seeded with ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(0xC0FFEE, int(trial)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass
class SdofEstimate:
    kind: SchemeKind
    cfg: AntennaConfig
    grid: SnrGrid
    trials: int
    slopes: np.ndarray  # (trials, receivers): legit slope per slot
    leakage: np.ndarray  # (trials, receivers): leakage slope per slot
    theory: tuple[Fraction, ...]
    artificial_noise: bool = True
    tolerance: float = 0.05
    extras: dict = field(default_factory=dict)

    @property
    def mean(self) -> np.ndarray:
        return self.slopes.mean(axis=0)

    @property
    def leakage_mean(self) -> np.ndarray:
        return self.leakage.mean(axis=0)

    @property
    def ci_halfwidth(self) -> np.ndarray:
        if self.trials < 2:
            return np.zeros(self.slopes.shape[1])
        return 1.96 * self.slopes.std(axis=0, ddof=1) / math.sqrt(self.trials)

    @property
    def passed(self) -> bool:
        target = np.array([float(v) for v in self.theory])
        ok_rate = np.all(np.abs(self.mean - target) <= self.tolerance)
        ok_leak = np.all(np.abs(self.leakage_mean) <= self.tolerance)
        return bool(ok_rate and ok_leak)

    def to_record(self) -> dict:
        return {
            "kind": self.kind.value,
            "cfg": {"m": self.cfg.m, "nA": self.cfg.nA, "nB": self.cfg.nB},
            "grid_dB": [round(x, 6) for x in self.grid.db],
            "trials": self.trials,
            "artificial_noise": self.artificial_noise,
            "slopes": [round(float(v), 6) for v in self.mean],
            "slopes_ci95": [round(float(v), 6) for v in self.ci_halfwidth],
            "leakage": [round(float(v), 6) for v in self.leakage_mean],
            "theory_value": [str(v) for v in self.theory],
            "theory_float": [round(float(v), 6) for v in self.theory],
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def monte_carlo_sdof(
    kind: SchemeKind,
    cfg: AntennaConfig,
    trials: int = 10,
    grid: SnrGrid | None = None,
    seed: int = 42,
    artificial_noise: bool = True,
    tolerance: float = 0.05,
) -> SdofEstimate:
    """Per-slot pre-log of the intended and leaked information, averaged over trials."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    grid = grid or SnrGrid.from_db()
    plan = phase_plan(kind, cfg)
    precoders = build_precoders(kind, cfg, plan)
    receivers = ("A", "B") if kind.two_users else ("A",)
    slopes = np.zeros((trials, len(receivers)))
    leaks = np.zeros((trials, len(receivers)))
    for i in range(trials):
        realization = sample_states(cfg.capped(), plan.total, trial_seed(seed, i))
        scheme = build_scheme(kind, cfg, realization, precoders)
        for j, rx in enumerate(receivers):
            legit = mutual_info_curve(scheme, grid, mutual_info_legit, receiver=rx, artificial_noise=artificial_noise)
            leak = mutual_info_curve(scheme, grid, leakage_eaves, receiver=rx, artificial_noise=artificial_noise)
            slopes[i, j] = fit_slope(grid, legit.values).slope / plan.total
            leaks[i, j] = fit_slope(grid, leak.values).slope / plan.total
    return SdofEstimate(
        kind=kind,
        cfg=cfg,
        grid=grid,
        trials=trials,
        slopes=slopes,
        leakage=leaks,
        theory=theory_value(kind, cfg),
        artificial_noise=artificial_noise,
        tolerance=tolerance,
    )
