"""Seeded i.i.d. Rayleigh channel realizations for the two-receiver broadcast channel.

Slot ``t`` draws its matrices from a generator seeded by ``(seed, t)``, so a
realization of length ``n`` is a prefix of any longer one with the same seed,
and slots can be generated independently of each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._linalg import DEFAULT_RANK_TOL, block_diag, numeric_rank
from .sdof_theory import AntennaConfig


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Per-slot channel matrices ``H[t]`` (nA x m) and ``G[t]`` (nB x m).

    Slots are indexed from 0.
    """

    cfg: AntennaConfig
    H: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        m, nA, nB = self.cfg.as_tuple()
        if self.H.ndim != 3 or self.H.shape[1:] != (nA, m):
            raise ValueError(f"H must have shape (n, {nA}, {m}), got {self.H.shape}")
        if self.G.ndim != 3 or self.G.shape[1:] != (nB, m):
            raise ValueError(f"G must have shape (n, {nB}, {m}), got {self.G.shape}")
        if self.H.shape[0] != self.G.shape[0]:
            raise ValueError("H and G must cover the same number of slots")
        self.H.setflags(write=False)
        self.G.setflags(write=False)

    @property
    def n(self) -> int:
        return self.H.shape[0]

    def __len__(self) -> int:
        return self.n

    @property
    def slots(self):
        return list(zip(self.H, self.G))

    def restrict_antennas(self, m: int) -> "ChannelRealization":
        """Keep only the first ``m`` transmit antennas."""
        if m > self.cfg.m:
            raise ValueError(f"cannot restrict {self.cfg.m} antennas to {m}")
        cfg = AntennaConfig(m, self.cfg.nA, self.cfg.nB)
        return ChannelRealization(cfg, self.H[:, :, :m].copy(), self.G[:, :, :m].copy())

    def scaled(self, scales) -> "ChannelRealization":
        """Multiply slot ``t`` of both channels by ``scales[t]``."""
        scales = np.asarray(scales, dtype=float)
        if scales.shape != (self.n,):
            raise ValueError("need one scale per slot")
        return ChannelRealization(
            self.cfg, self.H * scales[:, None, None], self.G * scales[:, None, None]
        )

    def to_json(self) -> str:
        """Slot-major dump with complex entries as ``[re, im]`` pairs, rows in order."""

        def pairs(mat):
            return [[[float(z.real), float(z.imag)] for z in row] for row in mat]

        payload = {
            "cfg": {"m": self.cfg.m, "nA": self.cfg.nA, "nB": self.cfg.nB},
            "n": self.n,
            "slots": [{"H": pairs(h), "G": pairs(g)} for h, g in self.slots],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "ChannelRealization":
        payload = json.loads(text)
        cfg = AntennaConfig(**payload["cfg"])

        def mats(key, rows):
            arr = np.array([s[key] for s in payload["slots"]], dtype=float)
            if arr.size == 0:
                return np.zeros((0, rows, cfg.m), dtype=complex)
            return arr[..., 0] + 1j * arr[..., 1]

        return cls(cfg, mats("H", cfg.nA), mats("G", cfg.nB))


def slot_rng(seed: int, t: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(t),)))


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_states(cfg: AntennaConfig, n: int, seed: int) -> ChannelRealization:
    """Draw ``n`` slots of i.i.d. CN(0, 1) channel entries."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= int(seed) < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    m, nA, nB = cfg.as_tuple()
    H = np.empty((n, nA, m), dtype=complex)
    G = np.empty((n, nB, m), dtype=complex)
    for t in range(n):
        rng = slot_rng(seed, t)
        H[t] = _cn(rng, (nA, m))
        G[t] = _cn(rng, (nB, m))
    return ChannelRealization(cfg, H, G)


def state_matrix(realization: ChannelRealization, t: int) -> np.ndarray:
    """Stack ``H[t]`` over ``G[t]`` into the (nA + nB) x m state matrix."""
    if not 0 <= t < realization.n:
        raise IndexError(f"slot {t} out of range for a realization of {realization.n} slots")
    return np.vstack([realization.H[t], realization.G[t]])


def check_full_rank(S, tol: float = DEFAULT_RANK_TOL) -> bool:
    S = np.asarray(S)
    return numeric_rank(S, tol) == min(S.shape)


def block_diag_channels(realization: ChannelRealization, slot_range) -> tuple[np.ndarray, np.ndarray]:
    """Block-diagonal ``(diag(H_t), diag(G_t))`` over a contiguous run of slots."""
    slots = list(slot_range)
    if not slots:
        raise ValueError("slot range is empty")
    if any(b - a != 1 for a, b in zip(slots, slots[1:])):
        raise ValueError("slot range must be contiguous and increasing")
    if slots[0] < 0 or slots[-1] >= realization.n:
        raise IndexError("slot range exceeds realization length")
    return (
        block_diag([realization.H[t] for t in slots]),
        block_diag([realization.G[t] for t in slots]),
    )
