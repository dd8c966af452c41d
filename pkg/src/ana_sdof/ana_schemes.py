"""Artificial-noise-alignment transmission schemes as explicit block matrices.

Each scheme is built two ways from the same channel realization:

* the *direct* route replays the transmission slot by slot: ``x_t = c_t M_t s``
  where ``s`` stacks every transmitted symbol (artificial noise first, then
  the confidential blocks) and ``M_t`` forms the slot's linear combination of
  them, including retransmissions of past noiseless observations;
* the *block* route assembles the effective channels ``He`` / ``Ge`` as
  block matrices over whole phases, acting on intermediate vectors such as
  ``[H1 u; v]``, together with the linear map from ``s`` to those vectors.

Thermal noise is left out here; :mod:`ana_sdof.dof_analysis` adds the
identity covariance. Receiver ``"A"`` is the legitimate receiver (``He``) and
receiver ``"B"`` the eavesdropper, or second user in the BCC schemes (``Ge``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._linalg import block_diag
from .channel_model import ChannelRealization, block_diag_channels
from .sdof_theory import AntennaConfig


class SchemeKind(enum.Enum):
    WIRETAP_THREE_PHASE = "wiretap3"
    WIRETAP_PARTIAL_TWO_PHASE = "partial2"
    BCC_FOUR_PHASE = "bcc4"
    MISO_FOUR_SLOT = "miso4"

    @property
    def two_users(self) -> bool:
        return self in (SchemeKind.BCC_FOUR_PHASE, SchemeKind.MISO_FOUR_SLOT)


class UnsupportedConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PhasePlan:
    taus: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.taus)

    def phase_slots(self, i: int) -> range:
        """0-based slot indices of phase ``i`` (phases also counted from 0)."""
        start = sum(self.taus[:i])
        return range(start, start + self.taus[i])


def phase_plan(kind: SchemeKind, cfg: AntennaConfig) -> PhasePlan:
    if kind is SchemeKind.MISO_FOUR_SLOT:
        if cfg.as_tuple() != (2, 1, 1):
            raise UnsupportedConfigError("the four-slot MISO scheme needs (m, nA, nB) = (2, 1, 1)")
        return PhasePlan((1, 1, 1, 1))
    if not cfg.above_receivers:
        raise UnsupportedConfigError(
            f"{kind.value} needs m > max(nA, nB); got {cfg.as_tuple()}"
        )
    m, nA, nB = cfg.m_eff, cfg.nA, cfg.nB
    if kind is SchemeKind.WIRETAP_THREE_PHASE:
        return PhasePlan((nA * nB, nA * (m - nB), (m - nA) * (m - nB)))
    if kind is SchemeKind.WIRETAP_PARTIAL_TWO_PHASE:
        return PhasePlan((nA * nB, nA * (m - nB)))
    if kind is SchemeKind.BCC_FOUR_PHASE:
        return PhasePlan((nA * nB, nA * (m - nB), nB * (m - nA), (m - nA) * (m - nB)))
    raise ValueError(f"unknown scheme kind {kind!r}")


# ---------------------------------------------------------------------------
# precoders


@dataclass(frozen=True, eq=False)
class Precoders:
    """Retransmission precoders; unused fields stay ``None``.

    ``permutations`` maps a precoder name to its permutation matrix ``Pi``,
    chosen so that ``precoder @ Pi == [diag(E_t) 0]``.
    """

    theta: Optional[np.ndarray] = None
    phi: Optional[np.ndarray] = None
    theta_A: Optional[np.ndarray] = None
    theta_B: Optional[np.ndarray] = None
    phi_A: Optional[np.ndarray] = None
    phi_B: Optional[np.ndarray] = None
    v_precoder: Optional[np.ndarray] = None
    permutations: dict = field(default_factory=dict)
    block_width: dict = field(default_factory=dict)

    def replace(self, **changes) -> "Precoders":
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return Precoders(**fields)


def selector(m: int, k: int) -> np.ndarray:
    """The m x k matrix ``[I_k; 0]``."""
    out = np.zeros((m, k))
    out[:k, :k] = np.eye(k)
    return out


def alignment_precoder(
    m: int, out_slots: int, width: int, in_slots: int, rows_per_slot: int, keep: int
) -> tuple[np.ndarray, np.ndarray]:
    """Precoder retransmitting a linear combination of a past block observation.

    The observation has ``in_slots`` blocks of ``rows_per_slot`` rows. The
    permutation moves the first ``keep`` rows of every block to the top (slot
    order), and those ``width * out_slots`` rows are fed block by block
    through ``[I_width; 0]`` into the ``out_slots`` transmit slots. The
    remaining rows are not retransmitted.
    """
    n_obs = in_slots * rows_per_slot
    selected = [s * rows_per_slot + r for s in range(in_slots) for r in range(keep)]
    if len(selected) != width * out_slots:
        raise ValueError(
            f"selected {len(selected)} rows but the precoder consumes {width * out_slots}"
        )
    chosen = set(selected)
    order = selected + [i for i in range(n_obs) if i not in chosen]
    perm = np.zeros((n_obs, n_obs))
    perm[order, np.arange(n_obs)] = 1.0
    diag = block_diag([selector(m, width)] * out_slots)
    if out_slots == 0:
        diag = np.zeros((0, 0))
    padded = np.zeros((m * out_slots, n_obs))
    padded[:, : width * out_slots] = diag
    return padded @ perm.T, perm


def build_precoders(kind: SchemeKind, cfg: AntennaConfig, plan: PhasePlan) -> Precoders:
    expected = phase_plan(kind, cfg)
    if plan != expected:
        raise ValueError(f"plan {plan.taus} does not match {kind.value} for {cfg.as_tuple()}")
    m, nA, nB = cfg.m_eff, cfg.nA, cfg.nB
    t = plan.taus
    if kind is SchemeKind.WIRETAP_THREE_PHASE:
        theta, p_theta = alignment_precoder(m, t[1], nB, t[0], nA, m - nB)
        phi, p_phi = alignment_precoder(m, t[2], nA, t[1], nB, m - nA)
        return Precoders(
            theta=theta,
            phi=phi,
            permutations={"theta": p_theta, "phi": p_phi},
            block_width={"theta": nB, "phi": nA},
        )
    if kind is SchemeKind.WIRETAP_PARTIAL_TWO_PHASE:
        theta, p_theta = alignment_precoder(m, t[1], nB, t[0], nA, m - nB)
        v_precoder = block_diag([selector(m, nA)] * t[1])
        return Precoders(
            theta=theta,
            v_precoder=v_precoder,
            permutations={"theta": p_theta},
            block_width={"theta": nB},
        )
    # BCC_FOUR_PHASE and MISO_FOUR_SLOT share the construction
    theta_A, p_ta = alignment_precoder(m, t[1], nB, t[0], nA, m - nB)
    theta_B, p_tb = alignment_precoder(m, t[2], nA, t[0], nB, m - nA)
    phi_A, p_pa = alignment_precoder(m, t[3], nA, t[1], nB, m - nA)
    phi_B, p_pb = alignment_precoder(m, t[3], nB, t[2], nA, m - nB)
    return Precoders(
        theta_A=theta_A,
        theta_B=theta_B,
        phi_A=phi_A,
        phi_B=phi_B,
        permutations={"theta_A": p_ta, "theta_B": p_tb, "phi_A": p_pa, "phi_B": p_pb},
        block_width={"theta_A": nB, "theta_B": nA, "phi_A": nA, "phi_B": nB},
    )


# ---------------------------------------------------------------------------
# assembled scheme


@dataclass(frozen=True, eq=False)
class SchemeMatrices:
    kind: SchemeKind
    cfg: AntennaConfig
    plan: PhasePlan
    H_phase: tuple
    G_phase: tuple
    precoders: Precoders
    effective_legit: np.ndarray
    effective_eaves: np.ndarray
    legit_input_map: np.ndarray
    eaves_input_map: np.ndarray
    sources: tuple
    signal_dims: dict
    slot_maps: np.ndarray
    slot_scales: np.ndarray
    realization: ChannelRealization
    transmit_antennas: int

    @property
    def source_dim(self) -> int:
        return sum(d for _, d in self.sources)

    def source_slice(self, name: str) -> slice:
        start = 0
        for src, dim in self.sources:
            if src == name:
                return slice(start, start + dim)
            start += dim
        raise KeyError(name)

    def confidential(self, receiver: str) -> str:
        """Name of the source block intended for ``receiver``."""
        if self.kind.two_users:
            return {"A": "vA", "B": "vB"}[receiver]
        if receiver != "A":
            raise ValueError("wiretap schemes carry a message for receiver A only")
        return "v"

    def observation_map(self, receiver: str, route: str = "block") -> np.ndarray:
        """Linear map from the stacked symbols ``s`` to a receiver's noiseless observations.

        The two routes order the observation rows differently.
        """
        if receiver not in ("A", "B"):
            raise ValueError("receiver must be 'A' or 'B'")
        if route == "block":
            if receiver == "A":
                return self.effective_legit @ self.legit_input_map
            return self.effective_eaves @ self.eaves_input_map
        if route == "direct":
            chans = self.realization.H if receiver == "A" else self.realization.G
            rows = [c * ch @ M for c, ch, M in zip(self.slot_scales, chans, self.slot_maps)]
            return np.vstack(rows)
        raise ValueError(f"unknown route {route!r}")

    def layout(self) -> dict:
        """Block shapes and zero/nonzero masks of the effective matrices."""
        return {
            "kind": self.kind.value,
            "cfg": list(self.cfg.as_tuple()),
            "taus": list(self.plan.taus),
            "effective_legit": list(self.effective_legit.shape),
            "effective_eaves": list(self.effective_eaves.shape),
            "legit_blocks": _block_mask(self.effective_legit, *_block_edges(self, "A")),
            "eaves_blocks": _block_mask(self.effective_eaves, *_block_edges(self, "B")),
            "signal_dims": dict(self.signal_dims),
        }


def _block_edges(scheme: SchemeMatrices, receiver: str):
    m, nA, nB = scheme.cfg.m_eff, scheme.cfg.nA, scheme.cfg.nB
    t = scheme.plan.taus
    kind = scheme.kind
    if kind is SchemeKind.WIRETAP_THREE_PHASE:
        if receiver == "A":
            return [nA * t[0], nA * t[1], nA * t[2]], [nA * t[0], m * t[1]]
        return [nB * t[0], nB * t[1], nB * t[2]], [m * t[0], nB * t[1]]
    if kind is SchemeKind.WIRETAP_PARTIAL_TWO_PHASE:
        if receiver == "A":
            return [nA * t[0], nA * t[1]], [nA * t[0], nA * t[1]]
        return [nB * t[0], nB * t[1]], [m * t[0], nB * t[1]]
    if receiver == "A":
        return [nA * t[1], nA * t[3], nA * t[0], nA * t[2]], [m * t[1], nA * t[0], nA * t[2]]
    return [nB * t[0], nB * t[1], nB * t[2], nB * t[3]], [m * t[2], nB * t[0], nB * t[1]]


def _block_mask(mat: np.ndarray, row_sizes, col_sizes) -> list:
    rows = np.cumsum([0] + list(row_sizes))
    cols = np.cumsum([0] + list(col_sizes))
    return [
        [int(np.any(mat[rows[i] : rows[i + 1], cols[j] : cols[j + 1]] != 0)) for j in range(len(col_sizes))]
        for i in range(len(row_sizes))
    ]


class _Transmitter:
    """Replays a scheme slot by slot, tracking noiseless observations as maps of ``s``."""

    def __init__(self, realization: ChannelRealization, source_dim: int, normalize: bool):
        self.r = realization
        self.m = realization.cfg.m
        self.S = source_dim
        self.normalize = normalize
        n = realization.n
        self.maps = np.zeros((n, self.m, source_dim), dtype=complex)
        self.scales = np.ones(n)
        self.y = [None] * n
        self.z = [None] * n

    def send(self, t: int, M: np.ndarray):
        c = 1.0
        if self.normalize:
            # symbols carry power P/m each, so ||M||_F^2 <= m keeps E||x_t||^2 <= P
            fro2 = float(np.sum(np.abs(M) ** 2))
            if fro2 > self.m:
                c = np.sqrt(self.m / fro2)
        self.maps[t] = M
        self.scales[t] = c
        self.y[t] = c * self.r.H[t] @ M
        self.z[t] = c * self.r.G[t] @ M

    def observed(self, which: str, slots) -> np.ndarray:
        store = self.y if which == "y" else self.z
        rows = [store[t] for t in slots]
        if not rows:
            return np.zeros((0, self.S), dtype=complex)
        return np.vstack(rows)


def _unit_rows(S: int, start: int, count: int) -> np.ndarray:
    out = np.zeros((count, S), dtype=complex)
    out[np.arange(count), start + np.arange(count)] = 1.0
    return out


def _sources_for(kind: SchemeKind, cfg: AntennaConfig, plan: PhasePlan) -> tuple:
    m, nA = cfg.m_eff, cfg.nA
    t = plan.taus
    if kind is SchemeKind.WIRETAP_THREE_PHASE:
        return (("u", m * t[0]), ("v", m * t[1]))
    if kind is SchemeKind.WIRETAP_PARTIAL_TWO_PHASE:
        return (("u", m * t[0]), ("v", nA * t[1]))
    return (("u", m * t[0]), ("vA", m * t[1]), ("vB", m * t[2]))


def _replay(kind, cfg, plan, realization, precoders, sources, normalize) -> _Transmitter:
    S = sum(d for _, d in sources)
    m, nA = cfg.m_eff, cfg.nA
    tx = _Transmitter(realization, S, normalize)
    offsets = {}
    start = 0
    for name, dim in sources:
        offsets[name] = start
        start += dim

    def symbols(name, index, width):
        return _unit_rows(S, offsets[name] + index * width, width)

    phases = [plan.phase_slots(i) for i in range(len(plan.taus))]
    for j, t in enumerate(phases[0]):
        tx.send(t, symbols("u", j, m))

    if kind is SchemeKind.MISO_FOUR_SLOT:
        # literal four-slot transmission with the per-slot scalings written out
        h, g, c = realization.H[:, 0, :], realization.G[:, 0, :], tx.scales
        u, vA, vB = symbols("u", 0, 2), symbols("vA", 0, 2), symbols("vB", 0, 2)
        e1 = np.array([[1.0], [0.0]])
        tx.send(1, vA + e1 @ (c[0] * h[0] @ u)[None, :])
        tx.send(2, vB + e1 @ (c[0] * g[0] @ u)[None, :])
        row = c[1] * (g[1] @ vA + g[1, 0] * c[0] * h[0] @ u) + c[2] * (
            h[2] @ vB + h[2, 0] * c[0] * g[0] @ u
        )
        tx.send(3, e1 @ row[None, :])
        return tx

    def retransmit(precoder, obs, slots, extra=None):
        combo = precoder @ obs
        for j, t in enumerate(slots):
            M = combo[j * m : (j + 1) * m]
            if extra is not None:
                M = M + extra(j)
            tx.send(t, M)

    if kind is SchemeKind.WIRETAP_THREE_PHASE:
        retransmit(precoders.theta, tx.observed("y", phases[0]), phases[1], lambda j: symbols("v", j, m))
        retransmit(precoders.phi, tx.observed("z", phases[1]), phases[2])
    elif kind is SchemeKind.WIRETAP_PARTIAL_TWO_PHASE:
        W = precoders.v_precoder
        retransmit(
            precoders.theta,
            tx.observed("y", phases[0]),
            phases[1],
            lambda j: W[j * m : (j + 1) * m, j * nA : (j + 1) * nA] @ symbols("v", j, nA),
        )
    elif kind is SchemeKind.BCC_FOUR_PHASE:
        retransmit(precoders.theta_A, tx.observed("y", phases[0]), phases[1], lambda j: symbols("vA", j, m))
        retransmit(precoders.theta_B, tx.observed("z", phases[0]), phases[2], lambda j: symbols("vB", j, m))
        combo = precoders.phi_A @ tx.observed("z", phases[1]) + precoders.phi_B @ tx.observed("y", phases[2])
        for j, t in enumerate(phases[3]):
            tx.send(t, combo[j * m : (j + 1) * m])
    else:
        raise ValueError(f"unknown scheme kind {kind!r}")
    return tx


def _zeros(r, c):
    return np.zeros((r, c), dtype=complex)


def _eye(n):
    return np.eye(n, dtype=complex)


def _assemble(kind, cfg, plan, chans: ChannelRealization, pre: Precoders):
    """Block-route effective matrices on (already power-scaled) channels."""
    m, nA, nB = cfg.m_eff, cfg.nA, cfg.nB
    t = plan.taus
    Hs, Gs = [], []
    for i in range(len(t)):
        slots = plan.phase_slots(i)
        if len(slots):
            H, G = block_diag_channels(chans, slots)
        else:
            H, G = _zeros(0, 0), _zeros(0, 0)
        Hs.append(H)
        Gs.append(G)

    if kind is SchemeKind.WIRETAP_THREE_PHASE:
        H1, H2, H3 = Hs
        G1, G2, G3 = Gs
        Th, Ph = pre.theta, pre.phi
        He = np.block(
            [
                [_eye(nA * t[0]), _zeros(nA * t[0], m * t[1])],
                [H2 @ Th, H2],
                [H3 @ Ph @ G2 @ Th, H3 @ Ph @ G2],
            ]
        )
        Ge = np.block(
            [
                [G1, _zeros(nB * t[0], nB * t[1])],
                [G2 @ Th @ H1, _eye(nB * t[1])],
                [G3 @ Ph @ G2 @ Th @ H1, G3 @ Ph],
            ]
        )
        TY = np.block([[H1, _zeros(nA * t[0], m * t[1])], [_zeros(m * t[1], m * t[0]), _eye(m * t[1])]])
        TZ = np.block([[_eye(m * t[0]), _zeros(m * t[0], m * t[1])], [_zeros(nB * t[1], m * t[0]), G2]])
        dims = {"artificial_noise": m * t[0], "v": m * t[1]}
    elif kind is SchemeKind.WIRETAP_PARTIAL_TWO_PHASE:
        H1, H2 = Hs
        G1, G2 = Gs
        Th, W = pre.theta, pre.v_precoder
        He = np.block([[_eye(nA * t[0]), _zeros(nA * t[0], nA * t[1])], [H2 @ Th, H2 @ W]])
        Ge = np.block([[G1, _zeros(nB * t[0], nB * t[1])], [G2 @ Th @ H1, _eye(nB * t[1])]])
        TY = np.block([[H1, _zeros(nA * t[0], nA * t[1])], [_zeros(nA * t[1], m * t[0]), _eye(nA * t[1])]])
        TZ = np.block([[_eye(m * t[0]), _zeros(m * t[0], nA * t[1])], [_zeros(nB * t[1], m * t[0]), G2 @ W]])
        dims = {"artificial_noise": m * t[0], "v": nA * t[1]}
    else:
        H1, H2, H3, H4 = Hs
        G1, G2, G3, G4 = Gs
        TA, TB, PA, PB = pre.theta_A, pre.theta_B, pre.phi_A, pre.phi_B
        He = np.block(
            [
                [H2, H2 @ TA, _zeros(nA * t[1], nA * t[2])],
                [H4 @ PA @ G2, H4 @ PA @ G2 @ TA, H4 @ PB],
                [_zeros(nA * t[0], m * t[1]), _eye(nA * t[0]), _zeros(nA * t[0], nA * t[2])],
                [_zeros(nA * t[2], m * t[1]), _zeros(nA * t[2], nA * t[0]), _eye(nA * t[2])],
            ]
        )
        Ge = np.block(
            [
                [_zeros(nB * t[0], m * t[2]), _eye(nB * t[0]), _zeros(nB * t[0], nB * t[1])],
                [_zeros(nB * t[1], m * t[2]), _zeros(nB * t[1], nB * t[0]), _eye(nB * t[1])],
                [G3, G3 @ TB, _zeros(nB * t[2], nB * t[1])],
                [G4 @ PB @ H3, G4 @ PB @ H3 @ TB, G4 @ PA],
            ]
        )
        # symbol order in s: u, vA, vB
        TY = np.block(
            [
                [_zeros(m * t[1], m * t[0]), _eye(m * t[1]), _zeros(m * t[1], m * t[2])],
                [H1, _zeros(nA * t[0], m * t[1]), _zeros(nA * t[0], m * t[2])],
                [H3 @ TB @ G1, _zeros(nA * t[2], m * t[1]), H3],
            ]
        )
        TZ = np.block(
            [
                [_zeros(m * t[2], m * t[0]), _zeros(m * t[2], m * t[1]), _eye(m * t[2])],
                [G1, _zeros(nB * t[0], m * t[1]), _zeros(nB * t[0], m * t[2])],
                [G2 @ TA @ H1, G2, _zeros(nB * t[1], m * t[2])],
            ]
        )
        dims = {"artificial_noise": m * t[0], "vA": m * t[1], "vB": m * t[2]}
    return tuple(Hs), tuple(Gs), He, Ge, TY, TZ, dims


def build_scheme(
    kind: SchemeKind,
    cfg: AntennaConfig,
    realization: ChannelRealization,
    precoders: Precoders,
    normalize: bool = True,
) -> SchemeMatrices:
    """Assemble one scheme instance on the first ``plan.total`` slots of ``realization``.

    With ``normalize`` each slot is scaled by ``c_t <= 1`` so that its
    expected power stays within ``P`` when every symbol has power ``P/m``.
    The scaling is folded into the stored phase channels (``c_t H_t``), which
    leaves every rank and pre-log unchanged. Extra transmit antennas beyond
    ``nA + nB`` are left silent.
    """
    plan = phase_plan(kind, cfg)
    if realization.cfg.nA != cfg.nA or realization.cfg.nB != cfg.nB:
        raise ValueError("realization receiver antenna counts do not match cfg")
    if realization.cfg.m < cfg.m_eff:
        raise ValueError(
            f"realization has {realization.cfg.m} transmit antennas, scheme needs {cfg.m_eff}"
        )
    if realization.n < plan.total:
        raise ValueError(f"realization has {realization.n} slots, scheme needs {plan.total}")
    used = realization
    if used.cfg.m != cfg.m_eff:
        used = used.restrict_antennas(cfg.m_eff)
    if used.n != plan.total:
        used = ChannelRealization(used.cfg, used.H[: plan.total].copy(), used.G[: plan.total].copy())
    capped = cfg.capped()

    sources = _sources_for(kind, capped, plan)
    tx = _replay(kind, capped, plan, used, precoders, sources, normalize)
    scaled = used.scaled(tx.scales)
    Hs, Gs, He, Ge, TY, TZ, dims = _assemble(kind, capped, plan, scaled, precoders)
    for arr in (He, Ge, TY, TZ, tx.maps, tx.scales):
        arr.setflags(write=False)
    return SchemeMatrices(
        kind=kind,
        cfg=capped,
        plan=plan,
        H_phase=Hs,
        G_phase=Gs,
        precoders=precoders,
        effective_legit=He,
        effective_eaves=Ge,
        legit_input_map=TY,
        eaves_input_map=TZ,
        sources=sources,
        signal_dims=dims,
        slot_maps=tx.maps,
        slot_scales=tx.scales,
        realization=used,
        transmit_antennas=cfg.m,
    )


def sample_transmissions(scheme: SchemeMatrices, power: float, symbol_seed: int, draws: int = 1) -> np.ndarray:
    """Draw ``draws`` independent uses of the scheme; returns shape (draws, n, m).

    Symbols are i.i.d. CN(0, P/m) with ``m`` the number of active antennas;
    silent antennas beyond ``nA + nB`` carry zeros.
    """
    if power <= 0:
        raise ValueError("power must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(int(symbol_seed)))
    m_act = scheme.cfg.m_eff
    S = scheme.source_dim
    var = power / m_act
    s = np.sqrt(var / 2.0) * (rng.standard_normal((draws, S)) + 1j * rng.standard_normal((draws, S)))
    x = np.einsum("t,tij,dj->dti", scheme.slot_scales, scheme.slot_maps, s)
    if scheme.transmit_antennas > m_act:
        pad = np.zeros((draws, x.shape[1], scheme.transmit_antennas - m_act), dtype=complex)
        x = np.concatenate([x, pad], axis=2)
    return x


def transmit_signals(scheme: SchemeMatrices, power: float, symbol_seed: int) -> np.ndarray:
    """Per-slot transmit vectors ``x_t`` for one draw of the symbols, shape (n, m)."""
    return sample_transmissions(scheme, power, symbol_seed, draws=1)[0]
