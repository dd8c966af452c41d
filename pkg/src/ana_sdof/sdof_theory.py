"""Closed-form secrecy DoF values and regions, in exact rational arithmetic.

Every quantity returned here is a :class:`fractions.Fraction` (or a tuple of
them), so boundary and tightness checks are equalities rather than tolerance
comparisons. Floating point only enters in :mod:`ana_sdof.dof_analysis`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

Rational = Fraction
Point = tuple[Fraction, Fraction]
HalfPlane = tuple[Fraction, Fraction, Fraction]


class OutOfRangeError(ValueError):
    """Raised when a formula is evaluated outside the antenna range it is stated for."""


@dataclass(frozen=True)
class AntennaConfig:
    """Antenna counts ``(m, nA, nB)`` at the transmitter and the two receivers."""

    m: int
    nA: int
    nB: int

    def __post_init__(self):
        for name in ("m", "nA", "nB"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"{name} must be an int, got {value!r}")
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")

    @property
    def m_eff(self) -> int:
        """Useful transmit antennas, ``min(m, nA + nB)``."""
        return min(self.m, self.nA + self.nB)

    @property
    def above_receivers(self) -> bool:
        """True when ``m > max(nA, nB)``, the range where delayed CSIT helps."""
        return self.m > max(self.nA, self.nB)

    def swapped(self) -> "AntennaConfig":
        return AntennaConfig(self.m, self.nB, self.nA)

    def capped(self) -> "AntennaConfig":
        return AntennaConfig(self.m_eff, self.nA, self.nB)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.m, self.nA, self.nB)


class CsitMode(enum.Enum):
    PERFECT = "perfect"
    DELAYED = "delayed"
    DELAYED_PARTIAL = "partial"
    NO_CSIT = "none"

    @classmethod
    def parse(cls, text: str) -> "CsitMode":
        aliases = {"no": cls.NO_CSIT, "nocsit": cls.NO_CSIT, "delayed-partial": cls.DELAYED_PARTIAL}
        key = text.strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class SdofRegion:
    """Convex region ``{d >= 0 : a*dA + b*dB <= c for every half-plane}``.

    ``vertices`` run counterclockwise starting at the vertex on the dA axis
    with the largest dA. The origin is always a vertex (last in the list).
    Segments and single points use the same representation.
    """

    halfplanes: tuple[HalfPlane, ...]
    vertices: tuple[Point, ...]

    @classmethod
    def from_halfplanes(cls, halfplanes) -> "SdofRegion":
        hp = tuple(tuple(Fraction(x) for x in h) for h in halfplanes)
        return cls(hp, _enumerate_vertices(hp))

    def contains(self, point) -> bool:
        return region_contains(self, point)

    def swapped(self) -> "SdofRegion":
        """Mirror image under ``dA <-> dB``."""
        return SdofRegion.from_halfplanes((b, a, c) for a, b, c in self.halfplanes)


def _axis_constraints() -> list[HalfPlane]:
    return [(Fraction(-1), Fraction(0), Fraction(0)), (Fraction(0), Fraction(-1), Fraction(0))]


def _feasible(constraints, point) -> bool:
    x, y = point
    return all(a * x + b * y <= c for a, b, c in constraints)


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _enumerate_vertices(halfplanes) -> tuple[Point, ...]:
    constraints = list(halfplanes) + _axis_constraints()
    candidates = set()
    for (a1, b1, c1), (a2, b2, c2) in combinations(constraints, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        point = ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)
        if _feasible(constraints, point):
            candidates.add(point)
    # lexicographic order, then a monotone-chain hull drops collinear points
    pts = sorted(candidates)
    if len(pts) <= 2:
        hull = pts
    else:
        lower: list[Point] = []
        for p in pts:
            while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
                lower.pop()
            lower.append(p)
        upper: list[Point] = []
        for p in reversed(pts):
            while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
                upper.pop()
            upper.append(p)
        hull = lower[:-1] + upper[:-1]
    if not hull:
        return ()
    # counterclockwise from the largest dA-axis vertex ends at the origin
    origin = (Fraction(0), Fraction(0))
    start = (hull.index(origin) + 1) % len(hull) if origin in hull else 0
    return tuple(hull[start:] + hull[:start])


def region_contains(region: SdofRegion, point) -> bool:
    """Exact membership test, nonnegativity included."""
    x, y = (Fraction(v) for v in point)
    if x < 0 or y < 0:
        return False
    return all(a * x + b * y <= c for a, b, c in region.halfplanes)


def tight_constraints(region: SdofRegion, point) -> list[int]:
    """Indices of the half-planes holding with equality at ``point``."""
    x, y = (Fraction(v) for v in point)
    return [i for i, (a, b, c) in enumerate(region.halfplanes) if a * x + b * y == c]


# ---------------------------------------------------------------------------
# wiretap channel


def sdof_wiretap_delayed(cfg: AntennaConfig) -> Fraction:
    """Optimal SDoF of the MIMO wiretap channel with delayed CSIT on both links."""
    m, nA, nB = cfg.as_tuple()
    if m <= nB:
        return Fraction(0)
    if m <= nA:
        return Fraction(m - nB)
    if m <= nA + nB:
        return Fraction(nA * m * (m - nB), nA * nB + m * (m - nB))
    return Fraction(nA * (nA + nB), nA + 2 * nB)


def sdof_wiretap_partial(cfg: AntennaConfig) -> Fraction:
    """Achievable SDoF with delayed CSIT on the legitimate link only.

    Only defined for ``m > max(nA, nB)``; outside that range no value is
    claimed and :class:`OutOfRangeError` is raised.
    """
    m, nA, nB = cfg.as_tuple()
    if not cfg.above_receivers:
        raise OutOfRangeError(
            f"partial-CSIT SDoF requires m > max(nA, nB); got m={m}, nA={nA}, nB={nB}"
        )
    if m <= nA + nB:
        return Fraction(nA * (m - nB), m)
    return Fraction(nA * nA, nA + nB)


def sdof_wiretap_perfect(cfg: AntennaConfig) -> Fraction:
    m, nA, nB = cfg.as_tuple()
    return Fraction(min(nA, max(m - nB, 0)))


def sdof_wiretap_none(cfg: AntennaConfig) -> Fraction:
    # (m - nB)^+ for m <= max(nA, nB), (nA - nB)^+ beyond; min() covers both
    m, nA, nB = cfg.as_tuple()
    return Fraction(min(max(m - nB, 0), max(nA - nB, 0)))


def sdof_wiretap(cfg: AntennaConfig, mode: CsitMode) -> Fraction:
    if mode is CsitMode.PERFECT:
        return sdof_wiretap_perfect(cfg)
    if mode is CsitMode.DELAYED:
        return sdof_wiretap_delayed(cfg)
    if mode is CsitMode.DELAYED_PARTIAL:
        return sdof_wiretap_partial(cfg)
    if mode is CsitMode.NO_CSIT:
        return sdof_wiretap_none(cfg)
    raise ValueError(f"unknown CSIT mode {mode!r}")


# ---------------------------------------------------------------------------
# two-user broadcast channel with confidential messages


def bcc_region_delayed(cfg: AntennaConfig) -> SdofRegion:
    m, nA, nB = cfg.as_tuple()
    one, zero = Fraction(1), Fraction(0)
    if cfg.above_receivers:
        m_eff = Fraction(cfg.m_eff)
        d_a = sdof_wiretap_delayed(cfg)
        d_b = sdof_wiretap_delayed(cfg.swapped())
        return SdofRegion.from_halfplanes(
            [(one / d_a, one / m_eff, one), (one / m_eff, one / d_b, one)]
        )
    if nB < m <= nA:
        return SdofRegion.from_halfplanes([(one, zero, Fraction(m - nB)), (zero, one, zero)])
    if nA < m <= nB:
        return SdofRegion.from_halfplanes([(one, zero, zero), (zero, one, Fraction(m - nA))])
    return SdofRegion.from_halfplanes([(one, zero, zero), (zero, one, zero)])


def bcc_sum_point(cfg: AntennaConfig) -> Point:
    m, nA, nB = cfg.as_tuple()
    if not cfg.above_receivers:
        raise OutOfRangeError(f"sum SDoF point requires m > max(nA, nB); got {cfg.as_tuple()}")
    if m <= nA + nB:
        return (Fraction(nA * (m - nB), m), Fraction(nB * (m - nA), m))
    return (Fraction(nA * nA, nA + nB), Fraction(nB * nB, nA + nB))


def bc_dof_region_delayed(cfg: AntennaConfig) -> SdofRegion:
    """DoF region of the two-user MIMO broadcast channel (no secrecy) with delayed CSIT."""
    m, nA, nB = cfg.as_tuple()
    one = Fraction(1)
    m_eff = Fraction(cfg.m_eff)
    return SdofRegion.from_halfplanes(
        [
            (one / min(m, nA), one / m_eff, one),
            (one / m_eff, one / min(m, nB), one),
        ]
    )


def bcc_region_perfect(cfg: AntennaConfig) -> SdofRegion:
    m, nA, nB = cfg.as_tuple()
    if not cfg.above_receivers:
        raise OutOfRangeError(f"perfect-CSIT region requires m > max(nA, nB); got {cfg.as_tuple()}")
    one, zero = Fraction(1), Fraction(0)
    return SdofRegion.from_halfplanes(
        [(one, zero, Fraction(min(nA, m - nB))), (zero, one, Fraction(min(m - nA, nB)))]
    )


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
