"""Brute-force check of the subset-entropy inequalities on exchangeable sources.

For an entropy-symmetric vector ``x^L`` (subset entropies depend only on the
subset size) the profile ``h_k = h(x_1..x_k)`` satisfies

* diminishing increments: ``h_{N+k} - h_N >= h_{M+k} - h_M`` for ``M >= N``;
* sub-proportionality:    ``M h_N >= N h_M``                 for ``M >= N``.

Finite mixtures of i.i.d. laws are exchangeable, hence entropy-symmetric,
and small enough to enumerate exactly. The harness can only look for
counterexamples; it proves nothing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class HypothesisViolation(ValueError):
    """The source is not entropy-symmetric, so the inequalities do not apply."""


def _entropy_bits(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


@dataclass(frozen=True)
class ExchangeableSource:
    """Mixture of i.i.d. laws: ``P(x) = sum_c w_c prod_i p_c(x_i)``."""

    L: int
    q: int
    weights: tuple[float, ...]
    marginals: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not 1 <= self.L:
            raise ValueError("L must be >= 1")
        if self.q < 2:
            raise ValueError("q must be >= 2")
        w = np.asarray(self.weights, dtype=float)
        mg = np.asarray(self.marginals, dtype=float)
        if mg.shape != (len(w), self.q):
            raise ValueError(f"need one length-{self.q} marginal per component")
        if np.any(w < 0) or np.any(mg < 0):
            raise ValueError("probabilities must be nonnegative")
        if not np.isclose(w.sum(), 1.0, atol=1e-12):
            raise ValueError("weights must sum to 1")
        if not np.allclose(mg.sum(axis=1), 1.0, atol=1e-12):
            raise ValueError("each marginal must sum to 1")

    @classmethod
    def iid(cls, L: int, marginal: Sequence[float]) -> "ExchangeableSource":
        return cls(L, len(marginal), (1.0,), (tuple(marginal),))

    @classmethod
    def random(cls, rng: np.random.Generator, L: int, q: int, max_components: int = 3) -> "ExchangeableSource":
        k = int(rng.integers(1, max_components + 1))
        weights = rng.dirichlet(np.ones(k))
        marginals = rng.dirichlet(np.ones(q), size=k)
        # renormalize against float drift so the validation tolerance holds
        weights = weights / weights.sum()
        marginals = marginals / marginals.sum(axis=1, keepdims=True)
        return cls(L, q, tuple(weights.tolist()), tuple(tuple(r) for r in marginals.tolist()))

    def joint(self, k: int | None = None) -> np.ndarray:
        """Joint pmf of the first ``k`` variables as a ``(q,)*k`` array."""
        k = self.L if k is None else k
        out = np.zeros((self.q,) * k)
        for w, p in zip(self.weights, self.marginals):
            term = np.array(w)
            for _ in range(k):
                term = np.multiply.outer(term, np.asarray(p))
            out = out + term
        return out

    def spec(self) -> dict:
        return {"L": self.L, "q": self.q, "weights": list(self.weights), "marginals": [list(m) for m in self.marginals]}


def joint_entropy(source: ExchangeableSource, k: int) -> float:
    """Entropy in bits of the first ``k`` variables, by enumerating all ``q**k`` outcomes."""
    if not 0 <= k <= source.L:
        raise ValueError(f"k must lie in [0, {source.L}]")
    if k == 0:
        return 0.0
    h = 0.0
    for outcome in itertools.product(range(source.q), repeat=k):
        p = sum(w * np.prod([m[x] for x in outcome]) for w, m in zip(source.weights, source.marginals))
        if p > 0:
            h -= p * np.log2(p)
    return float(h)


def entropy_profile(source: ExchangeableSource) -> list[float]:
    """``[h_0, h_1, ..., h_L]`` with ``h_0 = 0``."""
    joint = source.joint()
    profile = [0.0]
    for k in range(1, source.L + 1):
        marg = joint.sum(axis=tuple(range(k, source.L))) if k < source.L else joint
        profile.append(_entropy_bits(marg))
    return profile


def subset_entropies(joint: np.ndarray) -> dict[tuple[int, ...], float]:
    """Entropy of every nonempty subset of the variables of a joint pmf array."""
    L = joint.ndim
    out = {}
    for size in range(1, L + 1):
        for subset in itertools.combinations(range(L), size):
            drop = tuple(i for i in range(L) if i not in subset)
            out[subset] = _entropy_bits(joint.sum(axis=drop) if drop else joint)
    return out


def check_entropy_symmetry(source, tol: float = 1e-12) -> bool:
    """True if subsets of equal size have entropies within ``tol`` of each other.

    ``source`` is an :class:`ExchangeableSource` or any joint pmf array.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    joint = source.joint() if isinstance(source, ExchangeableSource) else np.asarray(source, dtype=float)
    by_size: dict[int, list[float]] = {}
    for subset, h in subset_entropies(joint).items():
        by_size.setdefault(len(subset), []).append(h)
    return all(max(v) - min(v) <= tol for v in by_size.values())


@dataclass
class LemmaReport:
    profile: list[float]
    ess1: list[tuple[int, int, int, float]]  # (M, N, k, margin)
    ess2: list[tuple[int, int, float]]  # (M, N, margin)
    tol: float
    source_spec: dict | None = None

    @property
    def worst_margin_ess1(self) -> float:
        return min((m for *_, m in self.ess1), default=0.0)

    @property
    def worst_margin_ess2(self) -> float:
        return min((m for *_, m in self.ess2), default=0.0)

    @property
    def passed(self) -> bool:
        return self.worst_margin_ess1 >= -self.tol and self.worst_margin_ess2 >= -self.tol

    def to_record(self) -> dict:
        return {
            "source_spec": self.source_spec,
            "profile": self.profile,
            "worst_margin_ess1": self.worst_margin_ess1,
            "worst_margin_ess2": self.worst_margin_ess2,
            "pass": self.passed,
        }


def lemma_margins(profile: Sequence[float]) -> tuple[list, list]:
    """Margins of both inequality families over every admissible index tuple."""
    L = len(profile) - 1
    h = list(profile)
    ess1 = []
    ess2 = []
    for N in range(L + 1):
        for M in range(N, L + 1):
            ess2.append((M, N, M * h[N] - N * h[M]))
            for k in range(L - M + 1):
                ess1.append((M, N, k, (h[N + k] - h[N]) - (h[M + k] - h[M])))
    return ess1, ess2


def verify_essential_lemma(source, tol: float = 1e-9, symmetry_tol: float = 1e-9) -> LemmaReport:
    if not check_entropy_symmetry(source, symmetry_tol):
        raise HypothesisViolation("source is not entropy-symmetric")
    if isinstance(source, ExchangeableSource):
        profile = entropy_profile(source)
        spec = source.spec()
    else:
        joint = np.asarray(source, dtype=float)
        ents = subset_entropies(joint)
        profile = [0.0] + [ents[tuple(range(k))] for k in range(1, joint.ndim + 1)]
        spec = None
    ess1, ess2 = lemma_margins(profile)
    return LemmaReport(profile, ess1, ess2, tol, spec)


def random_sources(count: int, L_max: int, q_max: int, seed: int, L_min: int = 2):
    """Yield ``count`` seeded random mixtures with ``L`` in [L_min, L_max] and ``q`` in [2, q_max]."""
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    for _ in range(count):
        L = int(rng.integers(L_min, L_max + 1))
        q = int(rng.integers(2, q_max + 1))
        yield ExchangeableSource.random(rng, L, q)


def non_exchangeable_example() -> np.ndarray:
    """Three fair bits with ``x2 = x1`` and ``x3`` independent."""
    joint = np.zeros((2, 2, 2))
    for a in range(2):
        for c in range(2):
            joint[a, a, c] = 0.25
    return joint
