"""
Deterministic channel model: power-level alphabets, truncation, bounded
floor-linear combinations and synthesis of the received signals.

Power levels are integers in ``{0, ..., Pbar^lam - 1}`` where
``Pbar^lam = floor(sqrt(P^lam))`` is computed separately for every
exponent. Coefficients come from a :class:`BoundedDensitySampler`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError

__all__ = [
    "pbar",
    "PowerLevelAlphabet",
    "floor_to_zero",
    "truncate",
    "truncate_array",
    "concat",
    "BoundedDensitySampler",
    "LinearCombSpec",
    "lincomb",
    "synthesize_received",
    "received_magnitude_bound",
    "CACHE_VERSION",
]

CACHE_VERSION = 1


def pbar(P, lam):
    """``floor(sqrt(P^lam))``, robust to float error at exact powers."""
    if P <= 1:
        raise DomainError(f"P must be > 1, got {P}")
    if lam < 0:
        raise DomainError(f"power level must be >= 0, got {lam}")
    x = float(P) ** (lam / 2)
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, r):
        return int(r)
    return int(math.floor(x))


@dataclass(frozen=True)
class PowerLevelAlphabet:
    """The alphabet ``{0, ..., Pbar^lam - 1}``."""

    P: float
    lam: float

    @property
    def cardinality(self):
        return max(1, pbar(self.P, self.lam))

    def __contains__(self, x):
        return isinstance(x, (int, np.integer)) and 0 <= x < self.cardinality

    def __iter__(self):
        return iter(range(self.cardinality))

    def __len__(self):
        return self.cardinality


def floor_to_zero(x):
    """Round toward zero: ``floor`` for positives, ``ceil`` for negatives."""
    return int(math.trunc(x))


def truncate(X, lam1, lam, P, strict=True):
    """Top ``lam - lam1`` power levels of ``X``: ``X // Pbar^lam1``.

    With ``strict`` the input must lie in the alphabet of level ``lam``.
    """
    if not 0 <= lam1 <= lam:
        raise DomainError(f"need 0 <= lam1 <= lam, got lam1={lam1}, lam={lam}")
    X = int(X)
    if strict and not 0 <= X < max(1, pbar(P, lam)):
        raise DomainError(f"X={X} outside alphabet of level {lam} (size {pbar(P, lam)})")
    return X // pbar(P, lam1)


def truncate_array(X, lam1, P):
    """Vectorized ``X // Pbar^lam1`` for non-negative integer arrays."""
    return np.asarray(X, dtype=np.int64) // pbar(P, lam1)


def concat(*vectors):
    """Stack vectors end to end (the triangle-down concatenation)."""
    out = []
    for v in vectors:
        out.extend(v)
    return out


_DISTRIBUTIONS = {
    "uniform12": ("uniform", 1.0, 2.0),
    "signed12": ("signed", 1.0, 2.0),
}


def _parse_distribution(desc):
    if isinstance(desc, str):
        if desc not in _DISTRIBUTIONS:
            raise DomainError(f"unknown coefficient distribution {desc!r}")
        return _DISTRIBUTIONS[desc]
    kind, lo, hi = desc
    lo, hi = float(lo), float(hi)
    if kind not in ("uniform", "signed") or not hi > lo:
        raise DomainError(f"bad distribution descriptor {desc!r}")
    if kind == "signed" and lo < 0:
        raise DomainError("signed distribution needs 0 <= lo < hi")
    return (kind, lo, hi)


@dataclass
class BoundedDensitySampler:
    """Seeded source of bounded-density channel coefficients.

    ``distribution`` is ``"uniform12"`` (uniform on [1, 2], the default),
    ``"signed12"`` (uniform on [-2, -1] U [1, 2]) or a tuple
    ``("uniform", lo, hi)`` / ``("signed", lo, hi)``.

    Draws are memoized by key, so repeated synthesis over one channel
    realization is consistent. Each key gets its own generator seeded from
    ``(seed, *key)``, which makes a draw independent of query order.
    """

    seed: int = 0
    distribution: object = "uniform12"
    static: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._dist = _parse_distribution(self.distribution)

    @property
    def delta(self):
        kind, lo, hi = self._dist
        return max(1.0, abs(lo), abs(hi))

    @property
    def f_max(self):
        kind, lo, hi = self._dist
        width = (hi - lo) * (2 if kind == "signed" else 1)
        return max(1.0, 1.0 / width)

    def sample(self, rng, size):
        """Draw an array of i.i.d. coefficients from ``rng``."""
        kind, lo, hi = self._dist
        g = rng.uniform(lo, hi, size=size)
        if kind == "signed":
            g = np.where(rng.random(size=size) < 0.5, -g, g)
        return g

    def coefficient(self, receiver, antenna, t, term):
        """Memoized coefficient for ``(receiver, antenna, t, term)``."""
        if self.static:
            t = 0
        key = (int(receiver), int(antenna), int(t), int(term))
        g = self._cache.get(key)
        if g is None:
            rng = np.random.default_rng([self.seed & (2**64 - 1), *key])
            g = float(self.sample(rng, 1)[0])
            self._cache[key] = g
        return g

    def save(self, path):
        """Write memoized draws to a versioned ``.npz`` cache."""
        keys = np.array(sorted(self._cache), dtype=np.int64).reshape(-1, 4)
        vals = np.array([self._cache[tuple(k)] for k in keys], dtype=np.float64)
        kind, lo, hi = self._dist
        np.savez(path, version=np.int64(CACHE_VERSION), seed=np.uint64(self.seed & (2**64 - 1)),
                 static=np.bool_(self.static), dist_kind=np.str_(kind),
                 dist_bounds=np.array([lo, hi]), keys=keys, values=vals)

    @classmethod
    def load(cls, path):
        with np.load(path, allow_pickle=False) as f:
            version = int(f["version"])
            if version != CACHE_VERSION:
                raise ValueError(f"unsupported coefficient cache version {version}")
            lo, hi = (float(x) for x in f["dist_bounds"])
            sampler = cls(seed=int(f["seed"]), distribution=(str(f["dist_kind"]), lo, hi),
                          static=bool(f["static"]))
            for k, v in zip(f["keys"], f["values"]):
                sampler._cache[tuple(int(x) for x in k)] = float(v)
        return sampler


@dataclass(frozen=True)
class LinearCombSpec:
    """Terms of one bounded linear combination.

    ``terms`` holds ``(group, component, lam_lo, lam_hi)`` windows and
    ``draw_ids`` one coefficient key per term; the keys must be distinct.
    """

    terms: tuple
    draw_ids: tuple
    eta: float = 1.0

    def __post_init__(self):
        if len(self.terms) != len(self.draw_ids):
            raise DomainError("one draw id per term is required")
        if len(set(self.draw_ids)) != len(self.draw_ids):
            raise DomainError("coefficient draw ids must be distinct")
        for _, _, lo, hi in self.terms:
            if not 0 <= lo <= hi <= self.eta:
                raise DomainError(f"window ({lo}, {hi}) not inside [0, {self.eta}]")


def lincomb(spec, values, draws):
    """``sum_i floor_to_zero(g_i * v_i)``.

    ``draws`` is either a sampler (keys taken from ``spec.draw_ids``, each
    a 4-tuple) or a sequence of coefficients aligned with the terms.
    """
    if len(values) != len(spec.terms):
        raise DomainError(f"expected {len(spec.terms)} values, got {len(values)}")
    if isinstance(draws, BoundedDensitySampler):
        coeffs = [draws.coefficient(*key) for key in spec.draw_ids]
    else:
        coeffs = list(draws)
        if len(coeffs) != len(values):
            raise DomainError("one coefficient per value is required")
    return sum(floor_to_zero(g * int(v)) for g, v in zip(coeffs, values))


def synthesize_received(k, t, X, alpha, P, N, sampler):
    """Deterministic received vector at receiver ``k``, time ``t``.

    Antenna ``n`` observes the top 1 levels of the desired user's inputs
    and the top ``alpha`` levels of every interferer's inputs, through
    fresh coefficients keyed ``(k, n, t, term)``.

    Parameters
    ----------
    k : int
        Receiver index (0-based).
    X : array_like, shape (K, M)
        Inputs, each in ``{0, ..., Pbar^max(1, alpha) - 1}``.
    """
    X = np.asarray(X, dtype=np.int64)
    if X.ndim != 2:
        raise DomainError("X must have shape (K, M)")
    K, M = X.shape
    top = max(1.0, alpha)
    size = pbar(P, top)
    if X.min(initial=0) < 0 or X.max(initial=0) >= size:
        raise DomainError(f"inputs must lie in [0, {size})")
    own_div = pbar(P, top - 1)
    cross_div = pbar(P, top - alpha)
    values = []
    for m in range(M):
        values.append(int(X[k, m]) // own_div)
    for j in range(K):
        if j == k:
            continue
        for m in range(M):
            values.append(int(X[j, m]) // cross_div)
    out = []
    for n in range(N):
        out.append(sum(floor_to_zero(sampler.coefficient(k, n, t, i) * v)
                       for i, v in enumerate(values)))
    return out


def received_magnitude_bound(K, M, alpha, P, delta):
    """``K*M * delta * Pbar^max(1, alpha)``."""
    return K * M * delta * pbar(P, max(1.0, alpha))
