"""
GDoF achievability in a layered multiple-access channel.

A tuple ``d`` is achievable when for every nonempty subset ``S`` of
streams with ``|S| = k``::

    sum_{i in S} d_i <= (sum of the min(k, N) largest gamma_i in S)
                       - (sum of the min(k, N) smallest noise exponents)

Two evaluators are provided: :func:`check_achievable` (per-size
sort-and-sweep, polynomial) and :func:`check_achievable_bruteforce`
(literal enumeration of S, S1 and S2).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .exceptions import BudgetExceeded, DomainError
from .gdof import pos

__all__ = [
    "MacProblem",
    "MacVerdict",
    "gamma_levels",
    "check_achievable",
    "check_levels",
    "check_achievable_bruteforce",
    "check_levels_bruteforce",
    "TOL",
]

TOL = 1e-9
BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class MacProblem:
    """``M1`` strength-1 streams, ``M2`` strength-``alpha`` streams, ``N`` antennas.

    ``eta`` holds one power back-off exponent per stream, ``alpha_n`` one
    noise-floor exponent per receive antenna.
    """

    M1: int
    M2: int
    alpha: float
    eta: tuple
    alpha_n: tuple

    def __post_init__(self):
        object.__setattr__(self, "eta", tuple(float(x) for x in self.eta))
        object.__setattr__(self, "alpha_n", tuple(float(x) for x in self.alpha_n))
        if self.M1 < 0 or self.M2 < 0 or self.M1 + self.M2 < 1:
            raise DomainError("need M1, M2 >= 0 and at least one stream")
        if len(self.eta) != self.M1 + self.M2:
            raise DomainError(f"eta needs {self.M1 + self.M2} entries, got {len(self.eta)}")
        if not self.alpha_n:
            raise DomainError("at least one receive antenna is required")
        if self.alpha < 0 or min(self.eta) < 0 or min(self.alpha_n) < 0:
            raise DomainError("alpha, eta and alpha_n must be non-negative")

    @property
    def N(self):
        return len(self.alpha_n)

    @property
    def n_streams(self):
        return self.M1 + self.M2

    @property
    def in_lemma_regime(self):
        """The layered-MAC result is stated for ``N < M1 + M2``."""
        return self.N < self.n_streams

    def to_dict(self):
        return {"M1": self.M1, "M2": self.M2, "alpha": self.alpha,
                "eta": list(self.eta), "alpha_n": list(self.alpha_n)}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["M1"]), int(d["M2"]), float(d["alpha"]), tuple(d["eta"]), tuple(d["alpha_n"]))


def gamma_levels(p):
    """Received power level of each stream: ``(1-eta)^+`` then ``(alpha-eta)^+``."""
    return [pos(1 - e) if i < p.M1 else pos(p.alpha - e) for i, e in enumerate(p.eta)]


@dataclass
class MacVerdict:
    """Outcome of a check.

    ``constraints`` lists ``(k, margin)`` for every subset size whose worst
    subset is tight (``|margin| <= TOL``) or violated (``margin < -TOL``);
    ``margins`` has the worst-case margin of every size.
    """

    achievable: bool
    constraints: list = field(default_factory=list)
    margins: dict = field(default_factory=dict)
    in_lemma_regime: bool = True

    def __bool__(self):
        return self.achievable

    def to_dict(self):
        return {"achievable": self.achievable,
                "binding": [{"k": k, "margin": m} for k, m in self.constraints],
                "margins": {str(k): m for k, m in self.margins.items()},
                "in_lemma_regime": self.in_lemma_regime}

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _validate(gamma, noise, d):
    if len(gamma) != len(d):
        raise DomainError(f"tuple has {len(d)} entries for {len(gamma)} streams")
    if not noise:
        raise DomainError("at least one receive antenna is required")
    if min(d, default=0) < 0:
        raise DomainError("GDoF tuple entries must be non-negative")


def _worst_lhs_all(gamma, d, N):
    """``max_{|S|=k} [sum_S d - (top-min(k,N) gamma over S)]`` for every k.

    Sort streams by gamma (descending). For a subset S the top-N gammas
    are its first N members in that order, so S splits at some position p
    into a head C (|C| = N, indices <= p) and a tail R (indices > p)
    that is charged only d. Each side is optimized independently.
    """
    n = len(gamma)
    out = {}
    best = sorted((d[i] - gamma[i] for i in range(n)), reverse=True)
    acc = 0.0
    for k in range(1, min(N, n) + 1):
        acc += best[k - 1]
        out[k] = acc
    if n <= N:
        return out
    order = sorted(range(n), key=lambda i: -gamma[i])
    score = [d[i] - gamma[i] for i in order]
    dd = [d[i] for i in order]
    for k in range(N + 1, n + 1):
        out[k] = float("-inf")
    for p in range(N - 1, n - 1):
        head = sum(sorted(score[:p + 1], reverse=True)[:N])
        tail = sorted(dd[p + 1:], reverse=True)
        acc = head
        for r, v in enumerate(tail, 1):
            acc += v
            if acc > out[N + r]:
                out[N + r] = acc
    return out


def check_levels(gamma, noise, d, tol=TOL):
    """Efficient achievability check from received levels directly."""
    gamma = [float(x) for x in gamma]
    noise = sorted(float(x) for x in noise)
    d = [float(x) for x in d]
    _validate(gamma, noise, d)
    N = len(noise)
    margins = {}
    binding = []
    ok = True
    worst = _worst_lhs_all(gamma, d, N)
    for k in range(1, len(gamma) + 1):
        m = min(k, N)
        margin = -worst[k] - sum(noise[:m])
        margins[k] = margin
        if margin < -tol:
            ok = False
            binding.append((k, margin))
        elif margin <= tol:
            binding.append((k, margin))
    return MacVerdict(ok, binding, margins)


def check_achievable(p, d, tol=TOL):
    """Decide whether ``d`` lies in the GDoF region of problem ``p``."""
    v = check_levels(gamma_levels(p), p.alpha_n, d, tol)
    v.in_lemma_regime = p.in_lemma_regime
    return v


def check_levels_bruteforce(gamma, noise, d, tol=TOL):
    """Literal subset enumeration; only for at most 20 streams."""
    gamma = [float(x) for x in gamma]
    noise = [float(x) for x in noise]
    d = [float(x) for x in d]
    _validate(gamma, noise, d)
    n, N = len(gamma), len(noise)
    if n > BRUTE_FORCE_LIMIT:
        raise BudgetExceeded(f"{n} streams exceed the brute-force limit of {BRUTE_FORCE_LIMIT}")
    for k in range(1, n + 1):
        m = min(k, N)
        noise_min = min(sum(noise[i] for i in S1) for S1 in itertools.combinations(range(N), m))
        for S in itertools.combinations(range(n), k):
            lhs = sum(d[i] for i in S)
            best = max(sum(gamma[i] for i in S2) for S2 in itertools.combinations(S, m))
            if lhs > best - noise_min + tol:
                return False
    return True


def check_achievable_bruteforce(p, d, tol=TOL):
    return check_levels_bruteforce(gamma_levels(p), p.alpha_n, d, tol)
