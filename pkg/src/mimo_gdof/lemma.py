"""
Right-hand-side coefficient of the generalized aligned-image-sets bound.

For two observation vectors built from the same groups of inputs at
different power levels, the entropy difference ``H(U1|W,G) - H(U2|W,G)``
is at most ``T * coefficient * log Pbar`` up to ``o(log Pbar)``. The
coefficient charges the first ``N1`` observation dimensions to the groups
in decreasing order of their level gap ``(lambda1 - lambda2)^+``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import DomainError, PreconditionError
from .gdof import GdofParams, pos

__all__ = [
    "Group",
    "LemmaInstance",
    "CoefficientResult",
    "CONVERSE_KINDS",
    "lemma_coefficient",
    "converse_instance",
    "closed_form_coefficient",
]

_EPS = 1e-12


@dataclass(frozen=True)
class Group:
    """``M`` inputs seen at level ``lam1`` by U1 and ``lam2`` by U2."""

    M: int
    lam1: float
    lam2: float

    def __post_init__(self):
        object.__setattr__(self, "lam1", float(self.lam1))
        object.__setattr__(self, "lam2", float(self.lam2))

    @property
    def gap(self):
        return pos(self.lam1 - self.lam2)


@dataclass(frozen=True)
class LemmaInstance:
    eta: float
    groups: tuple
    N1: int
    N2: int

    def __post_init__(self):
        groups = tuple(g if isinstance(g, Group) else Group(*g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        if not self.eta > 0:
            raise DomainError(f"eta must be positive, got {self.eta}")
        if not groups:
            raise DomainError("at least one group is required")
        for g in groups:
            if not isinstance(g.M, int) or g.M < 1:
                raise DomainError(f"group sizes must be integers >= 1, got {g.M!r}")
            for lam in (g.lam1, g.lam2):
                if lam < -_EPS or lam > self.eta + _EPS:
                    raise DomainError(f"power level {lam} outside [0, eta={self.eta}]")
        if self.N1 < 1 or self.N2 < 1:
            raise DomainError("N1 and N2 must be >= 1")

    @property
    def total_inputs(self):
        return sum(g.M for g in self.groups)


@dataclass(frozen=True)
class CoefficientResult:
    coefficient: float
    s: int
    sorted_order: tuple


def lemma_coefficient(inst):
    """Coefficient of ``T log Pbar`` for the instance.

    Groups are stably sorted by decreasing ``(lam1 - lam2)^+``; ``s`` is
    the largest index with ``M_1 + ... + M_s <= N1``. The first ``s``
    groups contribute ``M_i * gap_i`` and group ``s+1`` (if any) fills the
    remaining ``N1 - sum M_i`` dimensions.

    Raises
    ------
    PreconditionError
        If ``N1 > min(N2, sum M_i)``.
    """
    if inst.N1 > min(inst.N2, inst.total_inputs):
        raise PreconditionError(
            f"N1={inst.N1} exceeds min(N2={inst.N2}, sum M_i={inst.total_inputs})")
    order = sorted(range(len(inst.groups)), key=lambda i: (-inst.groups[i].gap, i))
    groups = [inst.groups[i] for i in order]
    used = 0
    coef = 0.0
    s = 0
    for g in groups:
        if used + g.M > inst.N1:
            break
        used += g.M
        coef += g.M * g.gap
        s += 1
    if s < len(groups):
        coef += (inst.N1 - used) * groups[s].gap
    return CoefficientResult(float(coef), s, tuple(order))


CONVERSE_KINDS = ("c3", "c5", "c5g", "cv6", "c6minusminus", "jl0", "jl00")


def _check_range(kind, alpha, lo, hi):
    if not (lo - _EPS <= alpha <= hi + _EPS):
        raise DomainError(f"{kind} requires {lo} <= alpha <= {hi}, got {alpha}")


def converse_instance(kind, p, k=None):
    """The lemma instance substituted at one step of the converse.

    Group order follows the substitution as written (lemma_coefficient
    sorts). Empty groups, e.g. ``(K-k)M = 0``, are dropped. ``N1`` is
    capped at the number of inputs: ``N`` observations of ``sum M_i``
    generic inputs carry no more than ``sum M_i`` dimensions, and
    ``N2 = N`` is kept.

    Parameters
    ----------
    kind : str
        One of ``CONVERSE_KINDS``.
    p : GdofParams
    k : int, optional
        Receiver index for ``c3`` (``2 <= k <= K``, default 2). ``jl0`` is
        ``c3`` at ``k=2`` and ``jl00`` is ``c3`` at ``k=K``.
    """
    K, M, a = p.K, p.M, p.alpha
    if kind in ("c3", "jl0", "jl00"):
        _check_range(kind, a, 0, 1)
        if kind == "jl0":
            k = 2
        elif kind == "jl00":
            k = K
        elif k is None:
            k = 2
        if not 2 <= k <= K:
            raise DomainError(f"c3 receiver index must be in [2, K], got {k}")
        eta = 1.0
        groups = [Group(M, 1.0, a), Group((K - k) * M, a, a)]
    elif kind == "c5":
        _check_range(kind, a, 0, 0.5)
        eta = 1.0
        groups = [Group(M, 1.0, a), Group((K - 1) * M, a, 0.0)]
    elif kind == "c5g":
        _check_range(kind, a, 0.5, 1)
        eta = 1.0
        groups = [Group((K - 1) * M, a, 0.0), Group(M, 1.0, a)]
    elif kind == "cv6":
        _check_range(kind, a, 0, 1)
        eta = 1.0
        groups = [Group(M, 1.0, 0.0), Group((K - 1) * M, a, 0.0)]
    elif kind == "c6minusminus":
        if a < 1:
            raise DomainError(f"c6minusminus requires alpha >= 1, got {a}")
        eta = a
        groups = [Group((K - 1) * M, a, 0.0), Group(M, 1.0, 0.0)]
    else:
        raise DomainError(f"unknown converse step {kind!r}")
    groups = tuple(g for g in groups if g.M > 0)
    total = sum(g.M for g in groups)
    return LemmaInstance(eta, groups, min(p.N, total), p.N)


def closed_form_coefficient(kind, p):
    """Coefficient as printed next to each converse step."""
    K, M, N, a, m = p.K, p.M, p.N, p.alpha, p.m
    if kind in ("c3", "jl0", "jl00"):
        return m * (1 - a)
    if kind == "c5":
        return m * (1 - a) + pos(N - M) * a
    if kind == "c5g":
        return min((K - 1) * M, N) * a + pos(N - (K - 1) * M) * (1 - a)
    if kind == "cv6":
        return m + pos(N - M) * a
    if kind == "c6minusminus":
        return pos(N - (K - 1) * M) + min(N, (K - 1) * M) * a
    raise DomainError(f"unknown converse step {kind!r}")
