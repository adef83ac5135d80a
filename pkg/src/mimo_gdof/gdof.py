"""
Closed-form sum-GDoF of the K-user symmetric M x N MIMO interference
channel under finite precision CSIT, together with the five converse
bounds whose minimum it equals.

All values are in units of GDoF (pre-log of ``(1/2) log P``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exceptions import DomainError

__all__ = [
    "Branch",
    "GdofParams",
    "GdofResult",
    "BOUND_NAMES",
    "pos",
    "n_alpha",
    "d_alpha",
    "sum_gdof",
    "siso_per_user_gdof",
    "bound_b1",
    "bound_b1_plus",
    "bound_b2",
    "bound_b2_plus",
    "bound_b3",
    "all_bounds",
    "min_of_bounds",
]


class Branch(str, enum.Enum):
    """Which piece of the sum-GDoF formula produced a value."""

    ZERO_FORCING = "M<=N/K"
    WEAK = "alpha<=1/2"
    MODERATE = "1/2<alpha<=1"
    STRONG = "alpha>1"


BOUND_NAMES = ("b1", "b1+", "b2", "b2+", "b3")


def pos(x):
    """``(x)^+ = max(x, 0)``."""
    return x if x > 0 else 0


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


@dataclass(frozen=True)
class GdofParams:
    """Symmetric channel parameterization ``(K, M, N, alpha)``."""

    K: int
    M: int
    N: int
    alpha: float

    def __post_init__(self):
        for name in ("K", "M", "N"):
            if not _is_int(getattr(self, name)):
                raise DomainError(f"{name} must be an integer, got {getattr(self, name)!r}")
        if self.K < 2:
            raise DomainError(f"K must be >= 2, got {self.K}")
        if self.M < 1 or self.N < 1:
            raise DomainError(f"M and N must be >= 1, got M={self.M}, N={self.N}")
        a = self.alpha
        if isinstance(a, bool) or not isinstance(a, (int, float, Fraction)):
            raise DomainError(f"alpha must be real, got {a!r}")
        if not math.isfinite(a) or a < 0:
            raise DomainError(f"alpha must be finite and >= 0, got {a}")

    @property
    def m(self):
        """``min(M, N)``."""
        return min(self.M, self.N)

    @property
    def zero_forcing(self):
        """True when ``M <= N/K`` (checked as ``K*M <= N`` in integers)."""
        return self.K * self.M <= self.N

    @property
    def branch(self):
        if self.zero_forcing:
            return Branch.ZERO_FORCING
        if self.alpha <= 0.5:
            return Branch.WEAK
        if self.alpha <= 1:
            return Branch.MODERATE
        return Branch.STRONG


@dataclass(frozen=True)
class GdofResult:
    """Sum-GDoF value with the branch that produced it and the bound table.

    ``per_bound_values`` maps each bound name to its value, or to ``None``
    when the bound does not apply at this alpha.
    """

    params: GdofParams
    sum_gdof: float
    active_branch: Branch
    per_bound_values: dict = field(default_factory=dict)

    def applicable_bounds(self):
        return {k: v for k, v in self.per_bound_values.items() if v is not None}


def n_alpha(p):
    """``min((K-1)M, N) alpha + (N-(K-1)M)^+ (1-alpha)``."""
    KM1 = (p.K - 1) * p.M
    return min(KM1, p.N) * p.alpha + pos(p.N - KM1) * (1 - p.alpha)


def d_alpha(p):
    """``(N-(K-1)M)^+ + min(N, (K-1)M) alpha``."""
    KM1 = (p.K - 1) * p.M
    return pos(p.N - KM1) + min(p.N, KM1) * p.alpha


def _branch_value(p, branch):
    K, m, a = p.K, p.m, p.alpha
    if branch is Branch.ZERO_FORCING:
        return K * p.M
    if branch is Branch.WEAK:
        return K * m * (1 - a) + K * pos(p.N - p.M) * a / (K - 1)
    if branch is Branch.MODERATE:
        return min(K / (K - 1) * ((K - 2) * m * (1 - a) + n_alpha(p)),
                   p.N * a + K * m * (1 - a))
    return min(d_alpha(p), K * m)


def sum_gdof(p):
    """Evaluate the piecewise sum-GDoF formula at ``p``.

    Parameters
    ----------
    p : GdofParams

    Returns
    -------
    GdofResult
    """
    branch = p.branch
    return GdofResult(p, float(_branch_value(p, branch)), branch, all_bounds(p))


def siso_per_user_gdof(K, alpha):
    """Per-user GDoF of the symmetric K-user SISO interference channel.

    This is the W-curve: ``1-a`` up to 1/2, ``(K-2-(K-3)a)/(K-1)`` up to
    ``K/(K+1)``, ``1-(K-1)a/K`` up to 1, ``a/K`` up to ``K`` and 1 beyond.
    """
    if not _is_int(K) or K < 2:
        raise DomainError(f"K must be an integer >= 2, got {K!r}")
    if not math.isfinite(alpha) or alpha < 0:
        raise DomainError(f"alpha must be finite and >= 0, got {alpha}")
    a = alpha
    if a <= 0.5:
        return 1 - a
    if a <= K / (K + 1):
        return (K - 2 - (K - 3) * a) / (K - 1)
    if a <= 1:
        return 1 - (K - 1) / K * a
    if a <= K:
        return a / K
    return 1.0


# Converse bounds, written out independently of the branch helpers above.
# Each returns None outside its alpha range.

def bound_b1(p):
    if p.alpha > 0.5:
        return None
    K, m, a = p.K, p.m, p.alpha
    return (K * (m * (1 - a) + pos(p.N - p.M) * a) + K * (K - 2) * m * (1 - a)) / (K - 1)


def bound_b1_plus(p):
    if not 0.5 <= p.alpha <= 1:
        return None
    K, m, a = p.K, p.m, p.alpha
    KM1 = (K - 1) * p.M
    inner = min(KM1, p.N) * a + pos(p.N - KM1) * (1 - a)
    return (K * inner + K * (K - 2) * m * (1 - a)) / (K - 1)


def bound_b2(p):
    if p.alpha > 1:
        return None
    return p.N * p.alpha + p.K * p.m * (1 - p.alpha)


def bound_b2_plus(p):
    if p.alpha < 1:
        return None
    KM1 = (p.K - 1) * p.M
    return pos(p.N - KM1) + min(p.N, KM1) * p.alpha


def bound_b3(p):
    return p.K * p.m


_BOUNDS = {
    "b1": bound_b1,
    "b1+": bound_b1_plus,
    "b2": bound_b2,
    "b2+": bound_b2_plus,
    "b3": bound_b3,
}


def all_bounds(p):
    """Dict of every bound at ``p`` (``None`` where inapplicable)."""
    out = {}
    for name, fn in _BOUNDS.items():
        v = fn(p)
        out[name] = None if v is None else float(v)
    return out


def min_of_bounds(p):
    """Minimum over the bounds that apply at ``p.alpha``."""
    return min(v for v in all_bounds(p).values() if v is not None)
