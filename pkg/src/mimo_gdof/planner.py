"""
Achievability plans: rate splitting into common and private codewords,
validated receiver by receiver with the layered-MAC region.

Each user splits its message into ``M`` common codewords at full power
(exponent 0) and ``min(M, N)`` private codewords backed off to ``P^-alpha``
(exponent ``alpha``) when ``alpha <= 1``; for ``alpha > 1`` it sends
``min(M, N)`` common codewords only. Every receiver decodes all common
codewords plus its own private ones and treats the remaining private
codewords, which arrive at the noise floor, as noise.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NotCovered, ValidationFailure
from .gdof import Branch, GdofParams, pos, sum_gdof
from .mac import MacProblem, check_achievable

__all__ = [
    "Codeword",
    "ReceiverPlan",
    "SchemePlan",
    "ReceiverCheck",
    "PlanValidation",
    "plan",
    "zero_force_plan",
    "plan_for",
    "validate",
]

log = logging.getLogger(__name__)

MATCH_TOL = 1e-9
ZERO_FORCING_LABEL = "zero-forcing (standard technique, not rate splitting)"


@dataclass(frozen=True)
class Codeword:
    kind: str  # "common" or "private"
    beam: int
    eta: float
    load: float


@dataclass
class ReceiverPlan:
    """Codewords decoded at one receiver as ``(user, kind, beam)``."""

    decode: list
    treat_as_noise: list
    alpha_n: tuple


@dataclass
class SchemePlan:
    params: GdofParams
    construction: str
    regime: str
    users: list
    receivers: list
    warnings: list = field(default_factory=list)

    @property
    def per_user_load(self):
        return [sum(c.load for c in cw) for cw in self.users]

    @property
    def total_load(self):
        return float(sum(self.per_user_load))

    def to_dict(self):
        p = self.params
        return {
            "params": {"K": p.K, "M": p.M, "N": p.N, "alpha": p.alpha},
            "construction": self.construction,
            "regime": self.regime,
            "users": [[{"kind": c.kind, "beam": c.beam, "eta": c.eta, "load": c.load}
                       for c in cws] for cws in self.users],
            "receivers": [{"decode": [list(x) for x in r.decode],
                           "treat_as_noise": [list(x) for x in r.treat_as_noise],
                           "alpha_n": list(r.alpha_n)} for r in self.receivers],
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d):
        pp = d["params"]
        params = GdofParams(int(pp["K"]), int(pp["M"]), int(pp["N"]), float(pp["alpha"]))
        users = [[Codeword(c["kind"], int(c["beam"]), float(c["eta"]), float(c["load"]))
                  for c in cws] for cws in d["users"]]
        receivers = [ReceiverPlan([tuple(x) for x in r["decode"]],
                                  [tuple(x) for x in r["treat_as_noise"]],
                                  tuple(r["alpha_n"])) for r in d["receivers"]]
        return cls(params, d["construction"], d["regime"], users, receivers, list(d["warnings"]))

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _receivers(K, users, N):
    out = []
    for k in range(K):
        decode, tin = [], []
        for j, cws in enumerate(users):
            for c in cws:
                entry = (j, c.kind, c.beam)
                if c.kind == "common" or j == k:
                    decode.append(entry)
                else:
                    tin.append(entry)
        out.append(ReceiverPlan(decode, tin, (0.0,) * N))
    return out


def plan(p):
    """Rate-splitting plan for ``K*M > N``.

    Raises
    ------
    NotCovered
        When ``K*M <= N``; use :func:`zero_force_plan` instead.
    """
    if p.zero_forcing:
        raise NotCovered(f"K*M={p.K * p.M} <= N={p.N}: use zero_force_plan")
    K, M, m, a = p.K, p.M, p.m, p.alpha
    warnings = []
    if a <= 0.5:
        regime = Branch.WEAK.value
        common = pos(p.N - M) * a / ((K - 1) * M)
        n_common, private = M, 1 - a
    elif a <= 1:
        regime = Branch.MODERATE.value
        d = sum_gdof(p).sum_gdof
        common = (d - K * m * (1 - a)) / (K * M)
        n_common, private = M, 1 - a
        if common < 0:
            warnings.append(f"negative common load {common!r} clamped to 0")
            log.warning("negative common load %r clamped to 0 at %s", common, p)
            common = 0.0
    else:
        regime = Branch.STRONG.value
        common = min(sum_gdof(p).sum_gdof / (K * m), 1.0)
        n_common, private = m, None
    users = []
    for _ in range(K):
        cws = [Codeword("common", j, 0.0, float(common)) for j in range(n_common)]
        if private is not None:
            cws += [Codeword("private", j, float(a), float(private)) for j in range(m)]
        users.append(cws)
    return SchemePlan(p, "rate-splitting", regime, users, _receivers(K, users, p.N), warnings)


def zero_force_plan(p):
    """``M`` unit-load streams per user, separable when ``K*M <= N``.

    This is the standard receive zero-forcing argument, a stand-in for the
    regime the rate-splitting construction does not cover.
    """
    if not p.zero_forcing:
        raise NotCovered(f"K*M={p.K * p.M} > N={p.N}: zero forcing cannot separate all streams")
    users = [[Codeword("private", j, 0.0, 1.0) for j in range(p.M)] for _ in range(p.K)]
    receivers = []
    for k in range(p.K):
        decode = [(j, "private", b) for j in range(p.K) for b in range(p.M)]
        receivers.append(ReceiverPlan(decode, [], (0.0,) * p.N))
    return SchemePlan(p, ZERO_FORCING_LABEL, Branch.ZERO_FORCING.value, users, receivers)


def plan_for(p):
    """Whichever construction covers ``p``."""
    return zero_force_plan(p) if p.zero_forcing else plan(p)


@dataclass
class ReceiverCheck:
    receiver: int
    problem: MacProblem | None
    d: list
    verdict: object
    rank_certificate: dict | None = None

    @property
    def achievable(self):
        return bool(self.verdict)


@dataclass
class PlanValidation:
    receivers: list
    achieved_sum_gdof: float
    formula_sum_gdof: float
    match: bool

    def to_dict(self):
        rows = []
        for r in self.receivers:
            row = {"receiver": r.receiver, "d": r.d, "achievable": r.achievable}
            if r.problem is not None:
                row["problem"] = r.problem.to_dict()
                row["verdict"] = r.verdict.to_dict()
            if r.rank_certificate is not None:
                row["rank_certificate"] = r.rank_certificate
            rows.append(row)
        return {"achieved_sum_gdof": self.achieved_sum_gdof,
                "formula_sum_gdof": self.formula_sum_gdof,
                "match": self.match, "receivers": rows}


def _rank_certificate(p, seed=0):
    rng = np.random.default_rng(seed)
    H = rng.standard_normal((p.N, p.K * p.M))
    rank = int(np.linalg.matrix_rank(H))
    return {"streams": p.K * p.M, "receive_dims": p.N, "rank": rank,
            "separable": rank == p.K * p.M}


def _receiver_problem(sp, k):
    p = sp.params
    own, cross = [], []
    for j, kind, beam in sp.receivers[k].decode:
        c = next(c for c in sp.users[j] if c.kind == kind and c.beam == beam)
        (own if j == k else cross).append(c)
    problem = MacProblem(len(own), len(cross), p.alpha,
                         tuple(c.eta for c in own + cross), sp.receivers[k].alpha_n)
    return problem, [c.load for c in own + cross]


def validate(sp, p=None, raise_on_failure=False):
    """Check every receiver's decode set and compare the total with the formula."""
    p = p or sp.params
    checks = []
    for k in range(p.K):
        if sp.construction.startswith("zero-forcing"):
            cert = _rank_certificate(p, seed=k)
            d = [c.load for cws in sp.users for c in cws]
            checks.append(ReceiverCheck(k, None, d, cert["separable"], cert))
            continue
        problem, d = _receiver_problem(sp, k)
        checks.append(ReceiverCheck(k, problem, d, check_achievable(problem, d)))
    achieved = sp.total_load
    formula = sum_gdof(p).sum_gdof
    ok = all(c.achievable for c in checks)
    v = PlanValidation(checks, achieved, formula, ok and abs(achieved - formula) <= MATCH_TOL)
    if raise_on_failure and not ok:
        bad = [c.receiver for c in checks if not c.achievable]
        raise ValidationFailure(f"receivers {bad} cannot decode their sets", v)
    return v
