"""
Brute-force checks of the aligned-image-sets bound at desk scale.

For a :class:`~mimo_gdof.lemma.LemmaInstance` with tiny ``Pbar`` the whole
input space is enumerated. For every sampled channel realization the two
observations ``U1`` and ``U2`` are computed for every input, from which
exact plug-in entropies and aligned image sets follow.

Conventions
-----------
* ``P = Pbar**2``, so level 1 has exactly ``Pbar`` values.
* ``W`` is a constant (no side information).
* Functional dependence: every ``U1`` codeword is represented by the first
  input (in enumeration order) that produces it, and ``U2`` is read off
  that representative. Aligned image sets are sets of ``U1`` codewords,
  reported through their representative inputs.
* Entropies are in bits; the slope is fitted against ``log2 Pbar``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .detmodel import BoundedDensitySampler, pbar as _pbar
from .exceptions import BudgetExceeded, DomainError
from .lemma import Group, LemmaInstance, lemma_coefficient

__all__ = [
    "AisExperimentConfig",
    "Channel",
    "Realization",
    "AisReport",
    "enumerate_inputs",
    "draw_channel",
    "observe",
    "analyze",
    "enumerate_aligned_set",
    "expected_log_set_size",
    "entropy_difference",
    "alignment_probability_check",
    "set_size_bound",
    "run_experiment",
    "plugin_entropy",
]

DEFAULT_SEED = 20171215
DEFAULT_BUDGET = 2**24


@dataclass
class AisExperimentConfig:
    """One brute-force experiment.

    ``input_law`` is ``"uniform"`` or a mapping ``{pbar: pmf}`` giving an
    i.i.d. per-component law over ``{0, ..., Pbar^eta - 1}``.
    """

    instance: LemmaInstance
    pbars: tuple = (4, 8, 16, 32, 64)
    T: int = 1
    trials: int = 200
    input_law: object = "uniform"
    seed: int = DEFAULT_SEED
    distribution: object = "uniform12"
    budget: int = DEFAULT_BUDGET
    shared_draws: bool = False
    reference: str = "zeros"
    n_reference: int = 16
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.instance, dict):
            self.instance = _instance_from_dict(self.instance)
        self.pbars = tuple(int(p) for p in self.pbars)
        if not self.pbars or min(self.pbars) < 2:
            raise DomainError("every Pbar must be an integer >= 2")
        if self.T not in (1, 2):
            raise DomainError(f"T must be 1 or 2, got {self.T}")
        if self.trials < 0:
            raise DomainError("trials must be >= 0")
        if self.reference not in ("zeros", "max"):
            raise DomainError(f"reference must be 'zeros' or 'max', got {self.reference!r}")
        if self.shared_draws and self.instance.N1 != self.instance.N2:
            raise DomainError("shared_draws requires N1 == N2")
        if isinstance(self.distribution, list):
            self.distribution = tuple(self.distribution)

    @property
    def sampler(self):
        return BoundedDensitySampler(seed=self.seed, distribution=self.distribution)

    def P(self, pb):
        return float(pb) ** 2

    def alphabet(self, pb):
        return max(1, _pbar(self.P(pb), self.instance.eta))

    def space_size(self, pb):
        return self.alphabet(pb) ** (self.instance.total_inputs * self.T)

    def to_dict(self):
        law = self.input_law
        if not isinstance(law, str):
            law = {str(k): list(map(float, v)) for k, v in law.items()}
        dist = self.distribution if isinstance(self.distribution, str) else list(self.distribution)
        return {
            "instance": _instance_to_dict(self.instance),
            "pbars": list(self.pbars),
            "T": self.T,
            "trials": self.trials,
            "input_law": law,
            "seed": self.seed,
            "distribution": dist,
            "budget": self.budget,
            "shared_draws": self.shared_draws,
            "reference": self.reference,
            "n_reference": self.n_reference,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        law = d.get("input_law", "uniform")
        if not isinstance(law, str):
            d["input_law"] = {int(k): list(v) for k, v in law.items()}
        return cls(**d)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))


def _instance_to_dict(inst):
    return {"eta": inst.eta, "groups": [[g.M, g.lam1, g.lam2] for g in inst.groups],
            "N1": inst.N1, "N2": inst.N2}


def _instance_from_dict(d):
    return LemmaInstance(float(d["eta"]), tuple(Group(int(g[0]), float(g[1]), float(g[2]))
                                                for g in d["groups"]), int(d["N1"]), int(d["N2"]))


# ---------------------------------------------------------------------------
# Enumeration and observation
# ---------------------------------------------------------------------------

def enumerate_inputs(cfg, pb):
    """All input tuples, shape ``(space, T, C)`` with ``C = sum M_i``."""
    size = cfg.space_size(pb)
    if size > cfg.budget:
        raise BudgetExceeded(f"input space {size} exceeds budget {cfg.budget} at Pbar={pb}")
    A = cfg.alphabet(pb)
    C = cfg.instance.total_inputs
    n = C * cfg.T
    idx = np.arange(size, dtype=np.int64)
    digits = np.empty((size, n), dtype=np.int64)
    for pos_ in range(n - 1, -1, -1):
        digits[:, pos_] = idx % A
        idx //= A
    return digits.reshape(size, cfg.T, C)


def input_pmf(cfg, pb, inputs):
    """Probability of every enumerated input under ``cfg.input_law``."""
    if cfg.input_law == "uniform":
        return np.full(len(inputs), 1.0 / len(inputs))
    pmf = np.asarray(cfg.input_law[pb], dtype=float)
    if pmf.shape != (cfg.alphabet(pb),) or np.any(pmf < 0) or not np.isclose(pmf.sum(), 1):
        raise DomainError(f"input law for Pbar={pb} must be a pmf over {cfg.alphabet(pb)} values")
    flat = inputs.reshape(len(inputs), -1)
    return np.prod(pmf[flat], axis=1)


@dataclass
class Channel:
    """Coefficients for one realization: ``g1`` is ``(T, N1, C)``, ``g2`` ``(T, N2, C)``."""

    g1: np.ndarray
    g2: np.ndarray


def draw_channel(cfg, rng):
    inst = cfg.instance
    C = inst.total_inputs
    s = cfg.sampler
    g1 = s.sample(rng, (cfg.T, inst.N1, C))
    g2 = g1.copy() if cfg.shared_draws else s.sample(rng, (cfg.T, inst.N2, C))
    return Channel(g1, g2)


def _divisors(cfg, pb, which):
    inst = cfg.instance
    P = cfg.P(pb)
    out = []
    for g in inst.groups:
        lam = g.lam1 if which == 1 else g.lam2
        out.extend([_pbar(P, max(0.0, inst.eta - lam))] * g.M)
    return np.array(out, dtype=np.int64)


def truncated_inputs(cfg, pb, inputs, which):
    """Inputs cut to the levels seen by ``U1`` (``which=1``) or ``U2``."""
    return inputs // _divisors(cfg, pb, which)


def _lincombs(x, g):
    # x: (space, T, C) ints; g: (T, N, C) -> (space, T, N) ints, floor toward zero
    prod = x[:, :, None, :].astype(np.float64) * g[None, :, :, :]
    return np.trunc(prod).astype(np.int64).sum(axis=-1)


def observe(cfg, pb, inputs, channel):
    """``(U1, U2)`` for every input, each shaped ``(space, T*N)``."""
    u1 = _lincombs(truncated_inputs(cfg, pb, inputs, 1), channel.g1)
    u2 = _lincombs(truncated_inputs(cfg, pb, inputs, 2), channel.g2)
    return u1.reshape(len(inputs), -1), u2.reshape(len(inputs), -1)


def _codes(u):
    """Dense labels for the rows of ``u`` plus the first input of each label."""
    if u.shape[1] == 1:
        _, first, inv = np.unique(u[:, 0], return_index=True, return_inverse=True)
    else:
        _, first, inv = np.unique(u, axis=0, return_index=True, return_inverse=True)
    return inv.reshape(-1), first


def plugin_entropy(labels, pmf):
    """Entropy in bits of ``labels`` under input probabilities ``pmf``."""
    w = np.bincount(labels, weights=pmf)
    w = w[w > 0]
    return float(-(w * np.log2(w)).sum())


@dataclass
class Realization:
    """Everything derived from one channel draw at one ``Pbar``."""

    H1: float
    H2: float
    H2_fd: float
    H1_given_2fd: float
    H12: float
    u1_codes: np.ndarray
    u2_codes: np.ndarray
    u2fd_codes: np.ndarray
    representatives: np.ndarray
    codeword_u2: np.ndarray
    set_sizes: np.ndarray

    @property
    def entropy_difference(self):
        return self.H1 - self.H2

    def set_size_of_input(self, i):
        return int(self.set_sizes[self.u1_codes[i]])


def analyze(cfg, pb, inputs, pmf, channel):
    """Entropies and aligned image sets for one channel realization."""
    u1, u2 = observe(cfg, pb, inputs, channel)
    c1, rep = _codes(u1)
    c2, _ = _codes(u2)
    # U2 read off each codeword's representative input.
    cw_u2 = c2[rep]
    fd = cw_u2[c1]
    set_sizes = np.bincount(cw_u2)[cw_u2]
    H1 = plugin_entropy(c1, pmf)
    H2 = plugin_entropy(c2, pmf)
    H2fd = plugin_entropy(fd, pmf)
    # H(U1 | U2_fd) computed directly from the conditional distributions.
    joint = np.bincount(c1, weights=pmf)
    marg = np.bincount(cw_u2, weights=joint)
    pj = joint[joint > 0]
    pm = marg[cw_u2][joint > 0]
    H1g2 = float(-(pj * np.log2(pj / pm)).sum())
    H12 = plugin_entropy(c1 * (c2.max() + 1) + c2, pmf)
    return Realization(H1, H2, H2fd, H1g2, H12, c1, c2, fd, rep, cw_u2, set_sizes)


def _trial_rng(cfg, pb, trial):
    return np.random.default_rng([cfg.seed & (2**64 - 1), int(pb), int(trial)])


def _map_trials(cfg, fn):
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            return list(ex.map(fn, range(cfg.trials)))
    return [fn(i) for i in range(cfg.trials)]


def _mean_se(xs):
    xs = np.asarray(xs, dtype=float)
    if len(xs) == 0:
        raise DomainError("at least one trial is required")
    se = float(xs.std(ddof=1) / math.sqrt(len(xs))) if len(xs) > 1 else 0.0
    return float(xs.mean()), se


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def enumerate_aligned_set(nu, channel, cfg, pb):
    """Codewords aligned with the codeword produced by input ``nu``.

    Returns a set of input tuples (flattened over time and components),
    one representative per ``U1`` codeword whose ``U2`` image equals that
    of ``nu``'s codeword. ``nu``'s own representative is always included.
    """
    inputs = enumerate_inputs(cfg, pb)
    pmf = input_pmf(cfg, pb, inputs)
    r = analyze(cfg, pb, inputs, pmf, channel)
    flat = inputs.reshape(len(inputs), -1)
    nu = np.asarray(nu, dtype=np.int64).reshape(-1)
    hit = np.flatnonzero((flat == nu).all(axis=1))
    if len(hit) != 1:
        raise DomainError(f"{tuple(nu)} is not in the input space")
    target = r.codeword_u2[r.u1_codes[hit[0]]]
    members = np.flatnonzero(r.codeword_u2 == target)
    return {tuple(int(v) for v in flat[r.representatives[c]]) for c in members}


def expected_log_set_size(cfg, pb):
    """Mean over channel draws of ``log2 |S_nu|`` and its standard error.

    With ``cfg.reference == "zeros"`` ``nu`` is the all-zeros input;
    with ``"max"`` the maximum over ``cfg.n_reference`` sampled inputs is
    taken per draw.
    """
    if cfg.trials < 1:
        raise DomainError("at least one trial is required")
    inputs = enumerate_inputs(cfg, pb)
    pmf = input_pmf(cfg, pb, inputs)

    def one(trial):
        rng = _trial_rng(cfg, pb, trial)
        r = analyze(cfg, pb, inputs, pmf, draw_channel(cfg, rng))
        if cfg.reference == "zeros":
            return math.log2(r.set_size_of_input(0))
        picks = rng.integers(0, len(inputs), size=cfg.n_reference)
        return max(math.log2(r.set_size_of_input(i)) for i in picks)

    return _mean_se(_map_trials(cfg, one))


def entropy_difference(cfg, pb):
    """Mean over channel draws of the exact ``H(U1|G) - H(U2|G)`` in bits."""
    if cfg.trials < 1:
        raise DomainError("at least one trial is required")
    inputs = enumerate_inputs(cfg, pb)
    pmf = input_pmf(cfg, pb, inputs)

    def one(trial):
        r = analyze(cfg, pb, inputs, pmf, draw_channel(cfg, _trial_rng(cfg, pb, trial)))
        return r.entropy_difference

    return _mean_se(_map_trials(cfg, one))


def _constants(cfg, pb):
    inst = cfg.instance
    s = cfg.sampler
    c1 = inst.total_inputs
    pbar_real = math.sqrt(cfg.P(pb))
    gap = max(g.gap for g in inst.groups)
    c = c1 * s.delta * pbar_real ** gap
    return c1, c, s.delta, s.f_max, pbar_real


def set_size_bound(cfg, pb):
    """Closed-form bound on the expected aligned image set size.

    ``(2 c1 + 2 c + 1 + 4 c1 c f_max (1 + ln(c1 Delta Pbar^max lam1)))^T``
    with ``c1 = sum M_i`` and ``c = c1 Delta Pbar^max gap``.
    """
    c1, c, delta, f, pr = _constants(cfg, pb)
    lam1 = max(g.lam1 for g in cfg.instance.groups)
    per = 2 * c1 + 2 * c + 1 + 4 * c1 * c * f * (1 + math.log(c1 * delta * pr ** lam1))
    return per ** cfg.T


def alignment_probability_check(cfg, pb, pair_budget, draws=10_000, rng_pairs=None):
    """Monte-Carlo alignment probability of input pairs against its bounds.

    For each sampled pair of distinct inputs ``(mu, pi)`` the images under
    the first ``U2`` observation are compared over ``draws`` channel
    realizations. Two bounds are evaluated:

    * the input-level bound: product over ``t`` of
      ``min(1, 2 c1 f_max / max |top(mu) - top(pi)|)``;
    * the codeword-level bound: product over ``t`` with
      ``|nu1 - nu2| > c1 + c`` of ``2 c1 c f_max / (|nu1 - nu2| - c1 - c)``,
      where ``nu`` are the realized first ``U1`` observations. Since it
      dominates the input-level bound for every realization, the smallest
      realized value is used.

    ``pair_budget`` distinct pairs are checked; identical draws are
    redrawn. Pairs where a bound is not below 1 are not scored for it.

    Returns
    -------
    dict
        ``max_ratio`` (empirical / bound, over the ``bound_pairs`` pairs
        where the codeword-level bound is < 1), ``violations``, and the
        same for the input-level bound.
    """
    inst = cfg.instance
    c1, c, delta, f, _ = _constants(cfg, pb)
    A = cfg.alphabet(pb)
    C = inst.total_inputs
    if rng_pairs is None:
        rng_pairs = np.random.default_rng([cfg.seed & (2**64 - 1), int(pb), 2**31 - 1])
    d1 = _divisors(cfg, pb, 1)
    d2 = _divisors(cfg, pb, 2)
    out = {"pairs": 0, "redrawn": 0, "bound_pairs": 0, "violations": 0, "max_ratio": 0.0,
           "input_bound_pairs": 0, "input_bound_violations": 0, "input_bound_max_ratio": 0.0,
           "pbar": pb, "draws": draws, "seed": cfg.seed}
    s = cfg.sampler
    if pair_budget and A ** (cfg.T * C) < 2:
        raise DomainError("the input space has fewer than two points")
    while out["pairs"] < pair_budget:
        mu = rng_pairs.integers(0, A, size=(cfg.T, C))
        pi = rng_pairs.integers(0, A, size=(cfg.T, C))
        if np.array_equal(mu, pi):
            out["redrawn"] += 1
            continue
        k = out["pairs"]
        out["pairs"] += 1
        rng = np.random.default_rng([cfg.seed & (2**64 - 1), int(pb), 1_000_003, k])
        g1 = s.sample(rng, (draws, cfg.T, C))
        g2 = g1.copy() if cfg.shared_draws else s.sample(rng, (draws, cfg.T, C))
        top2_mu, top2_pi = mu // d2, pi // d2
        v2_mu = np.trunc(g2 * top2_mu).astype(np.int64).sum(-1)
        v2_pi = np.trunc(g2 * top2_pi).astype(np.int64).sum(-1)
        aligned = (v2_mu == v2_pi).all(axis=1)
        p_hat = float(aligned.mean())

        dtop = np.abs(top2_mu - top2_pi).max(axis=1)
        with np.errstate(divide="ignore"):
            per_t = np.where(dtop > 0, 2 * c1 * f / np.maximum(dtop, 1), 1.0)
        b_in = float(np.prod(np.minimum(1.0, per_t)))
        if b_in < 1:
            out["input_bound_pairs"] += 1
            r = p_hat / b_in
            out["input_bound_max_ratio"] = max(out["input_bound_max_ratio"], r)
            out["input_bound_violations"] += int(p_hat > b_in)

        nu_mu = np.trunc(g1 * (mu // d1)).astype(np.int64).sum(-1)
        nu_pi = np.trunc(g1 * (pi // d1)).astype(np.int64).sum(-1)
        gap = np.abs(nu_mu - nu_pi).astype(float)
        far = gap > c1 + c
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = np.where(far, 2 * c1 * c * f / (gap - c1 - c), 1.0)
        b_cw = float(np.prod(factor, axis=1).min())
        if b_cw < 1:
            out["bound_pairs"] += 1
            r = p_hat / b_cw
            out["max_ratio"] = max(out["max_ratio"], r)
            out["violations"] += int(p_hat > b_cw)
    return out


@dataclass
class AisReport:
    """Sweep results for one experiment. All entropies in bits."""

    coefficient_rhs: float
    pbars: list
    entropy_diff: list
    entropy_diff_se: list
    expected_log_set_size: list
    expected_log_set_size_se: list
    mean_set_size: list
    set_size_bound: list
    fitted_slope: float
    chain_max_error: float
    partition_ok: bool
    max_pairwise_prob_violation: float | None = None
    seed: int = DEFAULT_SEED
    config: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text):
        return cls(**json.loads(text))


def fit_slope(pbars, values):
    """Least-squares slope of ``values`` against ``log2 Pbar``."""
    x = np.log2(np.asarray(pbars, dtype=float))
    if len(x) < 2:
        return float("nan")
    return float(np.polyfit(x, np.asarray(values, dtype=float), 1)[0])


def check_partition(r, n_inputs):
    """Aligned sets partition the codewords, and their preimages the inputs."""
    n_cw = len(r.representatives)
    labels = r.codeword_u2
    # each codeword sits in exactly one set, and set sizes add up
    sizes = np.bincount(labels)
    if sizes.sum() != n_cw or np.any(r.set_sizes != sizes[labels]):
        return False
    covered = np.bincount(labels[r.u1_codes], minlength=len(sizes))
    return int(covered.sum()) == n_inputs and r.u1_codes.max() + 1 == n_cw


def run_experiment(cfg, pair_budget=0, draws=10_000, pair_pbar=None):
    """Full sweep over ``cfg.pbars``: entropy differences, set sizes,
    bound checks and, optionally, the pairwise alignment check."""
    if cfg.trials < 1:
        raise DomainError("at least one trial is required")
    coef = lemma_coefficient(cfg.instance).coefficient
    ed, ed_se, ls, ls_se, ms, sb = [], [], [], [], [], []
    chain_err = 0.0
    partition_ok = True
    for pb in cfg.pbars:
        inputs = enumerate_inputs(cfg, pb)
        pmf = input_pmf(cfg, pb, inputs)

        def one(trial, pb=pb, inputs=inputs, pmf=pmf):
            rng = _trial_rng(cfg, pb, trial)
            r = analyze(cfg, pb, inputs, pmf, draw_channel(cfg, rng))
            if cfg.reference == "zeros":
                size = r.set_size_of_input(0)
            else:
                picks = rng.integers(0, len(inputs), size=cfg.n_reference)
                size = max(r.set_size_of_input(i) for i in picks)
            err = abs(r.H1 - (r.H2_fd + r.H1_given_2fd))
            return r.entropy_difference, math.log2(size), size, err, check_partition(r, len(inputs))

        rows = _map_trials(cfg, one)
        m, se = _mean_se([x[0] for x in rows])
        ed.append(m)
        ed_se.append(se)
        m, se = _mean_se([x[1] for x in rows])
        ls.append(m)
        ls_se.append(se)
        ms.append(float(np.mean([x[2] for x in rows])))
        sb.append(set_size_bound(cfg, pb))
        chain_err = max(chain_err, max(x[3] for x in rows))
        partition_ok = partition_ok and all(x[4] for x in rows)
    violation = None
    if pair_budget:
        pb = pair_pbar if pair_pbar is not None else cfg.pbars[-1]
        chk = alignment_probability_check(cfg, pb, pair_budget, draws)
        violation = chk["max_ratio"]
    return AisReport(coef, list(cfg.pbars), ed, ed_se, ls, ls_se, ms, sb,
                     fit_slope(cfg.pbars, ed), chain_err, partition_ok, violation,
                     cfg.seed, cfg.to_dict())
