import json
from pathlib import Path

import pytest

from mimo_gdof.exceptions import NotCovered, ValidationFailure
from mimo_gdof.gdof import GdofParams, sum_gdof
from mimo_gdof.planner import (ZERO_FORCING_LABEL, Codeword, SchemePlan, plan, plan_for, validate, zero_force_plan)

GOLDEN = Path(__file__).parent / "golden"


def test_moderate_example():
    p = GdofParams(3, 2, 3, 0.7)
    sp = plan(p)
    v = validate(sp)
    assert v.match
    assert v.achieved_sum_gdof == pytest.approx(3.9)
    assert sp.regime == "1/2<alpha<=1"


def test_weak_example_receiver_margins():
    p = GdofParams(3, 2, 3, 0.4)
    sp = plan(p)
    commons = [c.load for c in sp.users[0] if c.kind == "common"]
    privates = [c.load for c in sp.users[0] if c.kind == "private"]
    assert commons == pytest.approx([0.1, 0.1])
    assert privates == pytest.approx([0.6, 0.6])
    v = validate(sp)
    assert v.match
    r0 = v.receivers[0]
    assert sum(r0.d) == pytest.approx(1.8)
    assert r0.verdict.margins[8] == pytest.approx(0.8)


def test_strong_example():
    p = GdofParams(3, 2, 3, 2)
    sp = plan(p)
    assert sp.total_load == pytest.approx(6)
    assert all(c.kind == "common" for cws in sp.users for c in cws)
    assert validate(sp).match


def test_no_interference():
    sp = plan(GdofParams(3, 1, 1, 0))
    assert validate(sp).match
    assert sp.total_load == pytest.approx(3)


def test_zero_forcing():
    p = GdofParams(2, 2, 4, 0.7)
    with pytest.raises(NotCovered):
        plan(p)
    sp = zero_force_plan(p)
    v = validate(sp)
    assert v.match and v.achieved_sum_gdof == 4
    assert v.receivers[0].rank_certificate["rank"] == 4
    assert sp.construction == ZERO_FORCING_LABEL
    assert plan_for(p).construction == sp.construction
    with pytest.raises(NotCovered):
        zero_force_plan(GdofParams(3, 2, 4, 0.7))


def test_grid_matches_formula():
    for K in range(2, 6):
        for M in range(1, 5):
            for N in range(1, 5):
                for i in range(0, 61):
                    p = GdofParams(K, M, N, i / 20)
                    v = validate(plan_for(p), p)
                    assert v.match, p


def test_perturbed_commons_are_rejected():
    for K in range(2, 5):
        for M in range(1, 4):
            for N in range(1, 4):
                for a in (0.25, 0.5, 0.7, 1.0, 1.5, 2.5):
                    p = GdofParams(K, M, N, a)
                    if p.zero_forcing:
                        continue
                    sp = plan(p)
                    sp.users[0] = [Codeword(c.kind, c.beam, c.eta, c.load + 0.1)
                                   if c.kind == "common" else c for c in sp.users[0]]
                    v = validate(sp, p)
                    assert not v.match
                    with pytest.raises(ValidationFailure) as e:
                        validate(sp, p, raise_on_failure=True)
                    assert e.value.validation is not None


def test_structure():
    for a in (0.3, 0.8, 1.6):
        p = GdofParams(4, 2, 3, a)
        sp = plan(p)
        assert all(cws == sp.users[0] for cws in sp.users)
        if a <= 1:
            assert all(c.load == pytest.approx(1 - a) and c.eta == a
                       for c in sp.users[0] if c.kind == "private")
        for k, r in enumerate(sp.receivers):
            assert all(j != k and kind == "private" for j, kind, _ in r.treat_as_noise)
            assert all(kind == "common" or j == k for j, kind, _ in r.decode)
            assert r.alpha_n == (0.0,) * 3


def test_loads_continuous_at_one():
    p1 = plan(GdofParams(3, 2, 3, 1.0)).total_load
    p2 = plan(GdofParams(3, 2, 3, 1.0 + 1e-9)).total_load
    assert p1 == pytest.approx(p2, abs=1e-6)


def test_round_trip_and_golden():
    sp = plan(GdofParams(3, 2, 3, 0.7))
    assert SchemePlan.from_dict(json.loads(sp.dumps())).dumps() == sp.dumps()
    assert sp.dumps() == (GOLDEN / "plan_K3_M2_N3_a0.7.json").read_text()


def test_validation_serializes():
    d = validate(plan(GdofParams(3, 2, 3, 0.7))).to_dict()
    assert d["match"] and len(d["receivers"]) == 3
    assert d["formula_sum_gdof"] == sum_gdof(GdofParams(3, 2, 3, 0.7)).sum_gdof
