import math

import pytest

from rydress.gate import kappa_integral
from rydress.model import InteractionSpec
from rydress.optimize import (STRONG_ONE_PHOTON, OptimizationProblem, default_seed, evaluate,
                              fidelity_bound, optimize_ramp, scan_fidelity_landscape)
from rydress.runner import ResultStore


def test_fidelity_bound_values():
    assert math.isclose(fidelity_bound(InteractionSpec(1.0), 4 * math.pi * 10), 0.9)
    with pytest.raises(ValueError):
        fidelity_bound(InteractionSpec(0.0), 1.0)


@pytest.mark.parametrize("kw", [dict(family="three-photon"), dict(budget=10),
                                dict(free=("nope",)), dict(objective="speed"),
                                dict(bounds={"t_w": (2.0, 1.0)}), dict(blockade_ratio=0.0)])
def test_problem_validation(kw):
    args = dict(family="one-photon")
    args.update(kw)
    with pytest.raises(ValueError):
        OptimizationProblem(**args)


def test_preset_evaluates_feasible():
    p = OptimizationProblem("one-photon")
    ev = evaluate(p, STRONG_ONE_PHOTON)
    assert ev.fidelity > 0.9999 and ev.meets(p)
    assert ev.value(p) < 1e-4


def test_bad_schedule_is_reported_not_raised():
    p = OptimizationProblem("one-photon")
    ev = evaluate(p, {**STRONG_ONE_PHOTON, "plateau": 50.0})
    assert ev.error and ev.value(p) == 1e3


def test_default_seed_accumulates_quarter_turn():
    for family in ("one-photon", "two-photon"):
        p = OptimizationProblem(family, rr_cap=0.05)
        ramp, s = p.build(p.params(p.vector(default_seed(p))))
        assert math.isclose(kappa_integral(ramp, s, p.interaction), math.pi / 2, rel_tol=1e-3)


def test_optimizer_is_deterministic_and_improves():
    p = OptimizationProblem("two-photon", budget=50)
    a, b = optimize_ramp(p), optimize_ramp(p)
    assert a.params == b.params
    assert a.fidelity >= a.log[0].fidelity and a.fidelity > 0.999
    assert len(a.log) <= p.budget + len(p.free) + 1


def test_landscape_resumes_from_store(tmp_path):
    store = ResultStore(tmp_path / "s.jsonl")
    first = scan_fidelity_landscape([1.0], [1e4], budget=6, store=store)
    again = scan_fidelity_landscape([1.0], [1e4], budget=6,
                                    store=ResultStore(tmp_path / "s.jsonl"))
    assert first.rows == again.rows
    assert len((tmp_path / "s.jsonl").read_text().splitlines()) == 1
