import json
import os
from pathlib import Path

import numpy as np
import pytest

import mobmech

DATA = Path(os.environ.get("MOBMECH_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))


def reference():
    return mobmech.Instance(
        budgets=[10.0, 10.0],
        service_limits=[1, 1],
        capacities=[1, 1],
        scenarios=[np.array([[3.0, 1.0], [1.0, 3.0]])],
        name="reference-2x2",
    )


def test_reference_tables():
    m = mobmech.Mechanism(reference())
    t = m.tables
    assert t["objective"] == pytest.approx(6.0)
    np.testing.assert_allclose(t["nominal_assignment"], np.eye(2), atol=1e-12)
    a, r, vw = t["nominal_assignment"], t["reservation_payments"], t["v_worst"]
    np.testing.assert_allclose(a * r, a * vw, atol=1e-9)


def test_price_by_index_and_matrix():
    m = mobmech.Mechanism(reference())
    by_index = m.price(0)
    by_matrix = m.price(np.array([[3.0, 1.0], [1.0, 3.0]]))
    np.testing.assert_allclose(by_index["payments"], by_matrix["payments"])
    assert by_index["realized_scenario"] == 0
    assert by_matrix["realized_scenario"] is None
    assert np.all(by_index["utilities"] >= -1e-9)


def test_verify_and_mutation():
    inst = mobmech.parse_scenario(str(DATA / "corrupted_payment.json"))
    m = mobmech.Mechanism(inst)
    assert m.verify()["passed"]
    broken = m.verify(payment_scale=0.5)
    assert not broken["passed"]
    truth = next(p for p in broken["properties"] if p["property"] == "truthfulness")
    assert not truth["passed"]
    assert truth["witness"]["traveler"] is not None


def test_lp_solve():
    s = mobmech.lp_solve([1.0], np.array([[1.0]]), [5.0], ["<="])
    assert s["status"] == "optimal"
    assert s["objective"] == pytest.approx(5.0)
    assert s["dual"][0] == pytest.approx(1.0)


def test_scenario_round_trip_and_generator():
    inst = mobmech.generate_instance(3, 2, scenarios=2, seed=42)
    text = mobmech.emit_scenario(inst)
    again = mobmech.parse_scenario_text(text)
    assert mobmech.emit_scenario(again) == text
    assert mobmech.emit_scenario(mobmech.generate_instance(3, 2, scenarios=2, seed=42)) == text


def test_errors():
    with pytest.raises(mobmech.ParseError):
        mobmech.parse_scenario_text("{")
    with pytest.raises(mobmech.ValidationError, match="budget negative"):
        mobmech.parse_scenario_text(
            '{"travelers": [{"budget": -1}, {"budget": 1}], "services": [{"capacity": 1}],'
            ' "valuation_scenarios": [[[1], [1]]]}'
        )
    bad = reference()
    bad.budgets = np.array([-1.0, 1.0])
    with pytest.raises(mobmech.MobmechError):
        mobmech.Mechanism(bad)
    assert any(sev == "error" for sev, _, _ in mobmech.validate(bad))


def test_commands():
    r = mobmech.cmd_verify(str(DATA / "reference_2x2.json"))
    assert r.exit_code == 0
    report = json.loads(r.output)
    assert report["passed"] is True
    assert mobmech.cmd_solve(str(DATA / "reference_2x2.json")).output == mobmech.cmd_solve(
        str(DATA / "reference_2x2.json")
    ).output
    assert mobmech.cmd_verify(str(DATA / "corrupted_payment.json"), payment_scale=0.5).exit_code == 1
    assert mobmech.cmd_price(str(DATA / "reference_2x2.json"), 3).exit_code == 2
