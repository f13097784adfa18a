import math

import numpy as np
import pytest

import causalbounds as cb


def four_units():
    return cb.Dataset(np.array([2.0, 5.0, 0.0, 1.0]), np.array([1.0, 0.0, 1.0, 0.0]),
                      np.array([[0.1], [0.2], [0.3], [0.4]]))


def test_four_unit_bounds():
    r = cb.analyze(four_units(), delta=0.25, terms=["1"])
    assert r["status"] == "Optimal"
    assert math.isclose(r["psi_lo"], -3.0, abs_tol=1e-9)
    assert math.isclose(r["psi_hi"], -1.0, abs_tol=1e-9)
    assert r["psi_lo"] == r["mu1_lo"] - r["mu0_hi"]


def test_lp_example():
    s = cb.solve_lp(c=np.array([1.0, 2.0]), a=np.array([[1.0, 1.0]]), b=np.array([4.0]),
                    lower=np.zeros(2), upper=np.full(2, 3.0), maximize=True)
    assert s["status"] == "Optimal"
    assert math.isclose(s["objective"], 7.0, abs_tol=1e-12)


def test_errors_carry_codes():
    with pytest.raises(cb.CausalBoundsError) as info:
        cb.Dataset(np.array([1.0, 2.0]), np.array([1.0, 2.0]), np.zeros((2, 1)))
    assert info.value.code == "NonBinaryTreatment"
    with pytest.raises(cb.CausalBoundsError):
        cb.load_csv("/nonexistent/file.csv")


def test_estimators_and_simulation():
    st = cb.simulate_study("S1", n=400, seed=5)
    d = st["dataset"]
    assert d.n == 400 and d.k == 4
    fit = cb.fit_mar_propensity(d)
    assert np.all((fit["ehat"] > 0) & (fit["ehat"] < 1))
    s = cb.sipw(d, fit["ehat"])
    assert math.isclose(s["psi"], s["mu1"] - s["mu0"], abs_tol=1e-12)
    r = cb.analyze(d, delta=0.01)
    assert r["status"] == "Optimal"
    assert r["psi_lo"] <= s["psi"] <= r["psi_hi"]
    qb = cb.analyze(d, lambda_=2.0, method="QB", seed=1)
    assert qb["tau_upper"] == pytest.approx(2.0 / 3.0)
    assert cb.ladder_terms("D1", 2) == ["1", "x1", "x2", "x1^2", "x2^2"]


def test_bootstrap_is_deterministic():
    d = cb.simulate_study("S1", n=300, seed=2)["dataset"]
    a = cb.bootstrap(d, b=8, seed=4, threads=1)
    b = cb.bootstrap(d, b=8, seed=4, threads=2)
    assert a == b
    assert a["feasible_count"] <= 8


def test_simulation_table_csv():
    csv = cb.simulate_table("S1", true_ate=0.21, replicates=3, n=200, deltas=[0.01, 0.1], seed=1)
    lines = csv.strip().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("scenario,method,basis,delta")
