import math

import numpy as np
import pytest

import levytk


def test_catalog_and_symbol():
    m = levytk.stable(1, 1.0)
    assert m.psi(0.0) == 0.0
    assert m.psi(2.0) == pytest.approx(2.0, rel=1e-12)
    assert levytk.polynomial(1, 1, 1).tail_mass(1.0) == pytest.approx(2.0, rel=1e-9)
    rel = levytk.relativistic(1, 1.0)
    assert rel.psi(1.0) == pytest.approx(math.sqrt(2) - 1, rel=1e-12)


def test_model_documents_and_errors():
    m = levytk.model({"dimension": 1, "profile": {"family": "polynomial", "params": {"gamma": 1, "delta": 1}}})
    assert m.nu(2.0) == pytest.approx(0.25)
    assert levytk.model(m.to_json()).psi(1.5) == pytest.approx(m.psi(1.5))
    with pytest.raises(levytk.ConfigError) as err:
        levytk.model({"dimension": 1, "profile": {"family": "gaussian"}})
    assert err.value.pointer == "/profile/family"
    assert isinstance(err.value, ValueError)
    with pytest.raises(levytk.DomainError):
        m.nu(0.0)


def test_cauchy_density():
    x = np.linspace(-5, 5, 101)
    p = levytk.transition_density(levytk.stable(1, 1.0), 1.0, x)
    assert np.max(np.abs(p - 1 / (np.pi * (1 + x**2)))) < 1e-4


def test_ground_state_and_fit():
    m = levytk.stable(1, 1.0)
    r = levytk.spectrum(m, levytk.potential({"kind": "well", "a": 2, "b": 1}), L=64, N=4096)
    assert r["eigenvalues"][0] < 0
    phi = r["vectors"][0]
    assert phi.shape == r["x"].shape
    assert np.all(phi > 0)
    fit = levytk.fit_decay(r["x"], phi, 8, 30)
    assert fit["power"] == pytest.approx(2.0, abs=0.3)


def test_parameter_functions():
    poly = levytk.polynomial(1, 1, 1)
    assert levytk.k2(poly, 1, 2, math.inf) == pytest.approx(4.0, rel=1e-6)
    assert levytk.k1(poly, 1)["value"] > poly.tail_mass(1) / 2
    assert levytk.jump_paring_audit(levytk.exponential(1, 1, 1, 0))["verdict"] == "fail"


def test_hitting_is_reproducible():
    m = levytk.polynomial(1, 1, 1)
    a = levytk.laplace_hitting(m, [8.0], paths=2000, eps=0.1, dt=0.005, horizon=10, seed=3, workers=1)
    b = levytk.laplace_hitting(m, [8.0], paths=2000, eps=0.1, dt=0.005, horizon=10, seed=3, workers=2)
    assert a == b
    assert 0 < a[0]["value"] < 1


def test_invariants_criterion():
    r = levytk.run_criterion(10)
    assert r["verdict"] == "pass", r
