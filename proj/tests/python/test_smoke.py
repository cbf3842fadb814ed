import math
import os

import numpy as np
import pytest

import wavefront as wf

MODELS = os.path.join(os.path.dirname(__file__), "..", "data", "models")

LOCAL = {
    "family": "local_delayed_rd",
    "L": 2.0,
    "h": 0.0,
    "bound": 1.0,
    "g": {"kind": "logistic", "rate": 2.0},
}


def test_version():
    assert wf.__version__.count(".") == 2


def test_model_properties():
    m = wf.model(dict(LOCAL, c=2.5))
    assert m.family == "local_delayed_rd"
    assert m.c == 2.5
    assert m.bound == 1.0


def test_chi_matches_closed_form():
    # chi = 1 - 2 / (1 + c z - z^2)
    for z in (0.3, 1.0 + 0.5j, 1.7 - 2.0j):
        expect = 1 - 2 / (1 + 2.5 * z - z * z)
        assert abs(wf.chi(LOCAL, z, c=2.5) - expect) < 1e-12


def test_analyze_and_speed():
    sd = wf.analyze(LOCAL, c=2.5)
    assert sd["lambda_l"] == pytest.approx(0.5, abs=1e-9)
    assert sd["lambda_r"] == pytest.approx(2.0, abs=1e-9)
    assert not sd["critical"]
    c_star, z_star = wf.min_speed(LOCAL)
    assert c_star == pytest.approx(2.0, abs=1e-8)
    assert z_star == pytest.approx(1.0, abs=1e-6)


def test_errors_carry_codes():
    with pytest.raises(wf.WavefrontError) as info:
        wf.analyze(LOCAL, c=1.0)
    assert info.value.code == "NoRoots"
    with pytest.raises(wf.WavefrontError) as info:
        wf.model({"family": "nope"})
    assert info.value.code == "Schema"


def test_solve_profile():
    prof = wf.solve(LOCAL, c=2.5, grid=(-60, 40, 2048))
    assert prof.converged
    assert isinstance(prof.phi, np.ndarray)
    assert prof.phi.shape == (2048,)
    assert prof.phi.min() >= 0
    assert abs(prof.phi[-1] - 0.5) < 1e-4
    assert prof.decay_fit["k_hat"] == 0
    assert prof.decay_fit["lambda_hat"] == pytest.approx(0.5, rel=0.02)
    assert prof.crossing(0.25) is not None


def test_load_model_file():
    m = wf.load_model(os.path.join(MODELS, "kpp_gaussian.json"))
    c_star, _ = wf.min_speed(m)
    # c(z) = (e^{z^2 / 2} + 1) / z on a fine grid
    z = np.arange(0.5, 3.0, 1e-5)
    assert c_star == pytest.approx(((np.exp(z * z / 2) + 1) / z).min(), abs=1e-6)


def test_verify_noncritical():
    rep = wf.verify(dict(LOCAL, c=2.5), grid=(-60, 40, 2048))
    assert rep["summary"] == "PASS"
    assert rep["exit_code"] == 0
    names = [c["name"] for c in rep["checks"]]
    assert "translation_aligned_agreement" in names


def test_scan():
    rep = wf.scan(LOCAL, c=2.5, ny=401)
    assert rep["pass"]
    assert rep["min_abs_chi"] > 1e-3
    assert math.isfinite(rep["min_abs_chi"])
