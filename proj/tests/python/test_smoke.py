import math

import numpy as np
import pytest

import tdho


def mathieu(eta=0.5, alpha=0.5, omega_bar=1.0):
    return tdho.Profile("mathieu", {"omega_bar": omega_bar, "eta": eta, "alpha": alpha})


def test_constant_frequency_is_a_sine():
    p = tdho.Profile("constant", {"omega": 2.0})
    s = tdho.solve(p, 1.0, 0.0, 0.0, 5.0, samples=200)
    assert np.allclose(s["q"], np.cos(2.0 * s["t"]), atol=1e-9)
    assert np.allclose(s["I"], s["I"][0], rtol=1e-9)


def test_round_trip():
    a = tdho.to_angle_action(tdho.PhaseState(0.0, 0.3, -1.2), 1.7)
    b = tdho.to_phase(a, 1.7)
    assert b.q == pytest.approx(0.3, abs=1e-14)
    assert b.p == pytest.approx(-1.2, abs=1e-14)


def test_picard_bounds_hold():
    p = mathieu()
    d = tdho.picard(p, 0.3, 1.0, 0.0, 20.0, order=3)
    ref = tdho.angle_action_trajectory(p, 0.3, 1.0, d["t"])
    for k in range(4):
        assert np.all(np.abs(ref["psi"] - d["psi"][k]) <= d["psi_bound"][k] + 1e-10)
        assert np.all(np.abs(np.log(ref["I"] / d["I"][k])) <= d["log_I_bound"][k] + 1e-10)


def test_hat_beats_tilde():
    p = mathieu()
    s = tdho.solve(p, 1.0, 0.0, 0.0, 30.0, samples=3000)
    a = tdho.to_angle_action(tdho.PhaseState(0.0, 1.0, 0.0), float(p.omega(0.0)))
    hat = tdho.approx_hat(p, a.psi, a.I, 0.0, s["t"])
    tilde = tdho.approx_tilde(p, a.psi, a.I, 0.0, s["t"])
    assert np.max(np.abs(hat - s["q"])) * 2 < np.max(np.abs(tilde - s["q"]))


def test_zeros_alternate():
    z = tdho.zeros(mathieu(0.2, 2.0), 1.0, 0.0, 0.0, 30.0)
    assert z["alternating"]
    assert all(g["rough_ok"] for g in z["gaps"])


def test_trace_and_monodromy_agree():
    d = tdho.trace_check(mathieu(0.2, 2.0))
    assert d["mu_trace"] == pytest.approx(d["mu_monodromy"], abs=1e-7)
    assert d["det_defect"] < 1e-9


def test_stability_map_shape():
    m = tdho.stability_map(2.0, (0.0, 0.4), (0.5, 1.5), grid=8)
    assert m["mu"].shape == (8, 8)
    assert not np.any(m["classification"][0] == 2)


def test_tongue_width():
    w = tdho.measure_tongue(2.0, 0.1)
    assert w["half_width"] == pytest.approx(w["predicted"], rel=0.15)


def test_custom_profile_matches_builtin():
    p = tdho.Profile.custom(lambda t: 1.0 + 0.1 * math.sin(t), lambda t: 0.1 * math.cos(t))
    assert tdho.total_variation(p, 0.0, 2 * math.pi) == pytest.approx(2 * math.log(1.1 / 0.9), rel=1e-8)


def test_scaling_slope():
    r = tdho.scaling_experiment(tdho.Family("spline_ramp", {"k": 2}))
    assert r["slope"] >= 1.7


def test_invariants():
    e = tdho.ermakov_check(mathieu())
    assert e["wronskian_drift"] < 1e-9
    assert e["invariant_drift"] < 1e-8


def test_bad_parameter_raises():
    with pytest.raises(ValueError):
        tdho.Profile("constant", {"omega": -1.0})
