import json
import math

import numpy as np
import pytest

import spindrops as sd


def test_four_spin_inventory():
    b = sd.build_basis("1/2,1/2,1/2,1/2")
    assert len(b) == 256
    assert b.droplet_count == 36
    assert b.orthonormality_error() < 1e-10


def test_qudit_pair_inventory():
    b = sd.build_basis("1/2,1")
    assert b.droplet_count == 5
    assert len(b) == 36


def test_out_of_scope_system():
    with pytest.raises(sd.ScopeError):
        sd.build_basis("1,1,1")


def test_parse_operator():
    m = sd.parse_operator("I1z + I2z", "1/2,1/2")
    assert np.allclose(m, np.diag([1, 0, 0, -1]))
    with pytest.raises(sd.ParseError):
        sd.parse_operator("I1z + ", "1/2")
    assert sd.canonical_expression("I2y*I1x") == "I1x*I2y"


def test_decompose_reconstruct_roundtrip():
    rng = np.random.default_rng(7)
    b = sd.build_basis("1/2,1/2,1/2")
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    doc = sd.decompose_json(a, b, "raw")
    back = sd.reconstruct_json(doc, b)
    assert np.max(np.abs(back - a)) < 1e-10
    droplets = sd.decompose(a, b)
    total = sum(d["weight"] for d in droplets)
    assert math.isclose(total, np.sum(np.abs(a) ** 2), rel_tol=1e-12)


def test_w_state_density_scaling():
    b = sd.build_basis("1/2,1/2,1/2,1/2")
    w = np.zeros(16)
    for k in range(4):
        w[15 ^ (1 << k)] = 0.5
    rho = np.outer(w, w)
    droplets = {d["label"]: d for d in sd.decompose(rho, b, "density")}
    assert abs(droplets["Id"]["coeffs"][(0, 0)] - 1) < 1e-9
    assert abs(droplets["{1}"]["coeffs"][(1, 0)] + 0.5) < 1e-9
    assert abs(droplets["{1,2,3,4} [1234]"]["coeffs"][(4, 0)] + 16 / math.sqrt(70)) < 1e-9


def test_mesh_sampling():
    b = sd.build_basis("1/2")
    doc = json.loads(sd.decompose_json(np.eye(2), b, "raw"))
    ident = next(d for d in doc["droplets"] if d["name"] == "Id")
    mesh = sd.sample_droplet(json.dumps(ident), 8, 16)
    assert mesh["schema"] == "spindrops.mesh/1"
    assert len(mesh["r"]) == 8 * 16


def test_diagnose_small():
    rep = sd.diagnose(4)
    assert rep["corrupted"] == []
    assert rep["upsilon_kernel_dim"] == 0


def test_iso_scenario_curve():
    res = sd.run_scenario("iso-12-1")
    obs = sd.parse_operator(res["observable"], res["spins"])
    for t, rho in zip(res["times"], res["states"]):
        expected = (11 + 16 * math.cos(3 * math.pi * 11 * t)) / 18
        assert abs(sd.expectation(rho, obs) - expected) < 1e-9


def test_run_sequence_yaml():
    text = """
system: "1/2"
rho0: I1z
events:
  - {type: pulse, sites: [1], axis: y, angle: pi/2}
"""
    res = sd.run_sequence(text)
    ix = sd.parse_operator("I1x", "1/2")
    assert np.max(np.abs(res["states"][-1] - ix)) < 1e-12
