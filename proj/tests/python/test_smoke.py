import json
import math
import os
import subprocess
import xml.etree.ElementTree as ET

import pytest

import killingtensors as kt

EH = [1, 0, 0, 0, 0, 1]


def test_dimension_and_solver_agree():
    assert kt.npe_dimension(2, 0, 2) == 6
    dim, basis = kt.solve_gkt(2, 0, 2)
    assert dim == 6 and len(basis) == 6


def test_invariants_and_classes():
    assert kt.fundamental_invariants(EH) == (1.0, 1.0, 1.0)
    assert kt.classify(EH) == "elliptic-hyperbolic"
    assert kt.classify([0, 0, 0, 0, 0, 1]) == "polar"
    f1, f2 = kt.foci(EH)
    assert f1 == pytest.approx([1, 0]) and f2 == pytest.approx([-1, 0])
    value, vanishing = kt.resultant(EH, [1, 4, 0, 0, -2, 1])
    assert vanishing and value == pytest.approx(0.0, abs=1e-12)
    moved = kt.act_on_params([0.3, -1.0, 0.8], EH)
    assert kt.fundamental_invariants(moved) == pytest.approx((1.0, 1.0, 1.0), rel=1e-12)
    assert kt.independence_rank([1, 0.3, 0.2, -0.4, 0.5, 1], [0.7, -1, 0.3, 0.6, -0.2, 1.5])["rank"] == 9


def test_potential_and_kepler():
    v = kt.Potential(kt.KEPLER)
    assert v(3, 4) == pytest.approx(0.2)
    g = v.gradient(1, 2)
    r3 = 5 ** 1.5
    assert g == pytest.approx([-1 / r3, -2 / r3], rel=1e-14)
    dim, basis = kt.compatible_subspace(v)
    assert dim == 4
    for b in basis:
        assert abs(b[0] - b[1]) < 1e-10 and abs(b[2]) < 1e-10
    assert kt.verify_kepler_theorem()["passed"]
    assert max(abs(r) for r in kt.pde_residuals(v, [1, 2])) < 1e-12
    assert kt.bd_residual([1, 0, 0, 0, 0, 0], kt.Potential("x1*x2"), [1, 2]) == -1.0


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError, match="position 5"):
        kt.Potential("x1 + ")
    with pytest.raises(kt.PreconditionError):
        kt.k_squared([0, 0, 0, 0, 0, 1])
    with pytest.raises(kt.NumericError):
        kt.Potential(kt.KEPLER)(0, 0)


def test_flow_conserves_energy_and_angular_momentum():
    v = kt.Potential("-1/sqrt(x1^2 + x2^2)")
    rep = kt.hamiltonian_flow(v, [1, 0], [0, 1], 1e-3, 2, integrals=[[0, 0, 0, 0, 0, 1]])
    assert not rep["aborted"]
    assert rep["steps"] == 2000
    assert rep["drift_H"] < 1e-8 and rep["drift_F"][0] < 1e-8
    x1, x2, _, _ = rep["states"][-1]
    assert math.hypot(x1, x2) == pytest.approx(1.0, abs=1e-9)


def test_web_svg_is_well_formed():
    svg = kt.render_web(EH, density=4)
    root = ET.fromstring(svg.encode())
    ns = {"s": "http://www.w3.org/2000/svg"}
    assert root.tag.endswith("svg")
    assert len(root.findall("s:circle", ns)) == 2
    assert root.findall("s:path", ns)


@pytest.mark.skipif("KT_CLI" not in os.environ, reason="command-line binary not provided")
def test_cli_json_matches_module():
    out = subprocess.run(
        [os.environ["KT_CLI"], "--format", "json", "foci", "--beta", "1,4,0,0,-2,1"],
        check=True,
        capture_output=True,
        text=True,
    ).stdout
    data = json.loads(out)
    f1, f2 = kt.foci([1, 4, 0, 0, -2, 1])
    assert data["f1"] == pytest.approx(f1) and data["f2"] == pytest.approx(f2)
