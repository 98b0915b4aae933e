import json
import math
import os
import subprocess

import numpy as np
import pytest

import coherent_states as cs

SCHEMA = os.environ.get("COHERENT_SCHEMA")
COHSTATE = os.environ.get("COHSTATE")


def test_matsumoto_is_not_informative():
    rep = cs.spin_rep("1")
    psi = cs.matsumoto_fiducial(rep)
    np.testing.assert_allclose(psi.real, [math.sqrt(2 / 3), 0, math.sqrt(1 / 3)], atol=0)
    np.testing.assert_allclose(cs.moment_map(rep, psi), [0, 0, 1 / 3], atol=1e-12)
    report = cs.classify_informative(rep, psi)
    assert report["dims"] == (0, 1)
    assert report["informative"] is False


@pytest.mark.parametrize("j", ["1/2", 1, 1.5])
def test_highest_weight_is_informative(j):
    rep = cs.spin_rep(j)
    report = cs.classify_informative(rep, cs.highest_weight_fiducial(rep))
    assert report["dims"] == (1, 1)
    assert report["informative"]


def test_generators_and_structure_constants():
    rep = cs.spin_rep("3/2")
    j1, j2, j3 = rep.generators
    np.testing.assert_allclose(j1 @ j2 - j2 @ j1, 1j * j3, atol=1e-13)
    f = np.array(rep.structure_constants)
    assert f.shape == (3, 3, 3)
    assert f[0, 1, 2] == pytest.approx(1.0)
    assert rep.spin == 1.5


def test_su3_from_gell_mann():
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7] = np.diag([1, 1, -2]) / math.sqrt(3)
    rep = cs.validate_algebra(list(lam / 2), "su3")
    f = np.array(rep.structure_constants)
    assert f[3, 4, 7] == pytest.approx(math.sqrt(3) / 2)
    with pytest.raises(cs.CoherentError) as err:
        cs.validate_algebra(list(lam[:2] / 2), "open")
    assert err.value.code == "CLOSURE_FAILURE"


def test_van_hove_and_counterexample():
    rep = cs.spin_rep(1)
    rec = cs.van_hove_check(rep, cs.highest_weight_fiducial(rep), [(2 * math.pi, [0, 0, 1])],
                            dt=1e-3, tilt_theta=math.pi / 3)
    assert rec["max_fidelity_deficit"] <= 1e-8
    assert rec["max_abs_phase_residual"] <= 1e-6
    rec = cs.van_hove_check(rep, cs.matsumoto_fiducial(rep), [(math.pi / 2, [0, 0, 1])], dt=1e-3)
    assert rec["fidelity"][-1] == pytest.approx(1 / 3, abs=1e-9)


def test_ehrenfest_agreement():
    rep = cs.spin_rep(1)
    rng = np.random.default_rng(3)
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    psi /= np.linalg.norm(psi)
    sched = cs.Schedule.constant(np.array([0.3, -0.5, 0.8]), 2.0)
    times, states = cs.propagate_quantum(rep, sched, psi, 1e-2)
    _, mus = cs.flow_coadjoint(rep, sched, cs.moment_map(rep, psi), 1e-2)
    err = max(np.linalg.norm(cs.moment_map(rep, s / np.linalg.norm(s)) - m) for s, m in zip(states, mus))
    assert err < 1e-7


def test_identity_berry_pathint():
    rep = cs.spin_rep(1)
    res = cs.identity_resolution(rep, cs.matsumoto_fiducial(rep))
    assert res["deviation"] <= 1e-10
    verdict = cs.dirac_check(rep, cs.matsumoto_fiducial(rep))
    assert verdict["coefficient"] == pytest.approx(1 / 3, abs=1e-8)
    assert verdict["admissible"] is False
    half = cs.spin_rep("1/2")
    rec = cs.discrete_propagator(half, cs.highest_weight_fiducial(half), [(1.0, [0, 0, 1])],
                                 slice_counts=[8, 16, 32, 64], kernel="first-order", g_final=[0.3, 0.2, 0.1])
    assert all(a > b for a, b in zip(rec["errors"], rec["errors"][1:]))
    assert 0.7 <= cs.fitted_order(rec["slice_counts"], rec["errors"]) <= 1.3
    with pytest.raises(cs.CoherentError) as err:
        cs.discrete_propagator(half, cs.highest_weight_fiducial(half), [(1.0, [0, 0, 1])], orders=[1, 1, 1])
    assert err.value.code == "QUADRATURE_UNDERRESOLVED"


CONFIGS = {
    "analyze": {"rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"}},
    "evolve": {"rep": {"spin": "1"}, "fiducial": {"preset": "highest-weight"},
               "schedule": [{"until": 1, "h": [0.2, 0, 1]}], "dt": 0.01, "initial_tilt": {"theta": 0.9}},
    "identity": {"rep": {"spin": "3/2"}, "fiducial": {"amplitudes": [[0.5, 0], [0.5, 0], [0, 0.5], [0.5, 0]]}},
    "berry": {"rep": {"spin": "1/2"}, "fiducial": {"preset": "highest-weight"}},
    "pathint": {"rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"},
                "schedule": [{"until": 1, "h": [0, 0, 1]}], "kernel_mode": "first-order", "slice_counts": [4, 8]},
    "evolve-error": {"rep": {"spin": "1"}, "fiducial": {"amplitudes": [[0, 0], [1, 0], [0, 0]]},
                     "schedule": [{"until": 1, "h": [0, 0, 1]}]},
}


def _write(tmp_path, name, cfg):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(cfg))
    return path


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_reports_validate_against_schema(tmp_path, name):
    jsonschema = pytest.importorskip("jsonschema")
    if SCHEMA is None:
        pytest.skip("schema path not provided")
    schema = json.load(open(SCHEMA))
    command = name.split("-")[0]
    report, code = cs.run_config(str(_write(tmp_path, name, CONFIGS[name])), command)
    jsonschema.validate(report, schema)
    assert code == (2 if name.endswith("error") else 0)


@pytest.mark.skipif(COHSTATE is None, reason="cohstate path not provided")
@pytest.mark.parametrize("name", ["analyze", "evolve", "pathint"])
def test_cli_reports_are_deterministic(tmp_path, name):
    cfg = _write(tmp_path, name, CONFIGS[name])
    outputs = []
    for run in range(2):
        out = tmp_path / f"out{run}"
        proc = subprocess.run([COHSTATE, name, "--config", str(cfg), "--out", str(out)], capture_output=True)
        assert proc.returncode == 0, proc.stderr
        outputs.append((out / "report.json").read_bytes())
    assert outputs[0] == outputs[1]
    if SCHEMA is not None:
        jsonschema = pytest.importorskip("jsonschema")
        jsonschema.validate(json.loads(outputs[0]), json.load(open(SCHEMA)))
