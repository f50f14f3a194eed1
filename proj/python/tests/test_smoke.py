import json

import numpy as np
import pytest

import auxcell


def small(preset="example1", n=16, iterations=3):
    cfg = json.loads(auxcell.preset(preset))
    cfg["mesh"]["n"] = n
    cfg["iterations"] = iterations
    return json.dumps(cfg)


def test_presets():
    assert auxcell.preset_names() == ["example1", "example2", "example3", "example4"]
    for name in auxcell.preset_names():
        cfg = json.loads(auxcell.preset(name))
        assert cfg["preset"] == name


def test_parse_fills_defaults():
    cfg = json.loads(auxcell.parse_config("{}"))
    assert cfg["mesh"]["n"] == 100


def test_unknown_key_is_config_error():
    with pytest.raises(auxcell.ConfigError, match="bogus"):
        auxcell.parse_config('{"bogus": 1}')


def test_isotropic_tensor():
    c = auxcell.isotropic_tensor(0.91, 0.3)
    np.testing.assert_allclose(c, [[1.0, 0.3, 0.0], [0.3, 1.0, 0.0], [0.0, 0.0, 0.35]], atol=1e-12)
    assert auxcell.apparent_poisson(c) == pytest.approx(0.3)


def test_homogenize_bounds():
    out = auxcell.homogenize(small())
    a = np.asarray(out["A"])
    np.testing.assert_allclose(a, a.T, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(a) > 0)
    assert sum(out["volumes"]) == pytest.approx(1.0, abs=1e-12)
    assert out["objective"] >= 0


def test_optimizer_steps_do_not_raise_objective():
    opt = auxcell.Optimizer(small(), threads=1)
    j0 = opt.evaluation()["objective"]
    rows = opt.step(3)
    assert [r["iteration"] for r in rows] == [1, 2, 3]
    assert opt.iteration == 3
    objectives = [j0] + [r["objective"] for r in rows]
    assert all(b <= a + 1e-15 for a, b in zip(objectives, objectives[1:]))
    phi1, phi2 = opt.level_sets()
    assert phi1.shape == (16, 16) and phi2.shape == (16, 16)
