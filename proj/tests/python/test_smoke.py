import json
import math

import numpy as np
import pytest

import gcurve

RADIAL = {
    "problem": {"kind": "radial", "n": 2, "F": "min(1, (r-2)^2)", "G": "5",
                "r_min": 0.5, "r_max": 10, "grid_n": 191, "ergodic": True},
    "numerics": {"t_max": 1, "snapshot_every": 0.5},
}

PERIODIC = {
    "problem": {"kind": "periodic", "dim": 2, "N": 16, "f": "0.5", "g": "0"},
    "numerics": {"t_max": 0.1, "snapshot_every": 0.05},
}


def text(cfg):
    return json.dumps(cfg)


def test_radial_evolve_shapes():
    out = gcurve.evolve(text(RADIAL))
    assert out["values"].shape == (3, 191)
    assert np.allclose(out["times"], [0.0, 0.5, 1.0])
    assert out["r"][0] == pytest.approx(0.5)
    # The cutoff caps the growth rate by F <= 1.
    assert np.all(out["values"][-1] <= 5.0 + 1.0 + 1e-12)
    assert np.all(np.diff(out["values"], axis=0) >= -1e-12)


def test_periodic_flat_growth():
    out = gcurve.evolve(text(PERIODIC))
    assert out["N"] == 16
    assert np.allclose(out["values"][-1], 0.05, rtol=1e-12)


def test_aubry_set_radial():
    a = gcurve.aubry_set(text(RADIAL))
    assert a["R0"] == pytest.approx(2.0)
    assert a["S0"] is None


def test_closed_forms():
    assert gcurve.velocity_cone(4.0, 3) == pytest.approx((-1.5, 0.5))
    # F = 1 from 5 to 4 at speed 1 + 1/r: integral of r/(r+1) over [4, 5].
    assert gcurve.travel_cost(2, "1", 5.0, 4.0) == pytest.approx(1.0 - math.log(1.2))
    assert gcurve.travel_cost(2, "1", 0.5, 2.0) >= gcurve.INF
    assert gcurve.fnv1a_hex("a") == "af63dc4c8601ec8c"


def test_errors_carry_kind():
    bad = json.loads(text(RADIAL))
    bad["problem"]["F"] = "r - 3"
    with pytest.raises(gcurve.GcurveError) as e:
        gcurve.evolve(text(bad))
    assert e.value.kind == "NegativeSource"


def test_run_writes_manifest(tmp_path):
    res = gcurve.run("radial", text(RADIAL), str(tmp_path / "o"))
    assert res["exit_code"] == 0
    assert "manifest.json" in res["artifacts"]
    assert (tmp_path / "o" / "manifest.json").exists()
