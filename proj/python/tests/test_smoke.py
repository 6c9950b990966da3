import math

import numpy as np
import pytest

import nemalab

PERIOD = 16 * math.pi


def test_default_config_has_every_experiment():
    for name in nemalab.experiments:
        cfg = nemalab.default_config(name)
        assert cfg["experiment"] == name
        assert cfg["grid"]["dim"] == 2


def test_psi_support_and_partition():
    assert nemalab.psi(0.5) == 0.0
    assert nemalab.psi(3.0) == 0.0
    assert nemalab.psi(1.5) == pytest.approx(1.0)
    assert nemalab.partition_of_unity_defect(2, 64, PERIOD) <= 1e-12


def test_single_mode_lands_in_one_block():
    n = 64
    x = np.arange(n) * PERIOD / n
    # k = 10 gives |xi| = 1.25, inside the plateau of block 0.
    f = np.cos(10 * 2 * math.pi / PERIOD * x)[:, None] * np.ones((1, n))
    masses = nemalab.block_masses(f, PERIOD)
    total = math.sqrt(np.mean(f**2) * PERIOD**2)
    assert masses[0] == pytest.approx(total, rel=1e-12)
    assert all(m < 1e-12 for q, m in masses.items() if q != 0)
    assert nemalab.besov_norm(f, PERIOD, 0.5) == pytest.approx(total, rel=1e-12)


def test_bad_config_raises():
    with pytest.raises(nemalab.ConfigError):
        nemalab.run_experiment("run", ["grid.nope=1"])


def test_scaling_experiment_passes(tmp_path):
    res = nemalab.run_experiment("scaling", ["grid.n=32"], out=str(tmp_path))
    assert res["pass"] and res["exit_code"] == 0
    assert (tmp_path / "manifest.json").exists()
