import math

import numpy as np
import pytest

import dplab

LATTICE = "model = lattice\nradius = 0.25\n"


def test_indicator_area():
    chi = dplab.indicator(LATTICE, 128)
    assert chi.shape == (128, 128)
    assert chi.dtype == np.uint8
    assert abs(chi.mean() - math.pi / 16) < 5e-3


def test_homogenize_isotropic():
    d = dplab.homogenize(LATTICE, 64)
    a = np.array(d["a_bar"])
    assert abs(a[0, 0] - a[1, 1]) < 1e-10
    assert 0 < a[0, 0] < 1 - math.pi / 16
    assert 0 < d["mean_v"] < d["vol_frac"]


def test_fit_slope():
    eps = [1 / 8, 1 / 16, 1 / 32, 1 / 64]
    f = dplab.fit_slope(eps, [2 * e**0.5 for e in eps])
    assert f["defined"]
    assert abs(f["slope"] - 0.5) < 1e-12


def test_config_errors():
    with pytest.raises(dplab.ConfigError):
        dplab.homogenize("model = hexagon\n", 32)
    assert dplab.config_hash("a = 1\nb = 2\n") == dplab.config_hash("b = 2\na = 1\n")


def test_run_sweep(tmp_path):
    cfg = LATTICE + "resolution = 64\ndomain = box\neps = [1/4, 1/8]\nf = smooth\n"
    dplab.run("sweep", cfg, str(tmp_path))
    assert (tmp_path / "sweep.csv").read_text().startswith("# config_hash=" + dplab.config_hash(cfg))
    assert (tmp_path / "sweep.svg").exists()


def test_acceptance_subset(tmp_path):
    rows = dplab.acceptance([1, 2], quick=True, out=str(tmp_path))
    assert [r["id"] for r in rows] == [1, 2]
    assert all(r["pass"] for r in rows)
