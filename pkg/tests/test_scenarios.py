import math

import numpy as np
import pytest

from gouysplit.analysis import find_peaks
from gouysplit.config import OBSTACLE_PLANE, SCENARIOS, ScenarioConfig
from gouysplit.errors import ConfigError
from gouysplit.modes import BeamParams, self_splitting_modes
from gouysplit.scenarios import compute_scenario, find_obstacle_plane, theta_label, thread_count
from gouysplit.spdc import ScanConfig, derive_geometry, scan_closed_form

P = BeamParams(405e-9, 1e-4)
GEOM = derive_geometry(405e-9, 780e-9, 0.6, 0.6)


def tables(name, **kw):
    return {o.name: o for o in compute_scenario(ScenarioConfig(name, **kw))}


def test_obstacle_plane_search_reproduces_frozen_value():
    assert find_obstacle_plane(self_splitting_modes(P, 0.0), GEOM, 1.2e-3) == OBSTACLE_PLANE


def test_obstacle_plane_search_without_separation():
    # with theta_c = pi the heralded lobes never get 2.4 mm apart inside the arm
    assert find_obstacle_plane(self_splitting_modes(P, math.pi), GEOM, 1.2e-3) is None


def main_lobes(peaks):
    return peaks.positions[peaks.heights >= 0.5 * peaks.heights.max()]


def test_recombination_plane():
    zn = GEOM.Z0 / P.rayleigh_length
    theta = 2 * math.atan(zn)
    x = np.linspace(-3e-3, 3e-3, 601)
    prof = scan_closed_form(self_splitting_modes(P, theta), GEOM, ScanConfig("joint", x))
    lobes = main_lobes(find_peaks(prof))
    assert len(lobes) == 1 and abs(lobes[0]) < 1e-9


def test_theta_sweep_tables():
    t = tables("theta_sweep", theta_points=9, scan_points=101)
    assert set(t) == {"theta_sweep_heralded", "theta_sweep_joint", "theta_sweep_pump"}
    joint = t["theta_sweep_joint"]
    assert joint.columns == ("x", "theta_c", "rate")
    assert joint.data.shape == (101 * 9, 3)
    assert joint.metadata["engine"] == "closed_form"


def test_joint_counter_at_pi_has_central_joint_peak():
    t = tables("joint_counter", theta_c=math.pi)["joint_counter"]
    x = t.column("x")
    lobes = main_lobes(find_peaks(x, t.column("joint_theta1.000pi")))
    assert len(lobes) == 1 and abs(lobes[0]) < 1e-9
    assert t.column("counter_theta1.000pi").min() >= 0


def test_glass_plate_headline_ratio():
    report = tables("glass_plate")["glass_plate_fringes"]
    ratio = float(report.metadata["headline_spacing_ratio"])
    assert ratio == pytest.approx(405 / 780, rel=5e-2)
    assert np.all(np.abs(report.column("spacing_ratio") / (405 / 780) - 1) < 5e-2)


def test_obstacle_summary():
    s = tables("obstacle")["obstacle_summary"]
    assert s.column("resilience")[0] >= 2
    assert s.metadata["strip_arm"] == "signal"


@pytest.mark.parametrize("name", SCENARIOS)
def test_metadata_has_provenance(name):
    for out in compute_scenario(ScenarioConfig(name, scan_points=64, map_points=16,
                                               z_points=8, theta_points=4, phase_steps=2)):
        assert out.metadata["scenario"] == name
        assert "engine" in out.metadata and "version" in out.metadata
        assert np.all(np.isfinite(out.data[:, 0]))


def test_thread_count(monkeypatch):
    monkeypatch.delenv("SIM_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("SIM_THREADS", "3")
    assert thread_count() == 3
    for bad in ("0", "-2", "many"):
        monkeypatch.setenv("SIM_THREADS", bad)
        with pytest.raises(ConfigError):
            thread_count()


def test_theta_label():
    assert theta_label(math.pi / 2) == "theta0.500pi"
