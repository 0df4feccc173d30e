"""Named reproductions of the experiment's figures.

Each scenario turns a :class:`~gouysplit.config.ScenarioConfig` into a list
of :class:`~gouysplit.io.GridOutput` tables. Independent scans inside a
scenario run on a thread pool capped by ``SIM_THREADS``; results are
collected in submission order so outputs do not depend on the thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .analysis import depletion_ratio, find_peaks, fringe_spacing, visibility
from .config import ScenarioConfig
from .errors import ConfigError, InsufficientFringesError
from .io import GridOutput, long_format, write_grid
from .modes import BeamParams, evaluate_superposition, gaussian_mode, self_splitting_modes
from .propagation import OpticalElement
from .spdc import (KernelGrids, ScanConfig, biphoton_kernel_scan, derive_geometry,
                   propagate_line, scan_closed_form)

DEFAULT_THETAS = {
    "selfsplit_map": (0.0, math.pi),
    "heralded_2d": (0.0, math.pi / 2, math.pi),
    "obstacle": (0.0,),
    "joint_counter": (0.0, math.pi),
    "glass_plate": (math.pi,),
}
MAP_Z_NORM = 5.0
SCAN_WIDTHS = 3.0
OBSTACLE_SCAN_WIDTHS = 5.0
FRINGE_SCAN_WIDTHS = 4.0


def thread_count() -> int:
    raw = os.environ.get("SIM_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError(f"SIM_THREADS must be a positive integer, got {raw!r}")
    return n


def _map(fn, items):
    items = list(items)
    workers = min(thread_count(), len(items)) or 1
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def theta_label(theta: float) -> str:
    return f"theta{theta / math.pi:.3f}pi"


class _Context:
    """Geometry, pumps and shared metadata derived from one config."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.geom = derive_geometry(cfg.lambda_p, cfg.lambda_s, cfg.z_s, cfg.z_i)
        self.params = BeamParams(cfg.lambda_p, cfg.w0)
        self.grids = KernelGrids(crystal_points=cfg.crystal_points)
        self.w_det = float(self.params.width(self.geom.Z0))

    def thetas(self):
        if self.cfg.theta_c is not None:
            return (self.cfg.theta_c,)
        return DEFAULT_THETAS[self.cfg.scenario]

    def pump(self, theta, kind=None):
        kind = kind or self.cfg.pump_type
        if kind == "hg00":
            return gaussian_mode(self.params)
        return self_splitting_modes(self.params, theta)

    def axis(self, half_width, n=None):
        return np.linspace(-half_width, half_width, n or self.cfg.scan_points)

    def heralded_axis(self, widths=SCAN_WIDTHS, n=None):
        return self.axis(widths * self.w_det / self.geom.eta_s, n)

    def joint_axis(self, widths=SCAN_WIDTHS, n=None):
        return self.axis(widths * self.w_det, n)

    def scan(self, pump, mode, x, elements=(), check=True):
        sc = ScanConfig(mode, x)
        if self.cfg.engine == "kernel" or elements:
            return biphoton_kernel_scan(pump, self.geom, elements, sc, self.grids, check)
        return scan_closed_form(pump, self.geom, sc)

    def engine_name(self, with_elements=False):
        return "kernel_engine" if with_elements or self.cfg.engine == "kernel" else "closed_form"

    def metadata(self, **extra):
        g, c = self.geom, self.cfg
        meta = {
            "scenario": c.scenario,
            "version": __version__,
            "pump": c.pump_type,
            "lambda_p": g.lambda_p,
            "lambda_s": g.lambda_s,
            "lambda_i": g.lambda_i,
            "w0": c.w0,
            "z_s": g.z_s,
            "z_i": g.z_i,
            "Z0": g.Z0,
            "eta_s": g.eta_s,
            "eta_i": g.eta_i,
        }
        meta.update(extra)
        return meta


def _selfsplit_map(ctx: _Context):
    z_norm = np.linspace(-MAP_Z_NORM, MAP_Z_NORM, ctx.cfg.z_points)
    x = ctx.axis(SCAN_WIDTHS * float(ctx.params.width(MAP_Z_NORM * ctx.params.rayleigh_length)),
                 ctx.cfg.map_points)
    X, ZN = np.meshgrid(x, z_norm, indexing="ij")

    def one(theta):
        pump = ctx.pump(theta)
        values = np.abs(evaluate_superposition(pump, X, 0.0, ZN * ctx.params.rayleigh_length)) ** 2
        meta = ctx.metadata(theta_c=theta, engine="analytic_modes", x_points=len(x),
                            z_points=len(z_norm), units="x in m; intensity in 1/m^2")
        return long_format(f"selfsplit_map_{theta_label(theta)}", (("x", x), ("z_norm", z_norm)),
                           values, "intensity", meta)

    return _map(one, ctx.thetas())


def _heralded_2d(ctx: _Context):
    x = ctx.heralded_axis(n=ctx.cfg.map_points)

    def one(theta):
        prof = scan_closed_form(ctx.pump(theta), ctx.geom, ScanConfig("heralded_2d", x, x))
        meta = ctx.metadata(theta_c=theta, engine="closed_form", idler_x=0.0, idler_y=0.0,
                            map_points=len(x), units="x, y in m; rate relative")
        return long_format(f"heralded_2d_{theta_label(theta)}", (("x", x), ("y", x)),
                           prof.rates, "rate", meta)

    return _map(one, ctx.thetas())


def find_obstacle_plane(pump, geom, strip_width, step=0.01):
    """First plane on a ``step`` grid where the heralded profile in the signal
    arm is split into two lobes more than two strip widths apart, or ``None``.

    Lobes are peaks reaching half the maximum; weaker side lobes do not count.
    """
    w_far = float(pump.params.width(geom.Z0)) / geom.eta_s
    x = np.linspace(-4 * w_far, 4 * w_far, 2001)
    for z in np.arange(1, int(round(geom.z_s / step))) * step:
        partial = derive_geometry(geom.lambda_p, geom.lambda_s, z, geom.z_i)
        peaks = find_peaks(scan_closed_form(pump, partial, ScanConfig("heralded_1d", x)))
        lobes = peaks.positions[peaks.heights >= 0.5 * peaks.heights.max()]
        if len(lobes) == 2 and lobes[1] - lobes[0] > 2 * strip_width:
            return round(float(z), 10)
    return None


def _obstacle(ctx: _Context):
    cfg = ctx.cfg
    theta = ctx.thetas()[0]
    x = ctx.heralded_axis(OBSTACLE_SCAN_WIDTHS)
    strip = OpticalElement("opaque_strip", "signal", cfg.strip_z, 0.0, cfg.strip_width)
    jobs = [(kind, blocked) for kind in ("hg00", "selfsplit") for blocked in (False, True)]

    def one(job):
        kind, blocked = job
        pump = ctx.pump(theta, kind)
        elements = [strip] if blocked else []
        return biphoton_kernel_scan(pump, ctx.geom, elements, ScanConfig("heralded_1d", x),
                                    ctx.grids)

    profiles = dict(zip(jobs, _map(one, jobs)))
    ratios = {kind: depletion_ratio(profiles[(kind, True)], profiles[(kind, False)])
              for kind in ("hg00", "selfsplit")}
    meta = ctx.metadata(theta_c=theta, engine="kernel_engine", strip_width=cfg.strip_width,
                        strip_z=cfg.strip_z, strip_arm="signal",
                        depletion_hg00=ratios["hg00"], depletion_selfsplit=ratios["selfsplit"],
                        units="x in m; rate relative")
    meta["pump"] = "hg00+selfsplit"
    data = np.column_stack([x] + [profiles[j].rates for j in jobs])
    columns = ("x", "hg00_clear", "hg00_blocked", "selfsplit_clear", "selfsplit_blocked")
    summary = GridOutput(
        "obstacle_summary",
        ("strip_width", "strip_z", "depletion_hg00", "depletion_selfsplit", "resilience"),
        [[cfg.strip_width, cfg.strip_z, ratios["hg00"], ratios["selfsplit"],
          ratios["selfsplit"] / ratios["hg00"]]], meta)
    return [GridOutput("obstacle_profiles", columns, data, meta), summary]


def _theta_sweep(ctx: _Context):
    thetas = np.linspace(0.0, 2 * math.pi, ctx.cfg.theta_points)
    xh, xj = ctx.heralded_axis(), ctx.joint_axis()
    jobs = [(kind, t) for kind in ("heralded_1d", "joint", "pump") for t in thetas]

    def one(job):
        kind, theta = job
        pump = ctx.pump(theta)
        if kind == "pump":
            return np.abs(evaluate_superposition(pump, xj, 0.0, ctx.geom.Z0)) ** 2
        return ctx.scan(pump, kind, xh if kind == "heralded_1d" else xj).rates

    results = _map(one, jobs)
    n = len(thetas)
    out = []
    for i, (name, x, value) in enumerate((("heralded", xh, "rate"), ("joint", xj, "rate"),
                                          ("pump", xj, "intensity"))):
        matrix = np.array(results[i * n:(i + 1) * n]).T
        engine = "analytic_modes" if name == "pump" else ctx.engine_name()
        meta = ctx.metadata(engine=engine, theta_points=n, x_points=len(x),
                            plane_z=ctx.geom.Z0 if name == "pump" else "detector",
                            units="x in m; theta_c in rad")
        out.append(long_format(f"theta_sweep_{name}", (("x", x), ("theta_c", thetas)),
                               matrix, value, meta))
    return out


def _joint_counter(ctx: _Context):
    x = ctx.heralded_axis()
    jobs = [(t, mode) for t in ctx.thetas() for mode in ("joint", "counter")]
    rates = _map(lambda job: ctx.scan(ctx.pump(job[0]), job[1], x).rates, jobs)
    columns = ["x"] + [f"{mode}_{theta_label(t)}" for t, mode in jobs]
    meta = ctx.metadata(engine=ctx.engine_name(),
                        theta_c=";".join(format(t, ".17g") for t in ctx.thetas()),
                        units="x in m (signal position; counter scan has idler at -x)")
    return [GridOutput("joint_counter", columns, np.column_stack([x] + rates), meta)]


def _centroid(x, y):
    return float(np.sum(x * y) / np.sum(y))


FRINGE_METHOD = "peak_to_peak"


def _safe_spacing(x, y):
    # the plate patterns hold two or three maxima under one envelope, too few
    # for a spectral estimate
    try:
        return fringe_spacing(x, y, FRINGE_METHOD).spacing
    except InsufficientFringesError:
        return float("nan")


def _glass_plate(ctx: _Context):
    cfg = ctx.cfg
    theta = ctx.thetas()[0]
    pump = ctx.pump(theta)
    arms = ("signal", "idler") if cfg.plate_arms == "both" else (cfg.plate_arms,)
    phases = [cfg.plate_phase] + [2 * math.pi * k / cfg.phase_steps for k in range(cfg.phase_steps)]
    xp = ctx.joint_axis(FRINGE_SCAN_WIDTHS)
    xh = ctx.heralded_axis(FRINGE_SCAN_WIDTHS)
    xj = ctx.joint_axis(FRINGE_SCAN_WIDTHS)

    def plate(arm, phase):
        return OpticalElement("phase_patch", arm, cfg.plate_z, 0.0, cfg.plate_width, phase,
                              cfg.plate_side)

    def one(job):
        i, phase = job
        elements = [plate(a, phase) for a in arms]
        pump_line = np.abs(propagate_line(pump, xp, ctx.geom.Z0, [plate("pump", phase)],
                                          ctx.grids)) ** 2
        # the transparent-element cross-check is the same for every phase
        check = i == 0
        her = biphoton_kernel_scan(pump, ctx.geom, elements, ScanConfig("heralded_1d", xh),
                                   ctx.grids, check).rates
        joint = biphoton_kernel_scan(pump, ctx.geom, elements, ScanConfig("joint", xj),
                                     ctx.grids, check).rates
        return pump_line, her, joint

    results = _map(one, list(enumerate(phases)))
    base = ctx.metadata(theta_c=theta, plate_z=cfg.plate_z, plate_width=cfg.plate_width,
                        plate_side=cfg.plate_side, plate_arms=cfg.plate_arms)
    head_pump, head_her, head_joint = results[0]
    rows = []
    for phase, (p, h, j) in zip(phases, results):
        hs, js = _safe_spacing(xh, h), _safe_spacing(xj, j)
        rows.append([phase, _safe_spacing(xp, p), hs, js, js / hs,
                     _centroid(xp, p), _centroid(xh, h), _centroid(xj, j),
                     visibility(xh, h), visibility(xj, j)])
    head = rows[0]
    report = GridOutput(
        "glass_plate_fringes",
        ("plate_phase", "pump_spacing", "heralded_spacing", "joint_spacing", "spacing_ratio",
         "pump_centroid", "heralded_centroid", "joint_centroid", "heralded_visibility",
         "joint_visibility"),
        rows[1:],
        dict(base, engine="kernel_engine", method=FRINGE_METHOD, plate_phase=cfg.plate_phase,
             headline_spacing_ratio=head[4], headline_heralded_spacing=head[2],
             headline_joint_spacing=head[3]))
    sweep = phases[1:]
    out = []
    for idx, (name, x, engine, value) in enumerate((
            ("pump", xp, "fresnel_line", "intensity"),
            ("heralded", xh, "kernel_engine", "rate"),
            ("joint", xj, "kernel_engine", "rate"))):
        matrix = np.array([r[idx] for r in results[1:]]).T
        out.append(long_format(f"glass_plate_{name}", (("x", x), ("plate_phase", sweep)),
                               matrix, value, dict(base, engine=engine)))
    headline = GridOutput("glass_plate_headline", ("x_pump", "pump", "x_heralded", "heralded",
                                                   "x_joint", "joint"),
                          np.column_stack([xp, head_pump, xh, head_her, xj, head_joint]),
                          dict(base, engine="kernel_engine", plate_phase=cfg.plate_phase,
                               spacing_ratio=head[4]))
    return out + [headline, report]


RUNNERS = {
    "selfsplit_map": _selfsplit_map,
    "heralded_2d": _heralded_2d,
    "obstacle": _obstacle,
    "theta_sweep": _theta_sweep,
    "joint_counter": _joint_counter,
    "glass_plate": _glass_plate,
}


def compute_scenario(cfg: ScenarioConfig) -> list:
    """All output tables of a scenario, nothing written."""
    return RUNNERS[cfg.scenario](_Context(cfg))


def run_scenario(cfg: ScenarioConfig, output_dir=None) -> list:
    """Compute a scenario and write its CSV files; returns the written paths."""
    outputs = compute_scenario(cfg)
    out_dir = output_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    paths = [write_grid(o, os.path.join(out_dir, o.filename)) for o in outputs]
    if cfg.plot:
        from .plotting import render_outputs
        paths += render_outputs(outputs, out_dir)
    return paths
