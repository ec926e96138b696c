"""Glue from a :class:`RunConfig` to tables, densities and trajectories."""

from __future__ import annotations

import numpy as np

from . import __version__
from .config import RunConfig, echo_config
from .emde import Trajectory, assemble, decouple_pm, default_times, discretize
from .errors import ConfigError
from .greens_mie import build_enhancement_table, load_or_build_table
from .oracles import KernelPair, markov_solution, volterra_solve
from .spectral import SpectralDensityModel


def band_grid(cfg: RunConfig) -> np.ndarray:
    lo, hi = cfg.band
    n = int(round((hi - lo) / cfg.table_step_ev)) + 1
    return np.linspace(lo, hi, max(n, 2))


def map_grids(cfg: RunConfig):
    og = np.linspace(cfg.grid_omega_lo_ev, cfg.grid_omega_hi_ev, cfg.grid_omega_n)
    dg = np.linspace(cfg.grid_D_lo_nm, cfg.grid_D_hi_nm, cfg.grid_D_n)
    return og, dg


def enhancement_map(cfg: RunConfig):
    og, dg = map_grids(cfg)
    return build_enhancement_table(cfg.sphere(), og, dg, cfg.truncation)


def density_model(cfg: RunConfig, fca: bool | None = None) -> SpectralDensityModel:
    table = load_or_build_table(
        cfg.sphere(), band_grid(cfg), [cfg.D_nm], cfg.cache or None, cfg.truncation
    )
    return SpectralDensityModel(
        cfg.emitter(), table, cfg.D_nm, cfg.band, cfg.fca if fca is None else fca
    )


def _metadata(cfg: RunConfig, model: SpectralDensityModel) -> dict:
    meta = {f"cfg.{line.split(' = ', 1)[0]}": line.split(" = ", 1)[1]
            for line in echo_config(cfg).splitlines()}
    meta["fca_used"] = str(model.fca).lower()
    meta["code_version"] = __version__
    return meta


def simulate(cfg: RunConfig, fca: bool | None = None) -> Trajectory:
    model = density_model(cfg, fca)
    emitter = model.emitter
    initial = emitter.initial_amplitudes
    times = default_times(cfg.t_max_fs, cfg.dt_out_fs)
    solver = cfg.solver
    if solver == "markov":
        jd, jc = model.coupling_densities(np.array([emitter.omega0]))
        c1, c2 = markov_solution(float(jd[0]), float(jc[0]), initial, times)
        traj = Trajectory(times, c1, c2, None, solver="markov")
    else:
        modes = discretize(model, cfg.M)
        if solver == "eigen":
            traj = assemble(modes, emitter.omega0).propagate(initial, times)
        elif solver == "eigen_pm":
            traj = decouple_pm(modes, emitter.omega0).propagate(initial, times)
        else:
            stride = cfg.dt_out_fs / cfg.volterra_dt_fs
            if abs(stride - round(stride)) > 1e-9:
                raise ConfigError("dt_out_fs must be a multiple of volterra_dt_fs")
            full = volterra_solve(
                KernelPair.from_modes(modes, emitter.omega0), initial,
                cfg.volterra_dt_fs, times[-1],
            )
            idx = np.arange(times.size) * int(round(stride))
            traj = Trajectory(times, full.c1[idx], full.c2[idx], None, solver=full.solver)
    return Trajectory(traj.times, traj.c1, traj.c2, traj.norm, traj.solver,
                      _metadata(cfg, model))
