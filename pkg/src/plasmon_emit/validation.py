"""Fast built-in checks run by ``plasmon-emit validate``."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .emde import EffectiveModeSet, assemble, decouple_pm, discretize, modes_from_density
from .greens_mie import (
    EnhancementTable,
    SphereSpec,
    build_enhancement_table,
    drude_epsilon,
    enhancement_factors,
    lsp_resonances,
)
from .oracles import KernelPair, lorentzian_analytic, markov_solution, volterra_solve
from .spectral import EmitterSpec, SpectralDensityModel
from .units import HBAR_EV_FS, fs_to_inv_ev


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _drude():
    sphere = SphereSpec()
    eps_hi = drude_epsilon(1e4, sphere)
    lossless = drude_epsilon(3.0, SphereSpec(gamma=0.0))
    ok = abs(eps_hi - sphere.eps_inf) < 1e-5 and lossless.imag == 0.0
    return ok, f"eps(1e4 eV)={eps_hi.real:.6f}, lossless imag={lossless.imag}"


def _lsp():
    sphere = SphereSpec()
    w = lsp_resonances(sphere, 50)
    limit = sphere.omega_p / math.sqrt(sphere.eps_inf + sphere.eps_background)
    ok = abs(w[0] - 3.8374) < 5e-4 and abs(limit - 4.2244) < 5e-4 and max(w) < limit
    return ok, f"omega_1={w[0]:.4f}, accumulation={limit:.4f}"


def _free_space():
    lp, lt = enhancement_factors(2.0, 50.0)
    ok = abs(lp - 1) < 0.02 and abs(lt - 1) < 0.02
    return ok, f"lambda(2 eV, 50 nm)=({lp:.4f}, {lt:.4f})"


def _reference_point():
    lp, lt = enhancement_factors(3.84, 1.0)
    ok = abs(lp / 1.13e5 - 1) <= 0.3 and abs(lt / 2.8e4 - 1) <= 0.3
    return ok, f"lambda(3.84, 1)=({lp:.3e}, {lt:.3e})"


def _table_roundtrip():
    table = build_enhancement_table(SphereSpec(), [3.8, 3.84, 3.9], [1.0, 1.5])
    back = EnhancementTable.from_text(table.to_text())
    node = table.lookup(3.84, 1.5)
    direct = enhancement_factors(3.84, 1.5)
    ok = back == table and np.allclose(node, direct, rtol=1e-12, atol=0)
    return ok, "text round trip and node lookup"


def _small_model(omega0=3.84, tau0=7e4, distance=1.55, fca=False):
    og = np.linspace(3.5, 4.5, 201)
    table = build_enhancement_table(SphereSpec(), og, [distance])
    return SpectralDensityModel(EmitterSpec(omega0, tau0), table, distance, fca=fca)


def _densities():
    model = _small_model()
    w = np.linspace(3.5, 4.5, 11)
    jp, jm = model.density("plus", w), model.density("minus", w)
    fca = model.with_fca(True)
    same = model.density("rad", 3.84) == fca.density("rad", 3.84)
    ok = bool(np.all(np.abs(jm) <= jp)) and same
    return ok, "|J-| <= J+, FCA equal at omega0"


def _markov():
    tau0 = 1000.0
    gam = HBAR_EV_FS / tau0
    t = np.linspace(0, 3 * tau0, 61)
    c1, _ = markov_solution(gam / (2 * np.pi), 0.0, (1, 0), t)
    err = np.max(np.abs(np.abs(c1) ** 2 - np.exp(-t / tau0)))
    return err < 1e-12, f"max error {err:.2e}"


def _rabi():
    w = 1e-4
    modes = EffectiveModeSet(np.array([3.84]), np.array([w]), np.array([0.0]))
    t = np.linspace(0, 3 * 2 * math.pi / math.sqrt(w) * HBAR_EV_FS, 301)
    traj = assemble(modes, 3.84).propagate((1, 0), t)
    err = np.max(np.abs(traj.p1 - np.cos(math.sqrt(w) * fs_to_inv_ev(t)) ** 2))
    return err < 1e-6, f"max error {err:.2e}"


def _lorentzian():
    g2, kappa = 4e-4, 0.05
    kern = KernelPair.lorentzian(g2, kappa)
    traj = volterra_solve(kern, (1, 0), 0.02, 100.0)
    exact = np.abs(lorentzian_analytic(g2, kappa, 0.0, traj.times)) ** 2
    err = np.max(np.abs(traj.p1 - exact))
    return err < 1e-3, f"max error {err:.2e}"


def _solvers():
    model = _small_model()
    modes = discretize(model, 81)
    t = np.linspace(0, 50, 201)
    a = assemble(modes, 3.84).propagate((1, 0), t)
    b = decouple_pm(modes, 3.84).propagate((1, 0), t)
    c = volterra_solve(KernelPair.from_modes(modes, 3.84), (1, 0), 0.01, 50.0)
    d1 = np.max(np.abs(a.p1 - b.p1))
    d2 = np.max(np.abs(b.p1 - c.p1[::25]))
    return d1 < 1e-10 and d2 < 1e-4, f"eigen/pm {d1:.1e}, pm/volterra {d2:.1e}"


def _structure():
    model = _small_model()
    modes = discretize(model, 81)
    ham = assemble(modes, 3.84)
    vals = ham.eigenvalues
    imag = np.max(np.abs(vals.imag)) / np.max(np.abs(vals))
    t = np.linspace(0, 500, 201)
    pm = decouple_pm(modes, 3.84)
    traj = pm.propagate((1, 0), t)
    drift = np.max(np.abs(traj.norm - 1))
    sis = pm.propagate((math.sqrt(0.5), math.sqrt(0.5)), t, with_norm=False)
    leak = np.max(np.abs(sis.c1 - sis.c2))
    swapped = pm.propagate((0, 1), t, with_norm=False)
    swap = np.max(np.abs(swapped.c1 - traj.c2))
    ok = imag < 1e-8 and drift < 1e-8 and leak < 1e-10 and swap < 1e-10
    return ok, f"imag {imag:.1e}, drift {drift:.1e}, sector {leak:.1e}, exchange {swap:.1e}"


def _refinement():
    jp = lambda w: 1e-3 / (1 + ((w - 4.0) / 0.1) ** 2)  # noqa: E731
    jm = lambda w: 0.5 * jp(w)  # noqa: E731
    t = np.linspace(0, 100, 101)
    a = decouple_pm(modes_from_density(jp, jm, (3.5, 4.5), 201), 4.0).propagate((1, 0), t)
    b = decouple_pm(modes_from_density(jp, jm, (3.5, 4.5), 402), 4.0).propagate((1, 0), t)
    err = np.max(np.abs(a.p1 - b.p1))
    return err < 1e-3, f"max |dp1| {err:.1e}"


CHECKS = [
    ("drude_limits", _drude),
    ("lsp_resonances", _lsp),
    ("free_space_recovery", _free_space),
    ("quoted_enhancement", _reference_point),
    ("table_roundtrip", _table_roundtrip),
    ("density_identities", _densities),
    ("markov_limit", _markov),
    ("single_mode_rabi", _rabi),
    ("lorentzian_oracle", _lorentzian),
    ("solver_agreement", _solvers),
    ("structural_invariants", _structure),
    ("mode_refinement", _refinement),
]


def _run_one(item):
    name, fn = item
    try:
        ok, detail = fn()
    except Exception as exc:  # report, never abort the suite
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    return CheckResult(name, bool(ok), detail)


def run_checks(workers: int = 4) -> list[CheckResult]:
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, CHECKS))


def format_table(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check'.ljust(width)}  status  detail"]
    for r in results:
        lines.append(f"{r.name.ljust(width)}  {'PASS' if r.passed else 'FAIL':6s}  {r.detail}")
    return "\n".join(lines)
