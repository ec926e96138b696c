"""Property-based checks of the model invariants."""

import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from plasmon_emit import (
    EffectiveModeSet,
    EmitterSpec,
    EnhancementTable,
    SpectralDensityModel,
    SphereSpec,
    assemble,
    build_enhancement_table,
    decouple_pm,
    enhancement_factors,
)
from plasmon_emit.config import RunConfig, echo_config, parse_config

from conftest import JAGR_TAU0

SLOW = settings(max_examples=25, deadline=None,
                suppress_health_check=[HealthCheck.function_scoped_fixture])
omegas = st.floats(3.0, 4.6)
amplitudes = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: sum(x * x for x in v) > 1e-3
)


def normalized(v):
    a1, a2 = complex(v[0], v[1]), complex(v[2], v[3])
    n = math.sqrt(abs(a1) ** 2 + abs(a2) ** 2)
    return a1 / n, a2 / n


@st.composite
def mode_sets(draw, max_m=25):
    m = draw(st.integers(1, max_m))
    w = np.sort(np.array(draw(st.lists(st.floats(3.5, 4.5), min_size=m, max_size=m, unique=True))))
    if np.any(np.diff(w) <= 1e-9):
        w = np.linspace(3.5, 4.5, m)
    rad = np.array(draw(st.lists(st.floats(1e-7, 1e-3), min_size=m, max_size=m)))
    tan = np.array(draw(st.lists(st.floats(1e-7, 1e-3), min_size=m, max_size=m)))
    return EffectiveModeSet(w, rad + tan, rad - tan, (3.5, 4.5))


@SLOW
@given(omegas, st.floats(0.02, 20.0))
def test_enhancement_positive(omega, distance):
    lp, lt = enhancement_factors(omega, distance, truncation=5000)
    assert lp > 0 and lt > 0


@SLOW
@given(omegas, st.floats(100.0, 300.0))
def test_free_space_limit(omega, distance):
    lp, lt = enhancement_factors(omega, distance)
    assert abs(lp - 1) < 0.05 and abs(lt - 1) < 0.05


@SLOW
@given(st.floats(1.0, 2.0))
def test_radial_exceeds_tangential(distance):
    lp, lt = enhancement_factors(3.84, distance)
    assert lp > lt


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(3.0, 4.6), min_size=1, max_size=4, unique=True),
       st.lists(st.floats(0.5, 5.0), min_size=1, max_size=3, unique=True))
def test_table_roundtrip_and_nodes(og, dg):
    og, dg = sorted(og), sorted(dg)
    if np.any(np.diff(og) <= 0) or np.any(np.diff(dg) <= 0):
        return
    table = build_enhancement_table(SphereSpec(), og, dg)
    assert EnhancementTable.from_text(table.to_text()) == table
    i, j = len(og) // 2, len(dg) // 2
    assert table.lookup(og[i], dg[j]) == enhancement_factors(og[i], dg[j])


@SLOW
@given(st.floats(3.5, 4.5), st.floats(1.0, 1e4), st.floats(3.5, 4.5))
def test_density_scaling_and_bounds(band_tables, omega0, k, omega):
    table = band_tables(1.55)
    a = SpectralDensityModel(EmitterSpec(omega0, JAGR_TAU0), table, 1.55)
    b = SpectralDensityModel(EmitterSpec(omega0, k * JAGR_TAU0), table, 1.55)
    for comp in ("plus", "minus", "rad", "tan"):
        assert math.isclose(a.density(comp, omega) / k, b.density(comp, omega), rel_tol=1e-14)
    assert abs(a.density("minus", omega)) <= a.density("plus", omega)
    gap = a.density("rad", omega) - a.with_fca(True).density("rad", omega)
    assert np.sign(gap) == np.sign(omega - omega0)


@settings(max_examples=30, deadline=None)
@given(mode_sets(), amplitudes, st.floats(3.6, 4.4))
def test_pm_equals_dense_and_norm(modes, amps, omega0):
    init = normalized(amps)
    t = np.linspace(0, 300, 31)
    a = assemble(modes, omega0).propagate(init, t)
    b = decouple_pm(modes, omega0).propagate(init, t)
    assert np.max(np.abs(a.c1 - b.c1)) < 1e-10
    assert np.max(np.abs(a.c2 - b.c2)) < 1e-10
    assert np.max(np.abs(b.norm - 1)) < 1e-8
    assert np.all(b.total <= 1 + 1e-8)


@settings(max_examples=30, deadline=None)
@given(mode_sets(), amplitudes, st.floats(-2.0, 2.0))
def test_gauge_and_exchange(modes, amps, shift):
    a1, a2 = normalized(amps)
    t = np.linspace(0, 300, 31)
    base = decouple_pm(modes, 4.0).propagate((a1, a2), t, with_norm=False)
    moved = decouple_pm(modes.shifted(shift), 4.0 + shift).propagate((a1, a2), t, with_norm=False)
    assert np.max(np.abs(base.p1 - moved.p1)) < 1e-10
    assert np.max(np.abs(base.p2 - moved.p2)) < 1e-10
    swapped = assemble(modes, 4.0).propagate((a2, a1), t, with_norm=False)
    dense = assemble(modes, 4.0).propagate((a1, a2), t, with_norm=False)
    assert np.max(np.abs(swapped.c1 - dense.c2)) < 1e-12
    assert np.max(np.abs(swapped.c2 - dense.c1)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(mode_sets(), st.sampled_from([1, -1]), st.floats(0, 2 * math.pi))
def test_sector_preservation(modes, sign, phase):
    a = complex(math.cos(phase), math.sin(phase)) * math.sqrt(0.5)
    t = np.linspace(0, 500, 26)
    traj = assemble(modes, 4.0).propagate((a, sign * a), t, with_norm=False)
    assert np.max(np.abs(traj.c1 - sign * traj.c2)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(
    st.floats(3.6, 4.4),
    st.floats(1.0, 1e7),
    st.sampled_from(["v_circular", "linear_radial", "linear_tangential"]),
    st.sampled_from(["state1", "state2", "sis", "ais", "custom:0.6,0,0,0.8"]),
    st.integers(1, 5000),
    st.booleans(),
    st.sampled_from(["eigen", "eigen_pm", "volterra", "markov"]),
    st.floats(0.3, 10.0),
)
def test_config_echo_roundtrip(omega0, tau0, dipole, init, M, fca, solver, distance):
    if dipole != "v_circular" and init in ("sis", "ais", "state2", "custom:0.6,0,0,0.8"):
        init = "state1"
    cfg = RunConfig(omega0_ev=omega0, tau0_fs=tau0, dipole_config=dipole, init=init, M=M,
                    fca=fca, solver=solver, D_nm=distance)
    assert parse_config(echo_config(cfg)) == cfg
