import math

import numpy as np
import pytest

from plasmon_emit import (
    DomainError,
    EffectiveModeSet,
    NumericError,
    Trajectory,
    assemble,
    decouple_pm,
    discretize,
    propagate,
)
from plasmon_emit.emde import (
    TRAJECTORY_CSV_HEADER,
    ArrowheadChain,
    default_times,
    modes_from_density,
    rabi_period_fs,
)
from plasmon_emit.units import HBAR_EV_FS, fs_to_inv_ev

from conftest import JAGR_TAU0

SQ = math.sqrt(0.5)


def random_modes(rng, M=40, lo=3.5, hi=4.5):
    w = np.sort(rng.uniform(lo, hi, M))
    rad = rng.uniform(0, 1e-4, M)
    tan = rng.uniform(0, 1e-4, M)
    return EffectiveModeSet(w, rad + tan, rad - tan, (lo, hi))


def test_constant_density_midpoint_exact():
    for M in (1, 7, 100):
        modes = modes_from_density(lambda w: np.full_like(w, 0.3), lambda w: np.zeros_like(w),
                                   (3.5, 4.5), M)
        assert modes.weights_plus.sum() == pytest.approx(0.3, rel=1e-13)
        assert modes.frequencies[0] == pytest.approx(3.5 + 0.5 / M)


def test_kernel_at_zero(make_model):
    modes = discretize(make_model(3.84, JAGR_TAU0, 1.55), 101)
    kp, km = modes.kernels(0.0, 3.84)
    assert kp == pytest.approx(1j * modes.weights_plus.sum(), rel=1e-14)
    assert km == pytest.approx(1j * modes.weights_minus.sum(), rel=1e-14)


def test_kernel_self_convergence(make_model):
    model = make_model(3.84, JAGR_TAU0, 1.55)
    a, _ = discretize(model, 1001).kernels(100.0, 3.84)
    b, _ = discretize(model, 2002).kernels(100.0, 3.84)
    assert abs(a - b) / abs(b) < 1e-3


def test_discretize_rejects_bad_m(make_model):
    with pytest.raises(DomainError):
        discretize(make_model(3.84, JAGR_TAU0, 1.55), 0)


def test_mode_set_validation():
    with pytest.raises(DomainError):
        EffectiveModeSet(np.array([4.0, 3.9]), np.ones(2), np.zeros(2))
    with pytest.raises(DomainError):
        EffectiveModeSet(np.array([4.0]), np.array([1.0]), np.array([2.0]))


def test_m1_matrix_transcription():
    modes = EffectiveModeSet(np.array([4.0]), np.array([0.3]), np.array([0.1]))
    h = assemble(modes, 3.84).matrix
    expected = np.array(
        [[3.84, 0, 1, 0], [0, 3.84, 0, 1], [0.3, 0.1, 4.0, 0], [0.1, 0.3, 0, 4.0]]
    )
    assert np.array_equal(h, expected)


@pytest.mark.parametrize("M", [1, 5, 33])
def test_dimension(M):
    rng = np.random.default_rng(M)
    assert assemble(random_modes(rng, M), 4.0).matrix.shape == (2 * (M + 1),) * 2


def test_block_decoupling_without_cross_weights():
    rng = np.random.default_rng(3)
    base = random_modes(rng, 6)
    modes = EffectiveModeSet(base.frequencies, base.weights_plus, np.zeros(6))
    h = assemble(modes, 4.0).matrix
    first = [0, *range(2, 8)]
    second = [1, *range(8, 14)]
    assert np.all(h[np.ix_(first, second)] == 0)
    assert np.all(h[np.ix_(second, first)] == 0)


def test_factorization_reconstructs():
    rng = np.random.default_rng(5)
    ham = assemble(random_modes(rng, 30), 4.0)
    lam = ham.eigenvalues - ham.omega0
    recon = ham.eigenvectors @ np.diag(lam) @ ham.eigenvectors_inv
    target = ham.matrix - ham.omega0 * np.eye(ham.dimension)
    assert np.linalg.norm(recon - target) / np.linalg.norm(target) < 1e-10
    assert np.max(np.abs(ham.eigenvalues.imag)) < 1e-8 * np.max(np.abs(ham.eigenvalues))


def test_zero_weights_freeze_populations():
    modes = EffectiveModeSet(np.linspace(3.5, 4.5, 5), np.zeros(5), np.zeros(5))
    t = np.linspace(0, 500, 11)
    for system in (assemble(modes, 4.0), decouple_pm(modes, 4.0)):
        traj = system.propagate((0.6, 0.8j), t)
        assert np.allclose(traj.p1, 0.36) and np.allclose(traj.p2, 0.64)


def test_rabi_spec_example():
    modes = EffectiveModeSet(np.array([3.84]), np.array([0.01]), np.array([0.0]))
    assert rabi_period_fs(0.01) == pytest.approx(41.36, abs=0.01)
    t = np.linspace(0, 3 * 41.36, 601)
    traj = propagate(assemble(modes, 3.84), (1, 0), t)
    assert np.allclose(traj.p1, np.cos(0.1 * fs_to_inv_ev(t)) ** 2, atol=1e-10)


def test_pm_matches_dense():
    rng = np.random.default_rng(11)
    modes = random_modes(rng, 60)
    t = np.linspace(0, 300, 301)
    for init in [(1, 0), (SQ, 0.5 + 0.5j), (0.6, -0.8)]:
        a = assemble(modes, 4.0).propagate(init, t)
        b = decouple_pm(modes, 4.0).propagate(init, t)
        assert np.max(np.abs(a.c1 - b.c1)) < 1e-10
        assert np.max(np.abs(a.c2 - b.c2)) < 1e-10
        assert np.max(np.abs(a.norm - b.norm)) < 1e-10


def test_pm_chain_weights(make_model):
    model = make_model(3.84, JAGR_TAU0, 1.55)
    modes = discretize(model, 51)
    system = decouple_pm(modes, 3.84)
    rad = model.density("rad", modes.frequencies) * (1.0 / 51)
    tan = model.density("tan", modes.frequencies) * (1.0 / 51)
    assert np.allclose(system.plus.weights, 2 * rad, rtol=1e-12)
    assert np.allclose(system.minus.weights, 2 * tan, rtol=1e-12)


def test_sis_keeps_minus_sector_empty(make_model):
    modes = discretize(make_model(4.16, JAGR_TAU0, 1.55), 201)
    traj = decouple_pm(modes, 4.16).propagate((SQ, SQ), default_times(500, 1.0))
    assert np.max(np.abs(traj.c1 - traj.c2)) < 1e-10


def test_zero_weight_modes_dropped():
    modes = EffectiveModeSet(np.array([3.9, 4.0, 4.1]), np.array([1e-4, 0.0, 1e-4]),
                             np.array([0.0, 0.0, 5e-5]))
    ham = assemble(modes, 4.0)
    assert ham.M == 2
    chain = ArrowheadChain([0.1, 0.2], [0.0, 1e-4])
    assert chain.weights.size == 1


def test_trajectory_bounds_and_initial(make_model):
    modes = discretize(make_model(3.84, JAGR_TAU0, 1.55), 401)
    traj = decouple_pm(modes, 3.84).propagate((0.6, 0.8), default_times(500, 0.5))
    assert traj.p1[0] == pytest.approx(0.36, abs=1e-12)
    assert traj.p2[0] == pytest.approx(0.64, abs=1e-12)
    assert np.all(traj.total <= 1 + 1e-8)


def test_initial_normalization_checked():
    modes = EffectiveModeSet(np.array([4.0]), np.array([1e-3]), np.array([0.0]))
    with pytest.raises(DomainError):
        decouple_pm(modes, 4.0).propagate((1, 1), [0.0])


def test_default_times():
    t = default_times()
    assert t.size == 2001 and t[-1] == 500.0 and t[1] == 0.25


def test_trajectory_csv():
    t = np.array([0.0, 1.0])
    traj = Trajectory(t, np.array([1, 0.5j]), np.array([0, 0.5]), np.array([1.0, 1.0]),
                      solver="eigen", metadata={"M": 3})
    text = traj.to_csv()
    lines = text.splitlines()
    assert lines[0] == "# solver = eigen"
    assert "# M = 3" in lines
    assert TRAJECTORY_CSV_HEADER in lines
    body = lines[lines.index(TRAJECTORY_CSV_HEADER) + 1 :]
    assert body[1].split(",")[1] == f"{0.25:.12e}"
    assert text == traj.to_csv()


def test_unit_conversion_roundtrip():
    assert fs_to_inv_ev(HBAR_EV_FS) == pytest.approx(1.0, rel=1e-15)


def test_defective_matrix_rejected_by_dense_path():
    # Resonant mode with an empty plus chain: the dense matrix has a Jordan block.
    modes = EffectiveModeSet(np.array([4.0]), np.array([6.8e-169]), np.array([-6.8e-169]))
    with pytest.raises(NumericError):
        assemble(modes, 4.0).factorize()
    c0 = (math.sqrt(0.5), math.sqrt(0.5))
    traj = decouple_pm(modes, 4.0).propagate(c0, [0.0, 100.0])
    np.testing.assert_allclose(traj.c1, c0[0], atol=1e-12)
    np.testing.assert_allclose(traj.c2, c0[1], atol=1e-12)
