"""Effective-mode expansion of the memory kernels and eigen-propagation.

The kernels K+(tau), K-(tau) are replaced by sums over M discrete modes,

    K(tau) = i sum_i W_i exp(-i (omega_i - omega0) tau),

which turns the two Volterra equations for (c1, c2) into a linear system of
dimension 2(M+1) with a constant matrix

    H = [[S, Y],      S = omega0 * I_2,  R = diag(omega_1..omega_M) (twice),
         [Z, R]]      Y = two rows of ones, Z rows (W+, W-) then (W-, W+).

The state evolves as C(t) = exp(-i H t) C(0) with the auxiliary amplitudes
starting at zero. H is not normal, so the propagator uses the right
eigenvectors L and the explicit inverse L^-1.

Rotating to c_pm = (c1 +- c2)/sqrt(2) splits the system into two chains with
nonnegative weights W+ +- W- (= 2 W_rad, 2 W_tan). Scaling each auxiliary
amplitude by 1/sqrt(weight) makes a chain a real symmetric arrowhead matrix,
which is the default solver path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import __version__
from .errors import DomainError, NumericError
from .units import HBAR_EV_FS, fs_to_inv_ev

SQRT_HALF = math.sqrt(0.5)
TRAJECTORY_CSV_HEADER = "t_fs,p1,p2,re_c1,im_c1,re_c2,im_c2,norm"


@dataclass(frozen=True, eq=False)
class EffectiveModeSet:
    """Discrete modes with frequencies in eV and weights in eV^2."""

    frequencies: np.ndarray
    weights_plus: np.ndarray
    weights_minus: np.ndarray
    band: tuple = (None, None)

    def __post_init__(self):
        w = np.asarray(self.frequencies, dtype=float)
        wp = np.asarray(self.weights_plus, dtype=float)
        wm = np.asarray(self.weights_minus, dtype=float)
        if w.ndim != 1 or wp.shape != w.shape or wm.shape != w.shape:
            raise DomainError("frequencies and weights must be 1-D arrays of equal length")
        if w.size > 1 and np.any(np.diff(w) <= 0):
            raise DomainError("mode frequencies must be strictly increasing")
        if np.any(wp < 0) or np.any(np.abs(wm) > wp * (1 + 1e-12)):
            raise DomainError("weights must satisfy W+ >= |W-| >= 0")
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "weights_plus", wp)
        object.__setattr__(self, "weights_minus", wm)

    @property
    def M(self) -> int:
        return self.frequencies.size

    def kernels(self, tau_fs, omega0: float):
        """Reconstructed kernels ``(K+(tau), K-(tau))`` at delays in fs."""
        tau = fs_to_inv_ev(np.atleast_1d(np.asarray(tau_fs, dtype=float)))
        phase = np.exp(-1j * np.outer(tau, self.frequencies - omega0))
        kp = 1j * phase @ self.weights_plus
        km = 1j * phase @ self.weights_minus
        if np.ndim(tau_fs) == 0:
            return complex(kp[0]), complex(km[0])
        return kp, km

    def shifted(self, delta: float) -> "EffectiveModeSet":
        return EffectiveModeSet(
            self.frequencies + delta, self.weights_plus, self.weights_minus, self.band
        )


def discretize(model, M: int) -> EffectiveModeSet:
    """Midpoint-rule discretization of the model's band into M modes."""
    if int(M) != M or M < 1:
        raise DomainError(f"M must be a positive integer, got {M}")
    M = int(M)
    lo, hi = model.band
    dw = (hi - lo) / M
    freqs = lo + (np.arange(M) + 0.5) * dw
    j_diag, j_cross = model.coupling_densities(freqs)
    return EffectiveModeSet(freqs, j_diag * dw, j_cross * dw, (lo, hi))


def modes_from_density(density_plus, density_minus, band, M: int) -> EffectiveModeSet:
    """Discretize arbitrary callables J+(omega), J-(omega) on ``band``."""
    if int(M) != M or M < 1:
        raise DomainError(f"M must be a positive integer, got {M}")
    lo, hi = band
    dw = (hi - lo) / M
    freqs = lo + (np.arange(M) + 0.5) * dw
    jp = np.broadcast_to(np.asarray(density_plus(freqs), dtype=float), freqs.shape)
    jm = np.broadcast_to(np.asarray(density_minus(freqs), dtype=float), freqs.shape)
    return EffectiveModeSet(freqs, jp * dw, jm * dw, (lo, hi))


# -- trajectory -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray  # fs
    c1: np.ndarray
    c2: np.ndarray
    norm: np.ndarray | None = None
    solver: str = ""
    metadata: dict = field(default_factory=dict)

    @property
    def p1(self):
        return np.abs(self.c1) ** 2

    @property
    def p2(self):
        return np.abs(self.c2) ** 2

    @property
    def total(self):
        return self.p1 + self.p2

    def to_csv(self, extra_metadata=None) -> str:
        meta = {"solver": self.solver, "code_version": __version__}
        meta.update(self.metadata)
        if extra_metadata:
            meta.update(extra_metadata)
        lines = [f"# {k} = {v}" for k, v in meta.items()]
        lines.append(TRAJECTORY_CSV_HEADER)
        norm = self.norm if self.norm is not None else np.full(self.times.shape, np.nan)
        for t, a, b, n in zip(self.times, self.c1, self.c2, norm):
            lines.append(
                f"{t:.6f},{abs(a) ** 2:.12e},{abs(b) ** 2:.12e},"
                f"{a.real:.12e},{a.imag:.12e},{b.real:.12e},{b.imag:.12e},{n:.12e}"
            )
        return "\n".join(lines) + "\n"


def _as_times(times_fs):
    t = np.atleast_1d(np.asarray(times_fs, dtype=float))
    if t.ndim != 1:
        raise DomainError("times must be a 1-D sequence")
    return t


def _initial_pair(initial):
    a1, a2 = (complex(a) for a in initial)
    if abs(abs(a1) ** 2 + abs(a2) ** 2 - 1.0) > 1e-10:
        raise DomainError("initial amplitudes must satisfy |a1|^2 + |a2|^2 = 1")
    return a1, a2


def default_times(t_max_fs=500.0, dt_fs=0.25):
    n = int(round(t_max_fs / dt_fs))
    return np.arange(n + 1) * dt_fs


# -- dense non-Hermitian route ---------------------------------------------


class EffectiveHamiltonian:
    """The 2(M+1)-dimensional matrix of the effective-mode equations.

    Ordering is (c1, c2, J_1^1..J_M^1, J_1^2..J_M^2). Modes with vanishing
    W+ and W- are dropped. The eigen-factorization is computed on demand and
    cached; it belongs to the matrix shifted by -omega0 on the diagonal,
    while ``eigenvalues`` are reported for the unshifted matrix.
    """

    def __init__(self, modes: EffectiveModeSet, omega0: float):
        keep = (modes.weights_plus != 0) | (modes.weights_minus != 0)
        self.omega0 = float(omega0)
        self.frequencies = modes.frequencies[keep]
        self.weights_plus = modes.weights_plus[keep]
        self.weights_minus = modes.weights_minus[keep]
        self.M = int(self.frequencies.size)
        self._eigvals = None
        self._eigvecs = None
        self._inv = None

    @property
    def dimension(self) -> int:
        return 2 * (self.M + 1)

    def _build(self, shift: float) -> np.ndarray:
        M = self.M
        n = 2 * (M + 1)
        h = np.zeros((n, n))
        h[0, 0] = h[1, 1] = self.omega0 - shift
        idx1 = np.arange(2, M + 2)
        idx2 = np.arange(M + 2, 2 * M + 2)
        h[0, idx1] = 1.0
        h[1, idx2] = 1.0
        h[idx1, idx1] = self.frequencies - shift
        h[idx2, idx2] = self.frequencies - shift
        h[idx1, 0] = self.weights_plus
        h[idx1, 1] = self.weights_minus
        h[idx2, 0] = self.weights_minus
        h[idx2, 1] = self.weights_plus
        return h

    @property
    def matrix(self) -> np.ndarray:
        return self._build(0.0)

    def factorize(self) -> "EffectiveHamiltonian":
        if self._eigvals is not None:
            return self
        hs = self._build(self.omega0)
        try:
            vals, vecs = sla.eig(hs, check_finite=True)
            inv = sla.inv(vecs)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericError(f"eigendecomposition failed: {exc}") from exc
        scale = max(np.max(np.abs(hs)), 1e-300)
        resid = np.linalg.norm(hs @ vecs - vecs * vals, axis=0) / scale
        if not np.all(np.isfinite(resid)) or np.max(resid) > 1e-8:
            raise NumericError(
                f"eigenpairs inaccurate (max residual {np.max(resid):.3e})", residuals=resid
            )
        # A defective matrix (a chain weight W+ +- W- vanishing) still passes
        # the eigenpair residual but not the reconstruction.
        recon = (vecs * vals) @ inv
        err = np.linalg.norm(recon - hs) / max(np.linalg.norm(hs), 1e-300)
        if not np.isfinite(err) or err > 1e-10:
            raise NumericError(
                f"eigenvector matrix ill-conditioned (reconstruction error {err:.3e}); "
                "use the eigen_pm route",
                residuals=resid,
            )
        self._eigvals = vals
        self._eigvecs = vecs
        self._inv = inv
        return self

    @property
    def eigenvalues(self):
        self.factorize()
        return self._eigvals + self.omega0

    @property
    def eigenvectors(self):
        self.factorize()
        return self._eigvecs

    @property
    def eigenvectors_inv(self):
        self.factorize()
        return self._inv

    def propagate(self, initial, times_fs, with_norm: bool = True) -> Trajectory:
        self.factorize()
        a1, a2 = _initial_pair(initial)
        t = _as_times(times_fs)
        c0 = np.zeros(self.dimension, dtype=complex)
        c0[0], c0[1] = a1, a2
        coeff = self._inv @ c0
        phases = np.exp(-1j * np.outer(fs_to_inv_ev(t), self._eigvals)) * coeff
        c12 = phases @ self._eigvecs[:2].T
        norm = None
        if with_norm:
            norm = self._norm(phases)
        return Trajectory(t, c12[:, 0], c12[:, 1], norm, solver="eigen")

    def _norm(self, phases):
        M = self.M
        wp = self.weights_plus + self.weights_minus
        wm = self.weights_plus - self.weights_minus
        keep_p = wp > 0
        keep_m = wm > 0
        out = np.empty(phases.shape[0])
        step = 256
        for s in range(0, phases.shape[0], step):
            x = phases[s : s + step] @ self._eigvecs.T
            u1 = x[:, 2 : M + 2]
            u2 = x[:, M + 2 :]
            bp = (u1 + u2)[:, keep_p] * SQRT_HALF / np.sqrt(wp[keep_p])
            bm = (u1 - u2)[:, keep_m] * SQRT_HALF / np.sqrt(wm[keep_m])
            out[s : s + step] = (
                np.abs(x[:, 0]) ** 2
                + np.abs(x[:, 1]) ** 2
                + np.sum(np.abs(bp) ** 2, axis=1)
                + np.sum(np.abs(bm) ** 2, axis=1)
            )
        return out


def assemble(modes: EffectiveModeSet, omega0: float) -> EffectiveHamiltonian:
    return EffectiveHamiltonian(modes, omega0)


# -- decoupled +- arrowhead route --------------------------------------------


class ArrowheadChain:
    """One emitter amplitude coupled to a chain of modes with weights w_i >= 0.

    In scaled coordinates b_i = J_i / sqrt(w_i) the generator is the real
    symmetric arrowhead [[0, sqrt(w)^T], [sqrt(w), diag(detuning)]].
    """

    def __init__(self, detunings, weights):
        detunings = np.asarray(detunings, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < 0):
            raise DomainError("chain weights must be nonnegative")
        keep = weights > 0
        self.detunings = detunings[keep]
        self.weights = weights[keep]
        n = self.weights.size + 1
        a = np.zeros((n, n))
        a[0, 1:] = a[1:, 0] = np.sqrt(self.weights)
        a[np.arange(1, n), np.arange(1, n)] = self.detunings
        try:
            self.eigenvalues, self.eigenvectors = sla.eigh(a, check_finite=True)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericError(f"symmetric eigensolver failed: {exc}") from exc
        self.matrix = a

    def evolve(self, amplitude, t_inv_ev, with_state: bool = False):
        """Emitter amplitude (and optionally the whole scaled state) at times t."""
        v0 = self.eigenvectors[0]
        phases = np.exp(-1j * np.outer(t_inv_ev, self.eigenvalues))
        c = (phases @ (v0 * v0)) * amplitude
        if not with_state:
            return c, None
        norm = np.empty(t_inv_ev.size)
        step = 256
        for s in range(0, t_inv_ev.size, step):
            x = (phases[s : s + step] * v0) @ self.eigenvectors.T
            norm[s : s + step] = np.sum(np.abs(x) ** 2, axis=1)
        return c, norm * abs(amplitude) ** 2


class DecoupledSystem:
    """The +- chains obtained from a mode set; solver id ``eigen_pm``."""

    def __init__(self, modes: EffectiveModeSet, omega0: float):
        self.omega0 = float(omega0)
        det = modes.frequencies - self.omega0
        self.plus = ArrowheadChain(det, modes.weights_plus + modes.weights_minus)
        self.minus = ArrowheadChain(det, modes.weights_plus - modes.weights_minus)

    def propagate(self, initial, times_fs, with_norm: bool = True) -> Trajectory:
        a1, a2 = _initial_pair(initial)
        t = _as_times(times_fs)
        tau = fs_to_inv_ev(t)
        ap = (a1 + a2) * SQRT_HALF
        am = (a1 - a2) * SQRT_HALF
        cp, np_ = self.plus.evolve(ap, tau, with_norm)
        cm, nm_ = self.minus.evolve(am, tau, with_norm)
        c1 = (cp + cm) * SQRT_HALF
        c2 = (cp - cm) * SQRT_HALF
        norm = np_ + nm_ if with_norm else None
        return Trajectory(t, c1, c2, norm, solver="eigen_pm")


def decouple_pm(modes: EffectiveModeSet, omega0: float) -> DecoupledSystem:
    return DecoupledSystem(modes, omega0)


def propagate(system, initial, times_fs, with_norm: bool = True) -> Trajectory:
    """Evaluate a factorized system at arbitrary times (no time stepping)."""
    return system.propagate(initial, times_fs, with_norm=with_norm)


def rabi_period_fs(weight: float) -> float:
    """Amplitude period 2 pi / sqrt(W) of a single resonant mode, in fs."""
    return 2 * math.pi / math.sqrt(weight) * HBAR_EV_FS
