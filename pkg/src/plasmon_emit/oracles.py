"""Reference solvers used to check the effective-mode propagation.

``volterra_solve`` integrates the amplitude equations

    dc1/dt = i int_0^t [K+(t-s) c1(s) + K-(t-s) c2(s)] ds
    dc2/dt = i int_0^t [K-(t-s) c1(s) + K+(t-s) c2(s)] ds

directly in time. Kernels given as exponential sums
K(tau) = i sum_i W_i exp(-i z_i tau) (complex z_i allowed) are handled by a
product-integration scheme: c is taken piecewise linear on each step and
every exponential is integrated exactly against it. The history then
collapses onto running sums I_i(t) = int_0^t exp(-i z_i (t-s)) c(s) ds and a
step costs O(M). Kernels known only as callables fall back to the O(N^2)
trapezoidal product rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .emde import EffectiveModeSet, Trajectory
from .errors import DomainError, ResourceError
from .units import fs_to_inv_ev

MAX_STEPS = 1_000_000


def _phi123(x):
    """phi_1, phi_2, phi_3 of the exponential-integrator family.

    phi_1 = (e^x - 1)/x, phi_{k+1} = (phi_k - 1/k!)/x, evaluated by a
    Taylor series for small |x| to avoid cancellation.
    """
    x = np.asarray(x, dtype=complex)
    small = np.abs(x) < 0.2
    p1 = np.empty_like(x)
    p2 = np.empty_like(x)
    p3 = np.empty_like(x)
    xs = x[small]
    if xs.size:
        # phi_k(x) = sum_j x^j / (j + k)!
        s1 = np.zeros_like(xs)
        s2 = np.zeros_like(xs)
        s3 = np.zeros_like(xs)
        term = np.ones_like(xs)
        for j in range(14):
            s1 += term / math.factorial(j + 1)
            s2 += term / math.factorial(j + 2)
            s3 += term / math.factorial(j + 3)
            term = term * xs
        p1[small], p2[small], p3[small] = s1, s2, s3
    xl = x[~small]
    if xl.size:
        e = np.exp(xl)
        q1 = (e - 1) / xl
        q2 = (q1 - 1) / xl
        q3 = (q2 - 0.5) / xl
        p1[~small], p2[~small], p3[~small] = q1, q2, q3
    return p1, p2, p3


@dataclass(frozen=True, eq=False)
class KernelPair:
    """Memory kernels K+(tau), K-(tau) with tau in fs.

    Either an exponential sum (``weights_plus``, ``weights_minus`` in eV^2 and
    complex ``rates`` z_i in eV) or a pair of plain callables.
    """

    weights_plus: np.ndarray | None = None
    weights_minus: np.ndarray | None = None
    rates: np.ndarray | None = None
    plus_fn: Callable | None = None
    minus_fn: Callable | None = None

    @property
    def is_exponential(self) -> bool:
        return self.rates is not None

    @classmethod
    def from_modes(cls, modes: EffectiveModeSet, omega0: float) -> "KernelPair":
        return cls(
            np.asarray(modes.weights_plus, dtype=complex),
            np.asarray(modes.weights_minus, dtype=complex),
            np.asarray(modes.frequencies - omega0, dtype=complex),
        )

    @classmethod
    def lorentzian(cls, g2: float, kappa: float, detuning: float = 0.0) -> "KernelPair":
        """Single pseudomode: K(tau) = i g^2 exp(-i detuning tau - kappa tau / 2)."""
        return cls(
            np.array([g2], dtype=complex),
            np.array([0.0], dtype=complex),
            np.array([detuning - 0.5j * kappa]),
        )

    @classmethod
    def from_callables(cls, plus: Callable, minus: Callable | None = None) -> "KernelPair":
        if minus is None:
            def minus(tau):
                return np.zeros_like(np.asarray(tau, dtype=complex))
        return cls(plus_fn=plus, minus_fn=minus)

    def __call__(self, tau_fs):
        tau = np.asarray(tau_fs, dtype=float)
        if self.is_exponential:
            x = fs_to_inv_ev(np.atleast_1d(tau))
            e = np.exp(-1j * np.outer(x, self.rates))
            kp = 1j * e @ self.weights_plus
            km = 1j * e @ self.weights_minus
        else:
            kp = np.asarray(self.plus_fn(tau), dtype=complex)
            km = np.asarray(self.minus_fn(tau), dtype=complex)
        if tau.ndim == 0:
            return complex(np.ravel(kp)[0]), complex(np.ravel(km)[0])
        return kp, km


def volterra_solve(kernels: KernelPair, initial, dt: float, T: float) -> Trajectory:
    """Integrate the amplitude equations on the grid 0, dt, ..., T (fs)."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    if not T >= 0:
        raise DomainError("T must be non-negative")
    n_steps = int(round(T / dt))
    if n_steps > MAX_STEPS:
        raise ResourceError(f"{n_steps} steps exceed the guard of {MAX_STEPS}")
    a1, a2 = (complex(a) for a in initial)
    if kernels.is_exponential:
        c = _solve_exponential(kernels, a1, a2, dt, n_steps)
        solver = "volterra"
    else:
        c = _solve_direct(kernels, a1, a2, dt, n_steps)
        solver = "volterra_direct"
    times = np.arange(n_steps + 1) * dt
    return Trajectory(times, c[:, 0], c[:, 1], None, solver=solver)


def _solve_exponential(kernels, a1, a2, dt_fs, n_steps):
    h = fs_to_inv_ev(dt_fs)
    wp = kernels.weights_plus
    wm = kernels.weights_minus
    x = -1j * kernels.rates * h
    p1, p2, p3 = _phi123(x)
    decay = np.exp(x)
    hp1 = h * p1
    a_old = h * (p1 - p2)  # weight of c(t) in the I update
    a_new = h * p2  # weight of c(t+h)
    # int_t^{t+h} int_t^s exp(-i z (s-u)) c(u) du ds = h^2[(p2-p3) c(t) + p3 c(t+h)]
    g_old = np.array([[wp @ (h * h * (p2 - p3)), wm @ (h * h * (p2 - p3))]])
    g_new_p = wp @ (h * h * p3)
    g_new_m = wm @ (h * h * p3)
    g_old_p, g_old_m = g_old[0]
    lhs = np.array([[1 + g_new_p, g_new_m], [g_new_m, 1 + g_new_p]])
    lhs_inv = np.linalg.inv(lhs)
    rhs_old = np.array([[1 - g_old_p, -g_old_m], [-g_old_m, 1 - g_old_p]])
    wp_h = wp * hp1
    wm_h = wm * hp1

    out = np.empty((n_steps + 1, 2), dtype=complex)
    c = np.array([a1, a2])
    out[0] = c
    i1 = np.zeros_like(x)
    i2 = np.zeros_like(x)
    for n in range(n_steps):
        hist1 = wp_h @ i1 + wm_h @ i2
        hist2 = wm_h @ i1 + wp_h @ i2
        c_new = lhs_inv @ (rhs_old @ c - np.array([hist1, hist2]))
        i1 = decay * i1 + a_old * c[0] + a_new * c_new[0]
        i2 = decay * i2 + a_old * c[1] + a_new * c_new[1]
        c = c_new
        out[n + 1] = c
    return out


def _solve_direct(kernels, a1, a2, dt_fs, n_steps):
    h = fs_to_inv_ev(dt_fs)
    lags = np.arange(n_steps + 1) * dt_fs
    kp, km = kernels(lags)
    kp = np.asarray(kp, dtype=complex)
    km = np.asarray(km, dtype=complex)
    c = np.zeros((n_steps + 1, 2), dtype=complex)
    c[0] = a1, a2
    f = np.zeros((n_steps + 1, 2), dtype=complex)
    # trapezoid of i int_0^t K(t-s) c(s) ds; f_0 = 0
    for n in range(1, n_steps + 1):
        kp_rev = kp[n:0:-1]  # K(t_n - t_k), k = 0..n-1
        km_rev = km[n:0:-1]
        w = np.full(n, h)
        w[0] = 0.5 * h
        hist1 = np.sum(w * (kp_rev * c[:n, 0] + km_rev * c[:n, 1]))
        hist2 = np.sum(w * (km_rev * c[:n, 0] + kp_rev * c[:n, 1]))
        # f_n = i [hist + h/2 (K(0) c_n)] ; c_n = c_{n-1} + h/2 (f_{n-1} + f_n)
        k0p, k0m = 0.5 * h * kp[0], 0.5 * h * km[0]
        base = c[n - 1] + 0.5 * h * f[n - 1] + 0.5 * h * 1j * np.array([hist1, hist2])
        q = 0.5 * h * 1j
        mat = np.array([[1 - q * k0p, -q * k0m], [-q * k0m, 1 - q * k0p]])
        c[n] = np.linalg.solve(mat, base)
        f[n] = 1j * np.array(
            [hist1 + k0p * c[n, 0] + k0m * c[n, 1], hist2 + k0m * c[n, 0] + k0p * c[n, 1]]
        )
    return c


def lorentzian_analytic(g2: float, kappa: float, detuning: float, t_fs):
    """Exact amplitude for one Lorentzian reservoir, c(0) = 1.

    The Laplace transform of dc/dt = -g^2 int_0^t exp(-a (t-s)) c(s) ds with
    a = kappa/2 + i detuning gives C(s) = (s + a) / (s^2 + a s + g^2), so

        c(t) = exp(-a t / 2) [cosh(W t) + a / (2 W) sinh(W t)],
        W = sqrt(a^2 / 4 - g^2).
    """
    if not g2 > 0 or not kappa > 0:
        raise DomainError("g2 and kappa must be positive")
    t = fs_to_inv_ev(np.asarray(t_fs, dtype=float))
    a = 0.5 * kappa + 1j * detuning
    w = np.sqrt(a * a / 4 - g2 + 0j)
    if abs(w) < 1e-12:
        out = np.exp(-a * t / 2) * (1 + a * t / 2)
    else:
        out = np.exp(-a * t / 2) * (np.cosh(w * t) + a / (2 * w) * np.sinh(w * t))
    return complex(out) if np.ndim(out) == 0 else out


def markov_solution(j_plus: float, j_minus: float, initial, t_fs):
    """Flat-spectrum limit: amplitudes decay as exp(-pi [[J+, J-], [J-, J+]] t).

    The c_pm = (c1 +- c2)/sqrt(2) sectors decay independently at amplitude
    rates pi (J+ +- J-). Returns ``(c1, c2)`` arrays.
    """
    if j_plus < 0 or abs(j_minus) > j_plus:
        raise DomainError("densities must satisfy J+ >= |J-| >= 0")
    a1, a2 = (complex(a) for a in initial)
    t = fs_to_inv_ev(np.asarray(t_fs, dtype=float))
    ep = np.exp(-np.pi * (j_plus + j_minus) * t)
    em = np.exp(-np.pi * (j_plus - j_minus) * t)
    cp = (a1 + a2) / 2 * ep
    cm = (a1 - a2) / 2 * em
    return cp + cm, cp - cm
