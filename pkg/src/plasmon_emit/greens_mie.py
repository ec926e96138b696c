"""Drude permittivity and Purcell enhancement of a dipole outside a metal sphere.

The enhancement factors are the total (radiative + Ohmic) decay rates of a
radial and a tangential dipole on the sphere's z axis, normalized to the
decay rate in the unbounded background medium. They follow from the
scattered part of the dyadic Green's function at the source point, expanded
in vector spherical harmonics:

    G_perp / G0 = 1 - 3/2 Re sum_n n(n+1)(2n+1) a_n [xi_n(y) / y^2]^2
    G_par  / G0 = 1 - 3/4 Re sum_n (2n+1) { a_n [xi_n'(y) / y]^2 + b_n [xi_n(y) / y]^2 }

with a_n, b_n the Bohren-Huffman electric and magnetic scattering
coefficients, xi_n(z) = z h_n^(1)(z) and y = k r.

For a nanometre sphere the size parameter is ~0.1 and the series needs
dozens of orders: psi_n(x) underflows and xi_n(y)^2 overflows long before the
products do. Everything is therefore assembled from ratios,

    a_n xi_n(y)^2 = T_n * [psi_n(x) xi_n(x)] * [xi_n(y) / xi_n(x)]^2,

where each bracket is a product of O(1) consecutive ratios: psi_n/psi_{n-1}
from downward recurrence, xi_n/xi_{n-1} from upward recurrence and the
logarithmic derivative D_n(mx) from downward recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, DomainError, ParseError, RangeError
from .io_utils import atomic_write_text
from .units import HBARC_EV_NM

__all__ = [
    "SphereSpec",
    "EnhancementTable",
    "MieSeriesResult",
    "drude_epsilon",
    "lsp_resonances",
    "enhancement_factors",
    "mie_decay_series",
    "build_enhancement_table",
    "DEFAULT_SPHERE",
]

HARD_CAP = 200
DEFAULT_TOL = 1e-6
CACHE_MAGIC = "# plasmon-emit enhancement-table v1"


@dataclass(frozen=True)
class SphereSpec:
    """Nanosphere geometry and Drude parameters.

    Attributes
    ----------
    radius : float
        Sphere radius in nm.
    omega_p : float
        Plasma frequency in eV.
    eps_inf : float
        High-frequency permittivity (dimensionless).
    gamma : float
        Drude damping in eV.
    eps_background : float
        Permittivity of the embedding medium.
    """

    radius: float = 5.0
    omega_p: float = 9.176
    eps_inf: float = 3.718
    gamma: float = 0.021
    eps_background: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"radius must be positive, got {self.radius}")
        if not self.omega_p > 0:
            raise DomainError(f"omega_p must be positive, got {self.omega_p}")
        if not self.gamma >= 0:
            raise DomainError(f"gamma must be non-negative, got {self.gamma}")
        if not self.eps_inf >= 1:
            raise DomainError(f"eps_inf must be >= 1, got {self.eps_inf}")
        if not self.eps_background >= 1:
            raise DomainError(f"eps_background must be >= 1, got {self.eps_background}")


DEFAULT_SPHERE = SphereSpec()


def drude_epsilon(omega, sphere: SphereSpec = DEFAULT_SPHERE):
    """Drude permittivity eps_inf - omega_p^2 / (omega^2 + i omega gamma)."""
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError("omega must be positive")
    eps = sphere.eps_inf - sphere.omega_p**2 / (w**2 + 1j * w * sphere.gamma)
    if sphere.gamma == 0:
        eps = eps.real + 0j
    return eps[()] if eps.ndim == 0 else eps


def lsp_resonances(sphere: SphereSpec, n_max: int) -> list[float]:
    """Quasi-static multipole plasmon energies (eV) for orders 1..n_max.

    Solves Re eps(omega) = -(n+1)/n * eps_background for a lossless Drude
    metal. The sequence increases towards omega_p / sqrt(eps_inf + eps_b).
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    eb = sphere.eps_background
    return [
        sphere.omega_p / math.sqrt(sphere.eps_inf + (n + 1) / n * eb)
        for n in range(1, n_max + 1)
    ]


@dataclass(frozen=True)
class MieSeriesResult:
    lambda_perp: np.ndarray
    lambda_par: np.ndarray
    n_terms: int
    last_increment: float


def _psi_ratios(x, n_top):
    # r[n] = psi_n(x) / psi_{n-1}(x); downward recurrence is stable for psi.
    r = np.zeros((n_top + 2,) + x.shape)
    for n in range(n_top, 0, -1):
        r[n] = 1.0 / ((2 * n + 1) / x - r[n + 1])
    return r


def _log_derivative(z, n_top):
    # D_n(z) = psi_n'(z) / psi_n(z), downward recurrence.
    d = np.zeros((n_top + 1,) + z.shape, dtype=complex)
    for n in range(n_top, 0, -1):
        d[n - 1] = n / z - 1.0 / (d[n] + n / z)
    return d


def mie_decay_series(
    omega,
    distance,
    sphere: SphereSpec = DEFAULT_SPHERE,
    truncation: int = HARD_CAP,
    tol: float = DEFAULT_TOL,
) -> MieSeriesResult:
    """Sum the multipole series for both orientations with adaptive truncation.

    ``omega`` and ``distance`` broadcast against each other. The series is
    extended order by order until the relative change of every requested
    enhancement factor stays below ``tol`` for two consecutive orders, or
    until ``truncation`` orders have been summed.
    """
    w, dist = np.broadcast_arrays(
        np.asarray(omega, dtype=float), np.asarray(distance, dtype=float)
    )
    # 0-d inputs take numpy's scalar loops, which round differently from the
    # array loops; evaluating on 1-d arrays keeps table nodes bit-identical.
    shape = w.shape
    w, dist = np.atleast_1d(w).ravel(), np.atleast_1d(dist).ravel()
    if np.any(~(dist > 0)):
        raise DomainError("distance D must be positive")
    if truncation < 1:
        raise DomainError("truncation must be >= 1")
    eps = np.asarray(drude_epsilon(w, sphere), dtype=complex)
    eb = sphere.eps_background
    m = np.sqrt(eps / eb)
    k = math.sqrt(eb) * w / HBARC_EV_NM
    x = k * sphere.radius
    y = k * (sphere.radius + dist)

    n_top = truncation + 30 + int(np.max(x) + 4 * np.max(x) ** (1 / 3))
    r = _psi_ratios(x, n_top)
    dn = _log_derivative(m * x, n_top)

    sx = -1j * np.ones_like(x, dtype=complex)  # xi_0 / xi_{-1}
    sy = -1j * np.ones_like(y, dtype=complex)
    pxi = np.sin(x) * (-1j * np.exp(1j * x))  # psi_n(x) xi_n(x)
    ratio = np.exp(1j * (y - x))  # xi_n(y) / xi_n(x)
    s_perp = np.zeros(w.shape, dtype=complex)
    s_par = np.zeros(w.shape, dtype=complex)
    lam_perp = np.ones(w.shape)
    lam_par = np.ones(w.shape)
    # Each element stops on its own so results do not depend on batching.
    quiet = np.zeros(w.shape, dtype=int)
    live = np.ones(w.shape, dtype=bool)
    last = np.full(w.shape, np.inf)
    n = 0
    for n in range(1, truncation + 1):
        sx = (2 * n - 1) / x - 1.0 / sx
        sy = (2 * n - 1) / y - 1.0 / sy
        pxi = pxi * r[n] * sx
        ratio = ratio * sy / sx
        inv_r = 1.0 / r[n]
        inv_s = 1.0 / sx
        ea = dn[n] / m + n / x
        eb_ = m * dn[n] + n / x
        ta = (ea - inv_r) / (ea - inv_s)
        tb = (eb_ - inv_r) / (eb_ - inv_s)
        xy2 = pxi * ratio**2 / y**2  # psi_n(x) xi_n(x) (xi_n(y)/xi_n(x))^2 / y^2
        a_term = ta * xy2
        b_term = tb * xy2
        dlog = 1.0 / sy - n / y  # xi_n'(y) / xi_n(y)
        t_perp = n * (n + 1) * (2 * n + 1) * a_term / y**2
        t_par = (2 * n + 1) * (a_term * dlog**2 + b_term)
        s_perp = np.where(live, s_perp + t_perp, s_perp)
        s_par = np.where(live, s_par + t_par, s_par)
        new_perp = 1.0 - 1.5 * s_perp.real
        new_par = 1.0 - 0.75 * s_par.real
        inc = np.maximum(
            np.abs(new_perp - lam_perp) / np.abs(new_perp),
            np.abs(new_par - lam_par) / np.abs(new_par),
        )
        last = np.where(live, inc, last)
        lam_perp, lam_par = new_perp, new_par
        quiet = np.where(live & (inc < tol), quiet + 1, np.where(live, 0, quiet))
        live &= quiet < 2
        if not live.any():
            break
    else:
        worst = float(np.max(last))
        raise ConvergenceError(
            f"Mie series not converged after {truncation} orders "
            f"(last relative increment {worst:.3e})",
            last_increment=worst,
        )
    inc = float(np.max(last))
    return MieSeriesResult(lam_perp.reshape(shape), lam_par.reshape(shape), n, inc)


def enhancement_factors(
    omega,
    distance,
    sphere: SphereSpec = DEFAULT_SPHERE,
    truncation: int = HARD_CAP,
):
    """Radial and tangential decay-rate enhancement (lambda_perp, lambda_par).

    Parameters
    ----------
    omega : float or array_like
        Transition energy in eV.
    distance : float or array_like
        Surface-to-emitter distance D in nm; the emitter sits at
        r = radius + D on the z axis.
    sphere : SphereSpec
    truncation : int
        Hard cap on the number of multipole orders.

    Returns
    -------
    tuple
        ``(lambda_perp, lambda_par)``, scalars or arrays following the
        broadcast shape of the inputs.
    """
    res = mie_decay_series(omega, distance, sphere, truncation)
    lp, lt = res.lambda_perp, res.lambda_par
    if lp.ndim == 0:
        return float(lp), float(lt)
    return lp, lt


def _check_grid(values, name, positive=False):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-D sequence")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise DomainError(f"{name} must be strictly increasing")
    if positive and np.any(arr <= 0):
        raise DomainError(f"{name} must be positive")
    return arr


def _bracket(grid, q, name):
    if grid.size == 1:
        if q != grid[0]:
            raise RangeError(f"{name}={q} outside single-node grid {grid[0]}")
        return 0, 0, 0.0
    if q < grid[0] or q > grid[-1]:
        raise RangeError(f"{name}={q} outside grid [{grid[0]}, {grid[-1]}]")
    i = int(np.searchsorted(grid, q, side="right")) - 1
    i = min(i, grid.size - 2)
    t = (q - grid[i]) / (grid[i + 1] - grid[i])
    return i, i + 1, t


@dataclass(frozen=True, eq=False)
class EnhancementTable:
    """Gridded enhancement factors with bilinear lookup.

    ``lambda_perp[i, j]`` belongs to ``omega_grid[i]`` and ``distance_grid[j]``.
    A grid axis may hold a single node, in which case queries along it must
    hit that node exactly.
    """

    sphere: SphereSpec
    omega_grid: np.ndarray
    distance_grid: np.ndarray
    lambda_perp: np.ndarray
    lambda_par: np.ndarray
    truncation: int = HARD_CAP
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        og = _check_grid(self.omega_grid, "omega_grid", positive=True)
        dg = _check_grid(self.distance_grid, "distance_grid", positive=True)
        lp = np.array(self.lambda_perp, dtype=float)
        lt = np.array(self.lambda_par, dtype=float)
        shape = (og.size, dg.size)
        if lp.shape != shape or lt.shape != shape:
            raise DomainError(f"factor matrices must have shape {shape}")
        if np.any(~(lp > 0)) or np.any(~(lt > 0)):
            raise DomainError("enhancement factors must be positive")
        for arr in (og, dg, lp, lt):
            arr.flags.writeable = False
        object.__setattr__(self, "omega_grid", og)
        object.__setattr__(self, "distance_grid", dg)
        object.__setattr__(self, "lambda_perp", lp)
        object.__setattr__(self, "lambda_par", lt)

    def __eq__(self, other):
        if not isinstance(other, EnhancementTable):
            return NotImplemented
        return (
            self.sphere == other.sphere
            and self.truncation == other.truncation
            and self.tolerance == other.tolerance
            and np.array_equal(self.omega_grid, other.omega_grid)
            and np.array_equal(self.distance_grid, other.distance_grid)
            and np.array_equal(self.lambda_perp, other.lambda_perp)
            and np.array_equal(self.lambda_par, other.lambda_par)
        )

    def lookup(self, omega: float, distance: float):
        """Bilinear interpolation of ``(lambda_perp, lambda_par)``."""
        i0, i1, u = _bracket(self.omega_grid, float(omega), "omega")
        j0, j1, v = _bracket(self.distance_grid, float(distance), "distance")
        out = []
        for tab in (self.lambda_perp, self.lambda_par):
            val = (
                (1 - u) * (1 - v) * tab[i0, j0]
                + u * (1 - v) * tab[i1, j0]
                + (1 - u) * v * tab[i0, j1]
                + u * v * tab[i1, j1]
            )
            out.append(float(val))
        return tuple(out)

    def lookup_many(self, omega, distance: float):
        """Vectorized lookup over an array of energies at one distance."""
        w = np.asarray(omega, dtype=float)
        og = self.omega_grid
        j0, j1, v = _bracket(self.distance_grid, float(distance), "distance")
        if og.size == 1:
            if np.any(w != og[0]):
                raise RangeError("omega outside single-node grid")
            i0 = np.zeros(w.shape, dtype=int)
            i1, u = i0, np.zeros(w.shape)
        else:
            if np.any(w < og[0]) or np.any(w > og[-1]):
                raise RangeError(f"omega outside grid [{og[0]}, {og[-1]}]")
            i0 = np.clip(np.searchsorted(og, w, side="right") - 1, 0, og.size - 2)
            i1 = i0 + 1
            u = (w - og[i0]) / (og[i1] - og[i0])
        res = []
        for tab in (self.lambda_perp, self.lambda_par):
            col0 = (1 - u) * tab[i0, j0] + u * tab[i1, j0]
            col1 = (1 - u) * tab[i0, j1] + u * tab[i1, j1]
            res.append((1 - v) * col0 + v * col1)
        return res[0], res[1]

    # -- serialization ---------------------------------------------------

    def to_text(self) -> str:
        s = self.sphere
        lines = [
            CACHE_MAGIC,
            f"radius_nm = {s.radius!r}",
            f"omega_p_ev = {s.omega_p!r}",
            f"eps_inf = {s.eps_inf!r}",
            f"gamma_ev = {s.gamma!r}",
            f"eps_background = {s.eps_background!r}",
            f"truncation = {self.truncation}",
            f"tolerance = {self.tolerance!r}",
            f"n_omega = {self.omega_grid.size}",
            f"n_distance = {self.distance_grid.size}",
            "[omega_grid]",
            " ".join(repr(float(v)) for v in self.omega_grid),
            "[distance_grid]",
            " ".join(repr(float(v)) for v in self.distance_grid),
        ]
        for name, tab in (("lambda_perp", self.lambda_perp), ("lambda_par", self.lambda_par)):
            lines.append(f"[{name}]")
            lines.extend(" ".join(repr(float(v)) for v in row) for row in tab)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EnhancementTable":
        lines = text.splitlines()
        if not lines or lines[0].strip() != CACHE_MAGIC:
            raise ParseError("not an enhancement-table cache (bad header)", line=1)
        header = {}
        idx = 1
        while idx < len(lines) and not lines[idx].startswith("["):
            if lines[idx].strip():
                key, _, val = lines[idx].partition("=")
                header[key.strip()] = val.strip()
            idx += 1
        try:
            sphere = SphereSpec(
                radius=float(header["radius_nm"]),
                omega_p=float(header["omega_p_ev"]),
                eps_inf=float(header["eps_inf"]),
                gamma=float(header["gamma_ev"]),
                eps_background=float(header["eps_background"]),
            )
            n_w = int(header["n_omega"])
            n_d = int(header["n_distance"])
            truncation = int(header["truncation"])
            tolerance = float(header["tolerance"])
        except KeyError as exc:
            raise ParseError("missing header field", key=exc.args[0]) from None
        sections = {}
        current = None
        for line in lines[idx:]:
            if line.startswith("["):
                current = line.strip("[] \n")
                sections[current] = []
            elif line.strip():
                sections[current].append([float(v) for v in line.split()])
        og = np.array(sections["omega_grid"][0])
        dg = np.array(sections["distance_grid"][0])
        lp = np.array(sections["lambda_perp"]).reshape(n_w, n_d)
        lt = np.array(sections["lambda_par"]).reshape(n_w, n_d)
        return cls(sphere, og, dg, lp, lt, truncation, tolerance)

    def save(self, path) -> None:
        atomic_write_text(path, self.to_text())

    @classmethod
    def load(cls, path) -> "EnhancementTable":
        return cls.from_text(Path(path).read_text())

    def to_csv(self) -> str:
        rows = ["omega_ev,D_nm,lambda_perp,lambda_par"]
        for i, w in enumerate(self.omega_grid):
            for j, d in enumerate(self.distance_grid):
                rows.append(
                    f"{w:.6f},{d:.6f},{self.lambda_perp[i, j]:.10e},{self.lambda_par[i, j]:.10e}"
                )
        return "\n".join(rows) + "\n"

    def matches(self, sphere, omega_grid, distance_grid, truncation=HARD_CAP) -> bool:
        return (
            self.sphere == sphere
            and self.truncation == truncation
            and np.array_equal(self.omega_grid, np.asarray(omega_grid, dtype=float))
            and np.array_equal(self.distance_grid, np.asarray(distance_grid, dtype=float))
        )


def build_enhancement_table(
    sphere: SphereSpec,
    omega_grid,
    distance_grid,
    truncation: int = HARD_CAP,
) -> EnhancementTable:
    og = _check_grid(omega_grid, "omega_grid", positive=True)
    dg = _check_grid(distance_grid, "distance_grid", positive=True)
    lp = np.empty((og.size, dg.size))
    lt = np.empty_like(lp)
    # One distance column at a time keeps the adaptive truncation local.
    for j, d in enumerate(dg):
        res = mie_decay_series(og, d, sphere, truncation)
        lp[:, j] = res.lambda_perp
        lt[:, j] = res.lambda_par
    return EnhancementTable(sphere, og, dg, lp, lt, truncation, DEFAULT_TOL)


def load_or_build_table(
    sphere: SphereSpec,
    omega_grid,
    distance_grid,
    cache_path=None,
    truncation: int = HARD_CAP,
) -> EnhancementTable:
    """Reuse a cached table when its provenance and grids match exactly."""
    if cache_path is not None and Path(cache_path).exists():
        try:
            table = EnhancementTable.load(cache_path)
        except (ParseError, ValueError, KeyError):
            table = None
        if table is not None and table.matches(sphere, omega_grid, distance_grid, truncation):
            return table
    table = build_enhancement_table(sphere, omega_grid, distance_grid, truncation)
    if cache_path is not None:
        table.save(cache_path)
    return table
