"""Spectral densities of the emitter's coupling to the plasmon-modified vacuum.

For a circular V-type emitter the diagonal and cross memory kernels are driven
by J_plus = J_rad + J_tan and J_minus = J_rad - J_tan, with

    J_rad(omega) = Gamma0(omega0) / (2 pi) * lambda_perp(omega, D) / 2 * s(omega)
    J_tan(omega) = Gamma0(omega0) / (2 pi) * lambda_par(omega, D) / 2 * s(omega)

where s = (omega / omega0)^3, or s = 1 under the flat continuum
approximation (FCA). Densities carry units of eV (hbar = 1) so that
J * d(omega) has units of eV^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, RangeError
from .greens_mie import EnhancementTable
from .units import HBAR_EV_FS

DIPOLE_CONFIGS = ("v_circular", "linear_radial", "linear_tangential")
COMPONENTS = ("plus", "minus", "rad", "tan")
DEFAULT_BAND = (3.5, 4.5)


@dataclass(frozen=True)
class EmitterSpec:
    """Emitter parameters.

    ``tau0`` is the free-space lifetime in fs; it absorbs the dipole
    magnitude so that Gamma0(omega0) = hbar / tau0.
    """

    omega0: float
    tau0: float
    dipole_config: str = "v_circular"
    initial_amplitudes: tuple = (1.0 + 0j, 0.0 + 0j)

    def __post_init__(self):
        if not self.omega0 > 0:
            raise DomainError(f"omega0 must be positive, got {self.omega0}")
        if not self.tau0 > 0:
            raise DomainError(f"tau0 must be positive, got {self.tau0}")
        if self.dipole_config not in DIPOLE_CONFIGS:
            raise ConfigError(f"unknown dipole_config {self.dipole_config!r}")
        a1, a2 = (complex(a) for a in self.initial_amplitudes)
        if self.dipole_config != "v_circular":
            a2 = 0j
        norm = abs(a1) ** 2 + abs(a2) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"initial amplitudes not normalized (|a1|^2+|a2|^2 = {norm!r})")
        object.__setattr__(self, "initial_amplitudes", (a1, a2))

    @property
    def gamma0(self) -> float:
        """Free-space decay rate at omega0 in eV."""
        return HBAR_EV_FS / self.tau0


def gamma0(omega, emitter: EmitterSpec):
    """Free-space decay rate Gamma0(omega0) (omega/omega0)^3 in eV."""
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError("omega must be positive")
    out = emitter.gamma0 * (w / emitter.omega0) ** 3
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectralDensityModel:
    emitter: EmitterSpec
    table: EnhancementTable = field(repr=False)
    distance: float
    band: tuple = DEFAULT_BAND
    fca: bool = False

    def __post_init__(self):
        lo, hi = (float(b) for b in self.band)
        if not lo < hi:
            raise DomainError(f"band must satisfy lo < hi, got {self.band}")
        og = self.table.omega_grid
        if lo < og[0] or hi > og[-1]:
            raise RangeError(
                f"band [{lo}, {hi}] exceeds table omega grid [{og[0]}, {og[-1]}]"
            )
        if not lo <= self.emitter.omega0 <= hi:
            raise RangeError(f"omega0={self.emitter.omega0} outside band [{lo}, {hi}]")
        dg = self.table.distance_grid
        if not dg[0] <= self.distance <= dg[-1]:
            raise RangeError(f"distance {self.distance} outside table grid")
        object.__setattr__(self, "band", (lo, hi))

    def with_fca(self, fca: bool) -> "SpectralDensityModel":
        return SpectralDensityModel(self.emitter, self.table, self.distance, self.band, fca)

    def _scale(self, w):
        if self.fca:
            return np.ones_like(w)
        return (w / self.emitter.omega0) ** 3

    def components(self, omega):
        """Return ``(rad, tan)`` densities at an array of energies inside the band."""
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        lo, hi = self.band
        if np.any(w < lo) or np.any(w > hi):
            raise RangeError(f"omega outside band [{lo}, {hi}]")
        lp, lt = self.table.lookup_many(w, self.distance)
        pref = self.emitter.gamma0 / (2 * np.pi) * self._scale(w) / 2
        return pref * lp, pref * lt

    def density(self, component: str, omega):
        if component not in COMPONENTS:
            raise ConfigError(f"unknown component {component!r}")
        scalar = np.ndim(omega) == 0
        rad, tan = self.components(omega)
        out = {
            "rad": rad,
            "tan": tan,
            "plus": rad + tan,
            "minus": rad - tan,
        }[component]
        return float(out[0]) if scalar else out

    def two_level_density(self, orientation: str, omega):
        """Density for a linear dipole along z (radial) or x (tangential)."""
        expected = {"z": "linear_radial", "x": "linear_tangential"}.get(orientation)
        if expected is None:
            raise ConfigError(f"orientation must be 'z' or 'x', got {orientation!r}")
        if self.emitter.dipole_config != expected:
            raise ConfigError(
                f"orientation {orientation!r} requires dipole_config {expected!r}, "
                f"got {self.emitter.dipole_config!r}"
            )
        return 2 * self.density("rad" if orientation == "z" else "tan", omega)

    def coupling_densities(self, omega):
        """``(J_diag, J_cross)`` entering the two amplitude equations.

        For the circular V-type these are (J_plus, J_minus). Linear dipoles
        decouple: the cross density vanishes and the diagonal one is the
        single-axis density.
        """
        rad, tan = self.components(omega)
        cfg = self.emitter.dipole_config
        if cfg == "v_circular":
            return rad + tan, rad - tan
        if cfg == "linear_radial":
            return 2 * rad, np.zeros_like(rad)
        return 2 * tan, np.zeros_like(tan)

    def effective_times(self):
        """Radial, tangential and averaged effective decay times in fs."""
        lp, lt = self.table.lookup(self.emitter.omega0, self.distance)
        t_rad = self.emitter.tau0 / lp
        t_tan = self.emitter.tau0 / lt
        return {"rad": t_rad, "tan": t_tan, "avg": 0.5 * (t_rad + t_tan)}

    def to_csv_rows(self, omega):
        w = np.asarray(omega, dtype=float)
        rad, tan = self.components(w)
        flag = int(self.fca)
        return [
            f"{wi:.6f},{r + t:.10e},{r - t:.10e},{r:.10e},{t:.10e},{flag}"
            for wi, r, t in zip(w, rad, tan)
        ]


DENSITY_CSV_HEADER = "omega_ev,J_plus,J_minus,J_rad,J_tan,fca"


def density(model: SpectralDensityModel, component: str, omega):
    return model.density(component, omega)


def two_level_density(model: SpectralDensityModel, orientation: str, omega):
    return model.two_level_density(orientation, omega)
