"""Non-Markovian spontaneous emission of a V-type emitter near a Drude nanosphere.

The pipeline runs from Mie/Drude enhancement factors, through the radial and
tangential spectral densities, to an effective-mode expansion of the memory
kernels whose linear system is solved by eigendecomposition.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    NumericError,
    ParseError,
    PlasmonEmitError,
    RangeError,
    ResourceError,
)
from .greens_mie import (
    EnhancementTable,
    SphereSpec,
    build_enhancement_table,
    drude_epsilon,
    enhancement_factors,
    lsp_resonances,
)
from .spectral import EmitterSpec, SpectralDensityModel, gamma0
from .emde import (
    EffectiveHamiltonian,
    EffectiveModeSet,
    Trajectory,
    assemble,
    decouple_pm,
    discretize,
    propagate,
)
from .oracles import KernelPair, lorentzian_analytic, markov_solution, volterra_solve

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "EffectiveHamiltonian",
    "EffectiveModeSet",
    "EmitterSpec",
    "EnhancementTable",
    "KernelPair",
    "NumericError",
    "ParseError",
    "PlasmonEmitError",
    "RangeError",
    "ResourceError",
    "SpectralDensityModel",
    "SphereSpec",
    "Trajectory",
    "assemble",
    "build_enhancement_table",
    "decouple_pm",
    "discretize",
    "drude_epsilon",
    "enhancement_factors",
    "gamma0",
    "lorentzian_analytic",
    "lsp_resonances",
    "markov_solution",
    "propagate",
    "volterra_solve",
]
