"""Semi-analytic trap fields for a nanofiber resting on a dielectric grating."""
from ._accel import backend
from .composer import DeviceSpec, IlluminationSpec, TrapField, paper_device
from .cylinder import FiberSpec, scattered_field, scattering_coefficients
from .errors import (ConfigError, ConvergenceError, DegenerateTrapError, DomainError, NanotrapError,
                     NumericalInstabilityError)
from .grating import GratingSpec, solve
from .potential import TrapPotential, cs_polarizability, intensity_scale
from .traps import analyze_sites, sweep_phase, sweep_radius

__version__ = "0.1.0"
