"""1D multilayer Saint-Venant solver with interlayer mass exchange.

Kinetic finite-volume fluxes, hydrostatic-reconstruction well balancing,
positivity-preserving time stepping, and a semi-implicit vertical
viscosity/friction solve.
"""

from .boundary import BoundaryKind, BoundarySpec
from .diagnostics import (
    EnergyReport,
    HyperbolicityReport,
    nlayer_eigen,
    total_energy,
    two_layer_charpoly,
    vertical_velocity,
)
from .errors import ConfigurationError, NumericalError
from .exchange import compute_exchanges, interface_velocity, momentum_exchange
from .kinetic import (
    CellFluxSplit,
    W_SUPPORT,
    chi,
    flux_minus,
    flux_plus,
    half_moments,
    interface_flux,
)
from .scenario import Scenario, load_scenario, parse_scenario
from .state import (
    Bathymetry,
    FrictionLaw,
    Grid1D,
    LayerPartition,
    PhysParams,
    SimState,
    interface_elevations,
    layer_heights,
)
from .stepper import (
    AdvanceResult,
    Model,
    StepConfig,
    advance,
    explicit_step,
    full_step,
    heun_step,
    limited_reconstruct,
    stable_dt,
)
from .viscous import friction_coefficient, implicit_update, solve_columns
from .wellbalance import reconstruct_interface_heights, topo_source

__version__ = "0.1.0"

__all__ = [
    "AdvanceResult",
    "Bathymetry",
    "BoundaryKind",
    "BoundarySpec",
    "CellFluxSplit",
    "ConfigurationError",
    "EnergyReport",
    "FrictionLaw",
    "Grid1D",
    "HyperbolicityReport",
    "LayerPartition",
    "Model",
    "NumericalError",
    "PhysParams",
    "Scenario",
    "SimState",
    "StepConfig",
    "W_SUPPORT",
    "advance",
    "chi",
    "compute_exchanges",
    "explicit_step",
    "flux_minus",
    "flux_plus",
    "friction_coefficient",
    "full_step",
    "half_moments",
    "heun_step",
    "implicit_update",
    "interface_elevations",
    "interface_flux",
    "interface_velocity",
    "layer_heights",
    "limited_reconstruct",
    "load_scenario",
    "momentum_exchange",
    "nlayer_eigen",
    "parse_scenario",
    "reconstruct_interface_heights",
    "solve_columns",
    "stable_dt",
    "topo_source",
    "total_energy",
    "two_layer_charpoly",
    "vertical_velocity",
    "write_snapshot",
]

from .snapshots import write_snapshot  # noqa: E402  (avoids cycle at import)
