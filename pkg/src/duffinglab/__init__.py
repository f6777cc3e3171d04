"""duffinglab: simulation and analysis toolkit for forced Duffing-family
oscillators and a coupled radioactivity/cancer-incidence ecology model.

The library covers fixed-step integration (Euler, RK4), an explicit
finite-difference displacement recurrence, homotopy-series and Picard
approximate solvers with a Bessel-based error model, Lyapunov-spectrum
estimation, successive-error convergence rates, and frequency-sweep
bifurcation data.  The ``duffing-lab`` console script exposes all of it as
CSV/JSON-emitting commands.
"""

from .analysis import (
    COMPARISON_FIXTURE,
    ErrorTable,
    LyapunovConfig,
    LyapunovResult,
    convergence_rate,
    error_table,
    lyapunov_spectrum,
)
from .approx import (
    DEFAULT_HOMOTOPY,
    HomotopyApprox,
    analytical_undamped,
    bessel_j0,
    error_bound,
    error_model,
    homotopy_approx,
    picard_solve,
)
from .bifurcation import (
    PRESET_IDS,
    DynamicsPreset,
    FdPreset,
    SweepConfig,
    SweepRecord,
    preset,
    sweep_omega,
)
from .dynamics import (
    FlaggedOverflow,
    ModelKind,
    ModelSpec,
    State,
    Trajectory,
    conserved_offset,
    jacobian,
    rhs,
)
from .integrators import (
    IntegrationConfig,
    Method,
    integrate,
    iterate_fd_duffing,
    step_euler,
    step_rk4,
)

__version__ = "0.1.0"

__all__ = [
    "COMPARISON_FIXTURE",
    "DEFAULT_HOMOTOPY",
    "DynamicsPreset",
    "ErrorTable",
    "FdPreset",
    "FlaggedOverflow",
    "HomotopyApprox",
    "IntegrationConfig",
    "LyapunovConfig",
    "LyapunovResult",
    "Method",
    "ModelKind",
    "ModelSpec",
    "PRESET_IDS",
    "State",
    "SweepConfig",
    "SweepRecord",
    "Trajectory",
    "analytical_undamped",
    "bessel_j0",
    "conserved_offset",
    "convergence_rate",
    "error_bound",
    "error_model",
    "error_table",
    "homotopy_approx",
    "integrate",
    "iterate_fd_duffing",
    "jacobian",
    "lyapunov_spectrum",
    "picard_solve",
    "preset",
    "rhs",
    "step_euler",
    "step_rk4",
    "sweep_omega",
]
