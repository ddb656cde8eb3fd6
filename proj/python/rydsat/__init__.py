"""Python access to the rydsat simulator core."""

from ._core import (
    AxisKind,
    LadderSystem,
    RydsatError,
    Spectrum,
    antenna_gain,
    build_hamiltonian,
    eit_spectrum,
    field_from_splitting,
    fit_calibration,
    link_budget,
    path_loss,
    power_spectrum,
    run_command,
    scenario_to_text,
    sensitivity_report,
    splitting_from_spectrum,
    steady_state,
)

__all__ = [
    "AxisKind",
    "LadderSystem",
    "RydsatError",
    "Spectrum",
    "antenna_gain",
    "build_hamiltonian",
    "eit_spectrum",
    "field_from_splitting",
    "fit_calibration",
    "link_budget",
    "path_loss",
    "power_spectrum",
    "run_command",
    "scenario_to_text",
    "sensitivity_report",
    "splitting_from_spectrum",
    "steady_state",
]
