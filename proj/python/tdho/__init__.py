"""Time-dependent harmonic oscillator: angle-action solutions, Floquet analysis, adiabatic checks."""

from tdho._tdho import (
    AngleActionState,
    DomainError,
    ParameterError,
    PhaseState,
    Profile,
    Family,
    angle_action_trajectory,
    approx_hat,
    approx_tilde,
    beat_analysis,
    ermakov_check,
    measure_tongue,
    monodromy,
    picard,
    resonant_growth,
    scaling_experiment,
    solve,
    stability_map,
    to_angle_action,
    to_phase,
    match_discontinuity,
    total_variation,
    trace_check,
    zeros,
)

__all__ = [name for name in dir() if not name.startswith("_")]
