"""Incremental growth of prestrained cantilever beams.

Thin re-export of the compiled ``_accrete`` extension. Configuration texts use
the same ``key = value`` grammar as the ``accrete`` command line tool.
"""

from ._accrete import (  # noqa: F401
    BeamConfig,
    ConfigError,
    ConvergenceError,
    DomainError,
    InfeasibleError,
    InputError,
    IoError,
    LoadCase,
    LoadKind,
    PreconditionError,
    bending_moment,
    convex_envelope,
    density_baseline,
    density_precurv_first,
    density_prestrain,
    f_concavity_interval,
    f_first,
    f_second,
    f_value,
    g_first,
    g_second,
    g_value,
    moments_at_centers,
    parse_config,
    project_mass_lb,
    run_growth,
    solve_baseline_first,
    solve_baseline_step,
    solve_section,
)

__version__ = "0.1.0"
