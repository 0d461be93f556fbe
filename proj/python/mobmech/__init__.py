"""Worst-case mobility mechanism: nominal assignment, pricing and property checks."""

from ._core import (
    MobmechError,
    CommandResult,
    Instance,
    Mechanism,
    ParseError,
    ValidationError,
    __version__,
    cmd_price,
    cmd_solve,
    cmd_verify,
    emit_scenario,
    generate_instance,
    lp_solve,
    parse_scenario,
    parse_scenario_text,
    run_pipeline,
    validate,
)

__all__ = [
    "MobmechError",
    "CommandResult",
    "Instance",
    "Mechanism",
    "ParseError",
    "ValidationError",
    "__version__",
    "cmd_price",
    "cmd_solve",
    "cmd_verify",
    "emit_scenario",
    "generate_instance",
    "lp_solve",
    "parse_scenario",
    "parse_scenario_text",
    "run_pipeline",
    "validate",
]
