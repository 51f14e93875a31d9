"""Vibration-driven quadruped: shaker model, simulation, indices and CLI access."""

from ._core import (
    ActuationCommand,
    ConfigError,
    Error,
    IntegrationError,
    SchemaError,
    VelocitySummary,
    __version__,
    average_velocities,
    canonical_config,
    classify_mode,
    config_hash,
    max_force,
    net_force,
    net_torque,
    performance_index,
    run_cli,
    simulate,
)

__all__ = [
    "ActuationCommand",
    "ConfigError",
    "Error",
    "IntegrationError",
    "SchemaError",
    "VelocitySummary",
    "__version__",
    "average_velocities",
    "canonical_config",
    "classify_mode",
    "config_hash",
    "max_force",
    "net_force",
    "net_torque",
    "performance_index",
    "run_cli",
    "simulate",
]
