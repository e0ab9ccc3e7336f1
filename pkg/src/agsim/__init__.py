"""Packet-level simulator of a UAV access point serving a ground user past buildings."""

from .channel import ObstacleLossParams, RadioConfig
from .errors import ConfigurationError, ScenarioParseError
from .geom import Box, LosResult, Point3, line_of_sight, segment_intersects_box
from .link import ErrorModelParams
from .simcore import MetricsReport, Scenario, default_engine, run, run_batch, tcp_lite_run

__all__ = [
    "Box", "ConfigurationError", "ErrorModelParams", "LosResult", "MetricsReport",
    "ObstacleLossParams", "Point3", "RadioConfig", "Scenario", "ScenarioParseError",
    "default_engine", "line_of_sight", "run", "run_batch", "segment_intersects_box",
    "tcp_lite_run",
]
