"""Univoque sets of self-similar sets: Gamma construction, type automaton and dimension verdicts."""

from .config_flow import AnalysisConfig, ConfigError, dump_config, parse_config
from .coordinator import run_analysis

__version__ = "0.1.0"

__all__ = ["AnalysisConfig", "ConfigError", "dump_config", "parse_config", "run_analysis"]
