"""Configuration package for the wayfinding simulator."""

from .settings import AgentConfig, AppConfig, Tunables, load_config_from_yaml

__all__ = ["AgentConfig", "AppConfig", "Tunables", "load_config_from_yaml"]
