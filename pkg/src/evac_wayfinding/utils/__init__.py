"""Utility modules for the wayfinding simulator."""

from .logger import setup_logger, log_run_start, log_run_summary, log_sweep_row, log_preset_row, log_validation

__all__ = ["setup_logger", "log_run_start", "log_run_summary", "log_sweep_row", "log_preset_row", "log_validation"]
