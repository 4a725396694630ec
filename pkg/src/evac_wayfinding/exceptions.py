"""Error types raised by the wayfinding simulator."""

from typing import Optional


class WayfindingError(Exception):
    """Base class for all simulator errors."""


class GeometryError(WayfindingError, ValueError):
    """Degenerate or invalid geometric input (apex inside a wall, coincident route bearings...)."""


class SourceError(WayfindingError, ValueError):
    """Invalid input to an information-source or fusion model."""


class ScenarioError(WayfindingError):
    """A scenario document failed to load or validate.

    Args:
        message: Human readable description of the failure
        field: Dotted path of the offending field (e.g. ``routes.portal``)
    """

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}" if field else message)


class ExportError(WayfindingError, OSError):
    """Writing results to disk failed."""

    def __init__(self, path, reason: str):
        self.path = str(path)
        super().__init__(f"cannot write {self.path}: {reason}")
