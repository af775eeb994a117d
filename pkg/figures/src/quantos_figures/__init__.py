"""Static figure rendering for sweep CSV output."""

from .render import build_figure, render
from .schemas import SchemaError
from .spec import PANEL_KINDS, FigureSpec

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "PANEL_KINDS",
    "SchemaError",
    "build_figure",
    "render",
    "__version__",
]
