"""Figure rendering for isacsim CSV output."""

__version__ = "0.1.0"

from .figures import FIGURE_IDS, render  # noqa: F401
