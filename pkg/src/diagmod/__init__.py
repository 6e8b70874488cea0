"""Exact homological algebra for modules over finite diagrams of rings Z[S^-1]/(n)."""

from __future__ import annotations

__version__ = "0.1.0"
