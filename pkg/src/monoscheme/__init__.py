"""Monotone difference schemes for strongly degenerate convection-diffusion equations."""

from pathlib import Path

PROJECT_PATH = Path()
"""Project root, under which stage artifacts are written."""
