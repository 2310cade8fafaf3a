"""Paths for this project."""

from pathlib import Path
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

from pydantic import BaseModel, model_validator

import monoscheme


class Paths(BaseModel):
    """Paths associated with this project, created on demand."""

    project: Path = monoscheme.PROJECT_PATH

    @property
    def data(self) -> Path:
        return self.project / "data"

    @property
    def results(self) -> Path:
        """Stage artifacts."""
        return self.data / "results"

    @model_validator(mode="after")
    def create_directories(self) -> Self:
        """Create the results directory and its parents."""
        self.results.mkdir(parents=True, exist_ok=True)
        return self
