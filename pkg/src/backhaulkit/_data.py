"""Location of the bundled, human-editable data files."""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

from .errors import ConfigurationError

DATA_DIR_ENV = "BACKHAULKIT_DATA_DIR"


def data_dir() -> Path:
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("backhaulkit") / "data"))


def data_path(name: str) -> Path:
    """Return the path of a bundled data file, honouring the env override."""
    path = data_dir() / name
    if not path.is_file():
        raise ConfigurationError(f"data file not found: {path}")
    return path
