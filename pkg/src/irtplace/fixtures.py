"""Access to the packaged example repository (SQL placement test)."""

from __future__ import annotations

import shutil
from importlib import resources
from pathlib import Path


def sql_repo_path() -> Path:
    """Directory of the packaged SQL example repository (read-only)."""
    return Path(resources.files("irtplace") / "fixtures" / "sql-repo")


def copy_sql_repo(destination: str | Path) -> Path:
    """Copy the example repository somewhere writable and return the copy."""
    destination = Path(destination)
    shutil.copytree(sql_repo_path(), destination, dirs_exist_ok=True)
    return destination
