from __future__ import annotations

import sys
from collections.abc import Callable
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))


@pytest.fixture
def psi_file(tmp_path: Path) -> Callable[[str | bytes], Path]:
    """Writes ``.psi`` source text (or raw bytes) to a fresh file and returns its path."""

    counter = iter(range(1_000))

    def write(content: str | bytes) -> Path:
        path = tmp_path / f"source_{next(counter)}.psi"
        if isinstance(content, bytes):
            path.write_bytes(content)
        else:
            path.write_text(content, encoding="utf-8")
        return path

    return write
