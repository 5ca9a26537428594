"""Search-backend selection: numba JIT by default, numpy via env flag.

Set GEOPROG_BACKEND=numpy to force the pure-numpy fallback (or =numba to
require the JIT kernel). Unset, the JIT kernel is used when numba imports.
"""

from __future__ import annotations

import importlib
import os

_ENV_VAR = "GEOPROG_BACKEND"
_MODULES = {
    "numba": "geoprog._search_numba",
    "numpy": "geoprog._search_numpy",
}


def _numba_available() -> bool:
    try:
        importlib.import_module("numba")
    except ImportError:
        return False
    return True


def backend_name(override: str | None = None) -> str:
    """Resolve the backend name from an override or the environment."""
    name = override or os.environ.get(_ENV_VAR, "").strip().lower() or None
    if name is None:
        return "numba" if _numba_available() else "numpy"
    if name not in _MODULES:
        raise ValueError(
            f"unknown backend '{name}' (expected one of {sorted(_MODULES)})"
        )
    return name


def get_backend(override: str | None = None):
    """Import and return the search module for the resolved backend."""
    name = backend_name(override)
    try:
        return importlib.import_module(_MODULES[name])
    except ImportError as exc:
        if name == "numba":
            raise ImportError(
                "numba backend unavailable; set GEOPROG_BACKEND=numpy"
            ) from exc
        raise
