"""Gibbs kernel backend selection.

The compiled Cython kernel is preferred when present; the pure-Python twin
is the reference implementation and is selected when the extension is
missing or LEGALTOPICS_PURE_PYTHON=1 is set. Both backends produce
bitwise-identical output, so the choice only affects speed.
"""

import os

from . import _gibbs_py

if os.environ.get("LEGALTOPICS_PURE_PYTHON") == "1":
    _active = _gibbs_py
else:
    try:
        from . import _gibbs_cy as _active
    except ImportError:
        _active = _gibbs_py

BACKEND = _active.BACKEND


def active_kernel():
    return _active


def get_kernel(name: str | None = None):
    """Look up a kernel by name ("cython" | "python"); None means the active one."""
    if name is None:
        return _active
    if name == "python":
        return _gibbs_py
    if name == "cython":
        from . import _gibbs_cy

        return _gibbs_cy
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    names = []
    try:
        from . import _gibbs_cy  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names
