from __future__ import annotations

from importlib import metadata


__all__ = [
    "metadata",
    "distribution_version",
]


def distribution_version(name: str, fallback: str = "0.0.0") -> str:
    """Installed version of ``name``, or ``fallback`` when running from a source tree"""
    try:
        return metadata.version(name)
    except metadata.PackageNotFoundError:
        return fallback
