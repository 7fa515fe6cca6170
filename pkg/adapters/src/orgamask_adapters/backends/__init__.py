"""Model backends.

`synthetic` is a deterministic classical-vision stand-in that needs no
weights; the real backends import their frameworks lazily and fail with
an AdapterError that says what is missing.
"""

from __future__ import annotations

from .base import AdapterError, Backend


def get_backend(name: str, **options) -> Backend:
    if name == "synthetic":
        from .synthetic import SyntheticBackend

        return SyntheticBackend(**options)
    if name == "sam":
        from .sam import SamBackend

        return SamBackend(**options)
    if name == "gdino":
        from .gdino import GroundingDinoBackend

        return GroundingDinoBackend(**options)
    if name == "organoid":
        from .organoid import OrganoIDBackend

        return OrganoIDBackend(**options)
    raise AdapterError(
        f"unknown backend {name!r}; choose synthetic, sam, gdino, or organoid"
    )


__all__ = ["AdapterError", "Backend", "get_backend"]
