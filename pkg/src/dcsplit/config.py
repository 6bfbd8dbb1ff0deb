"""Size caps for the exponential routines.

Defaults can be overridden with ``DCSPLIT_CAPS="vertex_dim=14,braid_n=6"``.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .errors import CapExceeded, ValidationError


@dataclass(frozen=True)
class Caps:
    arrangement_dim: int = 4
    arrangement_hyperplanes: int = 12
    vertex_dim: int = 12
    vertex_ineqs: int = 40
    order_stat_n: int = 5
    braid_n: int = 5
    lovasz_n: int = 16

    def check(self, name: str, value: int) -> None:
        limit = getattr(self, name)
        if value > limit:
            raise CapExceeded(name, value, limit)


def get_caps(caps: Caps | None = None) -> Caps:
    if caps is not None:
        return caps
    raw = os.environ.get("DCSPLIT_CAPS", "").strip()
    if not raw:
        return Caps()
    known = {f.name for f in dataclasses.fields(Caps)}
    overrides: dict[str, int] = {}
    for item in raw.split(","):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in known or not value.strip().isdigit():
            raise ValidationError(f"bad DCSPLIT_CAPS entry {item!r}")
        overrides[key] = int(value)
    return Caps(**overrides)
