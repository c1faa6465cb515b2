"""Tunable search bounds.

Defaults can be overridden with one environment variable, e.g.::

    BIQUADCAP_BOUNDS="aux=200000,cf=500000"
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .errors import PreconditionError

ENV_VAR = "BIQUADCAP_BOUNDS"


@dataclass(frozen=True)
class Bounds:
    aux: int = 10**6  # auxiliary prime search
    cf: int = 10**6  # continued-fraction steps

    @property
    def cf_steps(self) -> int:
        return self.cf


def parse_bounds(text: str, base: Bounds | None = None) -> Bounds:
    out = base or Bounds()
    for item in filter(None, (t.strip() for t in text.split(","))):
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in ("aux", "cf"):
            raise ValueError(f"unknown bound {key!r} in {ENV_VAR}")
        out = replace(out, **{key: int(val)})
    return out


def bounds() -> Bounds:
    try:
        return parse_bounds(os.environ.get(ENV_VAR, ""))
    except ValueError as e:
        raise PreconditionError(f"bad {ENV_VAR}: {e}") from e
