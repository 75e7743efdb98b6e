from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any


@dataclass
class BoundReport:
    """Outcome of checking one inequality at concrete inputs.

    ``satisfied`` is computed as ``lower <= exact_or_mc <= upper`` over the
    fields that are present, unless the caller passes it explicitly (used
    for strict inequalities and Monte-Carlo slack).  ``precondition`` is
    ``False`` when a hypothesis of the underlying statement fails; the
    inequality is still evaluated and reported.
    """

    name: str
    inputs: dict[str, Any] = field(default_factory=dict)
    lower: float | None = None
    upper: float | None = None
    exact_or_mc: float | None = None
    satisfied: bool | None = None
    precondition: bool = True
    note: str = ""

    def __post_init__(self):
        if self.satisfied is None:
            ok = True
            x = self.exact_or_mc
            if x is not None:
                if self.lower is not None:
                    ok &= self.lower <= x
                if self.upper is not None:
                    ok &= x <= self.upper
            elif self.lower is not None and self.upper is not None:
                ok = self.lower <= self.upper
            self.satisfied = bool(ok)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for key in ("lower", "upper", "exact_or_mc"):
            v = d[key]
            if v is not None and not math.isfinite(v):
                d[key] = repr(v)
        return d
