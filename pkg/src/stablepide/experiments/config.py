"""Flat ``key = value`` configuration files with dotted keys.

Example::

    alpha = 1.5
    r1 = 0.5
    r2 = 0.5
    profile = compact
    phi = cos
    delta_list = pow2:-4:-12      # 2^-4, 2^-5, ..., 2^-12
    grid.N = 2, 4, 8

Lists are comma separated; ``pow2:a:b`` expands to the powers of two from
2^a to 2^b.  Lines starting with ``#`` and trailing ``# ...`` are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from ..errors import InvalidParameters
from ..measure import StableParams, TailProfile
from ..quadrature import QuadratureBudget

PHI_NAMES = ("cos", "abs_clip", "bump", "const")

# key -> (attribute, kind)
_KEYS = {
    "alpha": ("alpha", float),
    "r1": ("r1", float),
    "r2": ("r2", float),
    "T": ("T", float),
    "profile": ("profile_kind", str),
    "profile.beta": ("beta", float),
    "profile.a1": ("a1", float),
    "profile.a2": ("a2", float),
    "phi": ("phi", str),
    "phi.level": ("phi_level", float),
    "delta_list": ("delta_list", "floats"),
    "n_list": ("n_list", "ints"),
    "grid.h": ("grid_h", float),
    "grid.L": ("grid_L", float),
    "grid.N": ("grid_N", "floats"),
    "grid.extension": ("extension", str),
    "quad.middle_nodes": ("middle_nodes", int),
    "quad.tail_levels": ("tail_levels", int),
    "tol.expect": ("tol_expect", float),
    "tol.identity": ("tol_identity", float),
    "audit.points": ("audit_points", int),
    "audit.pairs": ("audit_pairs", int),
    "audit.steps": ("audit_steps", int),
    "report.timing": ("timing", "bool"),
    "seed": ("seed", int),
}


def _number(tok: str) -> float:
    tok = tok.strip()
    if tok.startswith("2^"):
        return 2.0 ** float(tok[2:])
    return float(tok)


def _list(value: str) -> list[float]:
    value = value.strip().strip("[]")
    if value.startswith("pow2:"):
        _, a, b = value.split(":")
        a, b = int(a), int(b)
        step = 1 if b >= a else -1
        return [2.0**j for j in range(a, b + step, step)]
    return [_number(t) for t in value.split(",") if t.strip()]


def _convert(key: str, raw: str, kind) -> Any:
    try:
        if kind == "floats":
            return tuple(_list(raw))
        if kind == "ints":
            vals = _list(raw)
            if any(v != int(v) for v in vals):
                raise ValueError("not an integer")
            return tuple(int(v) for v in vals)
        if kind == "bool":
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError("not a boolean")
            return low in ("true", "1", "yes")
        if kind is float:
            return _number(raw)
        if kind is int:
            return int(raw)
        return raw.strip()
    except ValueError as exc:
        raise InvalidParameters(f"bad value for {key}: {raw!r} ({exc})") from None


def parse_config(text: str) -> dict[str, Any]:
    """Parse config text into attribute-name -> value."""
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameters(f"line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise InvalidParameters(f"line {lineno}: unknown key {key!r}")
        attr, kind = _KEYS[key]
        out[attr] = _convert(key, raw, kind)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float = 1.5
    r1: float = 0.5
    r2: float = 0.5
    T: float = 1.0
    profile_kind: str = "compact"
    beta: float | None = None
    a1: float = 0.0
    a2: float = 0.0
    phi: str = "cos"
    phi_level: float = 1.0
    delta_list: tuple[float, ...] = tuple(2.0**-j for j in range(4, 13))
    n_list: tuple[int, ...] = tuple(2**j for j in range(2, 11))
    grid_h: float | None = None
    grid_L: float | None = None
    grid_N: tuple[float, ...] = (2.0, 4.0, 8.0)
    extension: str = "auto"
    middle_nodes: int = 16
    tail_levels: int = 60
    tol_expect: float = 1e-9
    tol_identity: float = 1e-8
    audit_points: int = 25
    audit_pairs: int = 100
    audit_steps: int = 64
    timing: bool = False
    seed: int = 0
    probes: tuple[float, ...] = tuple(-2.0 + 0.5 * i for i in range(9))

    def __post_init__(self):
        if self.phi not in PHI_NAMES:
            raise InvalidParameters(f"phi must be one of {PHI_NAMES}")
        d = self.delta_list
        if any(not 0.0 < x < 1.0 for x in d):
            raise InvalidParameters("delta values must lie in (0, 1)")
        if any(b >= a for a, b in zip(d, d[1:])):
            raise InvalidParameters("delta values must be strictly decreasing")
        n = self.n_list
        if any(x < 1 for x in n) or any(b <= a for a, b in zip(n, n[1:])):
            raise InvalidParameters("n values must be strictly increasing positive integers")
        if self.extension not in ("auto", "constant", "periodic"):
            raise InvalidParameters("grid.extension must be auto, constant or periodic")
        if self.extension == "periodic" and self.phi not in ("cos", "const"):
            raise InvalidParameters("periodic grids need periodic data")
        self.params  # validates alpha, r1, r2, T
        self.profile

    @property
    def params(self) -> StableParams:
        p = StableParams(self.alpha, self.r1, self.r2, self.T)
        if self.profile_kind == "compact" and not self.r2 < self.alpha / 2.0:
            raise InvalidParameters("compact profile needs r2 < alpha/2")
        return p

    @property
    def profile(self) -> TailProfile:
        if self.profile_kind == "compact":
            return TailProfile.compact()
        if self.profile_kind == "power":
            if self.beta is None:
                raise InvalidParameters("power profile needs profile.beta")
            return TailProfile.power(self.beta, self.a1, self.a2)
        raise InvalidParameters(f"unknown profile {self.profile_kind!r}")

    @property
    def quad(self) -> QuadratureBudget:
        return QuadratureBudget(middle_panels=self.middle_nodes, tail_levels=self.tail_levels)

    @property
    def grid_extension(self) -> str:
        if self.extension != "auto":
            return self.extension
        return "periodic" if self.phi == "cos" else "constant"

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)

    @classmethod
    def from_mapping(cls, values: dict[str, Any]) -> "ExperimentConfig":
        return cls(**values)


def load_config(path: str | Path | None, **overrides) -> ExperimentConfig:
    values = parse_config(Path(path).read_text()) if path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_mapping(values)


def log2_or_nan(x: float) -> float:
    return math.log2(x) if x > 0.0 and math.isfinite(x) else math.nan
