"""Versioned run configuration with a lossless JSON form.

Complex numbers are stored as ``[re, im]``. Loading rejects unknown keys and
wrong types, reporting the dotted field path in ``ConfigInvalid``.
"""

from __future__ import annotations

import dataclasses
import json
import types
import typing
from dataclasses import dataclass, field

from .algebra import critical_fixed_parameter
from .dynamics import RenderConfig, Viewport
from .errors import ConfigInvalid, CorrdynError
from .numeric import NumericPolicy

SCHEMA_VERSION = 1
COMMANDS = ("render", "scan", "sturmian", "kleinian", "pinch-demo", "verify")


@dataclass(frozen=True)
class CorrespondenceConfig:
    # critical point fixed at k = 0.9: an interior mating with z^2 (see scripts/locate_matings.py)
    a: complex = critical_fixed_parameter(0.9)
    k: complex = complex(0.9, 0.0)


@dataclass(frozen=True)
class RasterConfig:
    width: int = 512
    height: int = 512
    lower_left: complex = complex(-0.6, -0.6)
    upper_right: complex = complex(0.6, 0.6)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ConfigInvalid("raster dimensions must be at least 1", field="width")
        self.viewport()

    def viewport(self) -> Viewport:
        return Viewport.from_corners(self.lower_left, self.upper_right)


@dataclass(frozen=True)
class KleinianConfig:
    param: complex | None = None
    modular: bool = False
    pinch: str | None = None
    initial: complex = 2j
    samples: int = 10000
    depth: int = 30

    def __post_init__(self):
        chosen = (self.param is not None) + self.modular + (self.pinch is not None)
        if chosen > 1:
            raise ConfigInvalid("choose at most one of param, modular and pinch", field="param")
        if self.samples < 1 or self.depth < 1:
            raise ConfigInvalid("samples and depth must be at least 1", field="samples")


@dataclass(frozen=True)
class PinchConfig:
    L_y: float = 1.0
    L_r: float = 2.0
    nt: int = 100
    ny: int = 100
    t_max: float = 0.999

    def __post_init__(self):
        if not 0 < self.L_y < self.L_r:
            raise ConfigInvalid("need 0 < L_y < L_r", field="L_y")
        if not 0 <= self.t_max < 1:
            raise ConfigInvalid("t_max must lie in [0, 1)", field="t_max")
        if self.nt < 2 or self.ny < 2:
            raise ConfigInvalid("nt and ny must be at least 2", field="nt")


@dataclass(frozen=True)
class OutputConfig:
    out: str | None = None
    image: str | None = None
    csv: str | None = None
    sidecar: bool = True


@dataclass(frozen=True)
class RunConfig:
    command: str
    correspondence: CorrespondenceConfig = field(default_factory=CorrespondenceConfig)
    raster: RasterConfig = field(default_factory=RasterConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    kleinian: KleinianConfig = field(default_factory=KleinianConfig)
    pinch: PinchConfig = field(default_factory=PinchConfig)
    pq: str = "1/3"
    quotient_depth: int = 3
    suite: str = "all"
    threads: int | None = None
    output: OutputConfig = field(default_factory=OutputConfig)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigInvalid(f"unknown command {self.command!r}", field="command")
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigInvalid(
                f"schema version {self.schema_version} is not supported (expected {SCHEMA_VERSION})",
                field="schema_version",
            )
        if self.threads is not None and self.threads < 1:
            raise ConfigInvalid("threads must be at least 1", field="threads")

    def to_dict(self) -> dict:
        return _encode(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return _decode(cls, data, "")

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config is not valid JSON: {exc}", field="") from exc
        return cls.from_dict(data)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


def _encode(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _encode(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _join(prefix: str, name: str) -> str:
    return f"{prefix}.{name}" if prefix else name


def _decode(cls, data, path: str):
    if not isinstance(data, dict):
        raise ConfigInvalid(f"expected an object, got {type(data).__name__}", field=path)
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls) if f.init}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigInvalid(f"unknown field(s) {unknown}", field=_join(path, unknown[0]))
    kwargs = {name: _value(hints[name], data[name], _join(path, name)) for name in names if name in data}
    try:
        return cls(**kwargs)
    except ConfigInvalid as exc:
        raise ConfigInvalid(str(exc), field=_join(path, exc.field or "")) from exc
    except TypeError as exc:
        raise ConfigInvalid(str(exc), field=path) from exc
    except CorrdynError as exc:
        raise ConfigInvalid(str(exc), field=path) from exc


def _value(tp, value, path: str):
    args = typing.get_args(tp)
    if typing.get_origin(tp) in (typing.Union, types.UnionType):
        if value is None and type(None) in args:
            return None
        (tp,) = [t for t in args if t is not type(None)]
    if dataclasses.is_dataclass(tp):
        return _decode(tp, value, path)
    if tp is complex:
        if isinstance(value, list) and len(value) == 2 and all(_is_real(v) for v in value):
            return complex(value[0], value[1])
        if _is_real(value):
            return complex(value)
        raise ConfigInvalid(f"expected [re, im], got {value!r}", field=path)
    if tp is float:
        if _is_real(value):
            return float(value)
    elif tp is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif tp is bool or tp is str:
        if isinstance(value, tp):
            return value
    else:
        return value
    raise ConfigInvalid(f"expected {tp.__name__}, got {value!r}", field=path)


def _is_real(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


__all__ = [
    "COMMANDS",
    "SCHEMA_VERSION",
    "CorrespondenceConfig",
    "KleinianConfig",
    "NumericPolicy",
    "OutputConfig",
    "PinchConfig",
    "RasterConfig",
    "RunConfig",
]
