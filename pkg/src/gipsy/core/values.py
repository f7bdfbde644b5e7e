"""Runtime values.

All values are frozen, hashable dataclasses so they can be used directly in
warehouse keys and shared across threads. ``Int(1) != Double(1.0)``.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass

from .errors import LucidTypeError, TagOverflow
from .types import (BOOL, DIMENSION, DOUBLE, FLOAT, INT, STRING, GipsyType,
                    array_of, record)

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1


def to_f32(x: float) -> float:
    """Round a Python float to the nearest single-precision value."""
    if math.isnan(x) or math.isinf(x):
        return x
    try:
        return struct.unpack("f", struct.pack("f", x))[0]
    except OverflowError:
        return math.copysign(math.inf, x)


def shortest_f32(x: float) -> str:
    """Shortest decimal text that reads back as the same single."""
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    for digits in range(1, 10):
        text = f"{x:.{digits}g}"
        if to_f32(float(text)) == x:
            break
    if "e" not in text and "." not in text and "inf" not in text:
        text += ".0"
    return text


class Value:
    __slots__ = ()

    @property
    def type(self) -> GipsyType:  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True, slots=True)
class Int(Value):
    value: int

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise LucidTypeError(f"Int needs an integer, got {self.value!r}")
        if not INT_MIN <= self.value <= INT_MAX:
            raise TagOverflow(f"integer {self.value} overflows 64 bits")

    @property
    def type(self):
        return INT


@dataclass(frozen=True, slots=True)
class Float(Value):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", to_f32(float(self.value)))

    @property
    def type(self):
        return FLOAT


@dataclass(frozen=True, slots=True)
class Double(Value):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))

    @property
    def type(self):
        return DOUBLE


@dataclass(frozen=True, slots=True)
class Bool(Value):
    value: bool

    def __post_init__(self):
        if not isinstance(self.value, bool):
            raise LucidTypeError(f"Bool needs a boolean, got {self.value!r}")

    @property
    def type(self):
        return BOOL


@dataclass(frozen=True, slots=True)
class Str(Value):
    value: str

    @property
    def type(self):
        return STRING


@dataclass(frozen=True, slots=True)
class Dim(Value):
    name: str

    @property
    def type(self):
        return DIMENSION


@dataclass(frozen=True, slots=True)
class Arr(Value):
    element_type: GipsyType
    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        for item in self.items:
            if item.type != self.element_type:
                raise LucidTypeError(
                    f"array of {self.element_type} cannot hold {item.type}")

    @property
    def type(self):
        return array_of(self.element_type)


@dataclass(frozen=True, slots=True)
class Rec(Value):
    class_name: str
    fields: tuple  # ((name, Value), ...) in declaration order

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple((n, v) for n, v in self.fields))

    @property
    def type(self):
        return record(self.class_name)

    def get(self, name: str) -> Value:
        for n, v in self.fields:
            if n == name:
                return v
        raise KeyError(name)

    def field_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.fields)


@dataclass(frozen=True, slots=True)
class HostFnRef(Value):
    name: str

    @property
    def type(self):
        return GipsyType("Identifier")


TRUE = Bool(True)
FALSE = Bool(False)


def render(v: Value) -> str:
    """Canonical text used for printed results."""
    if isinstance(v, Int):
        return str(v.value)
    if isinstance(v, Double):
        return repr(v.value)
    if isinstance(v, Float):
        return shortest_f32(v.value)
    if isinstance(v, Bool):
        return "true" if v.value else "false"
    if isinstance(v, Str):
        return json.dumps(v.value, ensure_ascii=False)
    if isinstance(v, Dim):
        return v.name
    if isinstance(v, Arr):
        return "[" + ", ".join(render(x) for x in v.items) + "]"
    if isinstance(v, Rec):
        inner = ",".join(f"{n}={render(x)}" for n, x in v.fields)
        return f"{v.class_name}{{{inner}}}"
    if isinstance(v, HostFnRef):
        return f"<function {v.name}>"
    raise LucidTypeError(f"cannot render {v!r}")


# Typed-literal encoding shared by the .gipsy format and the socket wire.

def encode_type(t: GipsyType):
    if t.kind == "Array":
        return ["Array", encode_type(t.element)]
    if t.kind == "Record":
        return ["Record", t.class_name]
    if t.kind == "Function":
        return ["Function", [encode_type(p) for p in t.params], encode_type(t.ret)]
    return t.kind


def decode_type(data) -> GipsyType:
    if isinstance(data, str):
        return GipsyType(data)
    tag = data[0]
    if tag == "Array":
        return array_of(decode_type(data[1]))
    if tag == "Record":
        return record(data[1])
    if tag == "Function":
        return GipsyType("Function", params=tuple(decode_type(p) for p in data[1]),
                         ret=decode_type(data[2]))
    raise ValueError(f"bad type encoding {data!r}")


def _float_text(x: float):
    # JSON has no inf/nan; keep them as strings.
    return x if math.isfinite(x) else repr(x)


def encode_value(v: Value):
    if isinstance(v, Int):
        return ["Int", v.value]
    if isinstance(v, Float):
        return ["Float", _float_text(v.value)]
    if isinstance(v, Double):
        return ["Double", _float_text(v.value)]
    if isinstance(v, Bool):
        return ["Bool", v.value]
    if isinstance(v, Str):
        return ["Str", v.value]
    if isinstance(v, Dim):
        return ["Dim", v.name]
    if isinstance(v, Arr):
        return ["Arr", encode_type(v.element_type), [encode_value(x) for x in v.items]]
    if isinstance(v, Rec):
        return ["Rec", v.class_name, [[n, encode_value(x)] for n, x in v.fields]]
    if isinstance(v, HostFnRef):
        return ["Fn", v.name]
    raise ValueError(f"cannot encode {v!r}")


def decode_value(data) -> Value:
    if not isinstance(data, list) or not data:
        raise ValueError(f"bad value encoding {data!r}")
    tag = data[0]
    if tag == "Int" and isinstance(data[1], int) and not isinstance(data[1], bool):
        return Int(data[1])
    if tag == "Float":
        return Float(float(data[1]))
    if tag == "Double":
        return Double(float(data[1]))
    if tag == "Bool" and isinstance(data[1], bool):
        return Bool(data[1])
    if tag == "Str" and isinstance(data[1], str):
        return Str(data[1])
    if tag == "Dim":
        return Dim(data[1])
    if tag == "Arr":
        return Arr(decode_type(data[1]), tuple(decode_value(x) for x in data[2]))
    if tag == "Rec":
        return Rec(data[1], tuple((n, decode_value(x)) for n, x in data[2]))
    if tag == "Fn":
        return HostFnRef(data[1])
    raise ValueError(f"bad value encoding {data!r}")
