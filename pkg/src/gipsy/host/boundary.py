"""Value conversion across the Lucid/host boundary.

Parameters go Lucid -> host; results and record fields go host -> Lucid. Only
the pairs listed in the boundary table are accepted; everything else raises
BoundaryTypeError.
"""

from __future__ import annotations

from ..core.errors import BoundaryTypeError
from ..core.types import (HOST_INT_RANGES, HOST_TYPE_NAMES, PARAMETER_TABLE,
                          RETURN_TABLE, GipsyType, array_of, record, type_match)
from ..core.values import (TRUE, Arr, Bool, Double, Float, Int, Rec, Str, Value,
                           to_f32)


def is_array(host_type: str) -> bool:
    return host_type.endswith("[]")


def element(host_type: str) -> str:
    return host_type[:-2]


def is_known(host_type: str, records) -> bool:
    if is_array(host_type):
        return is_known(element(host_type), records)
    return host_type in HOST_TYPE_NAMES or host_type in records


def lucid_return_type(host_type: str, records) -> GipsyType:
    """The one Lucid type a host result of ``host_type`` becomes."""
    if is_array(host_type):
        return array_of(lucid_return_type(element(host_type), records))
    if host_type in records:
        return record(host_type)
    if host_type == "void":
        return GipsyType("Void")
    return GipsyType(RETURN_TABLE[host_type])


def lucid_param_type(host_type: str, records) -> GipsyType:
    """Preferred Lucid type for a host parameter."""
    if is_array(host_type):
        return array_of(lucid_param_type(element(host_type), records))
    if host_type in records:
        return record(host_type)
    kinds = PARAMETER_TABLE.get(host_type)
    if not kinds:
        raise BoundaryTypeError(f"host type {host_type} cannot be a parameter")
    return GipsyType(kinds[0])


def accepts_param(host_type: str, t: GipsyType, records) -> bool:
    if is_array(host_type):
        return t.kind == "Array" and accepts_param(element(host_type), t.element, records)
    if host_type in records:
        return t.kind == "Record" and t.class_name == host_type
    if t.kind in ("Array", "Record"):
        return False
    return type_match(host_type, t, "parameter")


def accepts_return(host_type: str, t: GipsyType, records) -> bool:
    """Can a prototype returning ``t`` be served by a host returning ``host_type``?"""
    if t.kind == "Void":
        return host_type == "void"
    if is_array(host_type):
        return t.kind == "Array" and accepts_return(element(host_type), t.element, records)
    if host_type in records:
        return t.kind == "Record" and t.class_name == host_type
    if t.kind in ("Array", "Record"):
        return False
    return type_match(host_type, t, "return")


def to_host(v: Value, host_type: str, index: int, records):
    """Lucid value -> native Python value for a parameter of ``host_type``."""
    def bad():
        return BoundaryTypeError(
            f"parameter {index}: {type(v).__name__} does not match host {host_type}")

    if is_array(host_type):
        if not isinstance(v, Arr):
            raise bad()
        return [to_host(x, element(host_type), index, records) for x in v.items]
    if host_type in records:
        if not isinstance(v, Rec) or v.class_name != host_type:
            raise bad()
        return records[host_type].instance(v, records)
    if not accepts_param(host_type, v.type, records):
        raise bad()
    if isinstance(v, Int):
        lo, hi = HOST_INT_RANGES[host_type]
        if not lo <= v.value <= hi:
            raise BoundaryTypeError(
                f"parameter {index}: {v.value} out of range for host {host_type}")
        return v.value
    if isinstance(v, (Float, Double, Bool, Str)):
        return v.value
    raise bad()


def from_host(obj, host_type: str, records, what: str = "result") -> Value:
    """Native Python value -> Lucid value per the return direction."""
    def bad():
        return BoundaryTypeError(f"{what}: {obj!r} is not a host {host_type}")

    if is_array(host_type):
        if not isinstance(obj, (list, tuple)):
            raise bad()
        et = element(host_type)
        items = tuple(from_host(x, et, records, what) for x in obj)
        return Arr(lucid_return_type(et, records), items)
    if host_type in records:
        rt = records[host_type]
        if isinstance(obj, Rec) and obj.class_name == host_type:
            return obj
        if not isinstance(obj, rt.cls):
            raise bad()
        return rt.snapshot(obj, records)
    if host_type not in RETURN_TABLE:
        raise BoundaryTypeError(f"{what}: host type {host_type} has no Lucid counterpart")
    if host_type == "void":
        return TRUE
    kind = RETURN_TABLE[host_type]
    if kind == "Int":
        if isinstance(obj, bool) or not isinstance(obj, int):
            raise bad()
        lo, hi = HOST_INT_RANGES[host_type]
        if not lo <= obj <= hi:
            raise bad()
        return Int(obj)
    if kind in ("Float", "Double"):
        if isinstance(obj, bool) or not isinstance(obj, (int, float)):
            raise bad()
        return Float(to_f32(float(obj))) if kind == "Float" else Double(float(obj))
    if kind == "Bool":
        if not isinstance(obj, bool):
            raise bad()
        return Bool(obj)
    if kind == "String":
        if not isinstance(obj, str) or (host_type == "char" and len(obj) != 1):
            raise bad()
        return Str(obj)
    raise bad()
