"""GIPSY type descriptors and the host/Lucid boundary table."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownHostType

SCALAR_KINDS = ("Int", "Float", "Double", "Bool", "String", "Void", "Dimension",
                "Embed", "Identifier", "Operator")


@dataclass(frozen=True)
class GipsyType:
    kind: str
    element: "GipsyType | None" = None
    class_name: str | None = None
    params: tuple["GipsyType", ...] = ()
    ret: "GipsyType | None" = None

    def __post_init__(self):
        if self.kind == "Array":
            if self.element is None:
                raise ValueError("Array type needs an element type")
            if self.element.kind == "Void":
                raise ValueError("Array element kind cannot be Void")
        elif self.kind == "Record":
            if not self.class_name:
                raise ValueError("Record type needs a class name")
        elif self.kind == "Function":
            if self.ret is None:
                raise ValueError("Function type needs a return type")
            if any(p.kind == "Void" for p in self.params):
                raise ValueError("Void cannot be a parameter type")
        elif self.kind not in SCALAR_KINDS:
            raise ValueError(f"unknown type kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == "Array":
            return f"{self.element}[]"
        if self.kind == "Record":
            return self.class_name
        if self.kind == "Function":
            return "(" + ",".join(map(str, self.params)) + f")->{self.ret}"
        return self.kind


INT = GipsyType("Int")
FLOAT = GipsyType("Float")
DOUBLE = GipsyType("Double")
BOOL = GipsyType("Bool")
STRING = GipsyType("String")
VOID = GipsyType("Void")
DIMENSION = GipsyType("Dimension")


def array_of(t: GipsyType) -> GipsyType:
    return GipsyType("Array", element=t)


def record(name: str) -> GipsyType:
    return GipsyType("Record", class_name=name)


def function(params, ret: GipsyType) -> GipsyType:
    return GipsyType("Function", params=tuple(params), ret=ret)


# Host row -> Lucid kind, one table per direction.
RETURN_TABLE = {
    "int": "Int", "byte": "Int", "long": "Int",
    "float": "Float",
    "double": "Double",
    "boolean": "Bool",
    "char": "String", "String": "String",
    "void": "Bool",
}

PARAMETER_TABLE = {
    "String": ("String",),
    "float": ("Float",),
    "double": ("Double",),
    "int": ("Int", "Dimension"),
    "boolean": ("Bool",),
}

HOST_TYPE_NAMES = frozenset(RETURN_TABLE) | frozenset(PARAMETER_TABLE)

# Signed ranges of integral host rows, used when narrowing Lucid Int.
HOST_INT_RANGES = {
    "byte": (-(2 ** 7), 2 ** 7 - 1),
    "int": (-(2 ** 31), 2 ** 31 - 1),
    "long": (-(2 ** 63), 2 ** 63 - 1),
}


def type_match(host_type: str, lucid_type: GipsyType, direction: str) -> bool:
    """True iff the boundary table pairs ``host_type`` with ``lucid_type``."""
    if host_type not in HOST_TYPE_NAMES:
        raise UnknownHostType(f"unknown host type {host_type!r}")
    if direction == "return":
        return RETURN_TABLE.get(host_type) == lucid_type.kind
    if direction == "parameter":
        return lucid_type.kind in PARAMETER_TABLE.get(host_type, ())
    raise ValueError(f"direction must be 'return' or 'parameter', not {direction!r}")


# Names accepted in prototypes; host-flavoured aliases map to the same kinds.
PROTOTYPE_TYPE_NAMES = {
    "int": INT, "long": INT, "byte": INT,
    "double": DOUBLE,
    "float": FLOAT,
    "bool": BOOL, "boolean": BOOL,
    "char": STRING, "string": STRING, "String": STRING,
    "void": VOID,
}


def prototype_type(name: str) -> GipsyType:
    """Lucid type for a TYPE token of a function prototype."""
    return PROTOTYPE_TYPE_NAMES.get(name) or record(name)


def natural_host_type(t: GipsyType) -> str:
    """Default host type name a prototype type maps to (used for native code)."""
    return {
        "Int": "int", "Float": "float", "Double": "double", "Bool": "boolean",
        "String": "String", "Void": "void", "Dimension": "int",
    }.get(t.kind) or (t.class_name if t.kind == "Record" else str(t))
