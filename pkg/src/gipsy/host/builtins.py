"""The standard host set, pre-registered at startup."""

from __future__ import annotations

import math
import random
import threading
import time

from ..core.values import shortest_f32, to_f32
from .output import emit
from .registry import HostRegistry, immutable

_rng = random.Random()
_rng_lock = threading.Lock()


@immutable
def sin(x: "double") -> "double":
    return math.sin(x)


@immutable
def cos(x: "double") -> "double":
    return math.cos(x)


@immutable
def sqrt(x: "double") -> "double":
    return math.sqrt(x)


@immutable
def pi() -> "double":
    return math.pi


def printLine(text: "String") -> "void":
    emit(text)


def printInt(value: "int") -> "void":
    emit(value)


def printDouble(value: "double") -> "void":
    emit(repr(value))


def random_() -> "double":
    with _rng_lock:
        return _rng.random()


def currentTimeMillis() -> "long":
    return int(time.time() * 1000)


def getIninitalRandomState() -> "int":
    # Either 1 or 2 (the listing's spelling is kept on purpose).
    with _rng_lock:
        return _rng.randint(1, 2)


def chew(i: "int") -> "boolean":
    emit(f"Philo {i} is chewing smth tasty now.")
    emit(f"Philo {i} finished chewing.")
    return True


def brainstormIdea(i: "int") -> "boolean":
    emit(f"Philo {i} is heavily thinking now.")
    emit(f"Philo {i} finished thinking.")
    return True


def _f(x: float) -> float:
    return to_f32(x)


class Car:
    x: "int"
    speed: "float"
    speeddrop: "float"
    fuel: "float"
    fueldrainrate: "float"

    def __init__(self):
        # Already moving when constructed.
        self.x = 0
        self.speed = _f(100.0)
        self.fuel = _f(40.5)
        self.fueldrainrate = _f(0.018)
        self.speeddrop = _f(0.1)

    @immutable
    def move(self, steps: "int") -> "Car":
        if self.fuel > 0:
            self.fuel = _f(self.fuel - _f(_f(self.fueldrainrate * self.speed) * steps))
            self.x += steps
        elif self.speed > 0:
            self.x += steps
            self.speed = _f(self.speed - _f(self.speeddrop * steps))
        return self

    def printCarState(self) -> "void":
        emit(f"Speed: {shortest_f32(self.speed)}, fuel: {shortest_f32(self.fuel)}, "
             f"drain: {shortest_f32(self.fueldrainrate)}, x: {self.x}, "
             f"speeddrop: {shortest_f32(self.speeddrop)}")


class Nat42:
    n: "int"

    def __init__(self):
        self.n = 42

    @immutable
    def inc(self) -> "Nat42":
        self.n += 1
        return self

    def print(self) -> "void":
        emit(f"n = {self.n}")


STANDARD = [sin, cos, sqrt, pi, printLine, printInt, printDouble, currentTimeMillis,
            getIninitalRandomState, chew, brainstormIdea]
RECORDS = [Car, Nat42]


@immutable
def merge(x: "int", y: "int") -> "int":
    return min(x, y)


@immutable
def square(x: "int") -> "int":
    return x * x


# Bodies available to manifests but not registered by default.
LIBRARY = {"merge": merge, "square": square}


def standard_registry() -> HostRegistry:
    reg = HostRegistry()
    for fn in STANDARD:
        reg.register_callable(fn)
    reg.register_callable(random_, "random")
    for cls in RECORDS:
        reg.register_record(cls)
    reg.library.update(LIBRARY)
    return reg
