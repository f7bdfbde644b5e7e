import json

import pytest

from gipsy import compile_source, deserialize, serialize
from gipsy.core.dictionary import Dictionary
from gipsy.core.errors import (ArityMismatch, FormatError, NotADimension, SignatureMismatch,
                               UndefinedIdentifier, UnresolvedFunction, UnresolvedType)
from gipsy.frontend.parser import parse_gipl
from gipsy.host.builtins import standard_registry
from gipsy.host.registry import HostFunction, HostRegistry
from gipsy.semantics.analyze import analyze

NAT1 = "N @.d 2 where dimension d; N = 42 fby.d (N + 1); end"
NAT2 = "N @.d 2 where dimension d; N = if (#.d <= 0) then 42 else (N + 1) @.d (#.d - 1) fi; end"


def kinds(d):
    return {name: kind for _, name, kind, _ in d.rows()}


def test_analyze_nat2():
    d = analyze(parse_gipl(NAT2), Dictionary())
    assert kinds(d) == {"d": "Dim", "N": "Var"}


def test_undefined_identifier():
    with pytest.raises(UndefinedIdentifier):
        analyze(parse_gipl("x where y = 1; end"), Dictionary())


def test_not_a_dimension():
    with pytest.raises(NotADimension):
        analyze(parse_gipl("N @.q 2 where dimension d; N = 1; end"), Dictionary())


def test_arity_checked():
    with pytest.raises(ArityMismatch):
        compile_source("f(1, 2) where f(x) = x; end", dialect="gipl")


def test_link_fft_prototypes():
    prog = compile_source("#funcdecl\ndouble sin(double);\ndouble pi();\n#GIPL\nsin(pi())")
    assert [s.name for s in prog.strefs] == ["pi", "sin"]
    assert all(s.kind == "function" for s in prog.strefs)


def test_link_signature_mismatch():
    reg = HostRegistry()
    reg.register(HostFunction("f", ("double",), "int", True, lambda x: 1))
    with pytest.raises(SignatureMismatch):
        compile_source("#funcdecl\nint f(int);\n#GIPL\nf(1)", registry=reg)


def test_link_record_type():
    prog = compile_source("#typedecl\nCar;\n#OBJECTIVELUCID\nCar().x")
    k = kinds(prog.dictionary)
    assert k["Car"] == "Class"
    assert k["Car.x"] == "ClassVar"
    assert k["Car.move"] == "ClassFun"


def test_link_unknown_record():
    with pytest.raises(UnresolvedType):
        compile_source("#typedecl\nBus;\n#OBJECTIVELUCID\nBus()")


def test_undeclared_host_function_is_unresolved():
    with pytest.raises(UnresolvedFunction):
        compile_source("#funcdecl\nint f1();\n#GIPL\nf1()")


def test_round_trip_structural_equality():
    prog = compile_source(NAT1, dialect="indexical")
    loaded = deserialize(serialize(prog))
    assert loaded == prog
    assert serialize(loaded) == serialize(prog)


def test_document_layout():
    doc = json.loads(serialize(compile_source(NAT1, dialect="indexical")))
    assert list(doc) == ["version", "asts", "dictionary", "strefs", "cpkind", "ics", "natives"]
    assert doc["cpkind"] == "Null"
    assert {"name": "N", "astIndex": 0} in doc["ics"]


@pytest.mark.parametrize("mangle", [
    lambda b: b[: len(b) // 2],
    lambda b: b"\xff" + b,
    lambda b: b"[]",
    lambda b: b.replace(b'"version": 1', b'"version": 99'),
    lambda b: b.replace(b'"N"', b'"M"', 1),
])
def test_format_errors(mangle):
    data = serialize(compile_source(NAT1, dialect="indexical"))
    with pytest.raises(FormatError):
        deserialize(mangle(data))


def test_missing_host_function_on_load():
    prog = compile_source("#funcdecl\ndouble sin(double);\n#GIPL\nsin(0.0)")
    with pytest.raises(UnresolvedFunction, match="sin"):
        deserialize(serialize(prog), HostRegistry())


def test_load_with_a_different_registry():
    prog = compile_source("#funcdecl\ndouble sin(double);\n#GIPL\nsin(0.0)")
    reg = standard_registry()
    assert deserialize(serialize(prog), reg) == prog
