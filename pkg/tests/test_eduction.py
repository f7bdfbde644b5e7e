import socket

import numpy as np
import pytest
from conftest import evaluate

from gipsy import Engine, compile_source
from gipsy.core.context import Context
from gipsy.core.errors import CommunicationError, DepthExceeded, EvaluationFailed, HostError
from gipsy.core.values import Double, Int
from gipsy.eduction import Demand, NullCP, SocketCP, ThreadedCP, Warehouse, gc, run
from gipsy.host.builtins import standard_registry
from gipsy.host.registry import HostFunction

NAT1 = "N @.d 2 where dimension d; N = 42 fby.d (N + 1); end"

HAMMING = """H @.d 6
where
    H = 1 fby merge(merge(2 * H, 3 * H), 5 * H);
    merge(x, y) = if(xx <= yy) then xx else yy
    where
        xx = x upon(xx <= yy);
        yy = y upon(yy <= xx);
    end;
end;
"""


def test_nat1():
    assert run(compile_source(NAT1, dialect="indexical")) == [(0, Int(44))]


def test_wvr_example():
    src = "(X wvr.d Y) @.d 3 where dimension d; X = #.d; Y = #.d % 2 == 0; end"
    evens = [t for t in range(10) if t % 2 == 0]
    assert evaluate(src, "indexical")[0] == [Int(evens[3])]


def test_upon_false_is_first():
    src = "[" + ", ".join(f"(X upon.d false) @.d {t}" for t in range(5)) + \
        "] where dimension d; X = #.d + 7; end"
    (arr,), _, _ = evaluate(src, "indexical")
    assert [v.value for v in arr.items] == [7] * 5


def test_conditional_is_lazy():
    assert evaluate("if true then 1 else (1 / 0) fi", "gipl")[0] == [Int(1)]


def test_two_segment_program():
    src = "#GIPL\n1 + 1\n#INDEXICALLUCID\nfirst.d #.d where dimension d; end\n"
    assert run(compile_source(src)) == [(0, Int(2)), (1, Int(0))]


def test_host_failure_is_tagged_with_its_tree():
    reg = standard_registry().derive()

    def boom():
        raise RuntimeError("boom")
    reg.register(HostFunction("boom", (), "int", False, boom))
    prog = compile_source("#funcdecl\nint boom();\n#GIPL\n1\n#GIPL\nboom()\n", registry=reg)
    with pytest.raises(EvaluationFailed) as info:
        run(prog)
    (idx, err), = info.value.errors
    assert idx == 1 and isinstance(err, HostError)
    assert info.value.results == [(0, Int(1))]


def test_depth_limit():
    prog = compile_source("N @.d 1 where dimension d; N = N @.d (#.d + 1); end", dialect="gipl")
    with Engine(depth_limit=500) as engine:
        report = engine.run(prog)
    assert isinstance(report.errors[0][1], DepthExceeded)


# warehouse -------------------------------------------------------------------

def test_lru_eviction_order():
    wh = Warehouse(2)
    wh.put("e1", 1)
    wh.put("e2", 2)
    wh.get("e1")
    wh.put("e3", 3)
    assert wh.keys() == ["e1", "e3"]
    assert wh.counters()["evictions"] == 1


def test_capacity_zero_stores_nothing():
    wh = Warehouse(0)
    wh.put("k", 1)
    assert len(wh) == 0 and "k" not in wh
    prog = compile_source(HAMMING, dialect="indexical")
    with Engine(warehouse=wh) as engine:
        assert engine.run(prog).results == [(0, Int(8))]
    assert wh.counters()["puts"] == 0


def test_gc_and_purity_under_eviction():
    prog = compile_source(NAT1, dialect="indexical")
    wh = Warehouse()
    with Engine(warehouse=wh) as engine:
        engine.run(prog)
        assert len(wh) > 0
        wh.capacity = 0
        assert gc(wh) > 0 and len(wh) == 0
        wh.capacity = None
        assert engine.run(prog).results == [(0, Int(44))]


def test_memo_law():
    prog = compile_source(NAT1, dialect="indexical")
    with Engine() as engine:
        first = engine.run(prog)
        before = engine.warehouse.counters()["hits"]
        second = engine.run(prog)
        assert engine.warehouse.counters()["hits"] == before + 1
    assert first.results == second.results
    assert second.host_calls == 0 and second.rule_applications < first.rule_applications


def test_context_order_does_not_split_entries():
    src = "X @.a 1 @.b 2 + X @.b 2 @.a 1 where dimension a, b; X = #.a * 10 + #.b; end"
    values, report, engine = evaluate(src, "gipl")
    assert values == [Int(24)]
    assert engine.warehouse.counters()["hits"] >= 1


def test_hamming_benefits_from_the_warehouse():
    prog = compile_source(HAMMING, dialect="indexical")
    counts = {}
    for cap in (None, 4, 0):
        with Engine(capacity=cap) as engine:
            report = engine.run(prog)
        assert report.results == [(0, Int(8))]
        counts[cap] = report.rule_applications
    assert counts[None] < counts[4] < counts[0]


def test_immutable_functional_demand_runs_once():
    reg = standard_registry().derive()
    calls = []
    reg.register(HostFunction("slow", ("int",), "int", True, lambda x: calls.append(x) or x))
    src = "#funcdecl\nimmutable int slow(int);\n#GIPL\n[slow(3), slow(3), slow(4)]\n"
    (arr,) = [v for _, v in run(compile_source(src, registry=reg))]
    assert [v.value for v in arr.items] == [3, 3, 4]
    assert calls == [3, 4]


def test_variable_calling_a_mutable_function_is_not_cached():
    values, report, engine = evaluate(
        "#funcdecl\nvoid printInt(int);\n#GIPL\n[P, P] where P = printInt(5); end\n")
    assert report.outputs[0] == ["5", "5"]


# communication procedures ------------------------------------------------------

def sin_demand():
    return Demand("Functional", "sin", (Double(0.0),), Context())


def test_null_cp():
    value, lines = NullCP(standard_registry()).dispatch(sin_demand())
    assert value == Double(0.0) and lines == []


def test_socket_cp_matches_null_cp():
    with SocketCP(standard_registry(), workers=2) as cp:
        value, _ = cp.dispatch(sin_demand())
        assert cp.stats.total_served() == 1
    assert value == Double(0.0)


def test_threaded_cp():
    with ThreadedCP(standard_registry()) as cp:
        assert cp.dispatch(sin_demand())[0] == Double(0.0)


def test_socket_cp_closed_port():
    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    addr = s.getsockname()
    s.close()
    with pytest.raises(CommunicationError) as info:
        SocketCP(standard_registry(), addresses=[addr]).open()
    assert (info.value.phase, info.value.cause) == ("open", "refused")


def test_socket_worker_failure_is_retried():
    cp = SocketCP(standard_registry(), workers=2).open()
    try:
        cp.servers[0].close()
        for _ in range(4):
            assert cp.dispatch(sin_demand())[0] == Double(0.0)
    finally:
        cp.close()


def test_threaded_engine_runs_trees_concurrently():
    src = "#GIPL\n1 + 1\n#INDEXICALLUCID\nfirst.d #.d where dimension d; end\n"
    with Engine(threaded=True) as engine:
        assert engine.run(compile_source(src)).results == [(0, Int(2)), (1, Int(0))]


# objects ----------------------------------------------------------------------

def car_fuel_oracle(tags):
    """Float32 re-derivation of the Car's fuel stream, one move per tag."""
    f32 = np.float32
    fuel, speed, drain, drop = f32(40.5), f32(100.0), f32(0.018), f32(0.1)
    out = []
    for t in range(max(tags) + 1):
        out.append(float(fuel))
        if fuel > 0:
            fuel = f32(fuel - f32(drain * speed) * f32(t))
        elif speed > 0:
            speed = f32(speed - f32(drop * f32(t)))
    return [out[t] for t in tags]


def test_car_matches_float32_oracle():
    tags = list(range(16))
    src = ("#typedecl\nCar;\n#OBJECTIVELUCID\n[" +
           ", ".join(f"(C @.time {t}).fuel" for t in tags) +
           "]\nwhere\n    C = Car() fby.time S;\n    S = C.move(#time);\nend;\n")
    (arr,), _, _ = evaluate(src)
    assert [v.value for v in arr.items] == pytest.approx(car_fuel_oracle(tags), rel=1e-6)
