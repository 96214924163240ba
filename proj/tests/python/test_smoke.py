import pathlib

import pytest

import tccp

ROOT = pathlib.Path(__file__).resolve().parents[2]
PHOTOCOPIER = (ROOT / "programs" / "photocopier.tccp").read_text()
ENTRY = "initialize(MIdle) || tell(MIdle = 5)"


def test_check_and_declarations():
    tccp.check(PHOTOCOPIER)
    decls = dict(tccp.declarations(PHOTOCOPIER))
    assert decls["photocopier"] == ["C", "A", "MIdle", "E", "T"]
    assert decls["initialize"] == ["MIdle"]


def test_check_reports_position():
    with pytest.raises(tccp.TccpError, match="2:1"):
        tccp.check("p(X) :- tell(X = 1)\nq(Y) :- skip.\n")
    with pytest.raises(ValueError):
        tccp.check("p(A, B) :- skip.\nq(X) :- p(X).\n")


def test_pretty_round_trip():
    once = tccp.pretty(PHOTOCOPIER)
    assert tccp.pretty(once) == once


def test_run_photocopier():
    trace = tccp.run(PHOTOCOPIER, ENTRY, steps=30, policy="last")
    assert [s["clock"] for s in trace] == list(range(31))
    last = trace[-1]
    assert last["status"] == "running" and last["consistent"]
    assert last["dims"] == 6
    assert last["store"]["linear"]["dims"] == 6
    assert trace[0]["store"] is None


def test_failed_run():
    trace = tccp.run("", "tell(X > 0) || tell(X < 0)", steps=5)
    assert trace[-1]["status"] == "failed"


def test_policies():
    with pytest.raises(ValueError):
        tccp.run(PHOTOCOPIER, ENTRY, policy="random")
    with pytest.raises(ValueError):
        tccp.run(PHOTOCOPIER, ENTRY, policy="first", seed=1)
    a = tccp.run_jsonl(PHOTOCOPIER, ENTRY, steps=40, policy="random", seed=7, dump_every=1)
    b = tccp.run_jsonl(PHOTOCOPIER, ENTRY, steps=40, policy="random", seed=7, dump_every=1)
    assert a == b


def test_stats():
    rows = [tccp.stats(PHOTOCOPIER, ENTRY, steps=n, policy="last") for n in (30, 100, 500)]
    assert [r["dims"] for r in rows] == [6, 6, 6]
    assert [r["nodes"] for r in rows] == [28, 87, 419]
    assert [r["registers"] for r in rows] == [84, 257, 1254]
    empty = tccp.stats("", steps=3)
    assert (empty["nodes"], empty["registers"]) == (1, 0)


def test_simulation_stepping():
    sim = tccp.Simulation("", "tell(X = [a|_]) || ask(X = [a|_]) -> tell(Y = [b|_])")
    assert sim.status == "running"
    sim.step()
    assert sim.entails("X = [a|_]") and not sim.entails("Y = [b|_]")
    sim.step(10)
    assert sim.clock == 3 and sim.status == "quiescent"
    assert sim.value("Y") == "[b|_]"
    assert "consistent: yes" in sim.dump()
    with pytest.raises(tccp.TccpError):
        sim.value("Nope")
