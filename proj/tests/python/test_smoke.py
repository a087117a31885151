import os

import pytest

import cps

FIX = os.environ.get("CPS_FIXTURES", os.path.join(os.path.dirname(__file__), "..", "fixtures"))


def machine(name):
    return cps.load_machine(os.path.join(FIX, "machines", name + ".cps"))


def test_universe_literals():
    u = cps.Universe(3)
    x = u.parse("{a0, {a1}, 0}")
    assert u.literal(u.parse("{{}}")) == "1"
    assert u.rank(x) == 2
    assert u.parse("{0, {a1}, a0}") == x
    assert u.make_set([u.atom(0), u.atom(1)]) == u.parse("{a1, a0}")
    assert u.permute([1, 0, 2], u.atom(0)) == u.atom(1)
    assert u.min_support(u.parse("{a0}")) == [0]
    with pytest.raises(cps.ParseError):
        u.parse("{a0,")


def test_runs():
    assert cps.run(machine("accept"), naked_set=3)["outcome"] == "accept"
    assert cps.run(machine("skip"), naked_set=3)["outcome"] == "diverges"
    r = cps.run(machine("space"), naked_set=3)
    assert r["outcome"] == "space-exceeded"
    with open(os.path.join(FIX, "inputs", "naked3.txt")) as f:
        assert cps.run(machine("accept"), input=f.read())["outcome"] == "accept"
    with pytest.raises(ValueError):
        cps.run(machine("accept"))
    with pytest.raises(cps.ParseError):
        cps.Machine("rule:\n  Halt := \nspace: 1\n")


def test_lockstep_and_extract():
    for name in ["accept", "reject", "diverge", "parallel"]:
        r = cps.lockstep(machine(name), naked_set=3)
        assert r["ok"], name
    assert cps.lockstep(machine("accept"), naked_set=3)["verdict"] == "accept"
    assert cps.lockstep(machine("diverge"), naked_set=3)["verdict"] == "unknown"
    with open(os.path.join(FIX, "golden", "skip.pfp")) as f:
        assert machine("skip").extract() == f.read()


def test_supports_and_fragments():
    assert cps.smallest_binomial_n(1) == 4
    rep = cps.support_report(machine("skip"), naked_set=4, k=1)
    assert rep["max_support"] <= 1 and rep["binomial_condition"]
    f = cps.Fragment(3, 1, 1)
    assert "{a0, a1, a2}" in f.literals()
    g = cps.Fragment.load(f.export())
    assert g.literals() == f.literals()
    phi, sigma = f.form_of(f.universe.atom(2))
    assert phi == "c0" and sigma == [2]
    assert cps.in_eq_identical(1, 1, 4, 5)
    with pytest.raises(cps.BudgetExceeded):
        cps.Fragment(8, 1, 4)


def test_pebble():
    a, b = cps.Fragment(5, 1, 1), cps.Fragment(6, 1, 1)
    v = cps.verify(a, b, m=2, depth=2)
    assert v["ok"] and v["complete"]
    assert not cps.solve(a, b, m=2, depth=2)["spoiler_wins"]
    assert cps.sample(a, b, m=3, depth=3, samples=50, seed=1)["ok"]
    small, big = cps.Fragment(2, 1, 1), cps.Fragment(3, 1, 1)
    s = cps.solve(small, big, m=3, depth=3)
    assert s["spoiler_wins"] and "first_move" in s
