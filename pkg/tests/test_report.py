import json

from bicrossed.report import Report


def test_counts_and_witness_cap():
    r = Report("demo")
    r.tick(3)
    assert r.ok and "pass (3 checks)" in r.summary()
    for k in range(100):
        r.fail("law", k=k)
    assert not r.ok and r.n_failures == 100
    assert len(r.failures) < 100
    assert r.first_failure() == "law (k=0)"
    json.dumps(r.to_json())


def test_merge():
    a, b = Report("a"), Report("b")
    a.tick()
    b.tick(2)
    b.fail("x")
    a.merge(b)
    assert a.checked == 3 and a.n_failures == 1 and a.failures[0]["axiom"] == "x"
