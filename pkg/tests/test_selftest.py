import random

from dbe import groups
from dbe.groups import pair
from dbe.selftest import EXPECTED_FALSE, pairing_fault, relation_suite, run_selftest


def test_selftest_passes():
    ok, report = run_selftest()
    assert ok, report
    assert all(line.startswith("PASS") for line in report.splitlines()[:-1])


def test_selftest_deterministic():
    assert run_selftest(b"abc") == run_selftest(b"abc")


def test_fault_detected():
    ok, report = run_selftest(fault=True)
    assert not ok
    assert sum(line.startswith("FAIL") for line in report.splitlines()) >= 1
    assert groups._pairing_fault is None


def test_fault_is_one_shot(sym20):
    g = sym20.generator
    with pairing_fault(nth=2):
        first, second, third = pair(g, g), pair(g, g), pair(g, g)
    assert first == third != second


def test_relation_verdicts_agree(sym20, curve20):
    a = relation_suite(sym20, random.Random(3))
    b = relation_suite(curve20, random.Random(3))
    assert a == b
    assert {k for k, v in a.items() if not v} == EXPECTED_FALSE
