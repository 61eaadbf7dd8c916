"""Acceptance gate: eleven end-to-end criteria, one pass/fail line each.

Every criterion runs the relevant harness checks, reports a single line
with its outcome and elapsed time, and asserts both correctness and the
stated time budget.  Criterion 11 injects two deliberate corruptions and
demands that the battery notices each one.
"""

import copy
import time

import pytest

import weilgamma.br2s as br2s
import weilgamma.harness as harness
import weilgamma.torus as torus
from weilgamma.localfield import parse_field, square_class
from weilgamma.rootdata import ChevalleyAction, _as_datum
from weilgamma.harness import (
    br2_axiom_checks,
    matrix_instances,
    suite_clifford_oracle,
    suite_combo,
    suite_froehlich,
    suite_jl,
    suite_lattice,
    suite_main_theorem_matrix,
    suite_spinor,
    suite_torus_binary,
    wall_lemma_checks,
)


def _report(num, name, budget, fn):
    start = time.monotonic()
    checks = fn()
    elapsed = time.monotonic() - start
    bad = [c for c in checks if not c["ok"]]
    ok = not bad and elapsed < budget
    mark = "PASS" if ok else "FAIL"
    line = (f"[{mark}] criterion {num:02d} {name}: "
            f"{len(checks) - len(bad)}/{len(checks)} checks in {elapsed:.1f}s "
            f"(budget {budget:.0f}s)")
    print(line)
    for c in bad[:5]:
        print(f"       failed: {c['name']} :: {c['detail'][:120]}")
    assert not bad, f"criterion {num}: {len(bad)} failed checks"
    assert elapsed < budget, f"criterion {num}: {elapsed:.1f}s over budget"


def test_criterion_01_brauer_pair_axioms():
    _report(1, "graded Brauer pair axioms, six fields", 1.0,
            br2_axiom_checks)


def test_criterion_02_clifford_oracle_matches_wall():
    _report(2, "Clifford algebra classes equal Wall pairs", 30.0,
            suite_clifford_oracle)


def test_criterion_03_wall_lemmas_random_forms():
    _report(3, "composition/scaling/chain laws on random forms", 10.0,
            wall_lemma_checks)


def test_criterion_04_binary_weil_vs_epsilon():
    _report(4, "Gauss indices of norm forms equal epsilon factors", 60.0,
            suite_jl)


def test_criterion_05_combined_phase_formula():
    _report(5, "stabilized phases match the algebraic index", 120.0,
            suite_combo)


def test_criterion_06_twisted_form_invariants():
    _report(6, "descent invariants equal characters plus spinor term", 60.0,
            suite_froehlich)


def test_criterion_07_lattice_bookkeeping():
    _report(7, "lattice integrality, dual quotients, reduced blocks", 5.0,
            suite_lattice)


def test_criterion_08_spinor_norm_routes():
    _report(8, "spinor norms of Weyl actions by two routes", 30.0,
            suite_spinor)


def test_criterion_09_binary_torus_descent():
    _report(9, "binary torus descent equals the local symbol", 30.0,
            suite_torus_binary)


def test_criterion_10_main_theorem_matrix():
    assert len(matrix_instances()) >= 40
    _report(10, "main identity matrix at all character levels", 300.0,
            suite_main_theorem_matrix)


def _tampered_chevalley(datum, flip_signs=False):
    """A fresh action with exactly one root-space sign negated on C2."""
    datum = _as_datum(datum)
    act = ChevalleyAction(datum)
    if datum.name == "C2":
        act = copy.copy(act)
        act.gen_vsign = [list(s) for s in act.gen_vsign]
        act.gen_vsign[0][1] = -act.gen_vsign[0][1]
    return act


def test_criterion_11_negative_controls(monkeypatch):
    start = time.monotonic()

    # one Chevalley sign: the C2 instances of the matrix must stop passing
    monkeypatch.setattr(torus, "chevalley_action", _tampered_chevalley)
    spec = harness.InstanceSpec(field="Qp:3", cartan_type="C2", frame_e=2,
                                w={"tau": (0, 1, 0, 1)})
    chevalley_detected = False
    try:
        report = harness.verify_main_theorem(spec)
        chevalley_detected = report.verdict != "PASS"
    except Exception:
        chevalley_detected = True
    monkeypatch.undo()

    # one Hilbert table entry: the Clifford oracle comparison must fail
    real_bit = br2s.hilbert_bit
    p_cls = square_class(parse_field("Qp:5")(5))

    def tampered_bit(a, b):
        bit = real_bit(a, b)
        if a == p_cls and b == p_cls:
            bit ^= 1
        return bit

    monkeypatch.setattr(br2s, "hilbert_bit", tampered_bit)
    clifford_checks = suite_clifford_oracle()
    hilbert_detected = any(not c["ok"] for c in clifford_checks)
    monkeypatch.undo()

    elapsed = time.monotonic() - start
    ok = chevalley_detected and hilbert_detected and elapsed < 60.0
    mark = "PASS" if ok else "FAIL"
    print(f"[{mark}] criterion 11 negative controls: "
          f"chevalley={'detected' if chevalley_detected else 'MISSED'}, "
          f"hilbert={'detected' if hilbert_detected else 'MISSED'} "
          f"in {elapsed:.1f}s (budget 60s)")
    assert chevalley_detected, "flipped Chevalley sign went unnoticed"
    assert hilbert_detected, "flipped Hilbert entry went unnoticed"
    assert elapsed < 60.0


def test_battery_still_green_after_controls():
    """The controls must not leak: a clean rerun stays green."""
    checks = suite_torus_binary()
    assert all(c["ok"] for c in checks)
