"""Exit criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line and asserts the exact
outcome; the lines are repeated in the terminal summary.
"""
import pytest

from jetforge.acceptance import CHECKS, run_check

pytestmark = pytest.mark.acceptance


@pytest.fixture
def run(acceptance_log):
    def _run(number):
        result = run_check(number)
        print(result.line())
        acceptance_log[number] = result.line()
        assert result.passed, result.detail

    return _run


def test_01_flow_closed_form(run):
    run(1)


def test_02_exp_log_bijectivity(run):
    run(2)


def test_03_bch_coefficients(run):
    run(3)


def test_04_commutator_leading_term(run):
    run(4)


def test_05_poincare_linearization(run):
    run(5)


def test_06_commutator_realization(run):
    run(6)


def test_07_normal_form_invariants(run):
    run(7)


def test_08_finite_group_averaging(run):
    run(8)


def test_09_centralizer(run):
    run(9)


def test_10_free_subgroup_certificate(run):
    run(10)


def test_11_relation_instance(run):
    run(11)


def test_12_separation_oracle(run):
    run(12)


def test_13_cohopf_embedding(run):
    run(13)


def test_14_homomorphism_suite(run):
    run(14)


def test_every_criterion_has_a_test():
    numbers = [n for n, _, _ in CHECKS]
    assert numbers == list(range(1, 15))
    names = {name for name in globals() if name.startswith("test_") and name[5:7].isdigit()}
    assert {int(name[5:7]) for name in names} == set(numbers)
