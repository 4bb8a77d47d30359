"""Acceptance gate: every numbered criterion, one pass/fail line each.

Runs the same checks as the CLI ``verify`` subcommand.  The third
criterion's published proportional-navigation effort column is asserted
faithfully and is expected to fail: the same runs reproduce the
published PN impact times to 0.12% and the effort integral is
step-size-converged, so the published efforts are not reproducible from
the stated law (see fitguide.verification for the analysis).
"""

import math

import pytest

from fitguide import CartesianState, Scenario, simulate
from fitguide.verification import (
    SALVO_PN_EFFORT,
    SALVO_PN_IMPACT,
    SALVO_STARTS,
    SALVO_TF,
    check_case_c,
    check_dataset,
    check_properties,
    check_salvo,
    check_table1_network,
    check_table1_oracle,
    check_training,
    _check_extremal_structure,
    _check_gradients,
    _check_hamiltonian,
    _check_mirror,
    _check_rescaling,
    _check_round_trips,
)


def _assert_check(result):
    print(result.line())
    assert result.passed, result.detail


def test_criterion_1_fixed_time_efforts_oracle():
    _assert_check(check_table1_oracle())


def test_criterion_2_fixed_time_efforts_network(model):
    _assert_check(check_table1_network(model))


def test_criterion_3_salvo_oracle_efforts():
    for (x0, y0, th0, v), j_ref in zip(SALVO_STARTS, (3.0916e3, 9.4638e3, 1.5813e4, 9.4364e3)):
        res = simulate(Scenario(CartesianState(x0, y0, th0), v, SALVO_TF, guidance="oracle"))
        assert res.effort == pytest.approx(j_ref, rel=0.01)
        assert res.miss <= 5.0


def test_criterion_3_pn_impact_times():
    for (x0, y0, th0, v), t_ref in zip(SALVO_STARTS, SALVO_PN_IMPACT):
        res = simulate(Scenario(CartesianState(x0, y0, th0), v, SALVO_TF, guidance="pn"))
        assert res.impact_time == pytest.approx(t_ref, rel=0.005)


@pytest.mark.xfail(
    strict=True,
    reason="published PN effort column is not reproducible from the stated "
    "law (gain-3 turn rate on the LOS rate): identical runs match all four "
    "published impact times to 0.12% and the effort integral is step-size "
    "converged to 0.03%, yet the published efforts differ by -6% to -61%; "
    "closing-velocity PN, unhalved integrands, coarse steps and late "
    "termination were all tested and none fits",
)
def test_criterion_3_pn_efforts_published_column():
    for (x0, y0, th0, v), j_ref in zip(SALVO_STARTS, SALVO_PN_EFFORT):
        res = simulate(Scenario(CartesianState(x0, y0, th0), v, SALVO_TF, guidance="pn"))
        assert res.effort == pytest.approx(j_ref, rel=0.01)


def test_criterion_4_global_optimum():
    _assert_check(check_case_c())


def test_criterion_5_dataset_bounds():
    _assert_check(check_dataset(full_grid=True))


def test_criterion_6_hamiltonian_conservation():
    ok, detail = _check_hamiltonian()
    print(detail)
    assert ok, detail


def test_criterion_6_mirror_symmetry(model):
    ok, detail = _check_mirror(model)
    print(detail)
    assert ok, detail


def test_criterion_6_speed_rescaling():
    ok, detail = _check_rescaling()
    print(detail)
    assert ok, detail


def test_criterion_6_extremal_structure():
    ok, detail = _check_extremal_structure()
    print(detail)
    assert ok, detail


def test_criterion_6_gradient_check(model):
    ok, detail = _check_gradients(model)
    print(detail)
    assert ok, detail


def test_criterion_6_round_trips(model, tmp_path):
    ok, detail = _check_round_trips(model, tmp_path)
    print(detail)
    assert ok, detail


def test_criterion_7_training(train_report):
    _assert_check(check_training(train_report))


def test_full_table_summary(model, train_report, reduced_dataset):
    # one combined pass/fail table, matching the CLI verify output; the PN
    # effort sub-check makes criterion 3 report FAIL by design (see xfail)
    from fitguide.verification import run_acceptance

    results = run_acceptance(model=model, report=train_report, dataset=reduced_dataset,
                             full_grid=False)
    by_name = {r.criterion.split()[0]: r for r in results}
    assert by_name["1"].passed
    assert by_name["2"].passed
    assert not by_name["3"].passed  # PN effort column, analyzed in the docstring
    assert by_name["4"].passed
    assert by_name["5"].passed
    assert by_name["6"].passed
    assert by_name["7"].passed
