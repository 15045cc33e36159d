import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from rangesched import (
    FixedOrderScheduler,
    GridSearchScheduler,
    OrthogonalScheduler,
    PathInflationScheduler,
    TspScheduler,
    make_scheduler,
)

ALL_SCHEDULERS = [
    OrthogonalScheduler,
    FixedOrderScheduler,
    TspScheduler,
    PathInflationScheduler,
    GridSearchScheduler,
]


@pytest.mark.parametrize("cls", ALL_SCHEDULERS)
def test_fit_exposes_schedule_attributes(cls, triangle):
    est = cls(tau_ns=10.0).fit(triangle)
    assert est.n_nodes_ == 3
    assert est.delays_ns_.shape == (3,)
    assert est.delays_ns_.min() == 0.0
    assert est.report_cycle_ns_ > 0
    assert est.interference_report(triangle).valid


@pytest.mark.parametrize("cls", ALL_SCHEDULERS)
def test_sklearn_protocol(cls, triangle):
    est = cls(tau_ns=7.5)
    cloned = clone(est)
    assert cloned.get_params() == est.get_params()
    est.set_params(tau_ns=10.0)
    assert est.get_params()["tau_ns"] == 10.0
    with pytest.raises(NotFittedError):
        cls().interference_report(triangle)


def test_reference_report_cycles(triangle):
    assert OrthogonalScheduler(tau_ns=10.0).fit(triangle).report_cycle_ns_ == pytest.approx(140.0)
    assert FixedOrderScheduler(tau_ns=10.0).fit(triangle).report_cycle_ns_ == pytest.approx(
        185.0 / 3.0
    )
    assert PathInflationScheduler(tau_ns=10.0).fit(triangle).report_cycle_ns_ == pytest.approx(
        185.0 / 3.0
    )
    assert TspScheduler(tau_ns=10.0).fit(triangle).report_cycle_ns_ == pytest.approx(190.0 / 3.0)


def test_solver_specific_attributes(triangle):
    orth = OrthogonalScheduler(tau_ns=10.0).fit(triangle)
    assert orth.slot_ns_ == pytest.approx(140.0 / 3.0)

    tsp = TspScheduler(tau_ns=10.0).fit(triangle)
    assert tsp.tour_cost_ns_ == pytest.approx(30.0)
    assert tsp.rotation_ == (1, 0, 2)

    ipa = PathInflationScheduler(tau_ns=10.0).fit(triangle)
    np.testing.assert_allclose(ipa.cum_adjust_m_, [0.0, 2.5, 4.5])
    assert ipa.n_passes_ == 2

    grid = GridSearchScheduler(tau_ns=10.0, step_ns=0.1).fit(triangle)
    assert not grid.extended_bound_
    assert grid.bound_ns_ == pytest.approx(140.0 / 3.0)


def test_fixed_order_accepts_custom_order(triangle):
    est = FixedOrderScheduler(tau_ns=10.0, order=(1, 0, 2)).fit(triangle)
    np.testing.assert_allclose(est.delays_ns_, [35.0 / 3.0, 0.0, 50.0 / 3.0], atol=1e-9)


def test_tsp_two_node_bypass():
    d = np.array([[0.0, 6.0], [6.0, 0.0]])
    est = TspScheduler(tau_ns=10.0).fit(d)
    np.testing.assert_array_equal(est.delays_ns_, [0.0, 0.0])
    assert est.tour_ is None


def test_fit_validates_input(triangle):
    with pytest.raises(ValueError):
        FixedOrderScheduler().fit(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        FixedOrderScheduler().fit(np.zeros((2, 3)))


def test_make_scheduler_registry(triangle):
    est = make_scheduler("ca", tau_ns=10.0, order=(0, 2, 1), restarts=4)
    assert isinstance(est, FixedOrderScheduler)
    assert est.order == (0, 2, 1)
    with pytest.raises(ValueError, match="unknown algorithm"):
        make_scheduler("annealing")
