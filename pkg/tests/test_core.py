import numpy as np
import pytest

from rangesched import (
    CdmaConfig,
    MessageParams,
    Schedule,
    arrival_intervals,
    cdma_code_length,
    cdma_throughput,
    concurrency_ok,
    distances,
    evaluate,
    generate_gaussian,
    orthogonal_schedule,
    report_cycle,
    tdma_slot_ns,
    throughput_per_sensor,
    TopologyConfig,
)

from conftest import brute_force_overlaps


def test_message_params_length_is_speed_times_duration():
    p = MessageParams(tau_ns=10.0, mu_m_per_ns=0.3)
    assert p.length_m == 0.3 * 10.0


@pytest.mark.parametrize("tau,mu", [(0.0, 0.3), (-1.0, 0.3), (10.0, 0.0), (10.0, -2.0)])
def test_message_params_rejects_nonpositive(tau, mu):
    with pytest.raises(ValueError):
        MessageParams(tau_ns=tau, mu_m_per_ns=mu)


def test_schedule_validation():
    s = Schedule(np.array([3.0, 0.0, 1.5]))
    assert s.n == 3
    with pytest.raises(ValueError):
        Schedule(np.array([-0.1, 0.0]))
    with pytest.raises(ValueError):
        Schedule(np.array([[0.0, 1.0]]))
    shifted = Schedule(np.array([2.0, 5.0])).canonical()
    assert shifted.delays_ns.min() == 0.0


def test_arrival_intervals_concurrent_triangle(triangle, params):
    ivs = arrival_intervals(triangle, np.zeros(3), params)
    by_sender = {sender: (start, end) for sender, start, end in ivs[0]}
    np.testing.assert_allclose(by_sender[1], (9.5 / 0.3, 9.5 / 0.3 + 10.0))
    np.testing.assert_allclose(by_sender[2], (35.0, 45.0))
    # the two arrivals at receiver 0 overlap on [35, 41.667]
    assert by_sender[1][1] > by_sender[2][0]


def test_arrival_intervals_scheduled_triangle_touch_but_do_not_overlap(triangle, params):
    delays = np.array([0.0, 25.0 / 3.0, 15.0])
    for receiver in arrival_intervals(triangle, delays, params):
        (s0, e0), (s1, e1) = sorted((s, e) for _, s, e in receiver)
        assert e0 <= s1 + 1e-9


def test_arrival_intervals_two_nodes_have_single_sender(params):
    ivs = arrival_intervals(np.array([[0.0, 6.0], [6.0, 0.0]]), np.zeros(2), params)
    assert [len(r) for r in ivs] == [1, 1]


def test_evaluate_concurrent_triangle_collides(triangle, params):
    report = evaluate(triangle, np.zeros(3), params)
    assert not report.valid
    assert report.total_overlap_ns > 1.0
    assert 0.0 <= report.fraction_clean < 1.0


def test_evaluate_scheduled_triangle_clean(triangle, params):
    report = evaluate(triangle, np.array([0.0, 25.0 / 3.0, 15.0]), params)
    assert report.valid
    assert report.total_overlap_ns <= 1e-6
    assert report.fraction_clean == pytest.approx(1.0)


def test_evaluate_two_nodes_always_clean(params):
    d = np.array([[0.0, 4.0], [4.0, 0.0]])
    report = evaluate(d, np.array([0.0, 3.7]), params)
    assert report.valid and report.fraction_clean == 1.0


def test_evaluate_matches_interval_merging_oracle(params):
    rng = np.random.default_rng(123)
    for _ in range(40):
        n = int(rng.integers(2, 9))
        topo = generate_gaussian(
            TopologyConfig(n=n, sigma_m=4.0, seed=int(rng.integers(1 << 31)))
        )
        d = distances(topo)
        delays = rng.uniform(0.0, 40.0, size=n)
        report = evaluate(d, delays, params)
        expected = brute_force_overlaps(d, delays, params)
        np.testing.assert_allclose(report.per_receiver_overlap_ns, expected, atol=1e-9)
        np.testing.assert_allclose(
            report.fraction_clean,
            1.0 - sum(expected) / (n * (n - 1) * params.tau_ns),
            atol=1e-12,
        )


def test_fraction_clean_zero_when_everything_collides(params):
    # four co-located nodes transmitting together corrupt every packet fully
    d = np.full((4, 4), 1e-6)
    np.fill_diagonal(d, 0.0)
    report = evaluate(d, np.zeros(4), params)
    assert report.fraction_clean == pytest.approx(0.0, abs=1e-9)
    assert not report.valid


def test_report_cycle_reference_values(triangle, params):
    assert report_cycle(triangle, np.array([0.0, 25.0 / 3.0, 15.0]), params) == pytest.approx(
        61.6667, abs=1e-3
    )
    # the rounded reference value is 62 ns
    assert abs(report_cycle(triangle, np.array([0.0, 25.0 / 3.0, 15.0]), params) - 62.0) < 0.5
    equilateral = np.array([[0.0, 0.3, 0.3], [0.3, 0.0, 0.3], [0.3, 0.3, 0.0]])
    assert report_cycle(equilateral, np.zeros(3), params) == pytest.approx(11.0)
    delays_bac = np.array([35.0 / 3.0, 0.0, 50.0 / 3.0])
    assert report_cycle(triangle, delays_bac, params) == pytest.approx(63.3333, abs=1e-3)


def test_report_cycle_monotone_in_delays(params):
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = int(rng.integers(2, 8))
        topo = generate_gaussian(TopologyConfig(n=n, sigma_m=5.0, seed=int(rng.integers(1 << 31))))
        d = distances(topo)
        delays = rng.uniform(0.0, 30.0, size=n)
        base = report_cycle(d, delays, params)
        bumped = delays.copy()
        bumped[rng.integers(n)] += rng.uniform(0.0, 20.0)
        assert report_cycle(d, bumped, params) >= base - 1e-12


def test_concurrency_condition(triangle, params):
    # |9.5 - 10.5| = 1 m < 3 m at the first receiver
    assert not concurrency_ok(triangle, params)
    # vanishing packet length makes any geometry concurrent
    assert concurrency_ok(triangle, MessageParams(tau_ns=1e-12, mu_m_per_ns=0.3))
    collinear = np.array([[0.0, 10.0, 25.0], [10.0, 0.0, 15.0], [25.0, 15.0, 0.0]])
    assert concurrency_ok(collinear, params)
    assert concurrency_ok(np.array([[0.0, 5.0], [5.0, 0.0]]), params)


def test_orthogonal_baseline_reference_values(triangle, params):
    assert tdma_slot_ns(triangle, params) == pytest.approx(140.0 / 3.0, abs=1e-9)
    delays, t_r = orthogonal_schedule(triangle, params)
    assert t_r == pytest.approx(140.0, abs=1e-9)
    # the rounded reference values are 47 and 141 ns
    assert abs(tdma_slot_ns(triangle, params) - 47.0) < 1.5
    assert abs(t_r - 141.0) < 1.5
    np.testing.assert_allclose(delays, [0.0, 140.0 / 3.0, 280.0 / 3.0])

    two = np.array([[0.0, 0.3], [0.3, 0.0]])
    d2, t2 = orthogonal_schedule(two, params)
    assert tdma_slot_ns(two, params) == pytest.approx(11.0)
    assert t2 == pytest.approx(22.0)


def test_orthogonal_baseline_always_collision_free(params):
    rng = np.random.default_rng(17)
    for _ in range(100):
        n = int(rng.integers(2, 12))
        topo = generate_gaussian(TopologyConfig(n=n, sigma_m=8.0, seed=int(rng.integers(1 << 31))))
        d = distances(topo)
        delays, _ = orthogonal_schedule(d, params)
        assert evaluate(d, delays, params).valid


def test_throughput_per_sensor(params):
    assert throughput_per_sensor(185.0 / 3.0, params, 1e9) == pytest.approx(162.16e6, rel=1e-3)
    assert throughput_per_sensor(params.tau_ns, params, 1e9) == pytest.approx(1e9)
    assert throughput_per_sensor(140.0, params, 1e9) == pytest.approx(71.43e6, rel=1e-3)
    with pytest.raises(ValueError):
        throughput_per_sensor(0.0, params, 1e9)


def test_cdma_throughput(triangle, params):
    r_s = cdma_throughput(triangle, params, CdmaConfig(r_b_bps=1e9, code_length=4))
    assert r_s == pytest.approx(1e9 * 10.0 / (4 * 140.0 / 3.0), rel=1e-9)
    assert r_s == pytest.approx(53.6e6, rel=2e-3)
    # longer codes only slow everyone down
    slower = cdma_throughput(triangle, params, CdmaConfig(r_b_bps=1e9, code_length=64))
    assert slower < r_s
    with pytest.raises(ValueError):
        cdma_throughput(triangle, params, CdmaConfig(r_b_bps=1e9, code_length=2))


def test_cdma_code_length_defaults():
    assert [cdma_code_length(n) for n in (1, 2, 3, 4, 5, 100)] == [1, 2, 4, 4, 8, 128]
    d = np.array([[0.0, 3.0], [3.0, 0.0]])
    p = MessageParams(10.0)
    auto = cdma_throughput(d, p, CdmaConfig(r_b_bps=1e9))
    explicit = cdma_throughput(d, p, CdmaConfig(r_b_bps=1e9, code_length=2))
    assert auto == explicit
