import numpy as np
import pytest

from imptransform import DeltaTrain, LayerStack, greens_function
from imptransform.oracle import compare, complete_horizon, enumerate_rays, iter_rays


def test_two_interfaces_bounce_five(two_interfaces):
    rays = enumerate_rays(two_interfaces, 5, 8.0)
    np.testing.assert_allclose(rays.times, [2.0, 4.0, 6.0, 8.0])
    np.testing.assert_allclose(rays.amps, [0.5, 0.375, -0.09375, 0.0234375], rtol=1e-15)


def test_bounce_limit_truncates(two_interfaces):
    # one reflection: only the two primaries
    rays = enumerate_rays(two_interfaces, 1, 20.0)
    assert rays.times.tolist() == [2.0, 4.0]


def test_empty_stack():
    assert len(enumerate_rays(LayerStack(np.zeros(0), np.array([1.0])), 5, 10.0)) == 0


def test_guard_limits():
    stack = LayerStack(np.arange(1.0, 9.0), np.linspace(1, 2, 9))
    with pytest.raises(ValueError, match="oracle limited"):
        enumerate_rays(stack, 5, 40.0)


def test_ray_paths_start_down_at_the_first_interface(two_interfaces):
    for ray in iter_rays(two_interfaces, 3, 10.0):
        assert ray.encounters[0] == (0, "down")
        assert ray.time <= 10.0


def test_compare_self_and_pruned_event(two_interfaces):
    g = greens_function(two_interfaces, 20.0)
    rep = compare(g, g)
    assert rep.ok and rep.max_abs_diff == 0.0 and rep.sum_diff == 0.0
    extra = DeltaTrain(np.append(g.times, 21.0), np.append(g.amps, 1e-15))
    rep = compare(g, extra)
    assert rep.ok and rep.unmatched_b == []


def test_compare_reports_discrepancy(two_interfaces):
    g = greens_function(two_interfaces, 20.0)
    bad = DeltaTrain(g.times, g.amps * (1 + 1e-9))
    assert not compare(g, bad).ok


def test_lattice_matches_oracle_before_horizon():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        widths = rng.integers(1, 4, n - 1) * 0.1
        stack = LayerStack(0.5 + np.concatenate(([0.0], np.cumsum(widths))),
                           rng.uniform(0.3, 3.0, n + 1))
        horizon = complete_horizon(stack, 12)
        ref = enumerate_rays(stack, 12, horizon)
        g = greens_function(stack, horizon + 1.0)
        # arrivals landing exactly on the horizon are excluded on both sides
        rep = compare(g, ref, amp_tol=1e-12, t_max=horizon - 1e-9)
        assert rep.ok, rep.as_dict()
