import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from imptransform import (DeltaTrain, LayerStack, SampledTrace, add_noise, antiderivative,
                          builtin, convolve, greens_function, to_pressure, total_reflection)
from imptransform.forward import make_grid


def test_two_interface_train(two_interfaces):
    g = greens_function(two_interfaces, 8.0)
    np.testing.assert_allclose(g.times, [2.0, 4.0, 6.0, 8.0])
    np.testing.assert_allclose(g.amps, [0.5, 0.375, -0.09375, 0.0234375], rtol=1e-14)


def test_two_interface_train_event_queue(two_interfaces):
    assert greens_function(two_interfaces, 8.0, method="events") == \
        greens_function(two_interfaces, 8.0, method="lattice")


def test_single_interface_train(single_interface):
    g = greens_function(single_interface, 10.0)
    assert g.times.tolist() == [2.0]
    assert g.amps.tolist() == [-0.5]


def test_empty_stack_gives_empty_train():
    g = greens_function(LayerStack(np.zeros(0), np.array([2.0])), 5.0)
    assert len(g) == 0 and g.total() == 0.0


def test_record_must_cover_the_stack(two_interfaces):
    with pytest.raises(ValueError):
        greens_function(two_interfaces, 3.0)


def test_total_reflection_closed_form():
    assert total_reflection([0.5, 0.5]) == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(ValueError):
        total_reflection([1.0])


def _stack(vals, widths, x0):
    return LayerStack(x0 + np.concatenate(([0.0], np.cumsum(widths))), np.array(vals))


stack_strategy = st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.floats(0.5, 2.0), min_size=n + 1, max_size=n + 1),
    st.lists(st.floats(0.05, 0.5), min_size=n - 1, max_size=n - 1),
    st.floats(0.1, 1.0)))


@given(stack_strategy)
def test_event_queue_matches_lattice_on_commensurate_stacks(args):
    vals, widths, x0 = args
    widths = np.round(np.array(widths) / 0.05) * 0.05
    stack = _stack(vals, widths, round(x0 / 0.05) * 0.05)
    t_max = 2 * stack.interfaces[-1] + 3.0
    a = greens_function(stack, t_max, method="lattice", prune_tol=0.0)
    b = greens_function(stack, t_max, method="events", prune_tol=0.0)
    np.testing.assert_allclose(a.times, b.times, rtol=0, atol=1e-9)
    np.testing.assert_allclose(a.amps, b.amps, rtol=0, atol=1e-13)


@given(stack_strategy)
def test_first_arrival_is_the_first_primary(args):
    vals, widths, x0 = args
    stack = _stack(vals, widths, x0)
    g = greens_function(stack, 2 * stack.interfaces[-1] + 1)
    if stack.r[0] != 0:
        assert g.times[0] == pytest.approx(2 * x0)
        assert g.amps[0] == pytest.approx(stack.r[0], rel=1e-12)


@given(stack_strategy)
def test_partial_sums_approach_total_reflection(args):
    vals, widths, x0 = args
    # commensurate layers keep the long record on the lattice path
    widths = np.round(np.array(widths) / 0.05) * 0.05
    stack = _stack(vals, widths, round(x0 / 0.05) * 0.05)
    g = greens_function(stack, 200 * stack.interfaces[-1])
    expected = (vals[0] - vals[-1]) / (vals[0] + vals[-1])
    assert g.total() == pytest.approx(expected, abs=1e-8)
    assert total_reflection(stack.r) == pytest.approx(expected, abs=1e-13)


def test_delta_train_validation():
    with pytest.raises(ValueError):
        DeltaTrain([2.0, 1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        DeltaTrain([0.0], [1.0])
    merged = DeltaTrain.from_events([2.0, 1.0, 2.0 + 1e-12], [1.0, 0.5, 0.25])
    assert merged.times.tolist() == [1.0, 2.0]
    assert merged.amps.tolist() == [0.5, 1.25]


def test_convolve_single_event_is_shifted_reversed_wavelet():
    w = builtin("gaussian", center=-0.3, width=0.05)
    g = DeltaTrain([2.0], [0.5])
    d = convolve(g, w, 0.0, 1e-3, 4.0)
    t = d.grid
    np.testing.assert_allclose(d.samples, 0.5 * w(2.0 - t), atol=1e-14)
    # the peak sits at t = 2 - center
    assert t[np.argmax(d.samples)] == pytest.approx(2.3)


def test_convolve_rejects_delta():
    from imptransform import Wavelet
    with pytest.raises(ValueError):
        convolve(DeltaTrain([1.0], [1.0]), Wavelet.delta(), 0.0, 0.1, 2.0)


def test_noise_level_and_reproducibility():
    clean = SampledTrace(np.sin(np.linspace(0, 20, 200_000)), 0.0, 1e-4)
    a = add_noise(clean, 0.1, seed=7)
    b = add_noise(clean, 0.1, seed=7)
    c = add_noise(clean, 0.1, seed=8)
    assert a == b and a != c
    resid = a.samples - clean.samples
    assert np.std(resid) == pytest.approx(0.1, rel=0.01)
    assert a.meta["noise_seed"] == 7
    assert add_noise(clean, 0.0, 1) == clean


def test_pressure_is_negation(two_interfaces):
    g = greens_function(two_interfaces, 8.0)
    assert to_pressure(g) == -g
    assert to_pressure(to_pressure(g)) == g


def test_antiderivative_of_train_is_exact():
    g = DeltaTrain([1.0, 2.5], [2.0, -1.0])
    once = antiderivative(g, 1, (0.0, 0.5, 4.0))
    np.testing.assert_array_equal(once.samples, [0, 0, 2, 2, 2, 1, 1, 1, 1])
    twice = antiderivative(g, 2, (0.0, 0.5, 4.0))
    t = make_grid(0.0, 0.5, 4.0)
    expect = 2 * np.maximum(t - 1, 0) - np.maximum(t - 2.5, 0)
    np.testing.assert_allclose(twice.samples, expect, atol=1e-15)


def test_antiderivative_of_trace_matches_analytic():
    t = make_grid(0.0, 1e-3, 2.0)
    tr = SampledTrace(np.cos(t), 0.0, 1e-3)
    one = antiderivative(tr, 1)
    two = antiderivative(tr, 2)
    np.testing.assert_allclose(one.samples, np.sin(t), atol=1e-6)
    np.testing.assert_allclose(two.samples, 1 - np.cos(t), atol=1e-6)
    with pytest.raises(ValueError):
        antiderivative(tr, 0)


def test_incommensurate_stack_uses_event_queue():
    stack = LayerStack(np.array([1.0, 1.0 + math.sqrt(2) / 10, 1.0 + math.pi / 10]),
                       np.array([1.0, 2.0, 0.7, 1.4]))
    g = greens_function(stack, 12.0)
    assert len(g) > 10
    assert np.all(np.diff(g.times) > 0)
