import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from imptransform import (ImpedanceProfile, LayerStack, discretize, reflectivity_function,
                          scale_dilate, stack_profile)
from imptransform.profiles import blocky, ramp

positive = st.floats(0.2, 5.0)


def test_ramp_discretization_values():
    stack = discretize(ramp(1.0, 2.0, 1.0, 2.0), 0.25)
    np.testing.assert_allclose(stack.values, [1.0, 1.25, 1.5, 1.75, 2.0], rtol=0, atol=1e-15)
    np.testing.assert_allclose(stack.interfaces, [1.125, 1.375, 1.625, 1.875])


def test_discretize_spacing_rounds_cells_up():
    stack = discretize(ramp(1.0, 2.0, 1.0, 2.0), 0.3)
    # four cells of width 0.25 is the coarsest partition not exceeding 0.3
    assert stack.n == 4


def test_discretize_drops_zero_jumps():
    prof = ImpedanceProfile(lambda x: np.full(np.shape(x), 2.0), 1.0, 2.0, 2.0, 2.0)
    assert discretize(prof, 0.1).n == 0


def test_discretize_rejects_nonpositive_profile():
    prof = ImpedanceProfile(lambda x: np.full(np.shape(x), -1.0), 1.0, 2.0, 1.0, 1.0)
    with pytest.raises(ValueError, match="not positive"):
        discretize(prof, 0.1)


@given(st.lists(positive, min_size=3, max_size=8), st.sampled_from([0.1, 0.125, 0.2]))
def test_discretization_of_a_step_profile_is_a_fixed_point(vals, spacing):
    prof = ImpedanceProfile(lambda x: np.interp(x, np.linspace(1, 2, len(vals)), vals),
                            1.0, 2.0, vals[0], vals[-1])
    once = discretize(prof, spacing)
    if once.n == 0:
        return
    view = ImpedanceProfile(once.__call__, 1.0, 2.0, once.zeta_minus, once.zeta_plus)
    assert discretize(view, spacing) == once


def test_single_interface_reflectivity(single_interface):
    assert single_interface.r[0] == pytest.approx(-0.5)
    assert single_interface.tau[0] == pytest.approx(2.0)


@given(st.lists(positive, min_size=2, max_size=12))
def test_reflectivities_bounded_and_invertible(vals):
    vals = np.array(vals)
    stack = LayerStack(np.arange(1, vals.size, dtype=float), vals)
    r = stack.r
    assert np.all(np.abs(r) < 1)
    rebuilt = LayerStack.from_tau_r(stack.tau, r, zeta_minus=vals[0])
    np.testing.assert_allclose(rebuilt.values, vals, rtol=1e-12)
    np.testing.assert_allclose(rebuilt.interfaces, stack.interfaces, rtol=1e-12)


def test_stack_validation():
    with pytest.raises(ValueError):
        LayerStack(np.array([1.0, 1.0]), np.array([1.0, 2.0, 3.0]))
    with pytest.raises(ValueError):
        LayerStack(np.array([1.0]), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        LayerStack(np.array([-1.0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        LayerStack(np.array([1.0]), np.array([1.0, 2.0, 3.0]))


def test_stack_evaluation_is_right_continuous(single_interface):
    assert single_interface(0.999) == 1.0
    assert single_interface(1.0) == 3.0


def test_profile_validation():
    with pytest.raises(ValueError):
        ImpedanceProfile(lambda x: x, 2.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ImpedanceProfile(lambda x: x, 0.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ImpedanceProfile(lambda x: x, 1.0, 2.0, -1.0, 1.0)


def test_profile_imposes_constant_tails():
    prof = ramp(1.0, 2.0, 1.0, 2.0)
    np.testing.assert_array_equal(prof(np.array([0.0, 0.5, 2.0, 7.0])), [1, 1, 2, 2])


def test_scale_dilate_stack():
    stack = LayerStack(np.array([0.75]), np.array([1.0, 3.0]))
    scaled = stack.scaled(2.0, 3.0)
    np.testing.assert_allclose(scaled.interfaces, [0.25])
    np.testing.assert_allclose(scaled.values, [2.0, 6.0])


def test_scale_dilate_profile():
    prof = ramp(1.0, 2.0, 1.0, 2.0)
    big = scale_dilate(prof, 2.0, 4.0)
    assert (big.x_minus, big.x_plus) == (0.25, 0.5)
    x = np.linspace(0, 1, 17)
    np.testing.assert_allclose(big(x), 2.0 * prof(4.0 * x))


def test_blocky_profile_keeps_exact_steps():
    prof = blocky([1.0, 1.3, 2.0], [2.0, 4.0, 3.0])
    assert prof.exact_stack.n == 3
    x = np.linspace(0, 3, 31)
    np.testing.assert_array_equal(prof.exact_stack(x), prof(x))
    assert scale_dilate(prof, 2.0, 2.0).exact_stack == prof.exact_stack.scaled(2.0, 2.0)


def test_reflectivity_function_of_ramp():
    prof = ramp(1.0, 2.0, 1.0, 2.0)
    t = np.array([2.5, 3.0, 3.5])
    vals, flagged = reflectivity_function(prof, t)
    np.testing.assert_allclose(vals, -1.0 / (4.0 * prof(t / 2)), rtol=1e-9)
    assert not flagged.any()


def test_reflectivity_function_flags_jumps():
    prof = blocky([1.0, 2.0], [3.0, 3.0])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        _, flagged = reflectivity_function(prof, np.array([2.0, 3.0]))
    assert flagged.tolist() == [True, False]
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_stack_profile_view(two_interfaces):
    prof = stack_profile(two_interfaces)
    x = np.linspace(0, 3, 13)
    np.testing.assert_array_equal(prof(x), two_interfaces(x))
    with pytest.raises(ValueError):
        stack_profile(LayerStack(np.zeros(0), np.array([1.0])))
