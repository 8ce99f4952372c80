from __future__ import absolute_import, division, print_function

import numpy as np
import pytest
import scipy.ndimage

import mptv
from mptv.grid import BlurKernel, FrequencyPlan
from test_utils import epsilon_diff

# test BlurKernel

@pytest.mark.grid
def test_kernel_normalizes():
    kernel = BlurKernel([[1, 2, 1], [2, 4, 2], [1, 2, 1]])
    assert kernel.shape == (3, 3)
    assert kernel.anchor == (1, 1)
    assert epsilon_diff(kernel.taps.sum(), 1.)
    assert epsilon_diff(kernel.taps[1,1], 0.25)
    with pytest.raises(ValueError):
        kernel.taps[0,0] = 1.

@pytest.mark.grid
def test_kernel_column():
    kernel = BlurKernel([1, 1, 1])
    assert kernel.shape == (3, 1)
    assert kernel.anchor == (1, 0)

@pytest.mark.grid
@pytest.mark.parametrize('taps', [np.ones((2, 3)), np.ones((3, 4)), -np.eye(3), np.zeros((3, 3)),
                                  np.full((3, 3), np.nan), np.ones((0, 3))])
def test_kernel_rejects(taps):
    with pytest.raises(ValueError):
        BlurKernel(taps)

@pytest.mark.grid
def test_kernel_unnormalized():
    BlurKernel(np.full((1, 5), 0.2), normalize=False)
    with pytest.raises(ValueError):
        BlurKernel(np.ones((1, 3)), normalize=False)

@pytest.mark.grid
def test_kernel_flipped_and_equality():
    taps = np.arange(1., 10.).reshape(3, 3)
    kernel = BlurKernel(taps, label='ramp')
    assert np.array_equal(kernel.flipped().taps, kernel.taps[::-1,::-1])
    assert kernel.flipped().flipped() == kernel
    assert kernel != kernel.flipped()
    assert BlurKernel.from_array(kernel) is kernel
    assert BlurKernel.delta().shape == (1, 1)

# test FrequencyPlan

@pytest.mark.grid
def test_plan_validation():
    with pytest.raises(ValueError):
        FrequencyPlan((0, 5))
    with pytest.raises(ValueError):
        FrequencyPlan((4, 4), BlurKernel(np.ones((5, 5))))
    with pytest.raises(TypeError):
        FrequencyPlan((8, 8), np.ones((3, 3)))

    plan = FrequencyPlan((8, 8))
    with pytest.raises(ValueError):
        plan.check(np.zeros((8, 9)))
    with pytest.raises(ValueError):
        plan.otf[0,0] = 2.

@pytest.mark.grid
def test_plan_spectra():
    plan = FrequencyPlan((6, 10), BlurKernel(np.ones((3, 3))))
    assert epsilon_diff(plan.otf[0,0], 1., 10**-14)
    assert epsilon_diff(np.max(plan.kernel_power), 1., 10**-14)
    assert epsilon_diff(np.max(plan.gradient_power), 8., 10**-12)
    assert epsilon_diff(plan.gradient_power[0,0], 0.)

@pytest.mark.grid
def test_plan_column_has_no_horizontal_differences():
    plan = FrequencyPlan((16, 1))
    assert np.all(plan.dh_otf == 0)
    assert epsilon_diff(np.max(plan.gradient_power), 4., 10**-12)

@pytest.mark.grid
def test_normal_denominator():
    plan = FrequencyPlan((8, 8), BlurKernel(np.ones((1, 2*4 - 1))))
    assert np.all(plan.normal_denominator(1e-2) > 0)
    with pytest.raises(FloatingPointError):
        FrequencyPlan((8, 8), BlurKernel([[1, 2, 1]])).normal_denominator(0.)

# test operators

@pytest.mark.grid
@pytest.mark.parametrize('shape', [(7, 9), (16, 16), (12, 1)])
def test_gradient_adjoint(shape):
    rng = np.random.RandomState(0)
    x = rng.standard_normal(shape)
    g = rng.standard_normal((2,) + shape)
    lhs = np.sum(mptv.apply_gradient(x)*g)
    rhs = np.sum(x*mptv.apply_divergence(g))
    assert abs(lhs - rhs) < 10**-10

@pytest.mark.grid
def test_gradient_by_hand():
    x = np.array([[0., 1., 3.], [2., 2., 2.]])
    g = mptv.apply_gradient(x)
    assert np.array_equal(g[0], [[2., 1., -1.], [-2., -1., 1.]])
    assert np.array_equal(g[1], [[1., 2., -3.], [0., 0., 0.]])
    assert mptv.apply_gradient(np.arange(4.)).shape == (2, 4, 1)

@pytest.mark.grid
@pytest.mark.parametrize('shape', [(9, 11), (16, 16)])
@pytest.mark.parametrize('ksize', [(1, 1), (3, 3), (5, 3)])
def test_convolve_matches_spatial(shape, ksize):
    rng = np.random.RandomState(1)
    kernel = BlurKernel(rng.rand(*ksize))
    x = rng.rand(*shape)
    spatial = scipy.ndimage.convolve(x, kernel.taps, mode='wrap')
    assert epsilon_diff(mptv.convolve_periodic(x, kernel), spatial, 10**-12)

@pytest.mark.grid
def test_correlate_is_adjoint():
    rng = np.random.RandomState(2)
    kernel = BlurKernel(rng.rand(5, 3))
    plan = FrequencyPlan((10, 12), kernel)
    x, u = rng.rand(10, 12), rng.rand(10, 12)
    lhs = np.sum(mptv.convolve_periodic(x, plan=plan)*u)
    rhs = np.sum(x*mptv.correlate_periodic(u, plan=plan))
    assert abs(lhs - rhs) < 10**-10
    assert epsilon_diff(mptv.correlate_periodic(u, plan=plan),
                        mptv.convolve_periodic(u, kernel.flipped()), 10**-12)

@pytest.mark.grid
def test_convolve_plan_mismatch():
    plan = FrequencyPlan((8, 8), BlurKernel(np.ones((3, 3))))
    with pytest.raises(ValueError):
        mptv.convolve_periodic(np.zeros((8, 8)), BlurKernel(np.ones((5, 5))), plan)
    with pytest.raises(ValueError):
        mptv.convolve_periodic(np.zeros((9, 8)), plan=plan)

@pytest.mark.grid
def test_tv_value():
    x = np.zeros((8, 8))
    x[2:5,3:6] = 1.
    # ten unit groups around the block and one diagonal group at its corner
    assert epsilon_diff(mptv.tv_value(x), 10. + np.sqrt(2), 10**-12)
    assert mptv.tv_value(np.full((5, 5), 0.3)) == 0.

    mags = mptv.group_magnitudes(np.stack((np.full((2, 2), 3.), np.full((2, 2), 4.))))
    assert np.array_equal(mags, np.full((2, 2), 5.))

@pytest.mark.grid
def test_check_image():
    assert mptv.check_image([1., 2.]).shape == (2, 1)
    with pytest.raises(ValueError):
        mptv.check_image(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        mptv.check_image([[np.inf]])
    with pytest.raises(ValueError):
        mptv.check_gradient(np.zeros((3, 4, 4)))
    with pytest.raises(ValueError):
        mptv.check_gradient(np.zeros((2, 4, 4)), shape=(4, 5))
