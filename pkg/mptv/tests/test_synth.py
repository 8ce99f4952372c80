from __future__ import absolute_import, division, print_function

import warnings

import numpy as np
import pytest

import mptv
from mptv import synth
from mptv.grid import BlurKernel
from test_utils import epsilon_diff

# test kernels

@pytest.mark.synth
@pytest.mark.parametrize('spec, parsed', [('gaussian:25:1.6', ('gaussian', 25., 1.6)),
                                          ('disk:15', ('disk', 15.)),
                                          ('motion:15:45', ('motion', 15., 45.)),
                                          ('delta', ('delta',)),
                                          ('file:dir/k.txt', ('file', 'dir/k.txt')),
                                          (['random_walk', 19, 1], ('random_walk', 19, 1))])
def test_parse_kernel_spec(spec, parsed):
    assert synth.parse_kernel_spec(spec) == parsed

@pytest.mark.synth
@pytest.mark.parametrize('spec', ['box:3', 'gaussian:25', 'disk:3:1', (), 'motion'])
def test_parse_kernel_spec_rejects(spec):
    with pytest.raises(ValueError):
        synth.parse_kernel_spec(spec)

@pytest.mark.synth
def test_gaussian_kernel():
    kernel = mptv.make_kernel('gaussian:25:1.6')
    assert kernel.shape == (25, 25)
    assert kernel.label == 'gaussian(25, 1.6)'
    assert epsilon_diff(kernel.taps, kernel.taps.T, 10**-17)
    assert epsilon_diff(kernel.taps, kernel.flipped().taps, 10**-17)
    assert np.unravel_index(np.argmax(kernel.taps), kernel.shape) == (12, 12)

    with pytest.raises(ValueError):
        mptv.make_kernel(('gaussian', 24, 1.))
    with pytest.raises(ValueError):
        mptv.make_kernel(('gaussian', 5, 0.))

@pytest.mark.synth
def test_disk_kernel():
    kernel = mptv.make_kernel('disk:15')
    assert kernel.shape == (31, 31)
    assert kernel.taps[15,0] > 0 and kernel.taps[0,0] == 0
    nonzero = kernel.taps[kernel.taps > 0]
    assert epsilon_diff(nonzero, nonzero[0], 10**-17)

@pytest.mark.synth
@pytest.mark.parametrize('length', [5, 15])
def test_motion_kernel_horizontal(length):
    kernel = mptv.make_kernel(('motion', length, 0))
    assert kernel.shape == (1, length)
    assert epsilon_diff(kernel.taps.sum(), 1.)

@pytest.mark.synth
def test_motion_kernel_directions():
    vertical = mptv.make_kernel(('motion', 9, 90))
    assert vertical.width == 1 and vertical.height == 9

    diagonal = mptv.make_kernel('motion:15:45')
    assert diagonal.height == diagonal.width
    taps = diagonal.taps
    # counterclockwise angles put the trail on the anti-diagonal
    assert taps[0,-1] > 0 or taps[1,-2] > 0
    assert taps[0,0] == 0
    assert epsilon_diff(taps, taps[::-1,::-1], 10**-12)

@pytest.mark.synth
def test_random_walk_kernel():
    k1 = mptv.make_kernel('random_walk:19:1')
    k2 = mptv.make_kernel(('random_walk', 19, 1))
    k3 = mptv.make_kernel('random_walk:19:2')
    assert k1.shape == (19, 19)
    assert k1 == k2
    assert k1 != k3
    assert k1.label.endswith('substitute')

@pytest.mark.synth
def test_file_kernel(tmp_path):
    path = tmp_path / 'kernel.txt'
    path.write_text(u'1 2 1\n')
    kernel = mptv.make_kernel(('file', str(path)))
    assert epsilon_diff(kernel.taps, np.array([[0.25, 0.5, 0.25]]))
    with pytest.raises(IOError):
        mptv.make_kernel(('file', str(tmp_path / 'missing.txt')))

@pytest.mark.synth
def test_delta_and_passthrough():
    kernel = mptv.make_kernel('delta')
    assert kernel == BlurKernel.delta()
    assert mptv.make_kernel(kernel) is kernel

@pytest.mark.synth
def test_perturb_kernel():
    kernel = mptv.make_kernel('gaussian:7:1.0')
    p1 = mptv.perturb_kernel(kernel, 0.005, seed=3)
    p2 = mptv.perturb_kernel('gaussian:7:1.0', 0.005, seed=3)
    assert p1 == p2
    assert p1 != kernel
    assert np.all(p1.taps >= 0)
    assert epsilon_diff(p1.taps.sum(), 1.)
    assert np.max(np.abs(p1.taps - kernel.taps)) < 0.1*kernel.taps.max()
    assert epsilon_diff(mptv.perturb_kernel(kernel, 0.).taps, kernel.taps, 10**-15)
    with pytest.raises(ValueError):
        mptv.perturb_kernel(kernel, -0.1)

# test degradation

@pytest.mark.synth
def test_degrade_noiseless_is_convolution():
    x, _ = mptv.make_sparse_image((32, 32), 3, seed=1)
    kernel = mptv.make_kernel('gaussian:7:1.0')
    y = mptv.degrade(x, kernel, 0.)
    assert epsilon_diff(y, mptv.convolve_periodic(x, kernel), 10**-15)
    assert epsilon_diff(y.mean(), x.mean(), 10**-12)

@pytest.mark.synth
def test_degrade_noise():
    x = np.full((64, 64), 0.5)
    y1 = mptv.degrade(x, 'delta', 0.01, seed=4)
    y2 = mptv.degrade(x, 'delta', 0.01, seed=4)
    assert np.array_equal(y1, y2)
    assert abs(np.std(y1 - x) - 0.01) < 0.001
    assert not np.array_equal(y1, mptv.degrade(x, 'delta', 0.01, seed=5))
    with pytest.raises(ValueError):
        mptv.degrade(x, 'delta', -1.)

@pytest.mark.synth
def test_degrade_warns_outside_unit_range():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter('always')
        mptv.degrade(np.full((8, 8), 2.), 'delta', 0.)
    assert len(w) == 1

@pytest.mark.synth
def test_degradation_spec():
    spec = mptv.DegradationSpec('motion:5:45', noise_sigma=0.01, seed=2)
    x, _ = mptv.make_sparse_image((24, 24), 2, seed=0)
    assert np.array_equal(spec.apply(x), mptv.degrade(x, 'motion:5:45', 0.01, 2))
    assert spec.as_dict() == {'kernel': 'motion:5.0:45.0', 'noise_sigma': 0.01, 'seed': 2, 'taper': False}
    assert spec.kernel == mptv.make_kernel('motion:5:45')
    with pytest.raises(ValueError):
        mptv.DegradationSpec('delta', noise_sigma=-1.)

@pytest.mark.synth
def test_edgetaper():
    rng = np.random.RandomState(0)
    y = rng.rand(40, 30)
    kernel = mptv.make_kernel('gaussian:9:1.5')
    tapered = mptv.edgetaper(y, kernel)
    blurred = mptv.convolve_periodic(y, kernel)

    assert tapered.shape == y.shape
    assert epsilon_diff(tapered[0], blurred[0], 10**-12)
    assert epsilon_diff(tapered[:,0], blurred[:,0], 10**-12)
    assert epsilon_diff(tapered[20,15], y[20,15], 10**-12)
    assert epsilon_diff(mptv.edgetaper(y, 'delta'), y, 10**-15)

# test images

@pytest.mark.synth
def test_sparse_image():
    x, support = mptv.make_sparse_image((48, 40), 4, seed=7)
    assert x.shape == (48, 40) and support.shape == (48, 40)
    assert x.min() >= 0 and x.max() <= 1
    assert np.all(x[0] == x[0,0]) and np.all(x[:,0] == x[0,0])
    assert np.array_equal(support, mptv.group_magnitudes(mptv.apply_gradient(x)) > 0)
    assert support.mean() < 0.5

    x2, _ = mptv.make_sparse_image((48, 40), 4, seed=7)
    assert np.array_equal(x, x2)
    with pytest.raises(ValueError):
        mptv.make_sparse_image((3, 40), 1)

@pytest.mark.synth
@pytest.mark.parametrize('n_jumps', [0, 1, 4])
def test_1d_signal(n_jumps):
    x, support = mptv.make_1d_signal(128, n_jumps, seed=1)
    assert x.shape == (128, 1)
    steps = np.flatnonzero(np.diff(x[:,0]))
    assert len(steps) == n_jumps
    assert np.all(np.diff(np.concatenate(([-1], steps, [127]))) >= 8)
    assert support.shape == (128, 1)
    assert support.sum() >= n_jumps
    with pytest.raises(ValueError):
        mptv.make_1d_signal(16, 4)

@pytest.mark.synth
def test_text_image():
    x, support = mptv.make_text_image((64, 64), 30, seed=0)
    assert x.max() == 1.
    assert x.min() < 0.2
    assert support.mean() < 0.5
    with pytest.raises(ValueError):
        mptv.make_text_image((6, 64), 3)
