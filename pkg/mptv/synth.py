r"""# Synthetic Data

Blur kernels, the degradation model $y=Ax^*+n$ and regenerated test images
with sparse gradients. Every random quantity is drawn from a
`numpy.random.RandomState` seeded explicitly, so equal seeds give
byte-identical outputs.

Kernels are described by tuples whose first entry names the kind:

- `('delta',)` : the identity.
- `('gaussian', size, sigma)` : isotropic Gaussian truncated to `size` taps
per side.
- `('disk', radius)` : uniform disk $\{(i,j): i^2+j^2\le r^2\}$.
- `('motion', length, angle)` : linear motion of the given length in pixels
along `angle` degrees, counterclockwise from the horizontal.
- `('file', path)` : taps read from a text matrix or a grayscale image.
- `('random_walk', size, seed)` : a random camera-shake trajectory, used as
a stand-in for recorded motion kernels.

The same descriptions may be written as strings such as `'gaussian:25:1.6'`.
"""
from __future__ import absolute_import, division, print_function

import warnings

import numpy as np
import scipy.signal
import six

from mptv.grid import BlurKernel, FrequencyPlan, apply_gradient, check_image, group_magnitudes
from mptv.utils import load_kernel_file

__all__ = [
    'DegradationSpec',
    'degrade',
    'edgetaper',
    'make_1d_signal',
    'make_kernel',
    'make_sparse_image',
    'make_text_image',
    'parse_kernel_spec',
    'perturb_kernel'
]

KERNEL_KINDS = ('delta', 'gaussian', 'disk', 'motion', 'file', 'random_walk')

###############################################################################
# Kernels
###############################################################################

def parse_kernel_spec(spec):
    """Normalizes a kernel description to a tuple, converting numeric fields
    of strings like `'motion:15:45'`.

    **Arguments**

    - **spec** : _str_, _tuple_ or _list_
        - The kernel description.

    **Returns**

    - _tuple_
        - The description with its kind first.
    """

    if isinstance(spec, six.string_types):
        parts = spec.split(':')
        if parts[0] == 'file':
            return ('file', ':'.join(parts[1:]))
        spec = [parts[0]] + [float(p) for p in parts[1:]]

    spec = tuple(spec)
    if len(spec) == 0 or spec[0] not in KERNEL_KINDS:
        raise ValueError('kernel kind must be one of {}, got {!r}'.format(KERNEL_KINDS, spec))

    nargs = {'delta': 0, 'gaussian': 2, 'disk': 1, 'motion': 2, 'file': 1, 'random_walk': 2}[spec[0]]
    if len(spec) != nargs + 1:
        raise ValueError('kernel {!r} takes {} parameters, got {}'.format(spec[0], nargs, len(spec) - 1))
    return spec

def _as_size(value, name):
    size = int(round(value))
    if size != value or size < 1:
        raise ValueError('{} must be a positive integer, got {}'.format(name, value))
    if size % 2 == 0:
        raise ValueError('{} must be odd, got {}'.format(name, size))
    return size

def _gaussian_kernel(size, sigma):
    size = _as_size(size, 'gaussian size')
    if not sigma > 0:
        raise ValueError('gaussian sigma must be positive, got {}'.format(sigma))
    t = np.arange(size) - size//2
    g = np.exp(-t**2/(2.*sigma**2))
    return np.outer(g, g)

def _disk_kernel(radius):
    if not radius > 0:
        raise ValueError('disk radius must be positive, got {}'.format(radius))
    R = int(np.floor(radius))
    i, j = np.mgrid[-R:R+1, -R:R+1]
    return (i**2 + j**2 <= radius**2).astype(np.float64)

# accumulates bilinear weights of points (rows, cols) into a grid
def _rasterize(rows, cols, shape):
    taps = np.zeros(shape)
    r0, c0 = np.floor(rows).astype(int), np.floor(cols).astype(int)
    fr, fc = rows - r0, cols - c0
    for dr, dc, w in ((0, 0, (1 - fr)*(1 - fc)), (1, 0, fr*(1 - fc)),
                      (0, 1, (1 - fr)*fc), (1, 1, fr*fc)):
        r, c = r0 + dr, c0 + dc
        inside = (r >= 0) & (r < shape[0]) & (c >= 0) & (c < shape[1])
        np.add.at(taps, (r[inside], c[inside]), w[inside])
    return taps

# removes all-zero border rows and columns in symmetric pairs
def _trim_symmetric(taps):
    while taps.shape[0] > 1 and not taps[0].any() and not taps[-1].any():
        taps = taps[1:-1]
    while taps.shape[1] > 1 and not taps[:,0].any() and not taps[:,-1].any():
        taps = taps[:,1:-1]
    return taps

def _motion_kernel(length, angle):
    if not length >= 1:
        raise ValueError('motion length must be at least 1, got {}'.format(length))
    half = int(np.ceil(length/2.))
    size = 2*half + 1

    # dense samples along the centered segment
    n = int(np.ceil(4*length)) + 1
    t = np.linspace(-(length - 1)/2., (length - 1)/2., n)
    # rounding keeps axis-aligned trails on a single row or column
    a = np.deg2rad(angle)
    s, c = np.round(np.sin(a), 12), np.round(np.cos(a), 12)
    taps = _rasterize(half - t*s, half + t*c, (size, size))
    return _trim_symmetric(taps)

def _random_walk_kernel(size, seed):
    size = _as_size(size, 'random walk size')
    rng = np.random.RandomState(None if seed is None else int(seed))

    # smooth trajectory with inertia, recentered on its mean
    n = 8*size
    velocity = rng.standard_normal(2)
    points = np.zeros((n, 2))
    for i in range(1, n):
        velocity = 0.9*velocity + 0.3*rng.standard_normal(2)
        points[i] = points[i-1] + 0.25*velocity
    points -= points.mean(axis=0)

    # scale to fit inside the kernel window
    extent = np.max(np.abs(points))
    if extent > 0:
        points *= min(1., (size//2 - 1)/extent) if size > 2 else 0.
    taps = _rasterize(points[:,0] + size//2, points[:,1] + size//2, (size, size))
    return taps

def make_kernel(spec):
    """Builds a normalized `BlurKernel` from a description.

    **Arguments**

    - **spec** : _str_, _tuple_ or `BlurKernel`
        - The kernel description, see the module documentation. Kernels are
        passed through unchanged.

    **Returns**

    - `BlurKernel`
        - The kernel, labeled with its description.
    """

    if isinstance(spec, BlurKernel):
        return spec

    spec = parse_kernel_spec(spec)
    kind, params = spec[0], spec[1:]
    label = '{}({})'.format(kind, ', '.join('{:g}'.format(p) if isinstance(p, (int, float)) else str(p)
                                           for p in params))

    if kind == 'delta':
        taps = np.ones((1, 1))
    elif kind == 'gaussian':
        taps = _gaussian_kernel(*params)
    elif kind == 'disk':
        taps = _disk_kernel(*params)
    elif kind == 'motion':
        taps = _motion_kernel(*params)
    elif kind == 'file':
        taps = load_kernel_file(params[0])
    else:
        taps = _random_walk_kernel(*params)
        label += ' substitute'

    return BlurKernel(taps, label=label)

def perturb_kernel(kernel, level, seed=None):
    """Emulates kernel estimation error by adding Gaussian noise of standard
    deviation `level` times the largest tap, clipping at zero and
    renormalizing.

    **Arguments**

    - **kernel** : `BlurKernel` or kernel description
        - The exact kernel.
    - **level** : _float_
        - The nonnegative relative noise level, e.g. `0.002` for 0.2%.
    - **seed** : _int_ or `None`
        - Seed of the noise.

    **Returns**

    - `BlurKernel`
        - The perturbed kernel.
    """

    kernel = make_kernel(kernel)
    if level < 0:
        raise ValueError('perturbation level must be nonnegative, got {}'.format(level))
    rng = np.random.RandomState(seed)
    taps = kernel.taps + level*kernel.taps.max()*rng.standard_normal(kernel.shape)
    taps = np.maximum(taps, 0.)
    if not taps.sum() > 0:
        raise ValueError('perturbation of level {} removed every tap'.format(level))
    return BlurKernel(taps, label='{} perturbed {:g}'.format(kernel.label or 'kernel', level))

###############################################################################
# Degradation
###############################################################################

# weight that vanishes at the periodic boundary along one axis
def _taper_weights(n, projection):
    if n == 1 or projection.size == 1:
        return np.ones(n)
    auto = scipy.signal.fftconvolve(projection, projection[::-1])
    auto /= auto.max()
    L = projection.size
    lags = np.arange(-(L - 1), L) % n
    taper = np.zeros(n)
    np.maximum.at(taper, lags, auto)
    return 1. - taper

def edgetaper(y, kernel, n_iters=1):
    """Blends the image with its periodically blurred version near the
    borders, so that the wrap-around discontinuities of a nonperiodic
    observation are smoothed the way the periodic model expects. The blend
    weight follows the autocorrelation of the kernel projections.

    **Arguments**

    - **y** : _2-d numpy.ndarray_
        - The observation.
    - **kernel** : `BlurKernel`
        - The blur kernel.
    - **n_iters** : _int_
        - Number of blending passes.

    **Returns**

    - _2-d numpy.ndarray_
        - The tapered observation.
    """

    y = check_image(y, 'y')
    kernel = make_kernel(kernel)
    plan = FrequencyPlan(y.shape, kernel)

    wv = _taper_weights(y.shape[0], kernel.taps.sum(axis=1))
    wh = _taper_weights(y.shape[1], kernel.taps.sum(axis=0))
    alpha = np.outer(wv, wh)

    out = y
    for _ in range(n_iters):
        blurred = plan.ifft(plan.otf*plan.fft(out))
        out = alpha*out + (1. - alpha)*blurred
    return out

class DegradationSpec(object):

    """Description of a synthetic degradation: a kernel description, the
    standard deviation of the additive Gaussian noise and a seed."""

    def __init__(self, kernel, noise_sigma=0.003, seed=0, taper=False):
        self.kernel_spec = kernel if isinstance(kernel, BlurKernel) else parse_kernel_spec(kernel)
        self.noise_sigma = float(noise_sigma)
        self.seed = None if seed is None else int(seed)
        self.taper = bool(taper)
        if self.noise_sigma < 0:
            raise ValueError('noise_sigma must be nonnegative, got {}'.format(self.noise_sigma))

    @property
    def kernel(self):
        return make_kernel(self.kernel_spec)

    def apply(self, x_star):
        """Degrades `x_star`, returning the observation."""

        return degrade(x_star, self.kernel, self.noise_sigma, self.seed, taper=self.taper)

    def as_dict(self):
        kernel = (self.kernel_spec.label if isinstance(self.kernel_spec, BlurKernel)
                  else ':'.join(str(p) for p in self.kernel_spec))
        return {'kernel': kernel, 'noise_sigma': self.noise_sigma, 'seed': self.seed,
                'taper': self.taper}

    def __repr__(self):
        return 'DegradationSpec({})'.format(', '.join('{}={!r}'.format(k, v)
                                                     for k, v in sorted(self.as_dict().items())))

def degrade(x_star, kernel, noise_sigma, seed=None, taper=False):
    """Computes $y=Ax^*+n$ with periodic blur and iid Gaussian noise. The
    result is not clipped.

    **Arguments**

    - **x_star** : _2-d numpy.ndarray_
        - The sharp image, with intensities in `[0, 1]`.
    - **kernel** : `BlurKernel` or kernel description
        - The blur kernel.
    - **noise_sigma** : _float_
        - Noise standard deviation in intensity units, e.g. `0.003` for a
        noise level of 0.3%.
    - **seed** : _int_ or `None`
        - Seed of the noise.
    - **taper** : _bool_
        - Whether to apply `edgetaper` to the blurred image before adding
        noise.

    **Returns**

    - _2-d numpy.ndarray_
        - The observation.
    """

    x_star = check_image(x_star, 'x_star')
    kernel = make_kernel(kernel)
    if noise_sigma < 0:
        raise ValueError('noise_sigma must be nonnegative, got {}'.format(noise_sigma))
    if x_star.min() < 0 or x_star.max() > 1:
        warnings.warn('sharp image has intensities outside [0, 1]')

    plan = FrequencyPlan(x_star.shape, kernel)
    y = plan.ifft(plan.otf*plan.fft(x_star))
    if taper:
        y = edgetaper(y, kernel)

    if noise_sigma > 0:
        rng = np.random.RandomState(seed)
        y = y + noise_sigma*rng.standard_normal(y.shape)
    return y

###############################################################################
# Test images
###############################################################################

def _gradient_support(x):
    return group_magnitudes(apply_gradient(x)) > 0

# draws a level in [0, 1] at least min_gap away from every level in avoid
def _draw_level(rng, avoid, min_gap=0.1):
    while True:
        level = rng.uniform(0., 1.)
        if all(abs(level - a) >= min_gap for a in avoid):
            return level

def make_sparse_image(dims, n_shapes, seed=None):
    """A piecewise-constant image made of axis-aligned rectangles with
    random levels in `[0, 1]` on a constant background. Rectangles stay at
    least one pixel away from the border.

    **Arguments**

    - **dims** : _tuple_ of _int_
        - The `(H, W)` dimensions, each at least `4`.
    - **n_shapes** : _int_
        - The number of rectangles.
    - **seed** : _int_ or `None`
        - The random seed.

    **Returns**

    - (_2-d numpy.ndarray_, _2-d numpy.ndarray_)
        - The image and the boolean support of its periodic gradient.
    """

    H, W = int(dims[0]), int(dims[1])
    if min(H, W) < 4:
        raise ValueError('sparse images need dimensions of at least 4, got {}'.format((H, W)))
    if n_shapes < 0:
        raise ValueError('n_shapes must be nonnegative, got {}'.format(n_shapes))

    rng = np.random.RandomState(seed)
    background = _draw_level(rng, ())
    x = np.full((H, W), background)
    for _ in range(n_shapes):
        h = rng.randint(max(H//8, 1), max(H//2, 2))
        w = rng.randint(max(W//8, 1), max(W//2, 2))
        r = rng.randint(1, H - h)
        c = rng.randint(1, W - w)
        x[r:r+h,c:c+w] = _draw_level(rng, (background,))

    return x, _gradient_support(x)

def make_1d_signal(length, n_jumps, seed=None, min_gap=8):
    """A piecewise-constant signal with `n_jumps` steps at random positions
    at least `min_gap` samples apart, as an `(N, 1)` column.

    **Arguments**

    - **length** : _int_
        - The number of samples.
    - **n_jumps** : _int_
        - The number of steps.
    - **seed** : _int_ or `None`
        - The random seed.
    - **min_gap** : _int_
        - Minimum distance between steps and from the ends.

    **Returns**

    - (_2-d numpy.ndarray_, _2-d numpy.ndarray_)
        - The signal and the boolean support of its periodic gradient.
    """

    length = int(length)
    if n_jumps < 0:
        raise ValueError('n_jumps must be nonnegative, got {}'.format(n_jumps))
    if (n_jumps + 1)*min_gap > length:
        raise ValueError('cannot place {} jumps {} apart in {} samples'.format(n_jumps, min_gap, length))

    rng = np.random.RandomState(seed)

    # slack distributed over the gaps keeps positions at least min_gap apart
    slack = length - (n_jumps + 1)*min_gap
    offsets = np.sort(rng.randint(0, slack + 1, size=n_jumps))
    positions = min_gap*np.arange(1, n_jumps + 1) + offsets

    x = np.empty(length)
    levels = [_draw_level(rng, ())]
    for start, stop in zip(np.concatenate(([0], positions)), np.concatenate((positions, [length]))):
        if start > 0:
            levels.append(_draw_level(rng, (levels[-1],)))
        x[start:stop] = levels[-1]

    x = x[:,np.newaxis]
    return x, _gradient_support(x)

def make_text_image(dims, n_strokes, seed=None):
    """A text-like image of dark thin axis-aligned strokes on a white
    background, whose gradients are nearly sparse.

    **Arguments**

    - **dims** : _tuple_ of _int_
        - The `(H, W)` dimensions, each at least `8`.
    - **n_strokes** : _int_
        - The number of strokes.
    - **seed** : _int_ or `None`
        - The random seed.

    **Returns**

    - (_2-d numpy.ndarray_, _2-d numpy.ndarray_)
        - The image and the boolean support of its periodic gradient.
    """

    H, W = int(dims[0]), int(dims[1])
    if min(H, W) < 8:
        raise ValueError('text images need dimensions of at least 8, got {}'.format((H, W)))

    rng = np.random.RandomState(seed)
    x = np.ones((H, W))
    for _ in range(n_strokes):
        thickness = rng.randint(1, 4)
        vertical = rng.rand() < 0.5
        extent = H if vertical else W
        length = rng.randint(5, max(extent//4, 6))
        level = rng.uniform(0., 0.2)
        if vertical:
            r, c = rng.randint(1, H - length), rng.randint(1, W - thickness)
            x[r:r+length,c:c+thickness] = level
        else:
            r, c = rng.randint(1, H - thickness), rng.randint(1, W - length)
            x[r:r+thickness,c:c+length] = level

    return x, _gradient_support(x)
