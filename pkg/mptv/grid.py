r"""# Grids and Operators

Images are handled as two-dimensional `float64` numpy arrays of shape
`(H, W)`; one-dimensional signals are treated as `(N, 1)` columns. Gradient
fields are arrays of shape `(2, H, W)` whose zeroth channel holds vertical
differences and whose first channel holds horizontal differences, so that the
group of pixel $i$ is the pair `(g[0].flat[i], g[1].flat[i])`.

All operators act under periodic boundary conditions. The difference operator
$D=[D_v;D_h]$ uses forward differences with wrap-around,
$$
(D_vx)_{i,j} = x_{i+1,j} - x_{i,j},\quad\quad (D_hx)_{i,j} = x_{i,j+1} - x_{i,j},
$$
and the blur operator $A$ is periodic convolution with a normalized kernel
centered on its middle tap. Both are diagonalized by the discrete Fourier
transform, which the `FrequencyPlan` caches for a given image size.
"""
from __future__ import absolute_import, division, print_function

import numpy as np
import scipy.fft

__all__ = [
    'BlurKernel',
    'FrequencyPlan',
    'apply_divergence',
    'apply_gradient',
    'check_gradient',
    'check_image',
    'convolve_periodic',
    'correlate_periodic',
    'group_magnitudes',
    'tv_value'
]

###############################################################################
# Validation helpers
###############################################################################

def check_image(x, name='image'):
    """Coerces `x` to a finite two-dimensional `float64` array. A
    one-dimensional input is interpreted as an `(N, 1)` column.

    **Arguments**

    - **x** : _array_like_
        - The image or signal.
    - **name** : _str_
        - Name used in error messages.

    **Returns**

    - _2-d numpy.ndarray_
        - The validated image.
    """

    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:,np.newaxis]
    if x.ndim != 2:
        raise ValueError('{} must be one- or two-dimensional, got shape {}'.format(name, x.shape))
    if x.size == 0:
        raise ValueError('{} is empty'.format(name))
    if not np.all(np.isfinite(x)):
        raise ValueError('{} contains non-finite values'.format(name))
    return x

def check_gradient(g, shape=None, name='gradient field'):
    """Coerces `g` to a finite `(2, H, W)` `float64` array, optionally
    checking that `(H, W)` equals `shape`.
    """

    g = np.asarray(g, dtype=np.float64)
    if g.ndim != 3 or g.shape[0] != 2:
        raise ValueError('{} must have shape (2, H, W), got {}'.format(name, g.shape))
    if shape is not None and g.shape[1:] != tuple(shape):
        raise ValueError('{} has dimensions {} but {} expected'.format(name, g.shape[1:], tuple(shape)))
    if not np.all(np.isfinite(g)):
        raise ValueError('{} contains non-finite values'.format(name))
    return g

###############################################################################
# BlurKernel
###############################################################################

class BlurKernel(object):

    """A point spread function with odd dimensions whose anchor is the center
    tap. Taps are nonnegative and normalized to unit sum at construction."""

    def __init__(self, taps, normalize=True, label=None):
        """**Arguments**

        - **taps** : _array_like_
            - The kernel values. A one-dimensional input is treated as a
            vertical `(L, 1)` kernel, matching the convention for signals.
        - **normalize** : _bool_
            - Whether to rescale the taps to sum to one. If `False`, the
            taps must already sum to one within `1e-12`.
        - **label** : _str_ or `None`
            - Optional human readable description, used in reports.
        """

        taps = np.array(taps, dtype=np.float64)
        if taps.ndim == 1:
            taps = taps[:,np.newaxis]
        if taps.ndim != 2 or taps.size == 0:
            raise ValueError('kernel taps must be a non-empty one- or two-dimensional array')
        if taps.shape[0] % 2 == 0 or taps.shape[1] % 2 == 0:
            raise ValueError('kernel dimensions must be odd, got {}'.format(taps.shape))
        if not np.all(np.isfinite(taps)):
            raise ValueError('kernel taps must be finite')
        if np.any(taps < 0):
            raise ValueError('kernel taps must be nonnegative')

        total = taps.sum()
        if total <= 0:
            raise ValueError('kernel taps must have positive sum')
        if normalize:
            taps /= total
        elif abs(total - 1.0) > 10**-12:
            raise ValueError('kernel taps sum to {} rather than 1'.format(total))

        taps.setflags(write=False)
        self._taps = taps
        self.label = label

    @classmethod
    def delta(cls):
        """The identity kernel with a single unit tap."""

        return cls(np.ones((1, 1)), label='delta')

    @classmethod
    def from_array(cls, taps, normalize=True, label=None):
        """Builds a kernel from raw taps, returning `taps` unchanged if it
        is already a `BlurKernel`."""

        if isinstance(taps, cls):
            return taps
        return cls(taps, normalize=normalize, label=label)

    @property
    def taps(self):
        """Read-only array of kernel values."""

        return self._taps

    @property
    def shape(self):
        return self._taps.shape

    @property
    def height(self):
        return self._taps.shape[0]

    @property
    def width(self):
        return self._taps.shape[1]

    @property
    def anchor(self):
        """Index of the center tap."""

        return (self.height//2, self.width//2)

    def flipped(self):
        """The kernel rotated by 180 degrees, i.e. the correlation kernel."""

        return BlurKernel(self._taps[::-1,::-1], normalize=False, label=self.label)

    def __eq__(self, other):
        return isinstance(other, BlurKernel) and np.array_equal(self._taps, other._taps)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        label = '' if self.label is None else ', label={!r}'.format(self.label)
        return 'BlurKernel(shape={}{})'.format(self.shape, label)

###############################################################################
# FrequencyPlan
###############################################################################

# places the anchor of a small array at the origin of a zero-padded grid
def _pad_to_origin(small, shape, anchor):
    padded = np.zeros(shape, dtype=np.float64)
    padded[:small.shape[0],:small.shape[1]] = small
    return np.roll(padded, (-anchor[0], -anchor[1]), axis=(0, 1))

class FrequencyPlan(object):

    """Cached real-FFT spectra of the blur kernel and the difference
    operators at a fixed image size. A plan is immutable once constructed and
    may be shared between concurrent readers."""

    def __init__(self, shape, kernel=None):
        """**Arguments**

        - **shape** : _tuple_ of _int_
            - The `(H, W)` dimensions of the images the plan serves.
        - **kernel** : `BlurKernel` or `None`
            - The blur kernel defining $A$. `None` means the identity.
        """

        if len(shape) != 2 or min(shape) < 1:
            raise ValueError('plan shape must be a pair of positive integers, got {}'.format(shape))
        self.shape = (int(shape[0]), int(shape[1]))
        self.kernel = BlurKernel.delta() if kernel is None else kernel
        if not isinstance(self.kernel, BlurKernel):
            raise TypeError('kernel must be a BlurKernel')
        if self.kernel.height > self.shape[0] or self.kernel.width > self.shape[1]:
            raise ValueError('kernel of shape {} does not fit inside an image of shape {}'
                             .format(self.kernel.shape, self.shape))

        # kernel spectrum, anchored at the origin
        self.otf = self.fft(_pad_to_origin(self.kernel.taps, self.shape, self.kernel.anchor))

        # forward difference stencils, (D x)_i = x_{i+1} - x_i
        dv, dh = np.zeros(self.shape), np.zeros(self.shape)
        dv[0,0] -= 1
        dv[-1,0] += 1
        dh[0,0] -= 1
        dh[0,-1] += 1
        self.dv_otf = self.fft(dv)
        self.dh_otf = self.fft(dh)

        # power spectra used by every normal equation
        self.kernel_power = np.abs(self.otf)**2
        self.gradient_power = np.abs(self.dv_otf)**2 + np.abs(self.dh_otf)**2

        for arr in (self.otf, self.dv_otf, self.dh_otf, self.kernel_power, self.gradient_power):
            arr.setflags(write=False)

    @property
    def size(self):
        return self.shape[0]*self.shape[1]

    def fft(self, x):
        return scipy.fft.rfft2(x, s=self.shape)

    def ifft(self, X):
        return scipy.fft.irfft2(X, s=self.shape)

    def check(self, x, name='image'):
        """Raises `ValueError` unless the trailing dimensions of `x` match
        the plan."""

        if np.shape(x)[-2:] != self.shape:
            raise ValueError('{} has dimensions {} but the plan serves {}'
                             .format(name, np.shape(x)[-2:], self.shape))

    def serves(self, kernel):
        """Whether the plan was built for `kernel`."""

        return kernel is None or kernel is self.kernel or kernel == self.kernel

    def normal_denominator(self, rho):
        r"""The spectrum of $A^TA + \rho D^TD$.

        Raises `FloatingPointError` if it vanishes at some frequency, which
        can only happen for $\rho=0$ and a kernel with spectral zeros.
        """

        denom = self.kernel_power + rho*self.gradient_power
        if not np.all(denom > 0):
            raise FloatingPointError('normal equation is singular for rho={}; '
                                     'use a positive rho'.format(rho))
        return denom

    def __repr__(self):
        return 'FrequencyPlan(shape={}, kernel={!r})'.format(self.shape, self.kernel)

def _resolve_plan(x, kernel, plan):
    if plan is None:
        plan = FrequencyPlan(x.shape, kernel)
    else:
        plan.check(x)
        if not plan.serves(kernel):
            raise ValueError('plan was built for a different kernel')
    return plan

###############################################################################
# Operators
###############################################################################

def apply_gradient(x):
    """Forward differences with periodic wrap.

    **Arguments**

    - **x** : _2-d numpy.ndarray_
        - The image.

    **Returns**

    - _3-d numpy.ndarray_
        - The `(2, H, W)` gradient field $Dx$.
    """

    x = check_image(x)
    return np.stack((np.roll(x, -1, axis=0) - x, np.roll(x, -1, axis=1) - x))

def apply_divergence(g):
    """The exact adjoint $D^Tg$ of `apply_gradient`. Note the sign: $D^TD$ is
    the negative discrete Laplacian.

    **Arguments**

    - **g** : _3-d numpy.ndarray_
        - A `(2, H, W)` gradient field.

    **Returns**

    - _2-d numpy.ndarray_
        - The `(H, W)` image $D^Tg$.
    """

    g = check_gradient(g)
    gv, gh = g
    return (np.roll(gv, 1, axis=0) - gv) + (np.roll(gh, 1, axis=1) - gh)

def convolve_periodic(x, kernel=None, plan=None):
    """Applies the blur operator $A$ by periodic convolution.

    **Arguments**

    - **x** : _2-d numpy.ndarray_
        - The image.
    - **kernel** : `BlurKernel` or `None`
        - The kernel. May be `None` if `plan` is given.
    - **plan** : `FrequencyPlan` or `None`
        - Cached spectra. Built on the fly if `None`.

    **Returns**

    - _2-d numpy.ndarray_
        - The blurred image $Ax$.
    """

    x = check_image(x)
    plan = _resolve_plan(x, kernel, plan)
    return plan.ifft(plan.otf*plan.fft(x))

def correlate_periodic(x, kernel=None, plan=None):
    """Applies $A^T$, i.e. periodic correlation with the kernel. Arguments
    are as for `convolve_periodic`."""

    x = check_image(x)
    plan = _resolve_plan(x, kernel, plan)
    return plan.ifft(np.conj(plan.otf)*plan.fft(x))

def group_magnitudes(g):
    """Per-pixel Euclidean norm of the `(v, h)` pairs of a gradient field."""

    g = check_gradient(g)
    return np.hypot(g[0], g[1])

def tv_value(x):
    r"""The isotropic total variation $\sum_i\|(Dx)_i\|_2$."""

    return float(np.sum(group_magnitudes(apply_gradient(x))))
