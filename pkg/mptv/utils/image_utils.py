"""## Image Tools

Reading and writing images and kernel files. Intensities are handled as
`float64` values in `[0, 1]`; files are 8- or 16-bit grayscale or color PNG
and plain PGM/PPM, read and written with Pillow. These are not importable
from the top level `mptv` module, but must instead be imported from
`mptv.utils`.
"""
from __future__ import absolute_import, division

import os

import numpy as np
from PIL import Image

__all__ = [
    'load_kernel_file',
    'luminance',
    'quantize',
    'read_image',
    'write_image'
]

# luminance weights for three-channel images
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

# extensions read as text matrices
TEXT_EXTENSIONS = ('.txt', '.csv', '.dat', '.asc')

# full-scale values of the supported bit depths
_FULL_SCALE = {8: 255., 16: 65535.}

def _full_scale(bit_depth):
    if bit_depth not in _FULL_SCALE:
        raise ValueError('bit_depth must be 8 or 16, got {}'.format(bit_depth))
    return _FULL_SCALE[bit_depth]

def quantize(x, bit_depth=16):
    """The values `write_image` followed by `read_image` produce for `x`."""

    scale = _full_scale(bit_depth)
    return np.round(np.clip(x, 0., 1.)*scale)/scale

def luminance(x):
    """Luminance of an `(H, W, C)` image, the channel mean unless `C` is
    `3`. Two-dimensional images are returned unchanged."""

    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        return x
    if x.ndim != 3:
        raise ValueError('images must have shape (H, W) or (H, W, C)')
    if x.shape[2] == 3:
        return np.tensordot(x, LUMA_WEIGHTS, axes=(2, 0))
    return x.mean(axis=2)

def read_image(path):
    """Reads an image file into `[0, 1]` intensities.

    **Arguments**

    - **path** : _str_
        - The image file.

    **Returns**

    - _numpy.ndarray_
        - An `(H, W)` array for grayscale files and `(H, W, 3)` otherwise.
        Alpha channels are dropped.
    """

    if not os.path.isfile(path):
        raise IOError('image file {} does not exist'.format(path))

    with Image.open(path) as img:
        mode = img.mode
        if mode in ('I;16', 'I;16B', 'I;16L', 'I'):
            arr, scale = np.asarray(img, dtype=np.float64), 65535.
        elif mode == 'F':
            arr, scale = np.asarray(img, dtype=np.float64), 1.
        elif mode in ('L', '1'):
            arr, scale = np.asarray(img.convert('L'), dtype=np.float64), 255.
        else:
            arr, scale = np.asarray(img.convert('RGB'), dtype=np.float64), 255.

    return arr/scale

def write_image(path, x, bit_depth=16):
    """Writes `[0, 1]` intensities to an image file, clipping values outside
    the range. The format follows the extension of `path`.

    **Arguments**

    - **path** : _str_
        - The destination, typically ending in `.png` or `.pgm`.
    - **x** : _numpy.ndarray_
        - An `(H, W)` or `(H, W, 3)` image.
    - **bit_depth** : {`8`, `16`}
        - Bits per sample. Color images are always written with 8 bits.
    """

    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 3 and x.shape[2] == 1:
        x = x[...,0]

    if x.ndim == 3:
        q = np.round(np.clip(x, 0., 1.)*255.).astype(np.uint8)
        img = Image.fromarray(q, 'RGB')
    elif x.ndim == 2:
        q = np.round(np.clip(x, 0., 1.)*_full_scale(bit_depth))
        if bit_depth == 8:
            img = Image.fromarray(q.astype(np.uint8), 'L')
        else:
            img = Image.fromarray(q.astype(np.uint16)).convert('I')
    else:
        raise ValueError('images must have shape (H, W) or (H, W, 3)')

    img.save(path)

def load_kernel_file(path):
    """Reads kernel taps from a text matrix (rows of whitespace separated
    reals) or a grayscale image. Taps are returned unnormalized.

    **Arguments**

    - **path** : _str_
        - The kernel file.

    **Returns**

    - _2-d numpy.ndarray_
        - The taps.
    """

    if not os.path.isfile(path):
        raise IOError('kernel file {} does not exist'.format(path))

    if os.path.splitext(path)[1].lower() in TEXT_EXTENSIONS:
        with open(path, 'rt') as f:
            lines = [line.replace(',', ' ') for line in f if line.strip() and not line.startswith('#')]
        taps = np.loadtxt(lines, ndmin=2)
    else:
        taps = luminance(read_image(path))

    if taps.size == 0:
        raise ValueError('kernel file {} holds no taps'.format(path))
    return taps
