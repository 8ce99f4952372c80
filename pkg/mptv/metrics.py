"""# Image Quality

Peak signal-to-noise ratio and structural similarity for images with a
dynamic range of one, computed with `skimage.metrics`.
"""
from __future__ import absolute_import, division

import numpy as np
import skimage.metrics

from mptv.grid import check_image

__all__ = ['mse', 'psnr', 'ssim']

# reported value for exact reconstructions
PSNR_CAP = 99.

def _check_pair(x, ref):
    x, ref = check_image(x, 'x'), check_image(ref, 'ref')
    if x.shape != ref.shape:
        raise ValueError('x has dimensions {} but ref has {}'.format(x.shape, ref.shape))
    return x, ref

def mse(x, ref):
    """Mean squared error between two images of equal dimensions."""

    x, ref = _check_pair(x, ref)
    return float(skimage.metrics.mean_squared_error(ref, x))

def psnr(x, ref, peak=1., cap=PSNR_CAP):
    r"""Peak signal-to-noise ratio $10\log_{10}(\text{peak}^2/\text{MSE})$
    in dB.

    **Arguments**

    - **x** : _2-d numpy.ndarray_
        - The estimate.
    - **ref** : _2-d numpy.ndarray_
        - The reference image.
    - **peak** : _float_
        - The peak intensity.
    - **cap** : _float_ or `None`
        - Upper bound on the returned value, reached by exact
        reconstructions. `None` returns `inf` when the images are equal.

    **Returns**

    - _float_
        - The PSNR in dB.
    """

    if mse(x, ref) == 0:
        value = np.inf
    else:
        value = skimage.metrics.peak_signal_noise_ratio(ref, x, data_range=peak)
    return float(value if cap is None else min(value, cap))

def ssim(x, ref, data_range=1., sigma=1.5, K1=0.01, K2=0.03, return_map=False):
    """Mean structural similarity with a Gaussian window of standard
    deviation `sigma` and population statistics, averaged over the pixels
    whose window fits inside the image. With `sigma=1.5` the window is
    11 pixels wide.

    **Arguments**

    - **x** : _2-d numpy.ndarray_
        - The estimate.
    - **ref** : _2-d numpy.ndarray_
        - The reference image.
    - **data_range** : _float_
        - The dynamic range of the intensities.
    - **sigma** : _float_
        - Standard deviation of the window.
    - **K1**, **K2** : _float_
        - Stabilizing constants.
    - **return_map** : _bool_
        - Whether to also return the local SSIM map, which has the
        dimensions of the images.

    **Returns**

    - _float_
        - The mean SSIM in `[-1, 1]`.
    - [_2-d numpy.ndarray_], optional
        - The local SSIM values.
    """

    x, ref = _check_pair(x, ref)
    result = skimage.metrics.structural_similarity(x, ref, data_range=data_range,
                                                   gaussian_weights=True, sigma=sigma,
                                                   use_sample_covariance=False, K1=K1, K2=K2,
                                                   full=return_map)
    if return_map:
        value, smap = result
        return float(value), smap
    return float(result)
