r"""# Reference TV Solver

A slow, high-precision minimizer of
$$
\frac12\|y-Ax\|_2^2 + \lambda\,\Omega_\text{TV}(x)
$$
used as ground truth for small instances. It runs the primal-dual method of
Chambolle and Pock with the splitting $K=D$: the proximal map of the data
term is solved exactly in the Fourier domain, and the dual step projects
every gradient pair onto the disk of radius $\lambda$. Step sizes stay fixed,
so the stationarity residual $\|A^T(Ax-y)+D^Tq\|_2$ of the current
primal-dual pair equals $\|x^{k-1}-x^k\|_2/\tau$ and keeps shrinking with the
iterate changes. The iteration stops only once that residual certifies the
returned pair.
"""
from __future__ import absolute_import, division, print_function

import time
import warnings

import numpy as np

from mptv.grid import (FrequencyPlan, apply_divergence, apply_gradient, check_image,
                       group_magnitudes)

__all__ = ['kkt_residual', 'oracle_tv_solve', 'project_groups']

# largest image the oracle accepts, per side
MAX_SIDE = 32

# squared norm bound of periodic forward differences
GRADIENT_NORM_SQ = 8.

def project_groups(q, radius):
    """Projects every `(v, h)` pair of a `(2, H, W)` field onto the disk of
    the given radius."""

    mags = np.hypot(q[0], q[1])
    return q/np.maximum(1., mags/radius) if radius > 0 else np.zeros_like(q)

def kkt_residual(x, q, y, plan, lam):
    r"""Norm of $A^T(Ax-y)+D^Tq$ together with the largest dual group
    excess $\max_i(\|q_i\|_2-\lambda)_+$.

    **Returns**

    - (_float_, _float_)
        - The stationarity residual and the dual infeasibility.
    """

    grad = plan.ifft(plan.kernel_power*plan.fft(x) - np.conj(plan.otf)*plan.fft(y))
    stationarity = float(np.linalg.norm(grad + apply_divergence(q)))
    excess = float(max(np.max(group_magnitudes(q)) - lam, 0.))
    return stationarity, excess

def oracle_tv_solve(y, kernel, lam, tol=1e-12, kkt_tol=1e-5, min_iters=10000, max_iters=200000,
                    check_every=100, return_dual=False, verbose=0):
    """Minimizes the full TV model to high precision.

    **Arguments**

    - **y** : _2-d numpy.ndarray_
        - The observation, at most `32` pixels per side.
    - **kernel** : `BlurKernel` or `None`
        - The blur kernel, `None` meaning the identity.
    - **lam** : _float_
        - The nonnegative regularization weight.
    - **tol** : _float_
        - Relative change of the objective between checks below which the
        iteration stops, once `min_iters` iterations were run.
    - **kkt_tol** : _float_
        - Stationarity residual, relative to $\|y\|_2$, that must also be
        reached before stopping.
    - **min_iters** : _int_
        - Minimum number of iterations.
    - **max_iters** : _int_
        - Maximum number of iterations.
    - **check_every** : _int_
        - Iterations between objective evaluations.
    - **return_dual** : _bool_
        - Whether to also return the dual field $q$.
    - **verbose** : _int_
        - Prints the objective at every check if at least `1`.

    **Returns**

    - _2-d numpy.ndarray_
        - The minimizer.
    - [_3-d numpy.ndarray_], optional
        - The dual field, with every pair inside the disk of radius `lam`.
    """

    y = check_image(y, 'y')
    if max(y.shape) > MAX_SIDE:
        raise ValueError('oracle is limited to {0}x{0} images, got {1}'.format(MAX_SIDE, y.shape))
    if lam < 0:
        raise ValueError('lam must be nonnegative, got {}'.format(lam))

    plan = FrequencyPlan(y.shape, kernel)
    Aty = np.conj(plan.otf)*plan.fft(y)

    # without regularization the minimizer solves the normal equation
    if lam == 0:
        power = plan.kernel_power
        if not np.all(power > 0):
            raise FloatingPointError('kernel spectrum vanishes; the unregularized problem '
                                     'has no unique minimizer')
        x = plan.ifft(Aty/power)
        q = np.zeros((2,) + y.shape)
        return (x, q) if return_dual else x

    tau = sigma = 0.99/np.sqrt(GRADIENT_NORM_SQ)
    target = kkt_tol*max(float(np.linalg.norm(y)), 1e-300)

    start = time.time()
    x = np.full(y.shape, y.mean())
    x_bar = x.copy()
    q = np.zeros((2,) + y.shape)

    def objective(x):
        fit = y - plan.ifft(plan.otf*plan.fft(x))
        return 0.5*np.sum(fit**2) + lam*np.sum(group_magnitudes(apply_gradient(x)))

    prev = objective(x)
    for k in range(1, max_iters + 1):

        # dual ascent and projection onto the lambda disks
        q = project_groups(q + sigma*apply_gradient(x_bar), lam)

        # exact proximal map of the data term
        v = x - tau*apply_divergence(q)
        x_new = plan.ifft((Aty + plan.fft(v)/tau)/(plan.kernel_power + 1./tau))

        x_bar = 2*x_new - x
        x, x_prev = x_new, x

        if k % check_every == 0:
            stationarity = float(np.linalg.norm(x_prev - x))/tau
            obj = objective(x)
            if verbose >= 1:
                print('  Oracle iteration {}: objective {:.12e}, stationarity {:.3e} in {:.3f}s'
                      .format(k, obj, stationarity, time.time() - start))
            if (k >= min_iters and abs(prev - obj) <= tol*max(abs(obj), 1e-300) and
                stationarity <= target):
                break
            prev = obj
    else:
        warnings.warn('oracle stopped at max_iters={} before reaching tol={} and '
                      'kkt_tol={}'.format(max_iters, tol, kkt_tol))

    return (x, q) if return_dual else x
