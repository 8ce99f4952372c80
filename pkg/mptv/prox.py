r"""# ADMM for Support-Constrained TV

Given a support set $S$ of pixels whose gradient groups may be nonzero, the
restricted TV problem
$$
\min_x \frac12\|y-Ax\|_2^2 + \lambda\sum_{i\in S}\|(Dx)_i\|_2\quad
\text{s.t.}\quad (Dx)_{S^c}=0
$$
is solved by ADMM with a splitting $z=Dx$. Each iteration applies grouped
shrinkage to the active pairs (zeroing the rest), solves the normal equation
$[A^TA+\rho D^TD]x = A^Ty+\rho D^T\nu$ exactly in the Fourier domain, and
performs the dual ascent $\gamma \leftarrow \gamma + \rho(Dx - z')$. The
complement constraint is carried by the same quadratic penalty, so the
iterates only approach it; the returned estimate is therefore projected onto
the feasible set, the images that are constant on every region enclosed by
the active pixels. The multiplier $\gamma$ of a previous solve may be passed
in to warm start a solve on a grown support.

With $S$ covering every pixel this is the classical TV-ADMM baseline for
$\min_x \frac12\|y-Ax\|_2^2 + \lambda\,\Omega_\text{TV}(x)$.
"""
from __future__ import absolute_import, division, print_function

import time

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from mptv.base import ConfigBase, DeconvBase
from mptv.grid import (FrequencyPlan, apply_gradient, check_gradient, check_image,
                       group_magnitudes, tv_value)

__all__ = [
    'AdmmConfig',
    'AdmmState',
    'TVADMM',
    'dual_update',
    'fit_norm',
    'group_shrinkage',
    'project_support',
    'shrink_groups',
    'solve_subproblem',
    'subproblem_objective',
    'support_mask',
    'support_regions',
    'tv_admm',
    'tv_objective',
    'x_update',
    'z_update'
]

###############################################################################
# AdmmConfig
###############################################################################

class AdmmConfig(ConfigBase):

    r"""Options for the inner ADMM solver.

    - **lam** (alias `lambda`) : regularization weight $\lambda>0$, default `1e-4`.
    - **rho** : penalty $\rho>0$, default `1`.
    - **eps_in** : relative fit-change tolerance in `(0, 1)`, default `1e-3`.
    - **min_iters** : iterations before the stopping rule may fire, default `10`.
    - **max_iters** : iteration cap, default `100`.
    """

    keys = ('lam', 'rho', 'eps_in', 'min_iters', 'max_iters')

    def _process_hps(self):
        self.lam = float(self._proc_arg('lam', default=1e-4, alias='lambda'))
        self.rho = float(self._proc_arg('rho', default=1.))
        self.eps_in = float(self._proc_arg('eps_in', default=1e-3))
        self.min_iters = int(self._proc_arg('min_iters', default=10))
        self.max_iters = int(self._proc_arg('max_iters', default=100))

    def _validate(self):
        if not self.lam > 0:
            raise ValueError('lam must be positive, got {}'.format(self.lam))
        if not self.rho > 0:
            raise ValueError('rho must be positive, got {}'.format(self.rho))
        if not 0 < self.eps_in < 1:
            raise ValueError('eps_in must lie in (0, 1), got {}'.format(self.eps_in))
        if self.min_iters < 1:
            raise ValueError('min_iters must be a positive integer')
        if self.max_iters < self.min_iters:
            raise ValueError('max_iters must be at least min_iters')

###############################################################################
# AdmmState
###############################################################################

class AdmmState(object):

    r"""Mutable iterate of one ADMM solve. `z` is zero off the support by
    construction; `fit_history` holds $\|y-Ax\|_2$ starting from the initial
    image. `n_regions` counts the regions the support encloses, one meaning
    that only constant images are feasible."""

    def __init__(self, x, mask, gamma=None):
        self.x = x
        self.mask = mask
        self.z = np.zeros((2,) + x.shape)
        self.gamma = np.zeros((2,) + x.shape) if gamma is None else gamma
        self.n_regions = None
        self.iter = 0
        self.fit_history = []
        self.converged = False
        self.time = 0.

    @property
    def fit(self):
        return self.fit_history[-1] if len(self.fit_history) else None

    def __repr__(self):
        return 'AdmmState(iter={}, fit={}, converged={})'.format(self.iter, self.fit, self.converged)

###############################################################################
# HELPER FUNCTIONS
###############################################################################

def support_mask(S, shape):
    """Boolean `(H, W)` mask of the active pixels. `S` may be a `SupportSet`,
    a boolean array, or `None` for the full support."""

    if S is None:
        return np.ones(shape, dtype=bool)
    mask = np.asarray(getattr(S, 'mask', S), dtype=bool)
    if mask.shape != tuple(shape):
        raise ValueError('support has dimensions {} but {} expected'.format(mask.shape, tuple(shape)))
    return mask

def support_regions(mask):
    """Labels the regions on which every image whose gradient vanishes off
    `mask` is constant. Pixel `i` is joined to its lower and right neighbors
    (with wrap-around) unless `i` is active.

    **Returns**

    - (_int_, _1-d numpy.ndarray_)
        - The number of regions and the region label of every flat index.
    """

    mask = np.asarray(mask, dtype=bool)
    idx = np.arange(mask.size).reshape(mask.shape)
    free = ~mask
    src = np.concatenate((idx[free], idx[free]))
    dst = np.concatenate((np.roll(idx, -1, axis=0)[free], np.roll(idx, -1, axis=1)[free]))
    graph = scipy.sparse.coo_matrix((np.ones(src.size), (src, dst)), shape=(mask.size, mask.size))
    return scipy.sparse.csgraph.connected_components(graph, directed=False)

def project_support(x, mask):
    r"""Orthogonal projection of `x` onto $\{x: (Dx)_i=0\ \forall i\notin S\}$,
    replacing `x` by its mean over every region of `support_regions`.

    **Returns**

    - (_2-d numpy.ndarray_, _int_)
        - The projected image and the number of regions.
    """

    if np.all(mask):
        return x.copy(), x.size
    n_regions, labels = support_regions(mask)
    sums = np.bincount(labels, weights=x.ravel(), minlength=n_regions)
    counts = np.bincount(labels, minlength=n_regions)
    return (sums/counts)[labels].reshape(x.shape), n_regions

def fit_norm(x, y, plan):
    r"""$\|y-Ax\|_2$."""

    return float(np.linalg.norm(y - plan.ifft(plan.otf*plan.fft(x))))

def tv_objective(x, y, plan, lam):
    r"""$\frac12\|y-Ax\|_2^2 + \lambda\,\Omega_\text{TV}(x)$."""

    return 0.5*fit_norm(x, y, plan)**2 + lam*tv_value(x)

def subproblem_objective(x, y, plan, S, lam):
    r"""$\frac12\|y-Ax\|_2^2 + \lambda\sum_{i\in S}\|(Dx)_i\|_2$."""

    mask = support_mask(S, plan.shape)
    mags = group_magnitudes(apply_gradient(x))
    return 0.5*fit_norm(x, y, plan)**2 + lam*float(np.sum(mags[mask]))

###############################################################################
# ADMM steps
###############################################################################

def group_shrinkage(mu_pair, threshold):
    r"""Two-dimensional shrinkage of a single pair, with $0\cdot(0/0)=0$.

    **Arguments**

    - **mu_pair** : _tuple_ of _float_
        - The pair $\mu=(\mu_v,\mu_h)$.
    - **threshold** : _float_
        - The nonnegative threshold.

    **Returns**

    - _tuple_ of _float_
        - $\max(\|\mu\|_2-t, 0)\,\mu/\|\mu\|_2$.
    """

    out = shrink_groups(np.asarray(mu_pair, dtype=np.float64).reshape(2, 1, 1), threshold)
    return (float(out[0,0,0]), float(out[1,0,0]))

def shrink_groups(mu, threshold, mask=None):
    """Applies `group_shrinkage` to every pair of a `(2, H, W)` field,
    zeroing pairs outside `mask` when one is given."""

    if threshold < 0:
        raise ValueError('threshold must be nonnegative, got {}'.format(threshold))
    mags = np.hypot(mu[0], mu[1])
    scale = np.zeros_like(mags)
    np.divide(np.maximum(mags - threshold, 0.), mags, out=scale, where=(mags > 0))
    if mask is not None:
        scale[~mask] = 0.
    return mu*scale

def z_update(state, S, cfg):
    r"""Step 1: shrink $\mu=Dx+\gamma/\rho$ on the active pairs, zero the rest.

    **Arguments**

    - **state** : `AdmmState`
        - Provides the current `x` and `gamma`.
    - **S** : `SupportSet`, boolean array or `None`
        - The active support.
    - **cfg** : `AdmmConfig`
        - Provides `lam` and `rho`.

    **Returns**

    - _3-d numpy.ndarray_
        - The field $z'$.
    """

    mask = support_mask(S, state.x.shape)
    mu = apply_gradient(state.x) + state.gamma/cfg.rho
    return shrink_groups(mu, cfg.lam/cfg.rho, mask)

# pointwise spectral solve of the normal equation given the data part
def _solve_normal(rhs_data, nu, plan, rho, denom):
    rhs = rhs_data + rho*(np.conj(plan.dv_otf)*plan.fft(nu[0]) +
                          np.conj(plan.dh_otf)*plan.fft(nu[1]))
    return rhs/denom

def x_update(y, plan, nu, rho):
    r"""Step 2: solves $[A^TA+\rho D^TD]x = A^Ty+\rho D^T\nu$ by FFTs.

    **Arguments**

    - **y** : _2-d numpy.ndarray_
        - The observation.
    - **plan** : `FrequencyPlan`
        - Spectra for the dimensions of `y`.
    - **nu** : _3-d numpy.ndarray_
        - The field $\nu=z'-\gamma/\rho$.
    - **rho** : _float_
        - The penalty parameter.

    **Returns**

    - _2-d numpy.ndarray_
        - The minimizer $x$.
    """

    y = check_image(y, 'y')
    plan.check(y, 'y')
    nu = check_gradient(nu, plan.shape, 'nu')
    if rho < 0:
        raise ValueError('rho must be nonnegative, got {}'.format(rho))

    rhs_data = np.conj(plan.otf)*plan.fft(y)
    return plan.ifft(_solve_normal(rhs_data, nu, plan, rho, plan.normal_denominator(rho)))

def dual_update(state, z_prime, rho):
    r"""Step 3: returns $\gamma+\rho(Dx-z')$ without modifying `state`."""

    return state.gamma + rho*(apply_gradient(state.x) - z_prime)

###############################################################################
# Solvers
###############################################################################

def solve_subproblem(y, plan, S, cfg, x0, warm=None, verbose=0):
    r"""Runs ADMM on the support-restricted TV problem.

    The solve stops once $|\varphi(x^{k-1})-\varphi(x^k)|/\varphi(x^0)\le
    \epsilon_\text{in}$ with $\varphi(x)=\|y-Ax\|_2$, provided at least
    `min_iters` iterations were run, or after `max_iters` iterations. Unless
    `S` covers every pixel, the last iterate is then projected with
    `project_support`, so the returned estimate has no gradient off the
    support, and the last entry of the fit history describes it.

    **Arguments**

    - **y** : _2-d numpy.ndarray_
        - The observation.
    - **plan** : `FrequencyPlan`
        - Spectra for the dimensions of `y` and the blur kernel.
    - **S** : `SupportSet`, boolean array or `None`
        - The active support, `None` meaning every pixel.
    - **cfg** : `AdmmConfig`
        - Solver options.
    - **x0** : _2-d numpy.ndarray_
        - The initial image.
    - **warm** : `AdmmState` or `None`
        - A previous solve on the same observation whose multiplier
        $\gamma$ starts this one; zero if `None`.
    - **verbose** : _int_
        - Prints the fit norm every iteration if at least `2`.

    **Returns**

    - (_2-d numpy.ndarray_, `AdmmState`)
        - The estimate and the final solver state.
    """

    start = time.time()
    y = check_image(y, 'y')
    x0 = check_image(x0, 'x0')
    plan.check(y, 'y')
    plan.check(x0, 'x0')
    mask = support_mask(S, plan.shape)

    rho, threshold = cfg.rho, cfg.lam/cfg.rho
    denom = plan.normal_denominator(rho)
    rhs_data = np.conj(plan.otf)*plan.fft(y)

    gamma = None
    if warm is not None:
        gamma = check_gradient(warm.gamma, plan.shape, 'warm start multiplier').copy()
    state = AdmmState(x0.copy(), mask, gamma)
    phi0 = fit_norm(x0, y, plan)
    state.fit_history.append(phi0)
    scale = phi0 if phi0 > 0 else 1.

    dx = apply_gradient(state.x)
    for k in range(1, cfg.max_iters + 1):

        # shrinkage on the active pairs, zero elsewhere
        state.z = shrink_groups(dx + state.gamma/rho, threshold, mask)

        # image update
        X = _solve_normal(rhs_data, state.z - state.gamma/rho, plan, rho, denom)
        x = plan.ifft(X)
        if not np.all(np.isfinite(x)):
            raise FloatingPointError('ADMM iterates diverged at iteration {} with rho={}; '
                                     'try a different rho'.format(k, rho))
        state.x = x

        # dual ascent
        dx = apply_gradient(x)
        state.gamma += rho*(dx - state.z)

        state.iter = k
        phi = float(np.linalg.norm(y - plan.ifft(plan.otf*X)))
        state.fit_history.append(phi)

        if verbose >= 2:
            print('    ADMM iteration {}: fit {:.6e}'.format(k, phi))

        if k >= cfg.min_iters and abs(state.fit_history[-2] - phi)/scale <= cfg.eps_in:
            state.converged = True
            break

    state.x, state.n_regions = project_support(state.x, mask)
    if state.n_regions < state.x.size:
        state.fit_history[-1] = fit_norm(state.x, y, plan)

    state.time = time.time() - start
    return state.x, state

def tv_admm(y, kernel, cfg=None, plan=None, return_state=False, verbose=0):
    """The TV-ADMM baseline: `solve_subproblem` on the full support started
    from the mean image.

    **Arguments**

    - **y** : _2-d numpy.ndarray_
        - The observation.
    - **kernel** : `BlurKernel`
        - The blur kernel.
    - **cfg** : `AdmmConfig` or _dict_ or `None`
        - Solver options, defaults if `None`.
    - **plan** : `FrequencyPlan` or `None`
        - Optional precomputed spectra.
    - **return_state** : _bool_
        - Whether to also return the `AdmmState`.

    **Returns**

    - _2-d numpy.ndarray_
        - The restored image.
    - [`AdmmState`], optional
        - The final solver state.
    """

    y = check_image(y, 'y')
    cfg = cfg if isinstance(cfg, AdmmConfig) else AdmmConfig(cfg)
    if plan is None:
        plan = FrequencyPlan(y.shape, kernel)
    elif not plan.serves(kernel):
        raise ValueError('plan was built for a different kernel')

    x0 = np.full(y.shape, y.mean())
    x, state = solve_subproblem(y, plan, None, cfg, x0, verbose=verbose)
    return (x, state) if return_state else x

###############################################################################
# TVADMM
###############################################################################

class TVADMM(DeconvBase):

    """Estimator wrapper around `tv_admm`. Accepts the options of
    `AdmmConfig` as dictionaries and/or keywords."""

    def __init__(self, *args, **kwargs):
        super(TVADMM, self).__init__(AdmmConfig(*args, **kwargs))

    def compute(self, y, kernel, return_state=False, verbose=0):
        return tv_admm(y, kernel, self.config, return_state=return_state, verbose=verbose)
