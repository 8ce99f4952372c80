r"""# Matching Pursuit Total Variation

MPTV restricts the TV model to an incrementally grown support of pixels whose
gradient groups may be nonzero. Starting from the mean image, every outer
iteration

1. recovers the dual image $\alpha=y-Ax$ and the dual gradients
$\beta=(DD^T+rI)^{-1}DA^T\alpha$ by a ridge-regularized least squares solve,
shifted by a constant to have zero mean on the active pixels,
2. activates the $\kappa$ inactive pixels with the largest scores
$g_i=\|\beta_i\|_2$ (the most violated optimality conditions
$\|\beta_i\|_2\le\lambda$),
3. optionally refines the support with a morphological opening and a
Gaussian blur of its indicator map, and
4. solves the support-restricted TV problem by ADMM, warm started at the
previous estimate and multiplier, keeping the previous estimate if the new one
does not lower the restricted objective.

The loop stops when the relative change of
$\psi(x)=\|y-Ax\|_2^2+\lambda\,\Omega_\text{TV}(x)$ drops below $\epsilon$ once
the support encloses a region, when `max_outer` iterations
were run, or when every pixel is active. The ridge $r$ defaults to the ADMM
penalty $\rho$. The number $\kappa$ is fixed from the initial scores as the count of
$g^0_i>\zeta\|g^0\|_\infty$ unless given explicitly.
"""
from __future__ import absolute_import, division, print_function

import time

import numpy as np
import scipy.ndimage
import skimage.morphology

from mptv.base import ConfigBase, DeconvBase
from mptv.grid import FrequencyPlan, check_image, group_magnitudes, tv_value
from mptv.prox import AdmmConfig, fit_norm, solve_subproblem, subproblem_objective
from mptv.utils import luminance

__all__ = [
    'MPTV',
    'MptvDiagnostics',
    'SolverConfig',
    'SupportSet',
    'anchor_beta',
    'disk_structure',
    'find_most_violated',
    'gaussian_taps',
    'mptv',
    'mptv_channels',
    'outer_objective',
    'recover_beta',
    'refine_support',
    'select_kappa',
    'select_top_scores',
    'violation_scores'
]


###############################################################################
# SupportSet
###############################################################################

class SupportSet(object):

    """The set of active pixels together with the per-iteration increments
    that built it. Increments are pairwise disjoint. After refinement the
    active set is the support of the refined mask, which may differ from the
    raw union of increments."""

    def __init__(self, shape):
        self.shape = (int(shape[0]), int(shape[1]))
        self._raw = np.zeros(self.shape, dtype=bool)
        self._active = np.zeros(self.shape, dtype=bool)
        self.increments = []
        self.soft_mask = None

    @classmethod
    def from_mask(cls, mask):
        """A support with a single increment holding the nonzero entries of
        `mask`."""

        mask = np.asarray(mask, dtype=bool)
        if mask.ndim == 1:
            mask = mask[:,np.newaxis]
        support = cls(mask.shape)
        indices = np.flatnonzero(mask)
        if indices.size:
            support.add(indices)
        return support

    @property
    def mask(self):
        """Boolean map of the active pixels."""

        return self._active

    @property
    def raw_mask(self):
        """Boolean map of the union of the increments."""

        return self._raw

    @property
    def indices(self):
        """Sorted flat indices of the active pixels."""

        return np.flatnonzero(self._active)

    @property
    def size(self):
        return int(np.count_nonzero(self._active))

    @property
    def n_pixels(self):
        return self.shape[0]*self.shape[1]

    def __len__(self):
        return self.size

    def __contains__(self, i):
        return bool(self._active.flat[i])

    def add(self, indices):
        """Records an increment of flat pixel indices, which must be disjoint
        from the active set it extends. Without refinement the increments are
        therefore pairwise disjoint; with it, a pixel the opening removed may
        be activated again."""

        indices = np.unique(np.asarray(indices, dtype=np.intp).ravel())
        if indices.size and (indices[0] < 0 or indices[-1] >= self.n_pixels):
            raise ValueError('pixel index out of range for shape {}'.format(self.shape))
        if np.any(self._active.flat[indices]):
            raise ValueError('increment overlaps the active pixels')
        self.increments.append(indices)
        self._raw.flat[indices] = True
        self._active.flat[indices] = True

    def set_active(self, mask, soft_mask=None):
        """Replaces the active set, keeping the increments."""

        mask = np.asarray(mask, dtype=bool)
        if mask.shape != self.shape:
            raise ValueError('mask has dimensions {} but {} expected'.format(mask.shape, self.shape))
        self._active = mask.copy()
        self.soft_mask = soft_mask

    def copy(self):
        other = SupportSet(self.shape)
        other._raw = self._raw.copy()
        other._active = self._active.copy()
        other.increments = list(self.increments)
        other.soft_mask = None if self.soft_mask is None else self.soft_mask.copy()
        return other

    def __repr__(self):
        return 'SupportSet(shape={}, active={}, increments={})'.format(self.shape, self.size,
                                                                       len(self.increments))

###############################################################################
# SolverConfig
###############################################################################

class SolverConfig(ConfigBase):

    r"""Options for MPTV. Accepts dictionaries and/or keywords.

    - **lam** (alias `lambda`) : regularization weight, default `1e-4`.
    - **rho** : ADMM penalty, default `1`.
    - **r** : ridge of the dual recovery, or `None` (the default) to use
    `rho`.
    - **zeta** : threshold fraction in `(0, 1]` for choosing $\kappa$,
    default `0.6`.
    - **kappa** : explicit number of pixels activated per iteration, or
    `None` to derive it from `zeta`.
    - **eps** : relative change of $\psi$ stopping the outer loop, default
    `1e-3`.
    - **max_outer** : outer iteration cap, default `7`.
    - **mode** : `'sparse'` or `'natural'`, selecting the default of `refine`.
    - **refine** : whether to refine the support; `None` means on for
    natural images and off for sparse ones.
    - **eps_in**, **min_inner**, **max_inner** : options of the inner ADMM.
    """

    keys = ('lam', 'rho', 'r', 'zeta', 'kappa', 'eps', 'max_outer', 'mode', 'refine',
            'eps_in', 'min_inner', 'max_inner')

    def _process_hps(self):
        self.lam = float(self._proc_arg('lam', default=1e-4, alias='lambda'))
        self.rho = float(self._proc_arg('rho', default=1.))
        r = self._proc_arg('r', default=None)
        self.r = None if r is None else float(r)
        self.zeta = float(self._proc_arg('zeta', default=0.6))
        kappa = self._proc_arg('kappa', default=None)
        self.kappa = None if kappa is None else int(kappa)
        self.eps = float(self._proc_arg('eps', default=1e-3))
        self.max_outer = int(self._proc_arg('max_outer', default=7))
        self.mode = self._proc_arg('mode', default='sparse')
        refine = self._proc_arg('refine', default=None)
        self.refine = None if refine is None else bool(refine)
        self.eps_in = float(self._proc_arg('eps_in', default=1e-3))
        self.min_inner = int(self._proc_arg('min_inner', default=10))
        self.max_inner = int(self._proc_arg('max_inner', default=100))

    def _validate(self):
        if self.r is not None and not self.r > 0:
            raise ValueError('r must be positive, got {}'.format(self.r))
        if not 0 < self.zeta <= 1:
            raise ValueError('zeta must lie in (0, 1], got {}'.format(self.zeta))
        if self.kappa is not None and self.kappa < 1:
            raise ValueError('kappa must be a positive integer, got {}'.format(self.kappa))
        if not self.eps > 0:
            raise ValueError('eps must be positive, got {}'.format(self.eps))
        if self.max_outer < 1:
            raise ValueError('max_outer must be a positive integer')
        if self.mode not in {'sparse', 'natural'}:
            raise ValueError("mode must be 'sparse' or 'natural'")

        # validates lam, rho and the inner options
        self.inner

    @property
    def inner(self):
        """The `AdmmConfig` used for the subproblems."""

        return AdmmConfig(lam=self.lam, rho=self.rho, eps_in=self.eps_in,
                          min_iters=self.min_inner, max_iters=self.max_inner)

    @property
    def ridge(self):
        """The ridge passed to `recover_beta`."""

        return self.rho if self.r is None else self.r

    @property
    def use_refinement(self):
        return (self.mode == 'natural') if self.refine is None else self.refine

###############################################################################
# MptvDiagnostics
###############################################################################

class MptvDiagnostics(object):

    """Per-iteration record of an MPTV run. Every list has one entry per
    executed outer iteration; `regions` counts the regions the support
    encloses."""

    # per-iteration fields, in the order they are reported
    fields = ('psi', 'activated', 'support_size', 'regions', 'inner_iters', 'fit',
              'subproblem_objective', 'dual_proxy', 'time')

    def __init__(self, kappa=None, psi0=None):
        self.kappa = kappa
        self.psi0 = psi0
        self.g0 = None
        self.stop_reason = None
        self.support = None
        self.increments = []
        self.g_maps = []
        for field in self.fields:
            setattr(self, field, [])

    @property
    def n_iters(self):
        return len(self.psi)

    def __len__(self):
        return self.n_iters

    def rows(self):
        """One dictionary per outer iteration, with the iteration index."""

        return [dict([('iteration', t+1)] + [(f, getattr(self, f)[t]) for f in self.fields])
                for t in range(self.n_iters)]

    def __repr__(self):
        return 'MptvDiagnostics(iterations={}, kappa={}, stop_reason={!r})'.format(
                self.n_iters, self.kappa, self.stop_reason)

###############################################################################
# Dual recovery and activation
###############################################################################

def recover_beta(alpha, plan, r):
    r"""Recovers the dual gradients from the dual image by solving
    $\min_\beta\frac12\|D^T\beta-A^T\alpha\|_2^2+\frac r2\|\beta\|_2^2$, i.e.
    $(DD^T+rI)\beta=DA^T\alpha$.

    Every block of $DD^T+rI$ is diagonalized by the Fourier transform, so the
    block inverse is evaluated pointwise in frequency through the Schur
    complements $S_v$, $S_h$ and the off-diagonal blocks $T_v$, $T_h$.

    **Arguments**

    - **alpha** : _2-d numpy.ndarray_
        - The dual image, typically $y-Ax$.
    - **plan** : `FrequencyPlan`
        - Spectra for the dimensions of `alpha`.
    - **r** : _float_
        - The positive ridge parameter.

    **Returns**

    - _3-d numpy.ndarray_
        - The `(2, H, W)` field $\beta$.
    """

    if not r > 0:
        raise ValueError('r must be positive, got {}'.format(r))
    alpha = check_image(alpha, 'alpha')
    plan.check(alpha, 'alpha')

    dv, dh = plan.dv_otf, plan.dh_otf

    # blocks of DD^T + rI
    P = np.abs(dv)**2 + r
    R = np.abs(dh)**2 + r
    Q = dv*np.conj(dh)
    Qc = np.conj(Q)

    # Schur complements and off-diagonal blocks of the inverse
    S_v = R - Qc*Q/P
    S_h = P - Q*Qc/R
    T_v = -Q/(P*S_v)
    T_h = -Qc/(R*S_h)

    # right hand side D A^T alpha
    u = np.conj(plan.otf)*plan.fft(alpha)
    bv, bh = dv*u, dh*u

    beta_v = bv/S_h + T_v*bh
    beta_h = T_h*bv + bh/S_v
    return np.stack((plan.ifft(beta_v), plan.ifft(beta_h)))

def violation_scores(beta):
    r"""The scores $g_i=\|\beta_i\|_2$."""

    return group_magnitudes(beta)

def select_kappa(g0, zeta):
    r"""Number of pixels to activate per iteration: the count of
    $g^0_i>\zeta\|g^0\|_\infty$, and at least one.

    **Arguments**

    - **g0** : _numpy.ndarray_
        - The initial scores.
    - **zeta** : _float_
        - Threshold fraction in `(0, 1]`.

    **Returns**

    - _int_
        - The positive integer $\kappa$.
    """

    if not 0 < zeta <= 1:
        raise ValueError('zeta must lie in (0, 1], got {}'.format(zeta))
    g0 = np.asarray(g0, dtype=np.float64)
    gmax = np.max(g0) if g0.size else 0.
    if not gmax > 0:
        raise ValueError('all scores are zero; the observation is already fit by a constant')
    return max(int(np.count_nonzero(g0 > zeta*gmax)), 1)

def select_top_scores(scores, kappa, exclude=None):
    """Flat indices of the `kappa` largest scores outside `exclude`, ordered
    by decreasing score with ties broken by the lowest index.

    **Arguments**

    - **scores** : _numpy.ndarray_
        - The scores, of any shape.
    - **kappa** : _int_
        - The number of indices wanted.
    - **exclude** : _numpy.ndarray_ of _bool_ or `None`
        - Pixels that may not be selected, same shape as `scores`.

    **Returns**

    - _1-d numpy.ndarray_
        - At most `kappa` flat indices; empty if every pixel is excluded.
    """

    if kappa < 1:
        raise ValueError('kappa must be a positive integer, got {}'.format(kappa))
    flat = np.asarray(scores, dtype=np.float64).ravel()
    candidates = np.arange(flat.size)
    if exclude is not None:
        candidates = np.flatnonzero(~np.asarray(exclude, dtype=bool).ravel())

    # stable sort keeps the lower index first among equal scores
    order = np.argsort(-flat[candidates], kind='stable')
    return candidates[order[:kappa]]

def anchor_beta(beta, mask):
    r"""Subtracts from $\beta$ the constant field that makes it smallest on the
    active pixels, its mean over them. Constant fields lie in the null space
    of $D^T$, and at a solution of the restricted problem the active groups
    satisfy $\|\beta_i\|_2\le\lambda$."""

    if mask is None or not np.any(mask):
        return beta
    return beta - beta[:,mask].mean(axis=1)[:,np.newaxis,np.newaxis]

def find_most_violated(alpha, kappa, S_prev, plan, r, return_scores=False):
    """Indices of the `kappa` inactive pixels whose recovered dual groups
    violate optimality the most. The dual groups are anchored on the active
    pixels with `anchor_beta` before scoring.

    **Arguments**

    - **alpha** : _2-d numpy.ndarray_
        - The dual image $y-Ax$.
    - **kappa** : _int_
        - Maximum number of pixels to activate.
    - **S_prev** : `SupportSet`
        - The current support, whose pixels are excluded.
    - **plan** : `FrequencyPlan`
        - Spectra for the dimensions of `alpha`.
    - **r** : _float_
        - The ridge parameter of `recover_beta`.
    - **return_scores** : _bool_
        - Whether to also return the score map.

    **Returns**

    - _1-d numpy.ndarray_
        - The selected flat indices, empty when the support is saturated.
    - [_2-d numpy.ndarray_], optional
        - The scores $g$.
    """

    mask = None if S_prev is None else S_prev.mask
    scores = violation_scores(anchor_beta(recover_beta(alpha, plan, r), mask))
    C = select_top_scores(scores, kappa, mask)
    return (C, scores) if return_scores else C

###############################################################################
# Support refinement
###############################################################################

def disk_structure(radius):
    r"""Boolean disk $\{(i,j): i^2+j^2\le r^2\}$."""

    return skimage.morphology.disk(radius).astype(bool)

def gaussian_taps(sigma, radius=None):
    """Normalized square Gaussian filter with `2*radius+1` taps per side,
    where `radius` defaults to `ceil(3*sigma)`."""

    if radius is None:
        radius = int(np.ceil(3*sigma))
    i, j = np.mgrid[-radius:radius+1, -radius:radius+1]
    taps = np.exp(-(i**2 + j**2)/(2.*sigma**2))
    return taps/taps.sum()

def refine_support(S, dims, radius=3, sigma=3.):
    """Removes isolated activations and pads the support.

    The indicator map of the activated pixels is opened (erosion followed by
    dilation) with a disk of the given radius and then blurred by a Gaussian
    of standard deviation `sigma`; the new active set is the support of the
    blurred map, which is kept as `soft_mask`.

    **Arguments**

    - **S** : `SupportSet`
        - The support to refine. It is not modified.
    - **dims** : _tuple_ of _int_
        - The image dimensions, which must match `S`.

    **Returns**

    - `SupportSet`
        - The refined support, with the same increments.
    """

    if tuple(dims) != S.shape:
        raise ValueError('support has dimensions {} but {} given'.format(S.shape, tuple(dims)))

    refined = S.copy()
    M = S.raw_mask
    if not np.any(M):
        refined.set_active(M, np.zeros(S.shape))
        return refined

    disk = disk_structure(radius)
    M = scipy.ndimage.binary_erosion(M, structure=disk)
    M = scipy.ndimage.binary_dilation(M, structure=disk)
    soft = scipy.ndimage.convolve(M.astype(np.float64), gaussian_taps(sigma),
                                  mode='constant', cval=0.)
    refined.set_active(soft > 0, soft)
    return refined

###############################################################################
# Outer loop
###############################################################################

def outer_objective(x, y, plan, lam):
    r"""$\psi(x)=\|y-Ax\|_2^2+\lambda\,\Omega_\text{TV}(x)$."""

    return fit_norm(x, y, plan)**2 + lam*tv_value(x)

def _residual(x, y, plan):
    return y - plan.ifft(plan.otf*plan.fft(x))

def mptv(y, kernel, cfg=None, plan=None, verbose=0):
    """Deconvolves `y` with the matching pursuit TV method.

    **Arguments**

    - **y** : _2-d numpy.ndarray_
        - The observation. One-dimensional signals are treated as columns.
    - **kernel** : `BlurKernel`
        - The blur kernel.
    - **cfg** : `SolverConfig` or _dict_ or `None`
        - Solver options, defaults if `None`.
    - **plan** : `FrequencyPlan` or `None`
        - Optional precomputed spectra.
    - **verbose** : _int_
        - Prints a line per outer iteration if at least `1`.

    **Returns**

    - (_2-d numpy.ndarray_, `MptvDiagnostics`)
        - The restored image and the record of the run.
    """

    y = check_image(y, 'y')
    cfg = cfg if isinstance(cfg, SolverConfig) else SolverConfig(cfg)
    if plan is None:
        plan = FrequencyPlan(y.shape, kernel)
    elif not plan.serves(kernel):
        raise ValueError('plan was built for a different kernel')
    inner = cfg.inner

    x = np.full(y.shape, y.mean())
    alpha = _residual(x, y, plan)
    psi0 = outer_objective(x, y, plan, cfg.lam)
    diag = MptvDiagnostics(psi0=psi0)
    S = SupportSet(y.shape)
    diag.support = S

    # a constant observation is already fit by the initialization
    if np.max(np.abs(alpha)) <= 10**-12*max(np.max(np.abs(y)), 1.):
        diag.kappa = cfg.kappa
        diag.stop_reason = 'constant'
        return x, diag

    psi_prev, state = psi0, None
    for t in range(1, cfg.max_outer + 1):
        start = time.time()

        # kappa is fixed once from the initial scores
        if t == 1:
            g = violation_scores(recover_beta(alpha, plan, cfg.ridge))
            diag.g0 = g
            diag.kappa = cfg.kappa if cfg.kappa is not None else select_kappa(g, cfg.zeta)
            C = select_top_scores(g, diag.kappa, S.mask)
        else:
            C, g = find_most_violated(alpha, diag.kappa, S, plan, cfg.ridge, return_scores=True)

        if C.size == 0:
            diag.stop_reason = 'saturated'
            break

        x_prev, mask_prev = x, S.mask.copy()
        S.add(C)
        if cfg.use_refinement:
            S = refine_support(S, y.shape)

        x, state = solve_subproblem(y, plan, S, inner, x, warm=state, verbose=verbose)

        # the previous estimate is feasible when the support only grew
        if not np.any(mask_prev & ~S.mask):
            previous = subproblem_objective(x_prev, y, plan, S, cfg.lam)
            if previous < subproblem_objective(x, y, plan, S, cfg.lam):
                x = x_prev
        alpha = _residual(x, y, plan)
        psi = outer_objective(x, y, plan, cfg.lam)

        # record the iteration
        diag.support = S
        diag.increments.append(C)
        diag.g_maps.append(g)
        diag.psi.append(psi)
        diag.activated.append(int(C.size))
        diag.support_size.append(S.size)
        diag.inner_iters.append(state.iter)
        diag.fit.append(fit_norm(x, y, plan))
        diag.regions.append(state.n_regions)
        diag.subproblem_objective.append(subproblem_objective(x, y, plan, S, cfg.lam))
        diag.dual_proxy.append(float(-0.5*np.sum(alpha**2) + np.sum(alpha*y)))
        diag.time.append(time.time() - start)

        if verbose >= 1:
            args = (t, C.size, S.size, psi, diag.time[-1])
            print('  Iteration {}: activated {}, support {}, psi {:.6e} in {:.3f}s'.format(*args))

        # the rule waits until the support encloses a region
        if state.n_regions > 1 and abs(psi_prev - psi)/psi0 <= cfg.eps:
            diag.stop_reason = 'psi'
            break
        psi_prev = psi

    else:
        diag.stop_reason = 'max_outer'

    return x, diag

def mptv_channels(ys, kernel, cfg=None, plan=None, verbose=0):
    """Deconvolves a multichannel image. The support is found by `mptv` on
    the luminance channel and every channel is then solved on that shared
    support, starting from its mean.

    **Arguments**

    - **ys** : _3-d numpy.ndarray_
        - The `(H, W, C)` observation.
    - **kernel**, **cfg**, **plan**, **verbose**
        - As for `mptv`.

    **Returns**

    - (_3-d numpy.ndarray_, `MptvDiagnostics`)
        - The restored channels and the record of the luminance run.
    """

    ys = np.asarray(ys, dtype=np.float64)
    if ys.ndim == 2:
        return mptv(ys, kernel, cfg, plan, verbose)
    if ys.ndim != 3:
        raise ValueError('multichannel images must have shape (H, W, C)')

    cfg = cfg if isinstance(cfg, SolverConfig) else SolverConfig(cfg)
    if plan is None:
        plan = FrequencyPlan(ys.shape[:2], kernel)

    luma = luminance(ys)

    _, diag = mptv(luma, kernel, cfg, plan, verbose)
    xs = np.empty_like(ys)
    for c in range(ys.shape[2]):
        y = check_image(ys[...,c], 'channel {}'.format(c))
        x0 = np.full(y.shape, y.mean())
        if diag.support.size:
            xs[...,c] = solve_subproblem(y, plan, diag.support, cfg.inner, x0)[0]
        else:
            xs[...,c] = x0

    return xs, diag

###############################################################################
# MPTV
###############################################################################

class MPTV(DeconvBase):

    """Estimator wrapper around `mptv`. Accepts the options of `SolverConfig`
    as dictionaries and/or keywords."""

    def __init__(self, *args, **kwargs):
        super(MPTV, self).__init__(SolverConfig(*args, **kwargs))

    def compute(self, y, kernel, return_diagnostics=False, verbose=0):
        """Restores `y`, also returning the `MptvDiagnostics` if
        `return_diagnostics` is `True`."""

        x, diag = mptv(y, kernel, self.config, verbose=verbose)
        return (x, diag) if return_diagnostics else x
