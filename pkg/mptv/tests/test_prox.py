from __future__ import absolute_import, division, print_function

import numpy as np
import pytest

import mptv
from mptv import prox
from mptv.grid import BlurKernel, FrequencyPlan
from test_utils import epsilon_diff, epsilon_percent

def blocky(shape=(16, 16), noise=0.02, seed=0):
    rng = np.random.RandomState(seed)
    x = np.full(shape, 0.2)
    x[3:9,4:12] = 0.8
    x[10:14,2:6] = 0.5
    return x, x + noise*rng.standard_normal(shape)

# test AdmmConfig

@pytest.mark.prox
def test_config_defaults_and_alias():
    cfg = prox.AdmmConfig()
    assert (cfg.lam, cfg.rho, cfg.eps_in, cfg.min_iters, cfg.max_iters) == (1e-4, 1., 1e-3, 10, 100)
    assert prox.AdmmConfig({'lambda': 0.5}).lam == 0.5
    assert prox.AdmmConfig({'rho': 2.}, rho=3.).rho == 3.
    assert cfg.replace(lam=0.1) == prox.AdmmConfig(lam=0.1)
    assert cfg.replace(lam=0.1) != cfg

@pytest.mark.prox
@pytest.mark.parametrize('kwargs', [{'lam': 0.}, {'rho': -1.}, {'eps_in': 1.}, {'min_iters': 0},
                                    {'min_iters': 20, 'max_iters': 10}, {'lam': 1., 'lambda': 1.},
                                    {'bogus': 1}])
def test_config_rejects(kwargs):
    with pytest.raises(ValueError):
        prox.AdmmConfig(**kwargs)

# test shrinkage

@pytest.mark.prox
@pytest.mark.parametrize('pair, t, expected', [((3., 4.), 1., (2.4, 3.2)), ((3., 4.), 2.5, (1.5, 2.)),
                                                ((3., 4.), 5., (0., 0.)), ((3., 4.), 6., (0., 0.)),
                                                ((0., 0.), 1., (0., 0.)), ((-1., 0.), 0., (-1., 0.))])
def test_group_shrinkage(pair, t, expected):
    assert epsilon_diff(np.asarray(prox.group_shrinkage(pair, t)), np.asarray(expected), 10**-14)

@pytest.mark.prox
def test_shrink_groups_mask():
    mu = np.random.RandomState(0).standard_normal((2, 5, 6))
    mask = np.zeros((5, 6), dtype=bool)
    mask[1:3,2:5] = True
    out = prox.shrink_groups(mu, 0.1, mask)

    assert np.all(out[:,~mask] == 0)
    mags_in, mags_out = np.hypot(*mu[:,mask]), np.hypot(*out[:,mask])
    assert epsilon_diff(mags_out, np.maximum(mags_in - 0.1, 0.), 10**-14)
    with pytest.raises(ValueError):
        prox.shrink_groups(mu, -1.)

@pytest.mark.prox
def test_z_update_zeroes_inactive_pairs():
    x = np.random.RandomState(1).rand(6, 6)
    state = prox.AdmmState(x, None)
    mask = np.eye(6, dtype=bool)
    z = prox.z_update(state, mask, prox.AdmmConfig(lam=0.01, rho=1.))
    assert np.all(z[:,~mask] == 0)
    expected = prox.shrink_groups(mptv.apply_gradient(x), 0.01, mask)
    assert epsilon_diff(z, expected, 10**-15)

# test x and dual updates

@pytest.mark.prox
@pytest.mark.parametrize('rho', [1e-2, 1.])
def test_x_update_solves_normal_equation(rho):
    rng = np.random.RandomState(2)
    kernel = BlurKernel(rng.rand(5, 5))
    plan = FrequencyPlan((12, 14), kernel)
    y = rng.rand(12, 14)
    nu = rng.standard_normal((2, 12, 14))

    x = prox.x_update(y, plan, nu, rho)
    lhs = (mptv.correlate_periodic(mptv.convolve_periodic(x, plan=plan), plan=plan) +
           rho*mptv.apply_divergence(mptv.apply_gradient(x)))
    rhs = mptv.correlate_periodic(y, plan=plan) + rho*mptv.apply_divergence(nu)
    assert epsilon_diff(lhs, rhs, 10**-10)

@pytest.mark.prox
def test_x_update_rejects():
    plan = FrequencyPlan((8, 8))
    with pytest.raises(ValueError):
        prox.x_update(np.zeros((8, 8)), plan, np.zeros((2, 8, 9)), 1.)
    with pytest.raises(ValueError):
        prox.x_update(np.zeros((8, 8)), plan, np.zeros((2, 8, 8)), -1.)

@pytest.mark.prox
def test_dual_update():
    x = np.random.RandomState(3).rand(5, 5)
    state = prox.AdmmState(x, None)
    state.gamma[:] = 0.5
    z = np.ones((2, 5, 5))
    gamma = prox.dual_update(state, z, 2.)
    assert epsilon_diff(gamma, 0.5 + 2.*(mptv.apply_gradient(x) - 1.), 10**-14)
    assert np.all(state.gamma == 0.5)

# test objectives

@pytest.mark.prox
def test_objectives():
    x, y = blocky()
    plan = FrequencyPlan(y.shape, BlurKernel(np.ones((3, 3))))
    full = prox.subproblem_objective(x, y, plan, None, 0.1)
    assert epsilon_percent(full, prox.tv_objective(x, y, plan, 0.1), 10**-12)

    empty = np.zeros(y.shape, dtype=bool)
    assert epsilon_percent(prox.subproblem_objective(x, y, plan, empty, 0.1),
                           0.5*prox.fit_norm(x, y, plan)**2, 10**-12)

    with pytest.raises(ValueError):
        prox.support_mask(np.ones((3, 3), dtype=bool), (4, 4))

# test projection onto the support

@pytest.mark.prox
def test_project_support_column():
    x = np.arange(8.).reshape(8, 1)
    mask = np.zeros((8, 1), dtype=bool)
    mask[[2, 5]] = True

    n_regions, labels = prox.support_regions(mask)
    assert n_regions == 2
    assert len(set(labels[[6, 7, 0, 1, 2]])) == 1 and len(set(labels[[3, 4, 5]])) == 1

    p, n = prox.project_support(x, mask)
    assert n == 2
    assert epsilon_diff(p[[6, 7, 0, 1, 2],0], 3.2, 10**-14)
    assert epsilon_diff(p[[3, 4, 5],0], 4., 10**-14)

    flat, n = prox.project_support(x, np.zeros((8, 1), dtype=bool))
    assert n == 1 and np.all(flat == flat[0,0]) and epsilon_diff(flat[0,0], 3.5, 10**-14)

    full, n = prox.project_support(x, np.ones((8, 1), dtype=bool))
    assert n == 8 and np.array_equal(full, x) and full is not x

@pytest.mark.prox
def test_project_support_image():
    rng = np.random.RandomState(4)
    x = rng.rand(12, 10)
    mask = rng.rand(12, 10) < 0.3

    p, n_regions = prox.project_support(x, mask)
    assert 1 <= n_regions < x.size
    assert np.all(mptv.group_magnitudes(mptv.apply_gradient(p))[~mask] == 0)
    assert epsilon_diff(p.mean(), x.mean(), 10**-12)
    assert epsilon_diff(prox.project_support(p, mask)[0], p, 10**-14)

# test solvers

@pytest.mark.prox
def test_solve_subproblem_warm_start():
    _, y = blocky()
    plan = FrequencyPlan(y.shape, BlurKernel(np.ones((3, 3))))
    cfg = prox.AdmmConfig(lam=0.01, rho=1., min_iters=20, max_iters=20)
    x0 = np.full(y.shape, y.mean())
    x1, s1 = prox.solve_subproblem(y, plan, None, cfg, x0)
    gamma1 = s1.gamma.copy()

    # one iteration started from the previous multiplier
    one = cfg.replace(min_iters=1, max_iters=1)
    x2, s2 = prox.solve_subproblem(y, plan, None, one, x1, warm=s1)
    assert np.array_equal(s1.gamma, gamma1)

    start = prox.AdmmState(x1, None, gamma1.copy())
    z = prox.z_update(start, None, one)
    x_manual = prox.x_update(y, plan, z - gamma1, 1.)
    assert epsilon_diff(x2, x_manual, 10**-12)
    assert epsilon_diff(s2.gamma, gamma1 + mptv.apply_gradient(x_manual) - z, 10**-12)

    with pytest.raises(ValueError):
        prox.solve_subproblem(y, plan, None, one, x1, warm=prox.AdmmState(np.zeros((4, 4)), None))

@pytest.mark.prox
def test_solve_subproblem_annihilates_off_support():
    x_star, y = blocky((24, 24))
    plan = FrequencyPlan(y.shape, BlurKernel(np.ones((3, 3))))
    mask = mptv.group_magnitudes(mptv.apply_gradient(x_star)) > 0
    x_hat, state = prox.solve_subproblem(y, plan, mask, prox.AdmmConfig(lam=1e-3), np.full(y.shape, y.mean()))

    mags = mptv.group_magnitudes(mptv.apply_gradient(x_hat))
    assert np.max(mags[~mask]) <= 10**-3*np.max(mags[mask])
    assert state.n_regions > 1
    assert epsilon_percent(state.fit, prox.fit_norm(x_hat, y, plan), 10**-12)

# test solvers

@pytest.mark.prox
def test_solve_subproblem_state():
    x, y = blocky()
    plan = FrequencyPlan(y.shape, BlurKernel(np.ones((3, 3))))
    cfg = prox.AdmmConfig(lam=0.01, rho=0.1, min_iters=5, max_iters=40)
    x0 = np.full(y.shape, y.mean())
    x_hat, state = prox.solve_subproblem(y, plan, None, cfg, x0)

    assert state.x is x_hat
    assert 5 <= state.iter <= 40
    assert len(state.fit_history) == state.iter + 1
    assert state.fit_history[0] == prox.fit_norm(x0, y, plan)
    assert epsilon_percent(state.fit, prox.fit_norm(x_hat, y, plan), 10**-10)
    if state.iter < 40:
        assert state.converged
    assert prox.tv_objective(x_hat, y, plan, 0.01) < prox.tv_objective(x0, y, plan, 0.01)
    assert np.array_equal(x0, np.full(y.shape, y.mean()))

@pytest.mark.prox
def test_solve_subproblem_max_iters():
    _, y = blocky()
    plan = FrequencyPlan(y.shape)
    cfg = prox.AdmmConfig(lam=0.01, rho=0.1, eps_in=1e-12, min_iters=7, max_iters=7)
    _, state = prox.solve_subproblem(y, plan, None, cfg, np.zeros(y.shape))
    assert state.iter == 7
    assert not state.converged

@pytest.mark.prox
def test_empty_support_flattens():
    _, y = blocky()
    plan = FrequencyPlan(y.shape)
    cfg = prox.AdmmConfig(lam=0.01, rho=1., eps_in=1e-12, min_iters=500, max_iters=500)
    x0 = np.full(y.shape, y.mean())
    x_hat, _ = prox.solve_subproblem(y, plan, np.zeros(y.shape, dtype=bool), cfg, x0)
    assert mptv.tv_value(x_hat) < 10**-6
    assert epsilon_diff(x_hat, y.mean(), 10**-6)

@pytest.mark.prox
@pytest.mark.oracle
@pytest.mark.slow
@pytest.mark.parametrize('seed', range(20))
def test_tv_admm_matches_oracle(seed):
    x_star, _ = mptv.make_sparse_image((16, 16), 3, seed=seed)
    kernel = mptv.make_kernel('gaussian:3:0.5')
    y = mptv.degrade(x_star, kernel, 0.01, seed=seed)
    lam = 1e-2

    cfg = prox.AdmmConfig(lam=lam, rho=1., eps_in=1e-15, min_iters=20000, max_iters=20000)
    x_admm = prox.tv_admm(y, kernel, cfg)
    x_ref, q = mptv.oracle_tv_solve(y, kernel, lam, return_dual=True)

    plan = FrequencyPlan(y.shape, kernel)
    f_admm = prox.tv_objective(x_admm, y, plan, lam)
    f_ref = prox.tv_objective(x_ref, y, plan, lam)
    assert abs(f_admm - f_ref)/f_ref <= 10**-6

    stationarity, excess = mptv.kkt_residual(x_ref, q, y, plan, lam)
    assert stationarity <= 10**-5*np.linalg.norm(y)
    assert excess <= 10**-12

@pytest.mark.prox
def test_tv_admm_plan_and_estimator():
    _, y = blocky()
    kernel = BlurKernel(np.ones((3, 3)))
    cfg = {'lam': 0.01, 'rho': 0.1}
    x1, state = prox.tv_admm(y, kernel, cfg, return_state=True)
    x2 = prox.tv_admm(y, kernel, cfg, plan=FrequencyPlan(y.shape, kernel))
    x3 = mptv.TVADMM(cfg)(y, kernel)
    assert isinstance(state, prox.AdmmState)
    assert np.array_equal(x1, x2)
    assert np.array_equal(x1, x3)

    with pytest.raises(ValueError):
        prox.tv_admm(y, kernel, cfg, plan=FrequencyPlan(y.shape))

@pytest.mark.prox
def test_batch_compute():
    observations = [blocky(seed=s)[1] for s in range(3)]
    kernel = BlurKernel(np.ones((3, 3)))
    estimator = mptv.TVADMM(lam=0.01, rho=0.1)
    serial = [estimator(y, kernel) for y in observations]
    for n_jobs in (1, 2):
        batch = estimator.batch_compute(observations, kernel, n_jobs=n_jobs)
        assert all(np.array_equal(a, b) for a, b in zip(serial, batch))
