"""# Benchmarks

Benchmark suites degrade regenerated test images with a list of kernels,
restore them with MPTV and the TV-ADMM baseline, and report PSNR, SSIM,
wall time and iteration counts per row. Parameter sweeps vary one quantity
at a time:

- `lambda` : 20 regularization weights from `1e-5` to `9.6e-4`.
- `kappa` : pixels activated per iteration, `64` to `512`.
- `eps` : outer stopping tolerances from `1e-5` to `5e-2`.
- `noise` : noise levels from 1% to 10%.
- `blur` : Gaussian kernels of sides `15` to `85` and 45 degree motion of
lengths `7` to `63`.
- `kernel_error` : relative kernel perturbations from 0.2% to 0.5%.

Rows are computed in a process pool and assembled in task order, so reports
do not depend on the number of workers. A row whose solve fails records the
error in its `status` column instead of aborting the run.
"""
from __future__ import absolute_import, division, print_function

import time
from collections import OrderedDict

import numpy as np

from mptv.grid import BlurKernel, FrequencyPlan, apply_gradient
from mptv.metrics import psnr, ssim
from mptv.prox import fit_norm, solve_subproblem, tv_admm
from mptv.pursuit import SolverConfig, mptv
from mptv.synth import (degrade, make_1d_signal, make_kernel, make_sparse_image, make_text_image,
                        parse_kernel_spec, perturb_kernel)
from mptv.utils import create_pool, default_n_jobs, load_suite_file, write_csv

__all__ = [
    'BenchmarkReport',
    'METHODS',
    'SWEEPS',
    'demo1d',
    'lambda_grid',
    'make_instances',
    'run_suite',
    'run_sweep',
    'solve',
    'sweep_values'
]

METHODS = ('mptv', 'tv-admm')
SWEEPS = ('lambda', 'kappa', 'eps', 'noise', 'blur', 'kernel_error')

# solver options shared by the methods, beyond lam
SOLVER_KEYS = SolverConfig.keys

###############################################################################
# BenchmarkReport
###############################################################################

class BenchmarkReport(object):

    """Rows of a benchmark run, one per instance, kernel, method and
    parameter value."""

    columns = ('suite', 'instance', 'kernel', 'method', 'param', 'value', 'lam', 'psnr', 'ssim',
               'time', 'outer_iters', 'inner_iters', 'support_fraction', 'status')

    def __init__(self, name, config=None):
        self.name = name
        self.config = dict(config or {})
        self.rows = []

    def add_row(self, row):
        missing = set(row) - set(self.columns)
        if missing:
            raise ValueError('unknown report columns {}'.format(sorted(missing)))
        self.rows.append(dict(row, suite=self.name))

    def extend(self, rows):
        for row in rows:
            self.add_row(row)

    @property
    def n_failed(self):
        return sum(1 for row in self.rows if row['status'] != 'ok')

    @property
    def all_failed(self):
        return len(self.rows) > 0 and self.n_failed == len(self.rows)

    def select(self, **kwargs):
        """Rows whose entries equal the given values."""

        return [row for row in self.rows if all(row.get(k) == v for k, v in kwargs.items())]

    def write(self, filepath):
        """Writes the report as CSV headed by its configuration."""

        write_csv(filepath, self.rows, self.columns, dict(self.config, suite=self.name))

    def __len__(self):
        return len(self.rows)

    def __repr__(self):
        return 'BenchmarkReport({!r}, rows={}, failed={})'.format(self.name, len(self), self.n_failed)

###############################################################################
# Solvers
###############################################################################

def solve(method, y, kernel, lam, options=None):
    """Restores `y` with one of `METHODS`.

    **Arguments**

    - **method** : {`'mptv'`, `'tv-admm'`}
        - The solver.
    - **y** : _2-d numpy.ndarray_
        - The observation.
    - **kernel** : `BlurKernel`
        - The kernel assumed by the solver.
    - **lam** : _float_
        - The regularization weight.
    - **options** : _dict_ or `None`
        - Further `SolverConfig` options. TV-ADMM uses `rho`, `eps_in`,
        `min_inner` and `max_inner`.

    **Returns**

    - _dict_
        - The restored image under `'x'` and the entries `outer_iters`,
        `inner_iters` and `support_fraction`.
    """

    options = {k: v for k, v in (options or {}).items() if k in SOLVER_KEYS and k != 'lam'}

    if method == 'mptv':
        x, diag = mptv(y, kernel, SolverConfig(options, lam=lam))
        return {'x': x, 'outer_iters': diag.n_iters, 'inner_iters': int(sum(diag.inner_iters)),
                'support_fraction': diag.support.size/float(diag.support.n_pixels)}

    if method == 'tv-admm':
        x, state = tv_admm(y, kernel, SolverConfig(options, lam=lam).inner, return_state=True)
        return {'x': x, 'outer_iters': 1, 'inner_iters': state.iter, 'support_fraction': 1.}

    raise ValueError('method must be one of {}, got {!r}'.format(METHODS, method))

###############################################################################
# Sweeps
###############################################################################

def lambda_grid():
    """The 20 regularization weights `1e-5, 6e-5, ..., 9.6e-4`."""

    return [1e-5 + 5e-5*i for i in range(20)]

def sweep_values(sweep):
    """The values a sweep runs over."""

    if sweep == 'lambda':
        return lambda_grid()
    if sweep == 'kappa':
        return list(range(64, 513, 64))
    if sweep == 'eps':
        return [1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2]
    if sweep == 'noise':
        return [0.01*i for i in range(1, 11)]
    if sweep == 'blur':
        return ([('gaussian', s, (s - 1)/6.) for s in range(15, 86, 10)] +
                [('motion', L, 45) for L in range(7, 64, 8)])
    if sweep == 'kernel_error':
        return [0.002 + 0.0005*i for i in range(7)]
    raise ValueError('sweep must be one of {}, got {!r}'.format(SWEEPS, sweep))

# methods a sweep compares
def _sweep_methods(sweep, methods):
    return ['mptv'] if sweep in ('kappa', 'eps') else list(methods)

def _kernel_name(spec):
    return ':'.join('{:g}'.format(p) if isinstance(p, (int, float)) else str(p)
                    for p in parse_kernel_spec(spec))

###############################################################################
# Tasks
###############################################################################

def make_instances(suite):
    """Regenerates the sharp images of a suite.

    **Returns**

    - _list_ of (_str_, _2-d numpy.ndarray_)
        - Names and images.
    """

    family = suite.get('family', 'sparse')
    dims = tuple(suite.get('dims', (128, 128)))
    seed = int(suite.get('seed', 0))

    instances = []
    for i in range(int(suite.get('n_instances', 1))):
        if family == 'sparse':
            x, _ = make_sparse_image(dims, int(suite.get('n_shapes', 6)), seed + i)
        elif family == 'text':
            x, _ = make_text_image(dims, int(suite.get('n_strokes', 40)), seed + i)
        else:
            raise ValueError("family must be 'sparse' or 'text', got {!r}".format(family))
        instances.append(('{}-{}'.format(family, i), x))
    return instances

# one row, run in a worker process
def _run_task(task):
    row = {k: task[k] for k in ('instance', 'method', 'param', 'value', 'lam')}
    row['kernel'] = str(task['kernel'])

    start = time.time()
    try:
        row['kernel'] = _kernel_name(task['kernel'])
        kernel = make_kernel(task['kernel'])
        y = degrade(task['x_star'], kernel, task['noise_sigma'], task['seed'])
        solve_kernel = kernel
        if task.get('kernel_error'):
            solve_kernel = perturb_kernel(kernel, task['kernel_error'], task['seed'])

        result = solve(task['method'], y, solve_kernel, task['lam'], task['options'])
        x, x_star = result.pop('x'), task['x_star']
        row.update(result)
        row['psnr'] = psnr(x, x_star)
        row['ssim'] = ssim(x, x_star) if min(x.shape) >= 11 else None
        row['status'] = 'ok'
    except (ValueError, FloatingPointError, IOError) as e:
        row['status'] = 'error: {}'.format(e)
    row['time'] = time.time() - start

    return row

def _map_tasks(tasks, n_jobs=None, verbose=0, print_every=None):
    n_jobs = default_n_jobs(n_jobs)
    ntasks = len(tasks)
    if print_every is None:
        print_every = max(ntasks//10, 1)

    start = time.time()
    if n_jobs == 1 or ntasks <= 1:
        rows = []
        for k, task in enumerate(tasks):
            rows.append(_run_task(task))
            if verbose >= 1 and ((k+1) % print_every == 0 or k+1 == ntasks):
                args = (k+1, (k+1)/ntasks*100, time.time() - start)
                print('  Computed {} rows, {:.2f}% done in {:.2f}s'.format(*args))
        return rows

    if verbose >= 1:
        print('Using {} worker process{}:'.format(n_jobs, 'es' if n_jobs > 1 else ''))

    rows = []
    with create_pool(n_jobs) as pool:
        begin = 0
        while begin < ntasks:
            end = min(begin + print_every, ntasks)
            chunksize, extra = divmod(end - begin, n_jobs * 2)
            if extra:
                chunksize += 1

            rows.extend(pool.map(_run_task, tasks[begin:end], chunksize=chunksize))
            begin = end

            if verbose >= 1:
                args = (end, end/ntasks*100, time.time() - start)
                print('  Computed {} rows, {:.2f}% done in {:.2f}s'.format(*args))

    return rows

def _suite_tasks(suite, options, methods, sweep=None):
    kernels = suite.get('kernels', [])
    if len(kernels) == 0:
        raise ValueError('suite names no kernels')
    methods = list(methods or suite.get('methods', METHODS))
    for method in methods:
        if method not in METHODS:
            raise ValueError('method must be one of {}, got {!r}'.format(METHODS, method))

    lams = suite.get('lams', [options.get('lam', 1e-4)])
    if len(lams) == 0:
        raise ValueError('suite names no lambdas')
    noise_sigma = float(suite.get('noise_sigma', 0.003))
    seed = int(suite.get('seed', 0))

    tasks = []
    for i, (name, x_star) in enumerate(make_instances(suite)):
        base = {'instance': name, 'x_star': x_star, 'noise_sigma': noise_sigma, 'seed': seed + i,
                'param': None, 'value': None, 'options': options}

        # plain comparison over kernels and lambdas
        if sweep is None:
            for kernel in kernels:
                for method in methods:
                    for lam in lams:
                        tasks.append(dict(base, kernel=kernel, method=method, lam=lam))
            continue

        # one parameter varied at the first kernel and lambda
        for value in sweep_values(sweep):
            for method in _sweep_methods(sweep, methods):
                task = dict(base, kernel=kernels[0], method=method, lam=lams[0], param=sweep)
                task['value'] = _kernel_name(value) if sweep == 'blur' else value
                if sweep == 'lambda':
                    task['lam'] = value
                elif sweep in ('kappa', 'eps'):
                    task['options'] = dict(options, **{sweep: value})
                elif sweep == 'noise':
                    task['noise_sigma'] = value
                elif sweep == 'blur':
                    task['kernel'] = value
                else:
                    task['kernel_error'] = value
                tasks.append(task)

    return tasks

###############################################################################
# Entry points
###############################################################################

def _resolve_suite(suite):
    if isinstance(suite, dict):
        return suite.get('name', 'custom'), suite
    suites = load_suite_file()
    if suite not in suites:
        raise ValueError('unknown suite {!r}, available: {}'.format(suite, sorted(suites)))
    return suite, suites[suite]

# solver options together with the suite definition
def _report_config(suite, options):
    config = dict(options)
    config.update({'suite.' + k: v for k, v in suite.items() if k != 'name'})
    return config

def run_suite(suite, options=None, methods=None, n_jobs=None, verbose=0):
    """Runs a benchmark suite.

    **Arguments**

    - **suite** : _str_ or _dict_
        - A suite name from the packaged `suites.json` or a suite
        definition with keys `family`, `dims`, `n_shapes` (or `n_strokes`),
        `n_instances`, `seed`, `kernels`, `noise_sigma`, `lams` and
        `methods`.
    - **options** : _dict_ or `None`
        - Solver options, see `solve`.
    - **methods** : _list_ of _str_ or `None`
        - Overrides the methods of the suite.
    - **n_jobs** : _int_ or `None`
        - Worker processes; `None` consults `MPTV_N_JOBS` and then the CPU
        count.
    - **verbose** : _int_
        - Prints progress if at least `1`.

    **Returns**

    - `BenchmarkReport`
        - One row per instance, kernel, method and lambda.
    """

    name, suite = _resolve_suite(suite)
    options = dict(options or {})
    tasks = _suite_tasks(suite, options, methods)

    report = BenchmarkReport(name, _report_config(suite, options))
    report.extend(_map_tasks(tasks, n_jobs, verbose))
    return report

def run_sweep(suite, sweep, options=None, methods=None, n_jobs=None, verbose=0):
    """Runs one of `SWEEPS` on the instances of a suite, at its first kernel
    and lambda. Arguments are as for `run_suite`.

    **Returns**

    - `BenchmarkReport`
        - One row per instance, sweep value and method, with the sweep name
        in `param` and the varied value in `value`.
    """

    name, suite = _resolve_suite(suite)
    options = dict(options or {})
    tasks = _suite_tasks(suite, options, methods, sweep=sweep)

    config = dict(_report_config(suite, options), sweep=sweep)
    report = BenchmarkReport('{}-{}'.format(name, sweep), config)
    report.extend(_map_tasks(tasks, n_jobs, verbose))
    return report

###############################################################################
# One-dimensional demonstration
###############################################################################

def _gradient_column(x):
    return apply_gradient(x)[0,:,0]

def demo1d(lam=0.01, kappa=1, length=256, n_jumps=4, noise_sigma=0.003, seed=0,
           kernel_size=15, kernel_sigma=2., options=None, threshold=1e-2, nonzero_tol=1e-4):
    """Compares TV-ADMM, MPTV and ADMM restricted to the true gradient
    support on a blurred piecewise-constant signal.

    **Arguments**

    - **lam** : _float_
        - The regularization weight shared by the three solvers.
    - **kappa** : _int_
        - Pixels MPTV activates per iteration.
    - **length**, **n_jumps**, **seed** : _int_
        - Parameters of `make_1d_signal`.
    - **noise_sigma** : _float_
        - Noise standard deviation.
    - **kernel_size**, **kernel_sigma**
        - The one-dimensional Gaussian blur.
    - **options** : _dict_ or `None`
        - Further `SolverConfig` options.
    - **threshold** : _float_
        - Gradient magnitude above which a sample counts as a jump.
    - **nonzero_tol** : _float_
        - Gradient magnitude above which a sample counts as nonzero.

    **Returns**

    - (_dict_, _dict_)
        - Columns of signals and gradients, and a summary with the jump
        sets, PSNRs, fit residuals and the MPTV diagnostics.
    """

    options = {k: v for k, v in (options or {}).items() if k in SOLVER_KEYS}
    options.update(lam=lam, kappa=kappa)
    cfg = SolverConfig(options)

    x_star, support = make_1d_signal(length, n_jumps, seed)
    t = np.arange(int(kernel_size)) - int(kernel_size)//2
    kernel = BlurKernel(np.exp(-t**2/(2.*kernel_sigma**2)),
                        label='gaussian1d({:g}, {:g})'.format(kernel_size, kernel_sigma))
    y = degrade(x_star, kernel, noise_sigma, seed)
    plan = FrequencyPlan(y.shape, kernel)

    x0 = np.full(y.shape, y.mean())
    estimates = OrderedDict()
    estimates['tv_admm'] = tv_admm(y, kernel, cfg.inner, plan=plan)
    estimates['mptv'], diag = mptv(y, kernel, cfg, plan=plan)
    estimates['support_oracle'] = solve_subproblem(y, plan, support, cfg.inner, x0)[0]

    columns = OrderedDict([('index', np.arange(length)), ('truth', x_star[:,0]), ('observed', y[:,0])])
    for name, x in estimates.items():
        columns[name] = x[:,0]
    columns['grad_truth'] = _gradient_column(x_star)
    for name, x in estimates.items():
        columns['grad_' + name] = _gradient_column(x)

    summary = {'true_jumps': np.flatnonzero(support[:,0]), 'diagnostics': diag, 'kernel': kernel}
    for name, x in estimates.items():
        grad = np.abs(_gradient_column(x))
        summary[name] = {'jumps': np.flatnonzero(grad > threshold),
                         'n_nonzero': int(np.count_nonzero(grad > nonzero_tol)),
                         'psnr': psnr(x, x_star),
                         'fit': fit_norm(x, y, plan),
                         'error': float(np.linalg.norm(x - x_star))}

    return columns, summary
