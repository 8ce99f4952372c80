"""# Command Line

The `mptv` command with the subcommands

- `deblur` : restores an image given its blur kernel,
- `synth` : writes a degraded test image with its ground truth,
- `bench` : runs a benchmark suite and optional parameter sweeps,
- `demo1d` : compares the solvers on a blurred step signal.

Solver options come from an optional JSON file given by `--config` and from
flags, which take precedence. Exit codes are `0` on success, `2` for
unreadable inputs or invalid options, `3` when a solver diverges and `1` when
every benchmark row failed.
"""
from __future__ import absolute_import, division, print_function

import argparse
import json
import os
import sys

import numpy as np

from mptv.base import ConfigBase
from mptv.bench import METHODS, SWEEPS, demo1d, run_suite, run_sweep
from mptv.grid import check_image
from mptv.prox import AdmmConfig, tv_admm
from mptv.pursuit import SolverConfig, mptv_channels
from mptv.synth import (KERNEL_KINDS, DegradationSpec, edgetaper, make_kernel, make_sparse_image,
                        make_text_image)
from mptv.utils import (load_suite_file, read_image, save_bundle, write_csv,
                        write_image)

__all__ = ['RunConfig', 'build_parser', 'cmd_bench', 'cmd_deblur', 'cmd_demo1d', 'cmd_synth', 'main']

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_DIVERGED = 0, 1, 2, 3

###############################################################################
# RunConfig
###############################################################################

def _parse_toggle(value):
    if value is None or isinstance(value, bool):
        return value
    if str(value).lower() in ('on', 'true', '1', 'yes'):
        return True
    if str(value).lower() in ('off', 'false', '0', 'no'):
        return False
    raise ValueError("toggle must be 'on' or 'off', got {!r}".format(value))

class RunConfig(ConfigBase):

    """Flat configuration of a command: the method, every solver option of
    `SolverConfig` and the seed. Positional dictionaries are merged in
    order and keywords take precedence."""

    keys = ('method',) + SolverConfig.keys + ('seed',)

    def _process_hps(self):
        self.method = self._proc_arg('method', default='mptv')
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
        self.refine = _parse_toggle(self._proc_arg('refine', default=None))
        self.eps_in = float(self._proc_arg('eps_in', default=1e-3))
        self.min_inner = int(self._proc_arg('min_inner', default=10))
        self.max_inner = int(self._proc_arg('max_inner', default=100))
        self.seed = int(self._proc_arg('seed', default=0))

    def _validate(self):
        if self.method not in METHODS:
            raise ValueError('method must be one of {}, got {!r}'.format(METHODS, self.method))
        self.solver_config

    @classmethod
    def from_sources(cls, config_file=None, defaults=None, **flags):
        """Merges `defaults`, the JSON `config_file` and the flags that are
        not `None`, in increasing precedence."""

        file_options = {}
        if config_file is not None:
            if not os.path.isfile(config_file):
                raise IOError('config file {} does not exist'.format(config_file))
            with open(config_file, 'rt') as f:
                file_options = json.load(f)
            if not isinstance(file_options, dict):
                raise ValueError('config file must hold a JSON object')
        flags = {k: v for k, v in flags.items() if v is not None}
        return cls(defaults, file_options, flags)

    @property
    def solver_options(self):
        return {k: getattr(self, k) for k in SolverConfig.keys}

    @property
    def solver_config(self):
        return SolverConfig(self.solver_options)

    @property
    def admm_config(self):
        return AdmmConfig(lam=self.lam, rho=self.rho, eps_in=self.eps_in,
                          min_iters=self.min_inner, max_iters=self.max_inner)

###############################################################################
# Commands
###############################################################################

def _load_kernel(spec):
    if os.path.isfile(spec):
        return make_kernel(('file', spec))
    if spec.split(':')[0] in KERNEL_KINDS:
        return make_kernel(spec)
    raise IOError('kernel file {} does not exist'.format(spec))

def _stem(path):
    return os.path.splitext(path)[0]

def cmd_deblur(args, config):
    """Restores `args.image` and writes the result, a diagnostics CSV and a
    JSON copy of the configuration."""

    # read every input before writing anything
    y = read_image(args.image)
    kernel = _load_kernel(args.kernel)
    output = args.output or _stem(args.image) + '_restored.png'

    if y.ndim == 2:
        y = check_image(y, 'image')
        channels = [y]
    else:
        channels = [check_image(y[...,c], 'channel {}'.format(c)) for c in range(y.shape[2])]
    if args.edgetaper:
        channels = [edgetaper(c, kernel) for c in channels]

    if config.method == 'mptv':
        ys = channels[0] if len(channels) == 1 else np.stack(channels, axis=2)
        x, diag = mptv_channels(ys, kernel, config.solver_config, verbose=args.verbose)
        rows = diag.rows()
        columns = ('iteration',) + diag.fields
        summary = dict(kappa=diag.kappa, stop_reason=diag.stop_reason)
    else:
        results = [tv_admm(c, kernel, config.admm_config, return_state=True, verbose=args.verbose)
                   for c in channels]
        x = results[0][0] if len(results) == 1 else np.stack([r[0] for r in results], axis=2)
        rows = [{'channel': c, 'inner_iters': s.iter, 'fit': s.fit, 'time': s.time,
                 'converged': s.converged} for c, (_, s) in enumerate(results)]
        columns = ('channel', 'inner_iters', 'fit', 'time', 'converged')
        summary = {}

    report_config = dict(config.as_dict(), image=args.image, kernel=args.kernel, output=output,
                         edgetaper=args.edgetaper, **summary)

    write_image(output, x, bit_depth=args.bit_depth)
    write_csv(_stem(output) + '_diagnostics.csv', rows, columns, report_config)
    with open(_stem(output) + '_config.json', 'wt') as f:
        json.dump(report_config, f, indent=2, sort_keys=True)

    if args.verbose >= 1:
        print('Wrote', output)
    return EXIT_OK

def cmd_synth(args, config):
    """Writes a degraded image as a 16-bit PNG, an HDF5 bundle with the
    ground truth and a text file with the kernel taps."""

    support = None
    if args.clean is not None:
        x_star = read_image(args.clean)
        if x_star.ndim == 3:
            raise ValueError('clean images must be grayscale')
    elif args.phantom == 'sparse':
        x_star, support = make_sparse_image(args.dims, args.n_shapes, config.seed)
    else:
        x_star, support = make_text_image(args.dims, args.n_shapes, config.seed)

    spec = DegradationSpec(args.kernel, noise_sigma=args.noise, seed=config.seed, taper=args.taper)
    kernel = spec.kernel
    y = spec.apply(x_star)

    stem = _stem(args.output)
    arrays = {'y': y, 'x_star': x_star, 'kernel': kernel.taps}
    if support is not None:
        arrays['support'] = support
    attrs = dict(spec.as_dict(), source=args.clean or args.phantom, kernel_label=kernel.label)

    write_image(stem + '.png', y, bit_depth=16)
    save_bundle(stem + '.h5', arrays, attrs)
    np.savetxt(stem + '_kernel.txt', kernel.taps, fmt='%.17g')

    if args.verbose >= 1:
        print('Wrote {0}.png, {0}.h5 and {0}_kernel.txt'.format(stem))
    return EXIT_OK

def _read_suite(name):
    if os.path.isfile(name):
        with open(name, 'rt') as f:
            suite = json.load(f)
        suite.setdefault('name', os.path.basename(_stem(name)))
        return suite
    suites = load_suite_file()
    if name not in suites:
        raise ValueError('unknown suite {!r}, available: {}'.format(name, sorted(suites)))
    return dict(suites[name], name=name)

def cmd_bench(args, config):
    """Runs a suite, writing one CSV for the comparison and one per
    requested sweep."""

    suite = _read_suite(args.suite)
    if args.kernels is not None:
        suite['kernels'] = args.kernels
    if args.lams is not None:
        suite['lams'] = args.lams
    suite['seed'] = config.seed

    options = dict(config.solver_options, seed=config.seed)
    output = args.output or suite['name'] + '.csv'
    methods = args.methods or suite.get('methods')

    reports = [run_suite(suite, options, methods, args.n_jobs, args.verbose)]
    for sweep in (SWEEPS if 'all' in args.sweep else args.sweep):
        reports.append(run_sweep(suite, sweep, options, methods, args.n_jobs, args.verbose))

    reports[0].write(output)
    for report in reports[1:]:
        report.write('{}_{}.csv'.format(_stem(output), report.config['sweep']))

    if args.verbose >= 1:
        for report in reports:
            print(report)

    nrows = sum(len(r) for r in reports)
    nfailed = sum(r.n_failed for r in reports)
    return EXIT_FAILED if nrows > 0 and nfailed == nrows else EXIT_OK

def cmd_demo1d(args, config):
    """Writes the signals and gradients of the one-dimensional comparison."""

    columns, summary = demo1d(config.lam, config.kappa, length=args.length, n_jumps=args.n_jumps,
                              noise_sigma=args.noise, seed=config.seed,
                              options=config.solver_options)
    rows = [{k: v[i] for k, v in columns.items()} for i in range(args.length)]

    diag = summary['diagnostics']
    report_config = dict(config.as_dict(), length=args.length, n_jumps=args.n_jumps,
                         noise_sigma=args.noise, kernel=summary['kernel'].label,
                         outer_iters=diag.n_iters, stop_reason=diag.stop_reason)
    write_csv(args.output, rows, list(columns), report_config)

    if args.verbose >= 1:
        print('True jumps:', summary['true_jumps'].tolist())
        for name in ('tv_admm', 'mptv', 'support_oracle'):
            s = summary[name]
            print('  {}: {} jumps, PSNR {:.2f} dB, fit {:.4e}'.format(name, len(s['jumps']), s['psnr'], s['fit']))
    return EXIT_OK

###############################################################################
# Parser
###############################################################################

def _add_solver_flags(parser):
    group = parser.add_argument_group('solver options')
    group.add_argument('--config', help='JSON file of options')
    group.add_argument('--method', choices=METHODS)
    group.add_argument('--lambda', dest='lam', type=float)
    group.add_argument('--rho', type=float)
    group.add_argument('--r', type=float)
    group.add_argument('--zeta', type=float)
    group.add_argument('--kappa', type=int)
    group.add_argument('--eps', type=float)
    group.add_argument('--eps-in', dest='eps_in', type=float)
    group.add_argument('--max-outer', dest='max_outer', type=int)
    group.add_argument('--min-inner', dest='min_inner', type=int)
    group.add_argument('--max-inner', dest='max_inner', type=int)
    group.add_argument('--mode', choices=('sparse', 'natural'))
    group.add_argument('--refine', choices=('on', 'off'))
    group.add_argument('--seed', type=int)
    parser.add_argument('-v', '--verbose', action='count', default=0)

def build_parser():
    """The argument parser of the `mptv` command."""

    parser = argparse.ArgumentParser(prog='mptv', description='Matching pursuit TV deconvolution.')
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    p = subparsers.add_parser('deblur', help='restore a blurred image')
    p.add_argument('image', help='PNG or PGM image')
    p.add_argument('kernel', help='kernel file or description such as gaussian:25:1.6')
    p.add_argument('-o', '--output', help='restored image, default <image>_restored.png')
    p.add_argument('--edgetaper', action='store_true', help='taper the borders before solving')
    p.add_argument('--bit-depth', dest='bit_depth', type=int, choices=(8, 16), default=16)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_deblur, defaults=None)

    p = subparsers.add_parser('synth', help='write a degraded test image')
    source = p.add_mutually_exclusive_group()
    source.add_argument('--clean', help='grayscale image to degrade instead of a phantom')
    source.add_argument('--phantom', choices=('sparse', 'text'), default='sparse')
    p.add_argument('--dims', type=int, nargs=2, default=(128, 128), metavar=('H', 'W'))
    p.add_argument('--n-shapes', dest='n_shapes', type=int, default=6)
    p.add_argument('--kernel', default='gaussian:25:1.6')
    p.add_argument('--noise', type=float, default=0.003)
    p.add_argument('--taper', action='store_true')
    p.add_argument('-o', '--output', required=True, help='output stem or .png path')
    _add_solver_flags(p)
    p.set_defaults(func=cmd_synth, defaults=None)

    p = subparsers.add_parser('bench', help='run a benchmark suite')
    p.add_argument('suite', help='packaged suite name or JSON suite file')
    p.add_argument('-o', '--output', help='CSV report, default <suite>.csv')
    p.add_argument('--kernels', nargs='*', help='override the kernels of the suite')
    p.add_argument('--lams', nargs='*', type=float, help='override the lambdas of the suite')
    p.add_argument('--methods', nargs='*', choices=METHODS)
    p.add_argument('--sweep', nargs='*', default=[], choices=SWEEPS + ('all',))
    p.add_argument('--n-jobs', dest='n_jobs', type=int)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench, defaults=None)

    p = subparsers.add_parser('demo1d', help='compare the solvers on a step signal')
    p.add_argument('-o', '--output', default='demo1d.csv')
    p.add_argument('--length', type=int, default=256)
    p.add_argument('--n-jumps', dest='n_jumps', type=int, default=4)
    p.add_argument('--noise', type=float, default=0.003)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_demo1d, defaults={'lam': 0.01, 'kappa': 1})

    return parser

def main(argv=None):
    """Runs the `mptv` command, returning its exit code."""

    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        flags = {k: getattr(args, k) for k in RunConfig.keys}
        config = RunConfig.from_sources(args.config, args.defaults, **flags)
        return args.func(args, config)

    except FloatingPointError as e:
        print('mptv: solver diverged: {}'.format(e), file=sys.stderr)
        return EXIT_DIVERGED
    except (IOError, OSError, ValueError, TypeError) as e:
        print('mptv: {}'.format(e), file=sys.stderr)
        return EXIT_INPUT

if __name__ == '__main__':
    sys.exit(main())
