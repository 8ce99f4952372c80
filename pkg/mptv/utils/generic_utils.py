from __future__ import absolute_import, division, print_function

import contextlib
import json
import multiprocessing
import os
import sys
import warnings

import six

__all__ = [
    'DEFAULT_SUITE_FILE',
    'MPTV_DATA_DIR',
    'N_JOBS_ENV',
    'create_pool',
    'default_n_jobs',
    'load_suite_file'
]

# get access to the data directory of the installed package and the default suite file
MPTV_DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, 'data')
DEFAULT_SUITE_FILE = os.path.join(MPTV_DATA_DIR, 'suites.json')

# environment variable consulted for the number of worker processes
N_JOBS_ENV = 'MPTV_N_JOBS'

# handle Pool not being a context manager in Python < 3.4
@contextlib.contextmanager
def create_pool(*args, **kwargs):
    if sys.version_info < (3, 4):
        pool = multiprocessing.Pool(*args, **kwargs)
        yield pool
        pool.terminate()
    else:
        if 'fork' not in multiprocessing.get_all_start_methods():
            warnings.warn("'fork' is not available as a multiprocessing start method, "
                          + "MPTV multicore functionality may not work properly")
            with multiprocessing.Pool(*args, **kwargs) as pool:
                yield pool
        else:
            with multiprocessing.get_context('fork').Pool(*args, **kwargs) as pool:
                yield pool

# n_jobs from the environment, falling back to the cpu count
def default_n_jobs(n_jobs=None):
    if n_jobs is not None:
        return int(n_jobs)
    env = os.environ.get(N_JOBS_ENV)
    if env:
        try:
            n_jobs = int(env)
        except ValueError:
            raise ValueError('{} must be an integer, got {!r}'.format(N_JOBS_ENV, env))
        if n_jobs < 1:
            raise ValueError('{} must be positive, got {}'.format(N_JOBS_ENV, n_jobs))
        return n_jobs
    return multiprocessing.cpu_count() or 1

# load benchmark suite file
def load_suite_file(filename=None):
    if filename is None or filename == 'default':
        filename = DEFAULT_SUITE_FILE

    if not isinstance(filename, six.string_types):
        raise TypeError('suite filename must be a string')

    with open(filename, 'rt') as f:
        return json.load(f)
