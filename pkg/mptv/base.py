"""Base classes for MPTV."""
from __future__ import absolute_import, division

from abc import ABCMeta, abstractmethod

import six

from mptv.utils import create_pool, default_n_jobs

__all__ = ['ConfigBase', 'DeconvBase']

###############################################################################
# ConfigBase
###############################################################################

class ConfigBase(six.with_metaclass(ABCMeta, object)):

    """Base class for configuration objects. Positional arguments (if present)
    are dictionaries (or other configurations) of options, keyword arguments
    (if present) are options directly. Keyword options take precedence over
    the positional dictionaries, and later dictionaries take precedence over
    earlier ones. Unrecognized options raise a `ValueError`.
    """

    # names of the options, in the order they are serialized
    keys = ()

    def __init__(self, *args, **kwargs):

        # store all options
        self.hps = {}
        for d in args:
            if d is None:
                continue
            if isinstance(d, ConfigBase):
                d = d.as_dict()
            self.hps.update(d)
        self.hps.update(kwargs)

        # process and validate options
        self._process_hps()
        self._verify_empty_hps()
        self._validate()

    def _proc_arg(self, name, **kwargs):
        alias = kwargs.get('alias')
        if alias is not None and alias in self.hps:
            if name in self.hps:
                raise ValueError('cannot specify both \'{}\' and \'{}\''.format(name, alias))
            kwargs['default'] = self.hps.pop(alias)

        if 'default' in kwargs:
            return self.hps.pop(name, kwargs['default'])
        if name not in self.hps:
            raise ValueError('missing required option \'{}\''.format(name))
        return self.hps.pop(name)

    def _verify_empty_hps(self):

        # hps should be all empty now
        for k in sorted(self.hps):
            raise ValueError('unrecognized keyword argument {}'.format(k))

        del self.hps

    @abstractmethod
    def _process_hps(self):
        pass

    def _validate(self):
        pass

    def as_dict(self):
        """The options as a flat dictionary, suitable for JSON."""

        return {k: getattr(self, k) for k in self.keys}

    def replace(self, **kwargs):
        """A copy of this configuration with some options changed."""

        return type(self)(self.as_dict(), **kwargs)

    def __eq__(self, other):
        return type(self) is type(other) and self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        items = ', '.join('{}={!r}'.format(k, getattr(self, k)) for k in self.keys)
        return '{}({})'.format(type(self).__name__, items)

###############################################################################
# DeconvBase
###############################################################################

class DeconvBase(six.with_metaclass(ABCMeta, object)):

    """A base class for deconvolution methods that holds a configuration."""

    def __init__(self, config):
        self.config = config

    def __call__(self, *args, **kwargs):
        return self.compute(*args, **kwargs)

    @abstractmethod
    def compute(self, y, kernel, **kwargs):
        pass

    def _batch_compute_func(self, args):
        return self.compute(*args)

    def batch_compute(self, observations, kernel, n_jobs=None):
        """Deconvolves several observations blurred by the same kernel.

        **Arguments**

        - **observations** : _list_ of _2-d numpy.ndarray_
            - The blurred images.
        - **kernel** : `BlurKernel`
            - The blur kernel shared by the observations.
        - **n_jobs** : _int_ or `None`
            - The number of worker processes to use. A value of `None` will
            consult the `MPTV_N_JOBS` environment variable and otherwise use
            as many processes as there are CPUs on the machine.

        **Returns**

        - _list_ of _2-d numpy.ndarray_
            - The restored image for each observation.
        """

        self.n_jobs = default_n_jobs(n_jobs)
        args = [(y, kernel) for y in observations]

        # don't bother setting up a Pool
        if self.n_jobs == 1 or len(args) <= 1:
            return list(map(self._batch_compute_func, args))

        # setup processor pool
        chunksize = max(len(args)//self.n_jobs, 1)
        with create_pool(min(self.n_jobs, len(args))) as pool:
            results = list(pool.map(self._batch_compute_func, args, chunksize))

        return results
