"""## Data Tools

HDF5 bundles for synthetic data and CSV reports. Every CSV report starts
with `# key=value` lines holding the effective configuration, followed by a
header row. These are not importable from the top level `mptv` module, but
must instead be imported from `mptv.utils`.
"""
from __future__ import absolute_import, division

import csv
import json
import os

import h5py
import numpy as np
import six

__all__ = [
    'format_value',
    'load_bundle',
    'read_csv',
    'save_bundle',
    'write_csv'
]

def save_bundle(filepath, arrays, attrs=None, compression=None):
    """Writes named arrays and scalar attributes to an HDF5 file. Datasets
    are written without timestamps so equal inputs give identical files.

    **Arguments**

    - **filepath** : _str_
        - The destination `.h5` file.
    - **arrays** : _dict_
        - Dataset names mapped to arrays.
    - **attrs** : _dict_ or `None`
        - File attributes. Values that are not numbers or strings are
        stored as JSON.
    - **compression** : _int_ or `None`
        - Optional gzip level.
    """

    compression = ({'compression': 'gzip', 'compression_opts': compression}
                   if compression is not None else {})

    with h5py.File(filepath, 'w') as hf:
        for name in sorted(arrays):
            hf.create_dataset(name, data=np.asarray(arrays[name]), track_times=False, **compression)
        for key, value in sorted((attrs or {}).items()):
            if value is None or isinstance(value, (dict, list, tuple, bool)):
                value = json.dumps(value)
            hf.attrs[key] = value

def load_bundle(filepath):
    """Reads a file written by `save_bundle`.

    **Returns**

    - (_dict_, _dict_)
        - The arrays and the attributes.
    """

    if not os.path.isfile(filepath):
        raise IOError('bundle {} does not exist'.format(filepath))

    with h5py.File(filepath, 'r') as hf:
        arrays = {name: hf[name][()] for name in hf}
        attrs = {}
        for key, value in hf.attrs.items():
            if isinstance(value, bytes):
                value = value.decode('utf-8')
            if isinstance(value, six.string_types):
                try:
                    value = json.loads(value)
                except ValueError:
                    pass
            attrs[key] = value
    return arrays, attrs

def format_value(value):
    """Text form of a report entry; floats keep 12 significant digits."""

    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return '{:.12g}'.format(float(value))
    return str(value)

def write_csv(filepath, rows, columns, config=None):
    """Writes a CSV report.

    **Arguments**

    - **filepath** : _str_
        - The destination.
    - **rows** : _list_ of _dict_
        - One dictionary per row; missing entries are left empty.
    - **columns** : _list_ of _str_
        - The header, in order.
    - **config** : _dict_ or `None`
        - Written as leading `# key=value` lines, sorted by key.
    """

    with open(filepath, 'w', newline='') as f:
        for key, value in sorted((config or {}).items()):
            f.write('# {}={}\n'.format(key, format_value(value)))
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])

def read_csv(filepath):
    """Reads a report written by `write_csv`.

    **Returns**

    - (_dict_, _list_ of _dict_)
        - The configuration, with values as strings, and the rows.
    """

    config, lines = {}, []
    with open(filepath, 'rt') as f:
        for line in f:
            if line.startswith('# '):
                key, _, value = line[2:].rstrip('\n').partition('=')
                config[key] = value
            else:
                lines.append(line)

    return config, list(csv.DictReader(lines))
