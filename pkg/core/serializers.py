# core/serializers.py
"""
JSON and CSV writers for reports. Output is a pure function of the payload so that
repeated runs produce identical bytes; files are written to a temporary sibling
and renamed into place.
"""

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from .choi_family import WeightVector


class ReportEncoder(DjangoJSONEncoder):
    """DjangoJSONEncoder that also understands numpy scalars/arrays, complex numbers and dataclasses."""

    def default(self, o):
        if isinstance(o, complex):
            return [o.real, o.imag]
        if isinstance(o, np.complexfloating):
            return [float(o.real), float(o.imag)]
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, WeightVector):
            return [[a.real, a.imag] for a in o.alpha]
        if isinstance(o, Path):
            return str(o)
        if is_dataclass(o) and not isinstance(o, type):
            return asdict(o)
        return super().default(o)


def dumps(payload):
    return json.dumps(payload, cls=ReportEncoder, indent=2) + '\n'


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        if value.imag == 0.0:
            return repr(value.real)
        return repr(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple, np.ndarray)):
        return ' '.join(_cell(v) for v in value)
    return str(value)


def csv_text(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def write_atomic(path, text):
    """Write `text` to `path` through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
