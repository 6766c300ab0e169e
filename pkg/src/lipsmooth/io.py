"""Plain-text grid files.

Format::

    # lipsmooth grid
    d 2
    shape 3 4
    lower -1.0 -1.0
    upper 1.0 1.0
    <one value per line, C order>

Numbers are written with ``repr``, which round-trips float64 exactly.
"""
import numpy as np

from .errors import ParameterError
from .grid import Box, GridFunction

HEADER = "# lipsmooth grid"


def format_grid(f):
    lines = [
        HEADER,
        f"d {f.d}",
        "shape " + " ".join(str(n) for n in f.shape),
        "lower " + " ".join(repr(v) for v in f.box.lower),
        "upper " + " ".join(repr(v) for v in f.box.upper),
    ]
    lines.extend(repr(float(v)) for v in f.flat_values)
    return "\n".join(lines) + "\n"


def write_grid(path, f):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_grid(f))


def parse_grid(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise ParameterError("not a lipsmooth grid file (missing header)")
    fields = {}
    for line in lines[1:5]:
        key, *rest = line.split()
        fields[key] = rest
    try:
        d = int(fields["d"][0])
        shape = tuple(int(v) for v in fields["shape"])
        lower = tuple(float(v) for v in fields["lower"])
        upper = tuple(float(v) for v in fields["upper"])
    except (KeyError, IndexError, ValueError) as exc:
        raise ParameterError(f"malformed grid header: {exc}") from exc
    if not len(shape) == len(lower) == len(upper) == d:
        raise ParameterError("grid header dimensions disagree")
    values = np.array([float(v) for v in lines[5:] if v.strip()])
    if values.size != int(np.prod(shape)):
        raise ParameterError(f"expected {int(np.prod(shape))} values, found {values.size}")
    return GridFunction(Box(lower, upper), values.reshape(shape))


def read_grid(path):
    with open(path, encoding="ascii") as fh:
        return parse_grid(fh.read())


def format_columns(columns, names):
    """Whitespace-separated table with a ``#`` header line."""
    rows = ["# " + " ".join(names)]
    rows.extend(" ".join(repr(float(v)) for v in row) for row in zip(*columns))
    return "\n".join(rows) + "\n"


def format_matrix(values):
    return "\n".join(" ".join(repr(float(v)) for v in row) for row in np.atleast_2d(values)) + "\n"
