"""Uniformly sampled scalar fields on axis-aligned boxes and grid metrics.

Node ordering is row-major with axis 0 slowest, i.e. plain C order of the
``values`` array.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvaluationError, GridMismatchError, ParameterError

MAX_DIM = 3


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[lower[0], upper[0]] x ... x [lower[d-1], upper[d-1]]``."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lower) != len(upper):
            raise ParameterError("box lower/upper dimension mismatch")
        if not 1 <= len(lower) <= MAX_DIM:
            raise ParameterError(f"dimension must be in 1..{MAX_DIM}, got {len(lower)}")
        for i, (a, b) in enumerate(zip(lower, upper)):
            if not (np.isfinite(a) and np.isfinite(b) and a < b):
                raise ParameterError(f"box axis {i}: need finite lower < upper, got [{a}, {b}]")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def d(self):
        return len(self.lower)

    @property
    def widths(self):
        return tuple(b - a for a, b in zip(self.lower, self.upper))

    def scaled(self, factor):
        """Box with every coordinate multiplied by ``factor > 0``."""
        return Box(tuple(factor * a for a in self.lower), tuple(factor * b for b in self.upper))

    @classmethod
    def cube(cls, lo, hi, d):
        return cls((lo,) * d, (hi,) * d)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a real function at the nodes of a uniform grid on ``box``.

    ``values`` has shape ``shape``; endpoints of every axis are nodes.
    """

    box: Box
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != self.box.d:
            values = values.reshape(-1) if self.box.d == 1 else values
        if values.ndim != self.box.d:
            raise ParameterError(
                f"values have {values.ndim} axes but box has dimension {self.box.d}")
        if any(n < 2 for n in values.shape):
            raise ParameterError(f"every axis needs at least 2 points, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ParameterError("grid values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return self.values.shape

    @property
    def d(self):
        return self.box.d

    @property
    def spacing(self):
        return tuple(w / (n - 1) for w, n in zip(self.box.widths, self.shape))

    @property
    def flat_values(self):
        return self.values.reshape(-1)

    def axes(self):
        """Node coordinates along each axis."""
        return [np.linspace(a, b, n) for a, b, n in zip(self.box.lower, self.box.upper, self.shape)]

    def points(self):
        """All nodes as an array of shape ``shape + (d,)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def with_values(self, values):
        return GridFunction(self.box, np.asarray(values, dtype=float).reshape(self.shape))

    def window(self, trim):
        """Restriction to nodes at distance ``>= trim`` from every face.

        Returns ``self`` when ``trim <= 0``. Raises if fewer than 2 nodes per
        axis would remain.
        """
        if trim <= 0:
            return self
        index = []
        lower, upper = [], []
        for ax, (a, b) in zip(self.axes(), zip(self.box.lower, self.box.upper)):
            # small slack so nodes sitting exactly on the trim line are kept
            tol = 1e-12 * (b - a)
            keep = np.flatnonzero((ax >= a + trim - tol) & (ax <= b - trim + tol))
            if keep.size < 2:
                raise ParameterError(f"trim width {trim} leaves fewer than 2 nodes on an axis")
            index.append(slice(keep[0], keep[-1] + 1))
            lower.append(ax[keep[0]])
            upper.append(ax[keep[-1]])
        return GridFunction(Box(tuple(lower), tuple(upper)), self.values[tuple(index)])

    def same_grid(self, other):
        return self.shape == other.shape and self.box == other.box

    def __add__(self, other):
        if isinstance(other, GridFunction):
            _check_same(self, other)
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + other)

    def __neg__(self):
        return self.with_values(-self.values)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class FunctionOracle:
    """Closed-form test function with a declared Lipschitz constant.

    ``evaluate`` maps an array of points of shape ``(..., d)`` to values of
    shape ``(...)``.
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    lip_declared: float
    nonnegative: bool = False

    def __call__(self, x):
        return self.evaluate(np.asarray(x, dtype=float))


def _check_same(f, g):
    if not f.same_grid(g):
        raise GridMismatchError(
            f"grid mismatch: shape {f.shape} on {f.box} vs shape {g.shape} on {g.box}")


def sample(oracle, box, shape):
    """Sample ``oracle`` at every node of the uniform grid on ``box``."""
    shape = tuple(int(n) for n in np.atleast_1d(shape))
    if len(shape) != box.d:
        raise ParameterError(f"shape {shape} does not match box dimension {box.d}")
    if any(n < 2 for n in shape):
        raise ParameterError(f"every axis needs at least 2 points, got shape {shape}")
    axes = [np.linspace(a, b, n) for a, b, n in zip(box.lower, box.upper, shape)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    values = np.asarray(oracle(pts), dtype=float).reshape(shape)
    bad = ~np.isfinite(values)
    if bad.any():
        k = tuple(int(i) for i in np.argwhere(bad)[0])
        raise EvaluationError(f"oracle {oracle.name!r} returned {values[k]} at point {pts[k].tolist()}")
    return GridFunction(box, values)


def sup_distance(f, g):
    """Maximum absolute nodewise difference."""
    _check_same(f, g)
    return float(np.max(np.abs(f.values - g.values)))


def pair_lipschitz(f):
    """Largest axis-adjacent slope ``|f(x + h e_i) - f(x)| / h_i``.

    Every term is a genuine difference quotient, so this never exceeds the
    true Lipschitz constant.
    """
    return max(float(np.max(np.abs(np.diff(f.values, axis=i)))) / h for i, h in enumerate(f.spacing))


def estimate_lipschitz(f):
    """Grid estimate of the Lipschitz constant of ``f``.

    Larger of the maximal axis-adjacent slope ``|f(x + h e_i) - f(x)| / h_i``
    and the maximal Euclidean norm of the central-difference gradient at
    nodes interior along every axis.

    For d >= 2 the gradient term can exceed the true constant (by at most a
    factor sqrt(d)) at nodes next to a kink whose normal is oblique to the
    axes, because its components then come from different linear pieces.
    """
    v = f.values
    best = pair_lipschitz(f)
    if all(n >= 3 for n in f.shape):
        inner = tuple(slice(1, -1) for _ in range(f.d))
        sq = np.zeros(tuple(n - 2 for n in f.shape))
        for i, h in enumerate(f.spacing):
            hi = list(inner)
            lo = list(inner)
            hi[i] = slice(2, None)
            lo[i] = slice(None, -2)
            sq += ((v[tuple(hi)] - v[tuple(lo)]) / (2 * h)) ** 2
        best = max(best, float(np.sqrt(np.max(sq))))
    return best


def second_differences(f, axis):
    """``(f(x + h e_i) - 2 f(x) + f(x - h e_i)) / h_i**2`` at nodes interior to ``axis``."""
    if f.shape[axis] < 3:
        raise ParameterError(f"axis {axis} has {f.shape[axis]} points; second differences need 3")
    v = f.values
    n = f.shape[axis]
    h = f.spacing[axis]
    take = lambda s: np.take(v, np.arange(s, s + n - 2), axis=axis)  # noqa: E731
    return (take(2) - 2 * take(1) + take(0)) / h ** 2


def second_difference_bound(f):
    """Max over axes and interior nodes of the absolute second difference quotient."""
    return max(float(np.max(np.abs(second_differences(f, i)))) for i in range(f.d))


def refine(f, factor):
    """Piecewise-(multi)linear resampling with ``factor`` sub-intervals per cell.

    ``factor`` is an int or one int per axis. Original nodes are kept exactly;
    in one dimension the interpolant has the same Lipschitz constant as the
    samples.
    """
    factors = _factors(factor, f.d)
    if all(r == 1 for r in factors):
        return f
    v = f.values
    for axis, (n, r) in enumerate(zip(f.shape, factors)):
        if r == 1:
            continue
        coarse = np.arange(n, dtype=float)
        # fine[k * r] == k exactly, so np.interp reproduces the coarse nodes
        fine = np.arange((n - 1) * r + 1, dtype=float) / r
        v = np.apply_along_axis(lambda line: np.interp(fine, coarse, line), axis, v)
    return GridFunction(f.box, v)


def _factors(factor, d):
    factors = tuple(int(r) for r in np.broadcast_to(np.asarray(factor), (d,)))
    if any(r < 1 for r in factors):
        raise ParameterError(f"refinement factors must be >= 1, got {factors}")
    return factors


def subsample(f, factor):
    """Every ``factor``-th node along each axis (inverse of :func:`refine`)."""
    factors = _factors(factor, f.d)
    for n, r in zip(f.shape, factors):
        if (n - 1) % r:
            raise ParameterError(f"shape {f.shape} is not a {factors}-fold refinement")
    return GridFunction(f.box, f.values[tuple(slice(None, None, r) for r in factors)])


def grid_shape_for_spacing(box, max_spacing):
    """Smallest shape whose spacing is ``<= max_spacing`` on every axis."""
    return tuple(int(np.ceil(w / max_spacing - 1e-9)) + 1 for w in box.widths)

