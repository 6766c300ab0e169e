"""Closed-form Lipschitz test functions on ``R^d``.

Every oracle takes points of shape ``(..., d)``. Randomized members draw
their data from ``numpy.random.default_rng((seed, d))`` so a (seed, d) pair
fixes the function.
"""
import numpy as np

from .errors import ParameterError
from .grid import FunctionOracle

SCALES = (2.0, 5.0)
BASE_NAMES = ("abs", "dist_points", "max_affine", "sawtooth", "signed_linear", "sine")

# fixed unit directions, one per dimension
_DIRECTIONS = {1: (1.0,), 2: (0.6, 0.8), 3: (3 / 13, 4 / 13, 12 / 13)}


def _direction(d):
    if d not in _DIRECTIONS:
        raise ParameterError(f"corpus supports d in 1..3, got {d}")
    return np.array(_DIRECTIONS[d])


def abs_oracle():
    """Euclidean norm ``|x|``."""
    return FunctionOracle("abs", lambda x: np.linalg.norm(x, axis=-1), 1.0, nonnegative=True)


def dist_points_oracle(points, name="dist_points"):
    """Distance to a finite point set."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))

    def evaluate(x):
        diff = x[..., None, :] - pts
        return np.min(np.linalg.norm(diff, axis=-1), axis=-1)

    return FunctionOracle(name, evaluate, 1.0, nonnegative=True)


def max_affine_oracle(gradients, offsets, name="max_affine"):
    """``max_i <a_i, x> + b_i``; Lipschitz constant is the largest ``|a_i|``."""
    A = np.atleast_2d(np.asarray(gradients, dtype=float))
    b = np.asarray(offsets, dtype=float).reshape(-1)
    if A.shape[0] != b.size:
        raise ParameterError(f"{A.shape[0]} gradients but {b.size} offsets")
    lip = float(np.max(np.linalg.norm(A, axis=1)))
    return FunctionOracle(name, lambda x: np.max(x @ A.T + b, axis=-1), lip)


def sawtooth_oracle(d, period=0.5):
    """Distance from ``<a, x>`` to the lattice ``period * Z`` (triangle wave)."""
    a = _direction(d)

    def evaluate(x):
        u = x @ a
        return np.abs(np.mod(u + period / 2, period) - period / 2)

    return FunctionOracle("sawtooth", evaluate, 1.0, nonnegative=True)


def signed_linear_oracle(d):
    """``<a, x>`` with a fixed unit vector ``a``."""
    a = _direction(d)
    return FunctionOracle("signed_linear", lambda x: x @ a, 1.0)


def sine_oracle(d, omega=4.0):
    """``sin(omega <a, x>) / omega``."""
    a = _direction(d)
    return FunctionOracle("sine", lambda x: np.sin(omega * (x @ a)) / omega, 1.0)


def scaled(oracle, factor):
    """``factor * oracle`` named ``<name>_L<factor>``."""
    return FunctionOracle(
        f"{oracle.name}_L{factor:g}",
        lambda x: factor * oracle(x),
        factor * oracle.lip_declared,
        nonnegative=oracle.nonnegative,
    )


def base_corpus(d=1, seed=0):
    rng = np.random.default_rng((seed, d))
    points = rng.uniform(-1.0, 1.0, size=(3, d))
    directions = rng.normal(size=(4, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    norms = rng.uniform(0.5, 1.0, size=(4, 1))
    # the steepest piece has unit slope, so every seed declares L = 1
    gradients = directions * norms / norms.max()
    # a negative common offset makes the maximum change sign on [-1, 1]^d:
    # it is -1/4 at 0 and >= 1/4 at x = a_i / |a_i|
    offsets = np.full(4, -0.25)
    return [
        abs_oracle(),
        dist_points_oracle(points),
        max_affine_oracle(gradients, offsets),
        sawtooth_oracle(d),
        signed_linear_oracle(d),
        sine_oracle(d),
    ]


def corpus(d=1, seed=0):
    """Base members (Lipschitz constant 1) followed by their ``L = 2`` and ``L = 5`` versions."""
    base = base_corpus(d, seed)
    return base + [scaled(o, s) for s in SCALES for o in base]


def select(names, d=1, seed=0):
    """Corpus members by name; ``"all"`` or ``["all"]`` selects everything."""
    members = corpus(d, seed)
    if names == "all" or list(names) == ["all"]:
        return members
    by_name = {o.name: o for o in members}
    unknown = [n for n in names if n not in by_name]
    if unknown:
        raise ParameterError(f"unknown corpus members {unknown}; available: {sorted(by_name)}")
    return [by_name[n] for n in names]
