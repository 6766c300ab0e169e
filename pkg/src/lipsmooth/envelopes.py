"""Moreau inf/sup envelopes and the Lasry-Lions double envelope on grids.

The infimum in ``f_lam(x) = min_u f(u) + |x - u|**2 / (2 lam)`` runs over grid
nodes only, so the box plays the role of the whole space. Because the
squared Euclidean distance splits into a sum over axes, the d-dimensional
envelope is a sequence of 1-d lower envelopes of parabolas, each computed in
linear time (Felzenszwalb & Huttenlocher, "Distance transforms of sampled
functions", 2012).
"""
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ParameterError, ResolutionError
from .grid import GridFunction, grid_shape_for_spacing

# h <= lam / RESOLUTION_FACTOR on every axis before the pipeline runs
RESOLUTION_FACTOR = 10.0


@dataclass(frozen=True)
class EnvelopeParams:
    """Inf-convolution scale ``lam`` and sup-convolution scale ``mu``, ``0 < mu < lam``."""

    lam: float
    mu: float

    def __post_init__(self):
        if not (np.isfinite(self.lam) and np.isfinite(self.mu) and 0 < self.mu < self.lam):
            raise ParameterError(f"need 0 < mu < lam, got lam={self.lam}, mu={self.mu}")

    @property
    def curvature_bound(self):
        """``max(1/mu, 1/(lam - mu))``, the Lipschitz bound of the envelope's gradient."""
        return max(1.0 / self.mu, 1.0 / (self.lam - self.mu))


@numba.njit(cache=True)
def _lower_envelope_lines(values, h, lam, out):
    n_lines, n = values.shape
    c = h * h / (2.0 * lam)
    v = np.empty(n, dtype=np.int64)
    z = np.empty(n + 1)
    for line in range(n_lines):
        f = values[line]
        k = 0
        v[0] = 0
        z[0] = -np.inf
        z[1] = np.inf
        for q in range(1, n):
            while True:
                p = v[k]
                # abscissa where the parabolas rooted at p and q meet, in index units;
                # z[0] = -inf stops the pop loop
                s = 0.5 * (q + p) + (f[q] - f[p]) / (2.0 * c * (q - p))
                if s > z[k]:
                    break
                k -= 1
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = np.inf
        k = 0
        for q in range(n):
            while z[k + 1] < q:
                k += 1
            j = v[k]
            d = h * (q - j)
            out[line, q] = f[j] + d * d / (2.0 * lam)


def _check_positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be a finite positive number, got {value}")


def inf_conv_quadratic_1d(values, h, lam):
    """``out[k] = min_j values[j] + (h (k - j))**2 / (2 lam)`` in O(n)."""
    _check_positive("h", h)
    _check_positive("lam", lam)
    values = np.ascontiguousarray(values, dtype=float)
    out = np.empty_like(values)
    _lower_envelope_lines(values.reshape(1, -1), float(h), float(lam), out.reshape(1, -1))
    return out


def inf_conv_quadratic_1d_brute(values, h, lam):
    """O(n^2) reference for :func:`inf_conv_quadratic_1d`."""
    values = np.asarray(values, dtype=float)
    idx = np.arange(values.size)
    d = h * (idx[:, None] - idx[None, :])
    return np.min(values[None, :] + d * d / (2.0 * lam), axis=1)


def _inf_conv_axis(v, h, lam, axis):
    moved = np.ascontiguousarray(np.moveaxis(v, axis, -1))
    lines = moved.reshape(-1, moved.shape[-1])
    out = np.empty_like(lines)
    _lower_envelope_lines(lines, float(h), float(lam), out)
    return np.moveaxis(out.reshape(moved.shape), -1, axis)


def moreau_inf(f, lam):
    """Inf-convolution ``f_lam(x) = min_u f(u) + |x - u|**2 / (2 lam)`` over grid nodes."""
    _check_positive("lam", lam)
    v = f.values
    for axis, h in enumerate(f.spacing):
        v = _inf_conv_axis(v, h, lam, axis)
    return f.with_values(v)


def moreau_sup(f, mu):
    """Sup-convolution ``f^mu(x) = max_u f(u) - |x - u|**2 / (2 mu)``, i.e. ``-((-f)_mu)``."""
    _check_positive("mu", mu)
    return -moreau_inf(-f, mu)


def moreau_inf_brute(f, lam):
    """Global O(N^2) minimisation over all node pairs; reference oracle for small grids."""
    _check_positive("lam", lam)
    pts = f.points().reshape(-1, f.d)
    vals = f.flat_values
    out = np.empty_like(vals)
    for k in range(0, pts.shape[0], 512):
        diff = pts[k:k + 512, None, :] - pts[None, :, :]
        out[k:k + 512] = np.min(vals[None, :] + np.sum(diff * diff, axis=-1) / (2.0 * lam), axis=1)
    return f.with_values(out)


def moreau_sup_brute(f, mu):
    return -moreau_inf_brute(-f, mu)


def lasry_lions(f, params):
    """Double envelope ``(f_lam)^mu``: C^{1,1} with gradient Lipschitz ``<= max(1/mu, 1/(lam-mu))``."""
    return moreau_sup(moreau_inf(f, params.lam), params.mu)


def select_lambda(epsilon, L):
    """Envelope scales with ``sup|f - (f_lam)^mu| <= epsilon / 2`` for L-Lipschitz f.

    Uses ``|f_lam - f| <= L**2 lam / 2`` and ``|(f_lam)^mu - f_lam| <= L**2 mu / 2``
    with ``mu = lam / 2``, so ``lam = (2/3) epsilon / L**2``.
    """
    _check_positive("epsilon", epsilon)
    _check_positive("L", L)
    lam = (2.0 / 3.0) * epsilon / L ** 2
    return EnvelopeParams(lam, lam / 2.0)


def check_resolution(f, lam):
    """Raise :class:`ResolutionError` unless ``h <= lam / 10`` on every axis."""
    limit = lam / RESOLUTION_FACTOR
    if max(f.spacing) > limit * (1 + 1e-12):
        need = grid_shape_for_spacing(f.box, limit)
        raise ResolutionError(
            f"grid spacing {max(f.spacing):.6g} exceeds lam/{RESOLUTION_FACTOR:g} = {limit:.6g}; "
            f"minimal shape is {need}",
            required_shape=need,
        )
