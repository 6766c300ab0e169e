"""Smooth scalar transition functions and Gaussian mollification of grids.

``ThetaBar`` is a C-infinity switch from 0 to 1 with exact flats on
``(-inf, 4 eps]`` and ``[1 - 4 eps, inf)``, built as a clamped linear ramp
(knees at ``4.5 eps`` and ``1 - 4.5 eps``) convolved with the bump
``exp(-1 / (1 - v**2))`` of radius ``eps / 2``.  Gaussian smoothing with
kernel ``sqrt(kappa / pi) exp(-kappa s**2)`` turns it into an entire function
``theta_kappa``; ``select_kappa`` picks ``kappa`` so that the smoothed switch
stays within ``eps / 2**(n + 2)`` of the original and is nearly flat where
required.

Integrals against the Gaussian are split at the breakpoints of ``ThetaBar``:
the linear middle and the constant tail integrate in closed form (erf/erfc),
the two transition windows of width ``eps`` use composite Gauss-Legendre
panels no wider than ``1 / (2 sqrt(kappa))``.  The same formulas accept complex
arguments.
"""
import functools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, special

from .errors import CertificationError, ParameterError, ResolutionError

_GL_BUMP = 120
_GL_PANEL = 20
_N_COMPLEX = 64
_MAX_DOUBLINGS = 40
# quadrature panels per transition window; beyond this kappa is out of reach
_MAX_PANELS = 20_000


class ResolutionWarning(UserWarning):
    """Gaussian kernel narrower than half a grid cell."""


def _gauss_legendre(m):
    return np.polynomial.legendre.leggauss(m)


def _bump(v):
    out = np.zeros_like(v)
    inside = np.abs(v) < 1
    out[inside] = np.exp(-1.0 / (1.0 - v[inside] ** 2))
    return out


@functools.lru_cache(maxsize=None)
def _bump_mass():
    x, w = _gauss_legendre(_GL_BUMP)
    return float(np.sum(w * _bump(x)))


def _bump_integrals(x):
    """``(int_{-1}^x b, int_{-1}^x (x - v) b)`` for the unit-mass bump ``b``, ``x`` in [-1, 1]."""
    x = np.asarray(x, dtype=float)
    xg, wg = _gauss_legendre(_GL_BUMP)
    half = 0.5 * (x[..., None] + 1.0)
    v = -1.0 + half * (xg + 1.0)
    w = wg * half
    bv = _bump(v) / _bump_mass()
    return np.sum(w * bv, axis=-1), np.sum(w * (x[..., None] - v) * bv, axis=-1)


def _check_epsilon(epsilon):
    if not (0 < epsilon < 1.0 / 16.0):
        raise ParameterError(f"epsilon must lie in (0, 1/16), got {epsilon}")


@dataclass(frozen=True, eq=False)
class ThetaBar:
    """Smooth monotone switch used to glue unit slices.

    Use :func:`build_theta_bar`; it attaches the property ``certificate``.
    """

    epsilon: float
    certificate: dict = field(default_factory=dict)

    @property
    def slope(self):
        return 1.0 / (1.0 - 9.0 * self.epsilon)

    @property
    def radius(self):
        return 0.5 * self.epsilon

    def _lower(self, t):
        # t in [4 eps, 5 eps]; value and derivative from partial bump moments
        x = np.clip((t - 4.5 * self.epsilon) / self.radius, -1.0, 1.0)
        cdf, moment = _bump_integrals(x)
        return self.slope * self.radius * moment, self.slope * cdf

    def _pieces(self, t):
        t = np.asarray(t, dtype=float)
        e = self.epsilon
        low = (t > 4 * e) & (t < 5 * e)
        mid = (t >= 5 * e) & (t <= 1 - 5 * e)
        up = (t > 1 - 5 * e) & (t < 1 - 4 * e)
        return t, low, mid, up

    def __call__(self, t):
        t, low, mid, up = self._pieces(t)
        out = np.where(t >= 1 - 4 * self.epsilon, 1.0, 0.0)
        out[mid] = self.slope * (t[mid] - 4.5 * self.epsilon)
        out[low] = self._lower(t[low])[0]
        out[up] = 1.0 - self._lower(1.0 - t[up])[0]
        return out

    def complement(self, t):
        """``1 - theta_bar(t)`` without cancellation near the upper flat."""
        return self(1.0 - np.asarray(t, dtype=float))

    def derivative(self, t):
        t, low, mid, up = self._pieces(t)
        out = np.zeros_like(t)
        out[mid] = self.slope
        out[low] = self._lower(t[low])[1]
        out[up] = self._lower(1.0 - t[up])[1]
        return out

    @property
    def second_derivative_bound(self):
        """``sup |theta_bar''| = slope * max(bump) / radius``."""
        return self.slope * np.exp(-1.0) / _bump_mass() / self.radius

    def quadrature_nodes(self, kappa):
        """Composite Gauss-Legendre nodes on ``[4 eps, 5 eps]`` with values and derivatives."""
        return _transition_nodes(self.epsilon, float(kappa))


@functools.lru_cache(maxsize=256)
def _transition_nodes(epsilon, kappa):
    tb = ThetaBar(epsilon)
    panels = max(4, int(np.ceil(2.0 * epsilon * np.sqrt(kappa))))
    edges = np.linspace(4 * epsilon, 5 * epsilon, panels + 1)
    xg, wg = _gauss_legendre(_GL_PANEL)
    half = 0.5 * np.diff(edges)
    s = (edges[:-1, None] + half[:, None] * (xg + 1.0)).ravel()
    w = (half[:, None] * wg).ravel()
    value, deriv = tb._lower(s)
    return s, w, value, deriv


def build_theta_bar(epsilon, n_check=10_000):
    """Construct the switch and verify its five defining properties on a grid.

    The certificate maps property name to its measured margin (positive means
    satisfied).
    """
    _check_epsilon(epsilon)
    tb = ThetaBar(float(epsilon))
    tb.certificate.update(theta_bar_certificate(tb, n_check))
    failed = [k for k, m in tb.certificate.items() if not m > 0]
    if failed:
        raise CertificationError(f"theta_bar({epsilon}) failed {failed}", failed)
    return tb


def theta_bar_certificate(tb, n_check=10_000):
    e = tb.epsilon
    t = np.linspace(-0.25, 1.25, n_check)
    val = tb(t)
    comp = tb.complement(t)
    lo, hi = 4 * e, 1 - 4 * e
    below, above = t <= lo, t >= hi
    inside = ~below & ~above
    # increments on the upper half come from the complement, which keeps
    # digits that 1 - tiny would round away
    diffs = np.where(t[:-1] < 0.5, np.diff(val), -np.diff(comp))
    # a forward difference belongs to the open interval when both ends lie in it
    pair_inside = inside[:-1] & inside[1:]
    pair_flat = (below[:-1] & below[1:]) | (above[:-1] & above[1:])
    unit = (t >= 0) & (t <= 1)
    slopes = np.abs(diffs) / np.diff(t)
    return {
        # (1) zero exactly on (-inf, 4 eps], positive beyond
        "zero_set": _iff_margin(val[~below], val[below]),
        # (2) one exactly on [1 - 4 eps, inf), below one before
        "one_set": _iff_margin(comp[~above], comp[above]),
        # (3) increasing exactly on (4 eps, 1 - 4 eps)
        "strict_increase": _iff_margin(diffs[pair_inside], diffs[pair_flat]),
        # (4) |theta_bar(t) - t| <= 5 eps on [0, 1]
        "near_identity": 5 * e - float(np.max(np.abs(val[unit] - t[unit]))),
        # (5) Lipschitz constant <= 1 / (1 - 10 eps)
        "lipschitz": 1.0 / (1.0 - 10 * e) - float(np.max(slopes)),
    }


def _iff_margin(should_be_positive, should_be_zero):
    """Smallest positive value, or minus the worst violation of the zero part."""
    violation = float(np.max(np.abs(should_be_zero))) if should_be_zero.size else 0.0
    return -violation if violation > 0 else float(np.min(should_be_positive))


def _linear_part(e, slope, kappa, z):
    # a_kappa * int_a^b (alpha + beta s) exp(-kappa (z - s)**2) ds in closed form
    a, b = 5 * e, 1 - 5 * e
    alpha, beta = -slope * 4.5 * e, slope
    rk = np.sqrt(kappa)
    A, B = a - z, b - z
    main = 0.5 * (alpha + beta * z) * (special.erf(rk * B) - special.erf(rk * A))
    edge = beta / (2.0 * np.sqrt(np.pi * kappa)) * (np.exp(-kappa * A * A) - np.exp(-kappa * B * B))
    return main + edge


def _window_sum(s, w, weight_values, kappa, z):
    d = z[:, None] - s[None, :]
    return np.sqrt(kappa / np.pi) * (np.exp(-kappa * d * d) @ (w * weight_values))


def _smoothed(tb, kappa, z, derivative=False, chunk=4096):
    """Evaluate ``theta_kappa`` (or its derivative) at real or complex ``z``."""
    e = tb.epsilon
    z = np.asarray(z)
    flat = z.reshape(-1)
    s, w, val, der = tb.quadrature_nodes(kappa)
    rk = np.sqrt(kappa)
    if derivative:
        out = 0.5 * tb.slope * (special.erf(rk * (1 - 5 * e - flat)) - special.erf(rk * (5 * e - flat)))
        low_w, up_w = der, der
    else:
        out = _linear_part(e, tb.slope, kappa, flat) + 0.5 * special.erfc(rk * (1 - 4 * e - flat))
        low_w, up_w = val, 1.0 - val
    out = np.array(out, dtype=np.result_type(out, flat, float))
    # beyond 12 / sqrt(kappa) from a window the Gaussian weight is below exp(-144)
    reach = 12.0 / rk
    re = flat.real
    for nodes, weights in ((s, low_w), (1.0 - s, up_w)):
        near = (re > nodes.min() - reach) & (re < nodes.max() + reach)
        if np.iscomplexobj(flat):
            near[:] = True
        idx = np.flatnonzero(near)
        for k in range(0, idx.size, chunk):
            part = idx[k:k + chunk]
            out[part] += _window_sum(nodes, w, weights, kappa, flat[part])
    return out.reshape(z.shape)


def _check_kappa(kappa):
    if not (np.isfinite(kappa) and kappa > 0):
        raise ParameterError(f"kappa must be finite and positive, got {kappa}")


def theta_eval(theta_bar, kappa, t):
    """``theta_kappa(t) = sqrt(kappa/pi) * int theta_bar(s) exp(-kappa (t - s)**2) ds`` for real t."""
    _check_kappa(kappa)
    return _smoothed(theta_bar, kappa, np.asarray(t, dtype=float))


def theta_derivative_eval(theta_bar, kappa, t):
    _check_kappa(kappa)
    return _smoothed(theta_bar, kappa, np.asarray(t, dtype=float), derivative=True)


def theta_complex_eval(theta_bar, kappa, z):
    """Holomorphic extension of ``theta_kappa``.

    Supported for ``|Im z| < 3 * |4 eps - Re z|``-type arguments near the lower
    flat (the decay check uses ``|z| <= eps``); far off the real axis the
    Gaussian factor overflows.
    """
    _check_kappa(kappa)
    return _smoothed(theta_bar, kappa, np.asarray(z, dtype=complex))


def decay_envelope(epsilon, kappa):
    """``sqrt(2) exp(-7 kappa eps**2 / 2)``: bound on ``|theta_kappa(z)|`` for ``|z| <= eps``."""
    return np.sqrt(2.0) * np.exp(-3.5 * kappa * epsilon ** 2)


def complex_circle(epsilon, m=_N_COMPLEX):
    return epsilon * np.exp(2j * np.pi * np.arange(m) / m)


@dataclass(frozen=True, eq=False)
class Mollifier1D:
    """Certified smooth scalar map: ``theta_n`` (kind ``"theta_n"``) or ``alpha``."""

    kind: str
    epsilon: float
    kappa: float
    n: int
    certificate: dict
    theta_bar: ThetaBar = None

    def __call__(self, t):
        if self.kind == "alpha":
            return _alpha(self.epsilon, self.kappa, np.asarray(t, dtype=float))
        return theta_eval(self.theta_bar, self.kappa, t)

    def derivative(self, t):
        if self.kind == "alpha":
            return _alpha_derivative(self.epsilon, self.kappa, np.asarray(t, dtype=float))
        return theta_derivative_eval(self.theta_bar, self.kappa, t)

    def complex_eval(self, z):
        if self.kind == "alpha":
            raise NotImplementedError("complex evaluation is only provided for theta_n")
        return theta_complex_eval(self.theta_bar, self.kappa, z)

    @property
    def lipschitz_bound(self):
        return self.theta_bar.slope if self.kind == "theta_n" else 1.0


def initial_kappa(epsilon, n):
    """Smallest kappa with ``sqrt(2) exp(-7 kappa eps**2 / 2) <= eps / 2**(n+2)``."""
    return 2.0 / (7.0 * epsilon ** 2) * np.log(np.sqrt(2.0) * 2.0 ** (n + 2) / epsilon)


def _theta_check_grid(tb, kappa):
    e = tb.epsilon
    reach = 8.0 / np.sqrt(kappa)
    windows = [np.linspace(4 * e - reach, 5 * e + reach, 4001)]
    windows.append(1.0 - windows[0][::-1])
    return np.unique(np.concatenate([np.linspace(-2.0, 3.0, 5001), *windows]))


def theta_n_certificate(tb, kappa, n):
    """Margins of the four conditions on ``theta_n``; positive means satisfied."""
    e = tb.epsilon
    target = e / 2.0 ** (n + 2)
    z = complex_circle(e)
    modulus = np.abs(theta_complex_eval(tb, kappa, z))
    t = _theta_check_grid(tb, kappa)
    val = theta_eval(tb, kappa, t)
    der = theta_derivative_eval(tb, kappa, t)
    # 1 - theta on both sides avoids cancellation at the upper flat
    gap = np.abs(val - tb(t))
    flat = (t <= 2 * e) | (t >= 1 - 2 * e)
    # outside [-2, 3]: |theta_n'| <= slope * erfc(sqrt(kappa) * (2 + 4 eps)) / 2
    tail = 0.5 * tb.slope * special.erfc(np.sqrt(kappa) * (2.0 + 4 * e))
    return {
        "complex_decay": target - float(np.max(modulus)),
        "decay_envelope": decay_envelope(e, kappa) + 1e-12 - float(np.max(modulus)),
        "lipschitz": 1.0 / (1.0 - 10 * e) - float(np.max(np.abs(der))),
        "sup_to_theta_bar": target - float(np.max(gap)),
        "flat_derivative": target - max(float(np.max(np.abs(der[flat]))), tail),
    }


@functools.lru_cache(maxsize=512)
def _select_kappa_cached(epsilon, n):
    tb = build_theta_bar(epsilon)
    kappa = k0 = initial_kappa(epsilon, n)
    for doubling in range(_MAX_DOUBLINGS + 1):
        if 2.0 * epsilon * np.sqrt(kappa) > _MAX_PANELS:
            break
        cert = theta_n_certificate(tb, kappa, n)
        if all(m >= 0 for m in cert.values()):
            cert.update(kappa_initial=k0, doublings=doubling)
            return Mollifier1D("theta_n", epsilon, kappa, n, cert, tb)
        kappa *= 2.0
    failed = [k for k, m in cert.items() if not m >= 0]
    raise CertificationError(
        f"theta_{n} (eps={epsilon}) not certified after {_MAX_DOUBLINGS} doublings: {failed}", failed)


def select_kappa(theta_bar, n):
    """Certified ``theta_n``: start at :func:`initial_kappa`, double until all four conditions hold.

    Conditions, each with ``target = eps / 2**(n + 2)``:

    1. ``|theta_n(z)| <= target`` at 64 points with ``|z| = eps``;
    2. ``Lip(theta_n) <= 1 / (1 - 10 eps)``;
    3. ``sup |theta_n - theta_bar| <= target``;
    4. ``|theta_n'| <= target`` on ``(-inf, 2 eps] U [1 - 2 eps, inf)``.
    """
    n = int(n)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return _select_kappa_cached(float(theta_bar.epsilon), n)


def _alpha(epsilon, kappa, t):
    # E[max(X - 2 eps, 0)] for X ~ N(t, 1 / (2 kappa))
    sd = 1.0 / np.sqrt(2.0 * kappa)
    x = t - 2.0 * epsilon
    u = x / sd
    return x * special.ndtr(u) + sd * np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)


def _alpha_derivative(epsilon, kappa, t):
    return special.ndtr((t - 2.0 * epsilon) * np.sqrt(2.0 * kappa))


def alpha_certificate(epsilon, kappa):
    t_pos = np.linspace(0.0, 10.0, 20001)
    t_all = np.linspace(-10.0, 10.0, 40001)
    a_all = _alpha(epsilon, kappa, t_all)
    der = _alpha_derivative(epsilon, kappa, t_all)
    return {
        # beyond t = 10 the deviation decreases monotonically towards 2 eps
        "near_identity": 3 * epsilon - float(np.max(np.abs(_alpha(epsilon, kappa, t_pos) - t_pos))),
        "lipschitz": 1.0 - float(np.max(np.abs(der))),
        # alpha' is increasing, so t = eps is the worst point of (-inf, eps]
        "flat_derivative": epsilon - float(_alpha_derivative(epsilon, kappa, np.array(epsilon))),
        "bracket": 1e-9 - float(np.max(a_all - np.maximum(t_all, 0.0))),
    }


@functools.lru_cache(maxsize=128)
def _build_alpha_cached(epsilon):
    kappa = 1.0 / epsilon ** 2
    for doubling in range(_MAX_DOUBLINGS + 1):
        cert = alpha_certificate(epsilon, kappa)
        if all(m >= 0 for m in cert.values()):
            cert["doublings"] = doubling
            # printed requirement |alpha'| <= eps up to t = 3 eps is unattainable at t = 3 eps
            cert["derivative_at_3eps"] = float(_alpha_derivative(epsilon, kappa, np.array(3 * epsilon)))
            return Mollifier1D("alpha", epsilon, kappa, 0, cert)
        kappa *= 2.0
    failed = [k for k, m in cert.items() if not m >= 0]
    raise CertificationError(f"alpha (eps={epsilon}) not certified: {failed}", failed)


def build_alpha(epsilon):
    """Smoothed ``max(s - 2 eps, 0)`` with ``|alpha(t) - t| <= 3 eps`` for t >= 0,
    ``0 <= alpha' <= 1`` and ``alpha' <= eps`` on ``(-inf, eps]``.
    """
    _check_epsilon(epsilon)
    return _build_alpha_cached(float(epsilon))


@dataclass(frozen=True)
class SigmaChoice:
    sigma: float
    K: float


def select_sigma(epsilon, K, d):
    """Bandwidth with value error ``(K/2) sigma**2 d <= eps/2`` and gradient error ``K sigma sqrt(d) <= eps/2``."""
    if not (epsilon > 0 and K > 0 and d > 0):
        raise ParameterError(f"select_sigma needs positive inputs, got eps={epsilon}, K={K}, d={d}")
    sigma = min(np.sqrt(epsilon / (K * d)), epsilon / (2.0 * K * np.sqrt(d)))
    return SigmaChoice(float(sigma), float(K))


def gaussian_kernel(sigma, h):
    """Sampled Gaussian on ``|k h| <= 6 sigma`` normalised to unit sum."""
    radius = max(1, int(np.ceil(6.0 * sigma / h)))
    k = np.arange(-radius, radius + 1)
    w = np.exp(-0.5 * (k * h / sigma) ** 2)
    return w / w.sum()


def gaussian_mollify(f, sigma, strict=False):
    """Separable discrete Gaussian smoothing with mirror extension at the faces.

    Whole-sample mirroring composes ``f`` with a 1-Lipschitz folding map, so
    neither adjacent slopes nor central-difference gradient norms can grow.
    ``sigma < h/2`` warns (``strict=True``: raises) because the kernel then
    collapses to the identity.
    """
    if not (np.isfinite(sigma) and sigma > 0):
        raise ParameterError(f"sigma must be positive, got {sigma}")
    coarse = [h for h in f.spacing if sigma < 0.5 * h]
    if coarse:
        msg = f"sigma={sigma:.3g} is below half the grid spacing {max(coarse):.3g}"
        if strict:
            raise ResolutionError(msg)
        warnings.warn(msg, ResolutionWarning, stacklevel=2)
    v = f.values
    for axis, h in enumerate(f.spacing):
        v = ndimage.correlate1d(v, gaussian_kernel(sigma, h), axis=axis, mode="mirror")
    return f.with_values(v)
