"""Assembly of the smoothing construction on sampled functions.

``smooth`` is the entry point. It rescales an L-Lipschitz ``f`` to a
1-Lipschitz ``F``, splits ``F`` into positive and negative parts, cuts each
part into unit slices, smooths every slice with the Lasry-Lions envelope
followed by a Gaussian, glues the smoothed slices with the transition maps
``theta_n`` and recombines the parts through ``alpha``.
"""
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .envelopes import RESOLUTION_FACTOR, check_resolution, lasry_lions, select_lambda
from .errors import DomainError, ParameterError, ResolutionError
from .grid import GridFunction, estimate_lipschitz, pair_lipschitz, refine, subsample, sup_distance
from .mollifiers import (
    ResolutionWarning,
    build_alpha,
    build_theta_bar,
    gaussian_mollify,
    select_kappa,
    select_sigma,
)
from .verify import envelope_stage_record

# slack on the 1-Lipschitz preconditions, absorbing estimator rounding
LIP_SLACK = 1e-9
# inner budgets must stay below this for the transition maps to exist
MAX_INNER_EPSILON = 1.0 / 16.0
DEFAULT_MAX_NODES = 20_000_000


@dataclass(frozen=True)
class SmoothingParams:
    """Every numeric parameter used to produce a :class:`SmoothResult`.

    Scales (``lam``, ``mu``, ``sigma``) are in the units of the input grid.
    ``curvature_bound`` bounds the second derivative of the smooth output and
    sets the Lipschitz estimator tolerance; ``trim`` is the interior margin
    used when verifying.
    """

    epsilon: float
    L: float
    lam: float = None
    mu: float = None
    sigma: float = None
    kappas: tuple = ()
    alpha_kappa: float = None
    curvature_bound: float = None
    trim: float = 0.0

    def to_dict(self):
        d = asdict(self)
        d["kappas"] = list(self.kappas)
        return d


@dataclass(frozen=True, eq=False)
class SmoothResult:
    """Smoothed grid ``g`` with its parameters and provenance.

    ``provenance["path"]`` is one of ``constant``, ``bounded``, ``nonneg``,
    ``sign-split`` or ``scaled``; ``provenance["stages"]`` lists the stage
    records checked during the run. ``stages`` keeps intermediate grids for
    inspection and is never serialized.
    """

    g: GridFunction
    params: SmoothingParams
    provenance: dict
    stages: dict = field(default_factory=dict, repr=False)


@dataclass(frozen=True, eq=False)
class SliceSet:
    slices: list
    N: int
    epsilon: float


def _check_epsilon(epsilon, upper=None):
    if not (np.isfinite(epsilon) and epsilon > 0 and (upper is None or epsilon < upper)):
        bound = f"(0, {upper:g})" if upper is not None else "(0, inf)"
        raise ParameterError(f"epsilon must lie in {bound}, got {epsilon}")


def _require_nonneg(f, what):
    low = float(np.min(f.values))
    if low < 0:
        raise DomainError(f"{what} needs f >= 0, found {low:.6g}; sign-split first")


def _require_unit_lipschitz(f, what):
    # adjacent slopes are true difference quotients, so a violation here is a
    # proof; the gradient estimator can overshoot at oblique kinks in d >= 2
    slope = pair_lipschitz(f)
    if slope > 1 + LIP_SLACK:
        raise DomainError(f"{what} needs a 1-Lipschitz input, found slope {slope:.12g}")
    return estimate_lipschitz(f)


def slice(f, n):  # noqa: A001  (mirrors the mathematical name)
    """Unit slice ``f_n = clip(f - (n - 1), 0, 1)``."""
    if int(n) != n or n < 1:
        raise ParameterError(f"slice index must be an integer >= 1, got {n}")
    _require_nonneg(f, "slice")
    return f.with_values(np.clip(f.values - (n - 1), 0.0, 1.0))


def slice_count(f):
    return max(1, int(math.ceil(float(np.max(f.values)))))


def slice_set(f, epsilon):
    N = slice_count(f)
    return SliceSet([slice(f, n) for n in range(1, N + 1)], N, float(epsilon))


def smooth_bounded(f, epsilon, M):
    """Lasry-Lions envelope then Gaussian mollification of ``f`` valued in ``[0, M]``.

    The envelope takes ``epsilon/2`` of the value budget; the Gaussian takes
    the rest of the value budget and ``epsilon`` of slope.
    """
    _check_epsilon(epsilon)
    lo, hi = float(np.min(f.values)), float(np.max(f.values))
    if lo < 0 or hi > M:
        raise DomainError(f"smooth_bounded needs values in [0, {M}], found [{lo:.6g}, {hi:.6g}]")
    L = estimate_lipschitz(f)
    if L == 0:
        params = SmoothingParams(float(epsilon), 0.0, curvature_bound=0.0)
        record = {"stage": "bounded", "passed": True, "sup_error": 0.0, "lip_output": 0.0,
                  "bound_sup": float(epsilon), "bound_lip": float(epsilon)}
        return SmoothResult(f, params, {"path": "bounded", "stages": [record]})
    env = select_lambda(epsilon, L)
    check_resolution(f, env.lam)
    g_ll = lasry_lions(f, env)
    K = env.curvature_bound
    sigma = select_sigma(epsilon, K, f.d).sigma
    with warnings.catch_warnings():
        # sigma below h/2 is the normal regime under the h <= lam/10 guard
        warnings.simplefilter("ignore", ResolutionWarning)
        g = gaussian_mollify(g_ll, sigma)
    envelope = envelope_stage_record(f, g_ll, env, epsilon)
    sup_err = sup_distance(f, g)
    lip_out = estimate_lipschitz(g)
    tol = RESOLUTION_FACTOR * K * max(f.spacing)
    record = {
        "stage": "bounded",
        "sup_error": sup_err,
        "lip_output": lip_out,
        "bound_sup": float(epsilon),
        "bound_lip": L + epsilon,
        "lip_tolerance": tol,
        "sigma_over_h": sigma / max(f.spacing),
        "passed": bool(envelope["passed"] and sup_err <= epsilon and lip_out <= L + epsilon + tol),
    }
    params = SmoothingParams(float(epsilon), L, env.lam, env.mu, sigma, curvature_bound=K,
                             trim=env.lam * L)
    return SmoothResult(g, params, {"path": "bounded", "stages": [envelope, record]},
                        {"envelope": g_ll})


def compose_slices(smoothed, thetas, epsilon):
    """``g = sum_n theta_n(g_n)`` nodewise; the omitted tail is at most ``eps / 2**(N+2)``."""
    if len(smoothed) != len(thetas):
        raise ParameterError(f"{len(smoothed)} smoothed slices but {len(thetas)} transition maps")
    if not smoothed:
        raise ParameterError("compose_slices needs at least one slice")
    total = np.zeros(smoothed[0].shape)
    for g_n, theta in zip(smoothed, thetas):
        if not g_n.same_grid(smoothed[0]):
            raise ParameterError("smoothed slices live on different grids")
        total += theta(g_n.values)
    return smoothed[0].with_values(total)


def tail_bound(epsilon, N):
    return epsilon / 2.0 ** (N + 2)


def smooth_nonneg(f, epsilon):
    """Smoothing of a nonnegative 1-Lipschitz grid function.

    Ledger bounds: ``|f - g| <= 8 eps`` and ``Lip(g) <= (1 + 3 eps)/(1 - 10 eps)``.
    """
    _check_epsilon(epsilon, MAX_INNER_EPSILON)
    _require_nonneg(f, "smooth_nonneg")
    L = _require_unit_lipschitz(f, "smooth_nonneg")
    slices = slice_set(f, epsilon)
    theta_bar = build_theta_bar(epsilon)
    smoothed, thetas, records = [], [], []
    lam = sigma = None
    K_slice = 0.0
    for n, f_n in enumerate(slices.slices, start=1):
        r = smooth_bounded(f_n, epsilon / 2, 1.0)
        sup_err = r.provenance["stages"][-1]["sup_error"]
        lip_out = r.provenance["stages"][-1]["lip_output"]
        tol = RESOLUTION_FACTOR * (r.params.curvature_bound or 0.0) * max(f.spacing)
        records.extend(r.provenance["stages"][:-1])
        records.append({
            "stage": f"slice_{n}",
            "sup_error": sup_err,
            "lip_output": lip_out,
            "bound_sup": epsilon / 2,
            "bound_lip": 1 + epsilon,
            "lip_tolerance": tol,
            "passed": bool(r.provenance["stages"][-1]["passed"] and sup_err <= epsilon / 2
                           and lip_out <= 1 + epsilon + tol),
        })
        smoothed.append(r.g)
        thetas.append(select_kappa(theta_bar, n))
        if r.params.lam is not None and (lam is None or r.params.lam < lam):
            lam, sigma = r.params.lam, r.params.sigma
        K_slice = max(K_slice, r.params.curvature_bound)
    g = compose_slices(smoothed, thetas, epsilon)
    sup_err = sup_distance(f, g)
    lip_out = estimate_lipschitz(g)
    bound_lip = (1 + 3 * epsilon) / (1 - 10 * epsilon)
    K = theta_bar.second_derivative_bound * (1 + epsilon) ** 2 + theta_bar.slope * K_slice
    tol = RESOLUTION_FACTOR * K * max(f.spacing)
    records.append({
        "stage": "nonneg",
        "sup_error": sup_err,
        "lip_output": lip_out,
        "bound_sup": 8 * epsilon,
        "bound_lip": bound_lip,
        "lip_tolerance": tol,
        "passed": bool(sup_err <= 8 * epsilon and lip_out <= bound_lip + tol),
    })
    params = SmoothingParams(
        float(epsilon), L, lam, None if lam is None else lam / 2, sigma,
        tuple(t.kappa for t in thetas), curvature_bound=K, trim=0.0 if lam is None else lam * L)
    provenance = {"path": "nonneg", "N": slices.N, "tail_bound": tail_bound(epsilon, slices.N),
                  "stages": records}
    stages = {"slices": slices.slices, "smoothed": smoothed, "thetas": thetas,
              "theta_bar": theta_bar}
    return SmoothResult(g, params, provenance, stages)


def sign_split_epsilon(epsilon):
    """Budget for each half so that both halves meet their ``epsilon``-grade targets.

    With ``s = eps / (13 + 10 eps)``: ``8 s <= eps`` and ``(1 + 3 s)/(1 - 10 s) <= 1 + eps``.
    """
    return epsilon / (13.0 + 10.0 * epsilon)


def sign_split_smooth(f, epsilon):
    """``g = alpha(g+) - alpha(g-)`` with ``g+-`` smoothing ``max(+-f, 0)``.

    Ledger bounds: ``|f - g| <= 8 eps`` and ``Lip(g) <= (1 + eps)**2``.
    """
    _check_epsilon(epsilon, MAX_INNER_EPSILON)
    L = _require_unit_lipschitz(f, "sign_split_smooth")
    s = sign_split_epsilon(epsilon)
    pos = smooth_nonneg(f.with_values(np.maximum(f.values, 0.0)), s)
    neg = smooth_nonneg(f.with_values(np.maximum(-f.values, 0.0)), s)
    alpha = build_alpha(epsilon)
    g = f.with_values(alpha(pos.g.values) - alpha(neg.g.values))
    records = []
    for name, part in (("positive", pos), ("negative", neg)):
        for rec in part.provenance["stages"]:
            records.append({**rec, "stage": f"{name}/{rec['stage']}"})
    for name, part in (("positive", pos), ("negative", neg)):
        src = f.with_values(np.maximum(f.values if name == "positive" else -f.values, 0.0))
        err = sup_distance(src, part.g)
        records.append({"stage": f"{name}_part", "sup_error": err, "bound_sup": float(epsilon),
                        "passed": bool(err <= epsilon)})
    sup_err = sup_distance(f, g)
    lip_out = estimate_lipschitz(g)
    bound_lip = (1 + epsilon) ** 2
    alpha_curv = math.sqrt(alpha.kappa / math.pi)
    K = alpha_curv * 2 * (1 + epsilon) ** 2 + pos.params.curvature_bound + neg.params.curvature_bound
    tol = RESOLUTION_FACTOR * K * max(f.spacing)
    records.append({
        "stage": "sign-split",
        "sup_error": sup_err,
        "lip_output": lip_out,
        "bound_sup": 8 * epsilon,
        "bound_lip": bound_lip,
        "lip_tolerance": tol,
        "passed": bool(sup_err <= 8 * epsilon and lip_out <= bound_lip + tol),
    })
    p = pos.params
    params = SmoothingParams(float(epsilon), L, p.lam, p.mu, p.sigma,
                             tuple(sorted(set(p.kappas) | set(neg.params.kappas))),
                             alpha.kappa, K, p.trim)
    provenance = {"path": "sign-split", "inner_epsilon": s,
                  "N": [pos.provenance["N"], neg.provenance["N"]], "stages": records}
    stages = {"positive": pos, "negative": neg, "alpha": alpha}
    return SmoothResult(g, params, provenance, stages)


def inner_epsilon(epsilon, L):
    """Sign-split budget ``e`` for an L-Lipschitz input and target ``epsilon``.

    Running the sign split at ``e`` on ``F = f(c y / L) / c`` gives
    ``|f - g| <= 8 e c`` and ``Lip(g) <= (1 + e)**2 L``. Choosing
    ``e = sqrt(1 + eps/L) - 1`` makes the slope bound exactly ``L + eps``;
    ``c = eps / (8 e)`` then makes the value bound exactly ``eps``.
    """
    return math.sqrt(1.0 + epsilon / L) - 1.0


def smooth(f, epsilon, max_nodes=DEFAULT_MAX_NODES, strict=False):
    """Smooth ``f`` to ``g`` with ``|f - g| <= eps`` and ``Lip(g) <= Lip(f) + eps``.

    The input is resampled piecewise linearly onto a finer grid when needed
    to satisfy the envelope resolution guard (``strict=True`` forbids this).
    Raises :class:`ResolutionError` with the required shape when the needed
    grid exceeds ``max_nodes``.
    """
    _check_epsilon(epsilon)
    L = estimate_lipschitz(f)
    if L == 0:
        params = SmoothingParams(float(epsilon), 0.0, curvature_bound=0.0)
        return SmoothResult(f, params, {"path": "constant", "stages": []})
    e = inner_epsilon(epsilon, L)
    if e >= MAX_INNER_EPSILON:
        raise ParameterError(
            f"epsilon={epsilon} is too large for Lip(f)={L:.6g}: the inner budget "
            f"sqrt(1 + eps/L) - 1 = {e:.6g} must stay below 1/16 (need eps < {0.12890625 * L:.6g})")
    c = epsilon / (8.0 * e)
    s = sign_split_epsilon(e)
    lam_unit = select_lambda(s / 2, 1.0).lam
    # largest admissible spacing in input units, with a hair of margin for rounding
    h_max = lam_unit / RESOLUTION_FACTOR * c / L * (1 - 1e-9)
    factors = tuple(max(1, math.ceil(h / h_max)) for h in f.spacing)
    fine_shape = tuple((n - 1) * r + 1 for n, r in zip(f.shape, factors))
    if (strict and any(r > 1 for r in factors)) or math.prod(fine_shape) > max_nodes:
        reason = "strict mode forbids resampling" if strict else f"exceeds max_nodes={max_nodes}"
        raise ResolutionError(
            f"epsilon={epsilon} with Lip(f)={L:.6g} needs grid spacing <= {h_max:.6g}, "
            f"i.e. shape {fine_shape}; {reason}",
            required_shape=fine_shape,
        )
    f_fine = refine(f, factors)
    L_fine = max(L, estimate_lipschitz(f_fine))
    F = GridFunction(f.box.scaled(L_fine / c), f_fine.values / c)
    G = sign_split_smooth(F, e)
    g = subsample(f_fine.with_values(c * G.g.values), factors)
    to_length = c / L_fine
    p = G.params
    lam = None if p.lam is None else p.lam * c / L_fine ** 2
    params = SmoothingParams(
        float(epsilon), L,
        lam,
        None if lam is None else lam / 2,
        None if p.sigma is None else p.sigma * to_length,
        p.kappas, p.alpha_kappa,
        p.curvature_bound * L_fine ** 2 / c,
        0.0 if lam is None else lam * L,
    )
    provenance = {
        "path": "scaled",
        "inner_epsilon": e,
        "nonneg_epsilon": s,
        "scale": c,
        "refine": list(factors),
        "fine_shape": list(fine_shape),
        "N": G.provenance["N"],
        "stages": G.provenance["stages"],
    }
    return SmoothResult(g, params, provenance, {"unit": G, "fine_input": f_fine})
