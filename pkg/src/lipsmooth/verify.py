"""Certification reports: measured errors and slopes against the stated bounds."""
import csv
import io
import json
from dataclasses import dataclass, field

from .envelopes import RESOLUTION_FACTOR, lasry_lions
from .errors import GridMismatchError
from .grid import estimate_lipschitz, second_difference_bound, sup_distance

CSV_COLUMNS = ("function", "epsilon", "L", "sup_err", "lip_out", "bound_sup", "bound_lip", "pass")


def envelope_stage_record(f, g_ll, params, epsilon):
    """Stage record for a precomputed double envelope ``g_ll = (f_lam)^mu``.

    The value error is measured on the whole grid (grid envelopes obey the
    same one-sided bounds as the continuum ones). Second differences are
    measured on the interior window of width ``lam * L``.
    """
    L = estimate_lipschitz(f)
    K = params.curvature_bound
    h = max(f.spacing)
    sup_err = sup_distance(f, g_ll)
    inner = g_ll.window(params.lam * L)
    curv = second_difference_bound(inner) if all(n >= 3 for n in inner.shape) else 0.0
    curv_tol = RESOLUTION_FACTOR * K * h / params.lam
    return {
        "stage": "envelope",
        "lam": params.lam,
        "mu": params.mu,
        "sup_error": sup_err,
        "bound_sup": epsilon / 2,
        "second_difference": curv,
        "bound_curvature": K,
        "curvature_tolerance": curv_tol,
        "passed": bool(sup_err <= epsilon / 2 and curv <= K + curv_tol),
    }


def verify_envelope_stage(f, params, epsilon):
    """Recompute ``(f_lam)^mu`` and check it against ``eps/2`` and ``max(1/mu, 1/(lam - mu))``."""
    return envelope_stage_record(f, lasry_lions(f, params), params, epsilon)


@dataclass(frozen=True)
class CertReport:
    """Measured final contract of one smoothing run.

    ``passed`` applies the estimator tolerance ``lip_tolerance``;
    ``passed_strict`` requires ``lip_output_measured <= bound_lip`` exactly.
    """

    function_name: str
    epsilon: float
    L_measured: float
    sup_error_measured: float
    lip_output_measured: float
    bound_sup: float
    bound_lip: float
    interior_margin: float
    lip_tolerance: float
    stages: list = field(default_factory=list)
    passed: bool = False
    passed_strict: bool = False

    def to_dict(self):
        return {
            "function_name": self.function_name,
            "epsilon": self.epsilon,
            "L_measured": self.L_measured,
            "sup_error_measured": self.sup_error_measured,
            "lip_output_measured": self.lip_output_measured,
            "bound_sup": self.bound_sup,
            "bound_lip": self.bound_lip,
            "interior_margin": self.interior_margin,
            "lip_tolerance": self.lip_tolerance,
            "stages": self.stages,
            "pass": self.passed,
            "pass_strict": self.passed_strict,
        }

    def to_json(self):
        # json writes floats with repr, the shortest round-tripping decimal
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    def csv_row(self):
        return (self.function_name, repr(self.epsilon), repr(self.L_measured),
                repr(self.sup_error_measured), repr(self.lip_output_measured),
                repr(self.bound_sup), repr(self.bound_lip), "true" if self.passed else "false")


def verify_theorem1(f, result, epsilon, name="f"):
    """Check ``|f - g| <= eps`` and ``Lip(g) <= Lip(f) + eps`` on the interior window.

    The report fails if any stage record of ``result`` failed.
    """
    g = result.g
    if not f.same_grid(g):
        raise GridMismatchError(f"f has shape {f.shape} on {f.box}, g has shape {g.shape} on {g.box}")
    L = estimate_lipschitz(f)
    trim = float(result.params.trim)
    fw, gw = f.window(trim), g.window(trim)
    sup_err = sup_distance(fw, gw)
    lip_out = estimate_lipschitz(gw)
    K = result.params.curvature_bound or 0.0
    tol = RESOLUTION_FACTOR * K * max(f.spacing)
    stages = [_plain(s) for s in result.provenance.get("stages", [])]
    stages_ok = all(s["passed"] for s in stages)
    bound_lip = L + epsilon
    return CertReport(
        function_name=name,
        epsilon=float(epsilon),
        L_measured=L,
        sup_error_measured=sup_err,
        lip_output_measured=lip_out,
        bound_sup=float(epsilon),
        bound_lip=bound_lip,
        interior_margin=trim,
        lip_tolerance=tol,
        stages=stages,
        passed=bool(stages_ok and sup_err <= epsilon and lip_out <= bound_lip + tol),
        passed_strict=bool(stages_ok and sup_err <= epsilon and lip_out <= bound_lip),
    )


def _plain(record):
    return {k: (bool(v) if isinstance(v, bool) else v if isinstance(v, str) else float(v))
            for k, v in record.items()}


def reports_json(reports):
    return json.dumps([r.to_dict() for r in reports], indent=2, allow_nan=False) + "\n"


def summary_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()
