"""Command-line runner: sample corpus functions, smooth, verify, write reports.

Config files are flat ``key = value`` text. ``#`` starts a comment, blank
lines are ignored, list values are comma separated. Keys:

    corpus   = all | name[, name ...]     (default all)
    d        = 1 | 2 | 3                  (default 1)
    lower    = float[, float ...]         (default -1, repeated over axes)
    upper    = float[, float ...]         (default 1)
    shape    = int[, int ...]             (default 4096, repeated over axes)
    epsilon  = float[, float ...]         (default 0.05, 0.1)
    seed     = int                        (default 0)
    strict   = true | false               (default false)
    out      = directory                  (default lipsmooth_out)
    max_nodes = int                       (default 20000000)

Exit status: 0 when every report passes, 1 when some report fails, 2 for an
invalid config, 3 when a grid is too coarse (the message names the shape).
"""
import argparse
import os
import sys
from dataclasses import dataclass

from . import corpus as corpus_mod
from .envelopes import EnvelopeParams, lasry_lions, moreau_inf
from .errors import LipSmoothError, ParameterError, ResolutionError
from .grid import Box, estimate_lipschitz, sample
from .io import format_columns, format_matrix, write_grid
from .pipeline import DEFAULT_MAX_NODES, MAX_INNER_EPSILON, inner_epsilon, smooth
from .verify import reports_json, summary_csv, verify_theorem1

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOLUTION = 0, 1, 2, 3


class ConfigError(ParameterError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"config field {field!r}: {message}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    corpus: tuple = ("all",)
    d: int = 1
    lower: tuple = (-1.0,)
    upper: tuple = (1.0,)
    shape: tuple = (4096,)
    epsilon: tuple = (0.05, 0.1)
    out: str = "lipsmooth_out"
    strict: bool = False
    seed: int = 0
    max_nodes: int = DEFAULT_MAX_NODES

    @property
    def box(self):
        return Box(_per_axis(self.lower, self.d), _per_axis(self.upper, self.d))

    @property
    def grid_shape(self):
        return tuple(int(n) for n in _per_axis(self.shape, self.d))


def _per_axis(values, d):
    return tuple(values) * d if len(values) == 1 else tuple(values)


def _split(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def _parse_value(key, raw):
    try:
        if key == "corpus":
            return tuple(_split(raw))
        if key in ("d", "seed", "max_nodes"):
            return int(raw)
        if key in ("lower", "upper", "epsilon"):
            return tuple(float(v) for v in _split(raw))
        if key == "shape":
            return tuple(int(v) for v in _split(raw))
        if key == "strict":
            if raw.lower() not in ("true", "false"):
                raise ValueError("expected true or false")
            return raw.lower() == "true"
        if key == "out":
            return raw
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {raw!r}: {exc}") from exc
    raise ConfigError(key, "unknown key")


def parse_config(text):
    """Parse flat ``key = value`` text into a validated :class:`RunConfig`."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        values[key] = _parse_value(key, raw)
    return validate(RunConfig(**values))


def validate(cfg):
    if not 1 <= cfg.d <= 3:
        raise ConfigError("d", f"dimension must be 1, 2 or 3, got {cfg.d}")
    for key in ("lower", "upper", "shape"):
        n = len(getattr(cfg, key))
        if n not in (1, cfg.d):
            raise ConfigError(key, f"needs 1 or {cfg.d} entries, got {n}")
    if any(n < 2 for n in cfg.grid_shape):
        raise ConfigError("shape", "every axis needs at least 2 points")
    try:
        cfg.box
    except ParameterError as exc:
        raise ConfigError("lower/upper", str(exc)) from exc
    if not cfg.epsilon:
        raise ConfigError("epsilon", "at least one value is required")
    for eps in cfg.epsilon:
        if not (0 < eps < 1):
            raise ConfigError("epsilon", f"values must lie in (0, 1), got {eps}")
    if cfg.max_nodes < 2:
        raise ConfigError("max_nodes", "must be at least 2")
    try:
        members = corpus_mod.select(cfg.corpus, cfg.d, cfg.seed)
    except ParameterError as exc:
        raise ConfigError("corpus", str(exc)) from exc
    # the inner budget sqrt(1 + eps/L) - 1 must stay below 1/16 for every member
    for o in members:
        for eps in cfg.epsilon:
            e = inner_epsilon(eps, o.lip_declared)
            if e >= MAX_INNER_EPSILON:
                raise ConfigError(
                    "epsilon",
                    f"epsilon={eps} with {o.name} (L={o.lip_declared:g}) gives inner budget "
                    f"{e:.4g} >= 1/16; use epsilon < {0.12890625 * o.lip_declared:.4g}")
    return cfg


def _tag(name, eps):
    return f"{name}_eps{eps!r}"


def _plot_data(f, result):
    """1-d: table of x, f, f_lam, g_lam_mu, g; 2-d and 3-d: one matrix per quantity."""
    p = result.params
    if p.lam is None:
        f_lam = g_ll = f
    else:
        env = EnvelopeParams(p.lam, p.mu)
        f_lam, g_ll = moreau_inf(f, env.lam), lasry_lions(f, env)
    if f.d == 1:
        cols = (f.axes()[0], f.values, f_lam.values, g_ll.values, result.g.values)
        return {"plot.dat": format_columns(cols, ("x", "f", "f_lam", "g_lam_mu", "g"))}
    out = {}
    for key, grid in (("f", f), ("f_lam", f_lam), ("g_lam_mu", g_ll), ("g", result.g)):
        # 3-d grids are flattened to (n0, n1 * n2)
        out[f"plot_{key}.dat"] = format_matrix(grid.values.reshape(grid.shape[0], -1))
    return out


def run(cfg, stream=None):
    """Execute a validated config; returns the exit status."""
    stream = stream or sys.stdout
    os.makedirs(cfg.out, exist_ok=True)
    reports = []
    for oracle in corpus_mod.select(cfg.corpus, cfg.d, cfg.seed):
        f = sample(oracle, cfg.box, cfg.grid_shape)
        L = estimate_lipschitz(f)
        if L > oracle.lip_declared + 1e-9:
            print(f"warning: {oracle.name} grid estimate {L!r} exceeds declared {oracle.lip_declared!r}",
                  file=stream)
        for eps in cfg.epsilon:
            try:
                result = smooth(f, eps, max_nodes=cfg.max_nodes, strict=cfg.strict)
            except ResolutionError as exc:
                shape = "x".join(str(n) for n in exc.required_shape or ())
                print(f"error: {oracle.name}, epsilon={eps}: {exc}", file=stream)
                print(f"hint: the run needs a grid of shape {shape}; raise max_nodes or "
                      f"lower the dimension", file=stream)
                return EXIT_RESOLUTION
            report = verify_theorem1(f, result, eps, name=oracle.name)
            reports.append(report)
            tag = _tag(oracle.name, eps)
            write_grid(os.path.join(cfg.out, f"{tag}_input.grid"), f)
            write_grid(os.path.join(cfg.out, f"{tag}_output.grid"), result.g)
            for suffix, text in _plot_data(f, result).items():
                with open(os.path.join(cfg.out, f"{tag}_{suffix}"), "w", newline="\n") as fh:
                    fh.write(text)
            print(f"{'PASS' if report.passed else 'FAIL'} {oracle.name} eps={eps} "
                  f"sup_err={report.sup_error_measured:.3e} lip_out={report.lip_output_measured:.6f} "
                  f"bound_lip={report.bound_lip:.6f}", file=stream)
    with open(os.path.join(cfg.out, "report.json"), "w", newline="\n") as fh:
        fh.write(reports_json(reports))
    with open(os.path.join(cfg.out, "summary.csv"), "w", newline="\n") as fh:
        fh.write(summary_csv(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="lipsmooth",
        description="Smooth Lipschitz test functions and certify |f - g| <= eps, Lip(g) <= Lip(f) + eps.")
    parser.add_argument("--config", metavar="PATH", help="flat key = value config file")
    parser.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    parser.add_argument("--strict", action="store_true",
                        help="refuse to resample grids that are too coarse")
    parser.add_argument("--list-corpus", action="store_true", help="list corpus members and exit")
    args = parser.parse_args(argv)
    try:
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        else:
            cfg = validate(RunConfig())
        if args.out or args.strict:
            cfg = validate(RunConfig(**{**cfg.__dict__, **({"out": args.out} if args.out else {}),
                                        **({"strict": True} if args.strict else {})}))
    except (OSError, LipSmoothError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.list_corpus:
        for o in corpus_mod.corpus(cfg.d, cfg.seed):
            sign = "nonnegative" if o.nonnegative else "signed"
            print(f"{o.name}\tL={o.lip_declared:g}\t{sign}")
        return EXIT_OK
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
