"""Command-line entry point: ``colombeau-lab <subcommand> [options]``.

Every option can also come from a TOML file (``--config run.toml``); flags
given on the command line win over the file, the file wins over
:data:`DEFAULTS`.  Reports are JSON with the resolved config embedded;
tables are CSV whose first line is a ``# schema: ...`` tag.  Outputs are
written once, atomically.

Exit codes: 0 success / pass, 1 a test verdict failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from . import classification as cls_
from . import counterexamples as ce
from . import embedding as emb
from . import numerics, testing
from . import testobjects as to
from .exceptions import (
    ConstructionFailure,
    DomainError,
    InvalidArgument,
    PreconditionViolation,
    TruncationFailure,
)

SCHEMA_PREFIX = "colombeau-lab"
SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- config


@dataclass(frozen=True)
class RunConfig:
    """Every tunable of every subcommand, with its default.

    Grid specs are kept as text so the embedded config shows exactly what
    was asked for.
    """

    subcommand: str = ""
    action: str = ""
    eps_grid: str = "0.0625,0.5,11"  # eps0,ratio,count
    t_grid: str = "0.001,1,300"  # lo,hi,count (geometric)
    q: int = 4
    q_range: str = "0..6"
    K: str = "-1,1"
    n: int = 3
    n_max: int = testing.DEFAULT_N_MAX
    alpha_max: int = 1
    x_samples: int = 9
    radius: float = 1.0
    generic: bool = True
    family_q_max: int = 6
    per_q: int = 1
    jitter: float = 0.1
    seed: int = 0
    order_tolerance: float = testing.ORDER_TOLERANCE
    moment_tol: float = 1e-8
    floor: float = numerics.HP_FLOOR
    tail_tol: float = 1e-30
    k_max_hard: int = 60
    witness_k_max_hard: int = ce.WITNESS_CFG.k_max_hard
    sigma: str = "bump"
    rep: str = "iota-sigma:sin"
    f: str = "sin"
    f1: str = "sin"
    f2: str = "cos"
    in_path: str = ""
    eval_path: str = ""
    grid: int = 201
    hom: str = ""
    out: str = ""
    csv: str = ""

    # --- parsed views (validated in validate()) ---

    @property
    def eps_values(self) -> list[float]:
        eps0, ratio, count = _triple(self.eps_grid, "eps-grid")
        if not (eps0 > 0 and 0 < ratio < 1 and count >= 2):
            raise UsageError("eps-grid needs eps0 > 0, 0 < ratio < 1, count >= 2")
        return numerics.geometric_grid(eps0, ratio, int(count))

    @property
    def t_values(self) -> list[float]:
        lo, hi, count = _triple(self.t_grid, "t-grid")
        if not (0 < lo < hi <= 1 and count >= 2):
            raise UsageError("t-grid needs 0 < lo < hi <= 1 and count >= 2")
        ratio = (lo / hi) ** (1 / (int(count) - 1))
        return numerics.geometric_grid(hi, ratio, int(count))

    @property
    def K_interval(self) -> tuple[float, float]:
        try:
            a, b = (float(v) for v in self.K.split(","))
        except ValueError:
            raise UsageError(f"K must look like 'a,b', got {self.K!r}") from None
        if not a <= b:
            raise UsageError("K needs a <= b")
        return a, b

    @property
    def q_bounds(self) -> tuple[int, int]:
        try:
            lo, hi = (int(v) for v in self.q_range.split(".."))
        except ValueError:
            raise UsageError(f"q-range must look like 'a..b', got {self.q_range!r}") from None
        if not 0 <= lo <= hi <= to.MAX_Q:
            raise UsageError(f"q-range needs 0 <= a <= b <= {to.MAX_Q}")
        return lo, hi

    def validate(self) -> "RunConfig":
        positive = ("radius", "order_tolerance", "moment_tol", "floor", "tail_tol", "jitter")
        for name in positive:
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        for name in ("x_samples", "grid", "per_q"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be >= 1")
        for name in ("q", "n", "n_max", "alpha_max", "family_q_max", "seed"):
            if getattr(self, name) < 0:
                raise UsageError(f"{name} must be >= 0")
        if self.q > to.MAX_Q or self.family_q_max > to.MAX_Q:
            raise UsageError(f"q must be <= {to.MAX_Q}")
        if self.k_max_hard < 2 or self.witness_k_max_hard < 2:
            raise UsageError("k-max-hard must be >= 2")
        if self.sigma not in SIGMAS:
            raise UsageError(f"sigma must be one of {sorted(SIGMAS)}")
        # touch the parsed views so malformed specs fail before any work
        self.eps_values, self.K_interval, self.q_bounds, self.t_values
        return self

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULTS = RunConfig()
_FIELDS = {f.name: f for f in fields(RunConfig)}
SIGMAS = {"bump": ce.bump_sigma, "smoothstep": ce.smoothstep_sigma}


def _triple(text: str, what: str) -> tuple[float, float, float]:
    try:
        a, b, c = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{what} must look like 'a,b,count', got {text!r}") from None
    if c != int(c):
        raise UsageError(f"{what} count must be an integer")
    return a, b, c


def load_config_file(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"bad TOML in {path}: {exc}") from None
    flat: dict[str, Any] = {}
    for key, value in data.items():
        # allow one level of [section] tables
        items = value.items() if isinstance(value, dict) else [(key, value)]
        for k, v in items:
            k = k.replace("-", "_")
            if k not in _FIELDS or k in ("subcommand", "action"):
                raise UsageError(f"unknown config key {k!r} in {path}")
            flat[k] = v
    return flat


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for name in _FIELDS:
        if name in vars(args):
            values[name] = getattr(args, name)
    values["subcommand"] = args.subcommand
    values["action"] = getattr(args, "action", "") or ""
    for name, v in list(values.items()):
        typ = type(getattr(DEFAULTS, name))
        if typ is bool and not isinstance(v, bool):
            raise UsageError(f"{name} must be true or false")
        if typ is int and isinstance(v, float) and not v.is_integer():
            raise UsageError(f"{name} must be an integer")
        try:
            values[name] = typ(v)
        except (TypeError, ValueError):
            raise UsageError(f"{name}: cannot interpret {v!r} as {typ.__name__}") from None
    return RunConfig(**values).validate()


# ---------------------------------------------------------------- output


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def atomic_write(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text: str, path: str) -> None:
    if path:
        atomic_write(path, text)
    else:
        sys.stdout.write(text)


def report(cfg: RunConfig, payload: dict) -> None:
    doc = {"schema": f"{SCHEMA_PREFIX}/{cfg.subcommand}/v{SCHEMA_VERSION}", "config": cfg.to_dict(), **payload}
    emit(json.dumps(_jsonable(doc), indent=2, sort_keys=True, allow_nan=False) + "\n", cfg.out)


def table(cfg: RunConfig, name: str, header: Sequence[str], rows, path: str | None = None) -> None:
    """CSV with a schema-tag line; goes to --csv (or ``path``) if set."""
    path = cfg.csv if path is None else path
    if not path:
        return
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA_PREFIX}/{name}/v{SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    atomic_write(path, buf.getvalue())


def read_samples(path: str) -> list[tuple[float, float]]:
    """epsilon,value rows; '#' lines are skipped."""
    try:
        with open(path, newline="") as fh:
            lines = [ln for ln in fh if not ln.lstrip().startswith("#")]
    except FileNotFoundError:
        raise UsageError(f"input file not found: {path}") from None
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or not {"epsilon", "value"} <= set(reader.fieldnames):
        raise UsageError(f"{path}: need columns epsilon,value")
    try:
        return [(float(r["epsilon"]), float(r["value"])) for r in reader]
    except (TypeError, ValueError):
        raise UsageError(f"{path}: non-numeric epsilon/value entry") from None


# ------------------------------------------------------------ helpers


def _mollifier(cfg: RunConfig, q: int | None = None) -> to.TestFunction:
    q = cfg.q if q is None else q
    return to.make_Aq_generic(q, cfg.radius) if cfg.generic else to.make_Aq(q, cfg.radius)


def _family(cfg: RunConfig) -> to.BoundedFamily:
    return to.make_family(cfg.family_q_max, cfg.radius, cfg.per_q, cfg.seed, cfg.jitter)


def _series_cfg(cfg: RunConfig) -> ce.SeriesEvalConfig:
    return ce.SeriesEvalConfig(cfg.tail_tol, cfg.k_max_hard)


def representative(name: str, cfg: RunConfig) -> testing.Representative:
    """Representatives addressable by name on the command line.

    ``iota-sigma:F``, ``iota:F``, ``sigma:F``, ``product:F1,F2``, ``delta``,
    ``P``, ``Q``, ``zero``; F as accepted by :func:`embedding.named_function`.
    """
    kind, _, arg = name.partition(":")
    if kind == "iota-sigma" and arg:
        f = emb.named_function(arg)
        return emb.embed_smooth(f) - emb.const_embed(f)
    if kind == "iota" and arg:
        return emb.embed_smooth(emb.named_function(arg))
    if kind == "sigma" and arg:
        return emb.const_embed(emb.named_function(arg))
    if kind == "product" and arg:
        a, _, b = arg.partition(",")
        f1, f2 = emb.named_function(a), emb.named_function(b)
        return emb.embed_smooth(f1) * emb.embed_smooth(f2) - emb.embed_smooth(emb.product(f1, f2))
    if name == "delta":
        return emb.embed_delta()
    if name in ("P", "Q"):
        return ce.as_representative(name, _series_cfg(cfg))
    if name == "zero":
        return testing.ZERO
    raise UsageError(f"unknown representative {name!r}")


def _order_verdict(est: numerics.OrderEstimate, target: float, tol: float) -> bool:
    return est.saturated or est.exponent >= target - tol


# ------------------------------------------------------------ commands


def cmd_mollifier(cfg: RunConfig) -> int:
    if cfg.eval_path:
        try:
            phi = to.TestFunction.from_json(Path(cfg.eval_path).read_text())
        except FileNotFoundError:
            raise UsageError(f"mollifier file not found: {cfg.eval_path}") from None
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"cannot read mollifier from {cfg.eval_path}: {exc}") from None
        r = phi.support_radius
        xs = [-r + 2 * r * i / (cfg.grid - 1) for i in range(cfg.grid)] if cfg.grid > 1 else [0.0]
        rows = [(x, float(phi(x))) for x in xs]
        buf = io.StringIO()
        buf.write(f"# schema: {SCHEMA_PREFIX}/mollifier-eval/v{SCHEMA_VERSION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["xi", "value"])
        w.writerows((repr(x), repr(v)) for x, v in rows)
        emit(buf.getvalue(), cfg.csv or cfg.out)
        return EXIT_OK
    phi = _mollifier(cfg)
    emit(phi.to_json() + "\n", cfg.out)
    return EXIT_OK


def cmd_moments(cfg: RunConfig) -> int:
    if cfg.in_path:
        try:
            phi = to.TestFunction.from_json(Path(cfg.in_path).read_text())
        except FileNotFoundError:
            raise UsageError(f"mollifier file not found: {cfg.in_path}") from None
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"cannot read mollifier from {cfg.in_path}: {exc}") from None
    else:
        phi = _mollifier(cfg)
    rep = to.verify_moments(phi, to.MomentProfile(cfg.q, "exact"), cfg.moment_tol)
    extra = {
        "moments": {str(k): float(to.exact_moment(phi, k)) for k in range(cfg.q + 3)},
        "half_moment": to.half_moment(phi),
        "l2_inner": to.l2_inner(phi),
    }
    report(cfg, {"report": rep.to_dict(), **extra})
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_order_fit(cfg: RunConfig) -> int:
    if not cfg.in_path:
        raise UsageError("order-fit needs --in samples.csv")
    est = numerics.fit_order(read_samples(cfg.in_path), floor=numerics.DEFAULT_FLOOR)
    report(cfg, {"order": est.to_dict()})
    return EXIT_OK


def cmd_test_negligible(cfg: RunConfig) -> int:
    R = representative(cfg.rep, cfg)
    rep = testing.test_negligible_c0(
        R, cfg.K_interval, cfg.n, [_family(cfg)], cfg.q_bounds, cfg.eps_values,
        cfg.x_samples, cfg.order_tolerance, cfg.floor,
    )
    table(cfg, "negligible", ["q", "epsilon", "sup_value"], rep.rows)
    report(cfg, {"report": rep.to_dict()})
    return EXIT_OK if rep.verdict else EXIT_FAIL


def cmd_test_moderate(cfg: RunConfig) -> int:
    R = representative(cfg.rep, cfg)
    rep = testing.test_moderate(
        R, cfg.K_interval, [_family(cfg)], cfg.eps_values, cfg.x_samples, cfg.n_max, cfg.floor
    )
    table(cfg, "moderate", ["epsilon", "sup_value"], rep.rows)
    report(cfg, {"report": rep.to_dict()})
    return EXIT_OK if rep.moderate else EXIT_FAIL


def cmd_demo_landau(cfg: RunConfig) -> int:
    R = representative(cfg.rep, cfg)
    try:
        rep = testing.demo_c0_implies_c1(
            R, cfg.K_interval, cfg.n, cfg.q, [_family(cfg)], cfg.eps_values, cfg.x_samples, cfg.floor
        )
    except PreconditionViolation as exc:
        report(cfg, {"error": str(exc), "precondition_report": exc.report.to_dict()})
        return EXIT_FAIL
    table(cfg, "landau", ["epsilon", "quotient_sup", "remainder_sup", "dx_sup"], rep.rows)
    report(cfg, {"report": rep.to_dict()})
    return EXIT_OK if rep.quotient_ok and rep.dx_ok else EXIT_FAIL


def cmd_embed_check(cfg: RunConfig) -> int:
    f = emb.named_function(cfg.f)
    est = emb.check_iota_sigma(
        f, cfg.q, cfg.eps_values, cfg.K_interval, cfg.x_samples, _mollifier(cfg), cfg.floor
    )
    ok = _order_verdict(est, cfg.q + 1, cfg.order_tolerance)
    report(cfg, {"order": est.to_dict(), "expected_at_least": cfg.q + 1, "verdict": "pass" if ok else "fail"})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_product_check(cfg: RunConfig) -> int:
    f1, f2 = emb.named_function(cfg.f1), emb.named_function(cfg.f2)
    est = emb.check_product(
        f1, f2, cfg.q, cfg.eps_values, cfg.K_interval, cfg.x_samples, _mollifier(cfg), cfg.floor
    )
    ok = _order_verdict(est, cfg.q + 1, cfg.order_tolerance)
    report(cfg, {"order": est.to_dict(), "expected_at_least": cfg.q + 1, "verdict": "pass" if ok else "fail"})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_counterexample(cfg: RunConfig) -> int:
    series = _series_cfg(cfg)
    if cfg.action in ("P", "Q"):
        try:
            res = ce.experiment_decay(
                [cfg.q], cfg.eps_values, cfg.radius, cfg.action, SIGMAS[cfg.sigma], series
            )
        except TruncationFailure as exc:
            report(cfg, {"error": str(exc), "tail_bound": exc.tail_bound, "k_used": exc.k_used})
            return EXIT_FAIL
        table(
            cfg, f"counterexample-{cfg.action}", ["epsilon", "value", "k_used", "tail_bound"],
            [(r.eps, r.value, r.k_used, r.tail_bound) for r in res.rows],
        )
        report(cfg, {"functional": cfg.action, "order": res.orders[cfg.q].to_dict()})
        return EXIT_OK
    # witness
    wcfg = ce.SeriesEvalConfig(cfg.tail_tol, cfg.witness_k_max_hard)
    try:
        w = ce.experiment_witness_search(cfg.q, cfg.t_values, cfg.eps_values, cfg.radius, wcfg)
    except TruncationFailure as exc:
        report(cfg, {"error": str(exc), "tail_bound": exc.tail_bound, "k_used": exc.k_used})
        return EXIT_FAIL
    table(cfg, "witness", ["epsilon", "sup_value", "argmax_t"], w.sup_rows)
    for msg in w.warnings:
        print(f"warning ({ce.EXPLORATORY}): {msg}", file=sys.stderr)
    report(cfg, {"report": w.to_dict()})
    # exploratory: a failed exhibit is a warning, not a failed verdict
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    if cfg.action == "list":
        emit("".join(f"{t}\t{t.pretty}\n" for t in cls_.enumerate_types()), cfg.out)
    elif cfg.action == "algebras":
        lines = []
        for a in cls_.equivalence_classes():
            f = cls_.flags(a)
            lines.append(
                f"{a}\t{a.label}\tdiffeo_invariant={f.diffeo_invariant}"
                f"\tdifferential_algebra={f.differential_algebra}"
                f"\tiota_equals_sigma={f.iota_equals_sigma_on_smooth}\n"
            )
        emit("".join(lines), cfg.out)
    elif cfg.action == "quotients":
        emit("".join(f"{x}\t{y}\n" for x, y in cls_.admissible_quotients()), cfg.out)
    elif cfg.action == "dot":
        emit(cls_.emit_dot(), cfg.out)
    elif cfg.action == "hom":
        try:
            a, b = cfg.hom.split()
        except ValueError:
            raise UsageError("--hom takes two algebras, e.g. --hom G^d ex:Al") from None
        x, y = cls_.resolve_algebra(a), cls_.resolve_algebra(b)
        emit(f"{str(cls_.hom_exists(x, y)).lower()}\n", cfg.out)
    return EXIT_OK


COMMANDS = {
    "mollifier": cmd_mollifier,
    "moments": cmd_moments,
    "order-fit": cmd_order_fit,
    "test-negligible": cmd_test_negligible,
    "test-moderate": cmd_test_moderate,
    "demo-landau": cmd_demo_landau,
    "embed-check": cmd_embed_check,
    "product-check": cmd_product_check,
    "counterexample": cmd_counterexample,
    "classify": cmd_classify,
}


# ---------------------------------------------------------------- parser


def _opt(p: argparse.ArgumentParser, flag: str, help: str, dest: str | None = None, **kw) -> None:
    dest = dest or flag.lstrip("-").replace("-", "_")
    default = getattr(DEFAULTS, dest)
    if "action" not in kw:
        kw.setdefault("type", type(default))
    p.add_argument(flag, dest=dest, default=argparse.SUPPRESS, help=f"{help} (default: {default})", **kw)


def _common(p: argparse.ArgumentParser, *groups: str) -> None:
    p.add_argument("--config", help="TOML file with option values; flags override it")
    _opt(p, "--out", "output path for the main result; stdout if empty")
    if "grid" in groups:
        _opt(p, "--eps-grid", "geometric eps grid 'eps0,ratio,count'")
        _opt(p, "--K", "compact interval 'a,b'")
        _opt(p, "--x-samples", "equispaced x samples on K")
        _opt(p, "--floor", "values at or below this are treated as zero when fitting")
        _opt(p, "--csv", "CSV output path for the per-eps table")
    if "mollifier" in groups:
        _opt(p, "--q", "moment order q of the A_q mollifier")
        _opt(p, "--radius", "support radius")
        p.add_argument("--generic", dest="generic", action="store_true", default=argparse.SUPPRESS,
                       help="use the generic A_q mollifier, nonzero (q+1)-moment (default)")
        p.add_argument("--even", dest="generic", action="store_false", default=argparse.SUPPRESS,
                       help="use the even A_q mollifier (odd moments vanish)")
    if "family" in groups:
        _opt(p, "--family-q-max", "family contains A_q members for q = 0..this")
        _opt(p, "--per-q", "members per q (extra ones are seeded perturbations)")
        _opt(p, "--jitter", "perturbation amplitude")
        _opt(p, "--seed", "seed for the family perturbations")
        _opt(p, "--rep", "representative: iota-sigma:F, iota:F, sigma:F, product:F1,F2, delta, P, Q, zero")
    if "series" in groups:
        _opt(p, "--tail-tol", "certified tail bound required of each series evaluation")
        _opt(p, "--k-max-hard", "hard cap on series terms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="colombeau-lab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    p = sub.add_parser("mollifier", help="build an A_q mollifier (JSON) or tabulate one (CSV)")
    _common(p, "mollifier")
    _opt(p, "--eval", "tabulate this mollifier JSON file instead of building one", dest="eval_path")
    _opt(p, "--grid", "number of xi points for --eval")
    _opt(p, "--csv", "CSV output path for --eval (falls back to --out, then stdout)")

    p = sub.add_parser("moments", help="verify the moment profile of a mollifier")
    _common(p, "mollifier")
    _opt(p, "--in", "mollifier JSON file; builds one from --q if omitted", dest="in_path")
    _opt(p, "--moment-tol", "tolerance on each moment residual")

    p = sub.add_parser("order-fit", help="fit |value| ~ C eps^m to an epsilon,value CSV")
    _common(p)
    _opt(p, "--in", "CSV with columns epsilon,value", dest="in_path")

    p = sub.add_parser("test-negligible", help="condition (0) negligibility test")
    _common(p, "grid", "family", "series")
    _opt(p, "--n", "target order n")
    _opt(p, "--q-range", "q values to try, 'a..b'")
    _opt(p, "--order-tolerance", "slack on fitted exponents")

    p = sub.add_parser("test-moderate", help="growth exponent / moderateness test")
    _common(p, "grid", "family", "series")
    _opt(p, "--n-max", "moderate iff growth exponent >= -n_max")

    p = sub.add_parser("demo-landau", help="two-term Taylor decomposition behind (0) => (1)")
    _common(p, "grid", "family", "series")
    _opt(p, "--n", "target order n")
    _opt(p, "--q", "moment order q used for the (0) test")

    p = sub.add_parser("embed-check", help="order of iota(f) - sigma(f)")
    _common(p, "grid", "mollifier")
    _opt(p, "--f", "smooth function: sin, cos, exp, x, x^2, x^3, poly:c0,c1,...")
    _opt(p, "--order-tolerance", "slack on the q+1 target")

    p = sub.add_parser("product-check", help="order of iota(f1) iota(f2) - iota(f1 f2)")
    _common(p, "grid", "mollifier")
    _opt(p, "--f1", "first smooth function")
    _opt(p, "--f2", "second smooth function")
    _opt(p, "--order-tolerance", "slack on the q+1 target")

    p = sub.add_parser("counterexample", help="decay experiments for the functionals P and Q")
    p.add_argument("action", choices=["P", "Q", "witness"], help="functional or the witness search")
    _common(p, "grid", "series")
    _opt(p, "--q", "moment order of the mollifier")
    _opt(p, "--radius", "support radius")
    _opt(p, "--sigma", "cutoff realization for Q: bump or smoothstep")
    _opt(p, "--t-grid", "witness family parameters 'lo,hi,count' (geometric)")
    _opt(p, "--witness-k-max-hard", "term cap used by the witness search")

    p = sub.add_parser("classify", help="types, algebras, homomorphisms, DOT diagram")
    _common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--list", dest="action", action="store_const", const="list", help="the 11 types")
    g.add_argument("--algebras", dest="action", action="store_const", const="algebras", help="the 9 algebras with flags")
    g.add_argument("--quotients", dest="action", action="store_const", const="quotients", help="the 46 admissible pairs")
    g.add_argument("--dot", dest="action", action="store_const", const="dot", help="DOT diagram")
    g.add_argument("--hom", nargs=2, metavar=("X", "Y"), default=argparse.SUPPRESS, help="is there a canonical homomorphism X -> Y?")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.subcommand == "classify" and getattr(args, "hom", None):
        args.action = "hom"
        args.hom = " ".join(args.hom)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.subcommand](cfg)
    except UsageError as exc:
        print(f"colombeau-lab {args.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidArgument, DomainError, ConstructionFailure) as exc:
        print(f"colombeau-lab {args.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
