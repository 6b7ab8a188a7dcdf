"""Batch command line front end.

Four subcommands over the library:

``dist MU NU``
    solve the transport problem between two measure files and print the
    cost, the optimal coupling, and the dual potentials.
``transform NAME MU``
    print the image of a measure under one of the named maps
    (id, reflect, flip, flip-reflect, fiber-flip).
``verify SUITE``
    run a named invariant campaign and write a report plus a residual CSV.
``scenario NAME``
    instantiate a packaged example space and run the flexibility
    campaigns on it.

Configuration comes from flags or from a ``key = value`` text file given
with ``--config``; explicit flags win over the file, the file wins over
defaults.  Exit codes: 0 success / all trials passed, 1 invariant
failure, 2 usage or parse error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DomainError,
    FiberCollisionError,
    InvalidMeasureError,
    InvalidSpaceError,
    OTLabError,
    ParseError,
    SolverStallError,
    SpaceMismatchError,
)
from .metric import Euclidean, Interval, Product, format_number, parse_number
from .measure import dump_measure, load_measure
from .isometry import IntervalIsometry, apply_interval_isometry, fiber_flip
from .solver import kr_dual, solve_wasserstein
from . import campaign

EXIT_PASS = 0
EXIT_INVARIANT = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_TRANSFORMS = ("id", "reflect", "flip", "flip-reflect", "fiber-flip")

_INTERVAL_TRANSFORMS = {
    "id": IntervalIsometry.IDENTITY,
    "reflect": IntervalIsometry.REFLECT,
    "flip": IntervalIsometry.FLIP,
    "flip-reflect": IntervalIsometry.FLIP_REFLECT,
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters shared by every subcommand."""

    space_kind: str = "interval"
    alpha: object = None
    q: object = None
    base_kind: str = "euclidean"
    dim: int = 1
    mode: str = "float"
    tol: float = 1e-8
    seed: int = 0
    trials: int = 100
    order: object = 1
    window: object = None
    report: str = None
    csv: str = None
    space_explicit: bool = False

    def __post_init__(self):
        if self.mode not in ("float", "rational"):
            raise DomainError(f"mode must be 'float' or 'rational', got {self.mode!r}")
        if self.space_kind not in ("interval", "product"):
            raise DomainError(f"space must be 'interval' or 'product', got {self.space_kind!r}")
        if self.base_kind not in ("euclidean", "interval"):
            raise DomainError(f"base must be 'euclidean' or 'interval', got {self.base_kind!r}")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if self.dim < 1:
            raise DomainError("dim must be at least 1")
        if not self.order >= 1:
            raise DomainError("order must be at least 1")

    @property
    def exact(self):
        return self.mode == "rational"


# ---------------------------------------------------------------------------
# config file and number handling

# every key accepted in a config file, with the argparse destination it fills
_CONFIG_KEYS = (
    "space",
    "alpha",
    "q",
    "base",
    "dim",
    "mode",
    "tol",
    "seed",
    "trials",
    "order",
    "window",
    "report",
    "csv",
)

_INT_KEYS = ("dim", "seed", "trials")
_CHOICE_KEYS = {
    "space": ("interval", "product"),
    "base": ("euclidean", "interval"),
    "mode": ("float", "rational"),
}


def parse_config(path):
    """Read a ``key = value`` config file into a raw string mapping.

    Values stay unparsed here; numeric interpretation depends on the final
    mode, which may itself come from this file.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc.strerror}", path=path) from exc
    entries = {}
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0]
        if not text.strip():
            continue
        if "=" not in text:
            raise ParseError("expected 'key = value'", path=path, line=lineno, column=1)
        key_part, _, value_part = text.partition("=")
        key = key_part.strip()
        value = value_part.strip()
        key_col = 1 + len(key_part) - len(key_part.lstrip())
        if key not in _CONFIG_KEYS:
            raise ParseError(f"unknown config key {key!r}", path=path, line=lineno, column=key_col)
        if not value:
            value_col = 1 + len(text.rstrip())
            raise ParseError(f"missing value for {key!r}", path=path, line=lineno, column=value_col)
        if key in _CHOICE_KEYS and value not in _CHOICE_KEYS[key]:
            value_col = 2 + len(key_part) + len(value_part) - len(value_part.lstrip())
            raise ParseError(
                f"{key} must be one of {', '.join(_CHOICE_KEYS[key])}",
                path=path,
                line=lineno,
                column=value_col,
            )
        entries[key] = value
    return entries


def _number(token, exact):
    try:
        return parse_number(token, exact=exact)
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def _parse_window(token, exact):
    # a bare radius r means [-r, r]; "lo:hi" pins both ends
    if ":" in token:
        lo_tok, _, hi_tok = token.partition(":")
        lo = _number(lo_tok.strip(), exact)
        hi = _number(hi_tok.strip(), exact)
        if not lo < hi:
            raise DomainError(f"window {token!r} is empty")
        return (lo, hi)
    radius = _number(token, exact)
    if not radius > 0:
        raise DomainError("window radius must be positive")
    return radius


def _parse_int(name, token):
    try:
        return int(token)
    except ValueError:
        raise DomainError(f"{name} must be an integer, got {token!r}") from None


def build_config(args):
    """Merge CLI flags over config-file entries over defaults."""
    entries = parse_config(args.config) if args.config else {}

    def pick(key):
        flag = getattr(args, key, None)
        if flag is not None:
            return str(flag), True
        if key in entries:
            return entries[key], True
        return None, False

    mode, _ = pick("mode")
    mode = mode or "float"
    if mode not in ("float", "rational"):
        raise DomainError(f"mode must be 'float' or 'rational', got {mode!r}")
    exact = mode == "rational"

    values = {"mode": mode}
    explicit_space = False
    for key in ("space", "base"):
        value, given = pick(key)
        if given:
            explicit_space = True
            values[{"space": "space_kind", "base": "base_kind"}[key]] = value
    for key in _INT_KEYS:
        value, given = pick(key)
        if given:
            explicit_space = explicit_space or key == "dim"
            values[key] = _parse_int(key, value)
    for key in ("alpha", "q", "order"):
        value, given = pick(key)
        if given:
            explicit_space = explicit_space or key in ("alpha", "q")
            values[key] = _number(value, exact)
    value, given = pick("tol")
    if given:
        values["tol"] = float(value)
    value, given = pick("window")
    if given:
        values["window"] = _parse_window(value, exact)
    for key in ("report", "csv"):
        value, given = pick(key)
        if given:
            values[key] = value

    if values.get("space_kind") == "product" or "alpha" in values or "q" in values:
        values.setdefault("space_kind", "product")
        one = Fraction(1) if exact else 1.0
        values.setdefault("alpha", one / 2)
        values.setdefault("q", 2)
    return RunConfig(space_explicit=explicit_space, **values)


def build_space(cfg):
    """Construct the configured metric space."""
    if cfg.space_kind == "interval":
        return Interval(1)
    base = Euclidean(cfg.dim) if cfg.base_kind == "euclidean" else Interval(1)
    one = Fraction(1) if cfg.exact else 1.0
    alpha = cfg.alpha if cfg.alpha is not None else one / 2
    q = cfg.q if cfg.q is not None else 2
    return Product(alpha, q, base)


# ---------------------------------------------------------------------------
# subcommands


def _point_label(tokens):
    return "(" + ", ".join(tokens) + ")" if len(tokens) > 1 else tokens[0]


def _atom_tokens(point):
    from .measure import _point_tokens

    return _point_tokens(point)


def cmd_dist(cfg, mu_path, nu_path, out=None):
    """Solve between two measure files and print the full solve output."""
    out = sys.stdout if out is None else out
    space = build_space(cfg)
    mu, mu_id = load_measure(mu_path, space, exact=cfg.exact)
    nu, nu_id = load_measure(nu_path, space, exact=cfg.exact)
    if mu_id != nu_id:
        raise DomainError(f"measure files declare different spaces: {mu_id!r} vs {nu_id!r}")
    result = solve_wasserstein(mu, nu, p=cfg.order, tol=cfg.tol)
    print(f"space = {space.describe()}", file=out)
    print(f"order = {format_number(result.p)}", file=out)
    print(f"powered_cost = {format_number(result.powered_cost)}", file=out)
    print(f"distance = {format_number(result.cost)}", file=out)
    print(f"certified = {result.certified}", file=out)
    print(f"pivots = {result.pivots}", file=out)
    print("coupling:", file=out)
    plan = result.coupling
    for j, row_point in enumerate(plan.row_points):
        for k, col_point in enumerate(plan.col_points):
            w = plan.weights[j][k]
            if w == 0:
                continue
            src = _point_label(_atom_tokens(row_point))
            dst = _point_label(_atom_tokens(col_point))
            print(f"  {format_number(w)} : {src} -> {dst}", file=out)
    u, v = result.dual_potentials
    print("potentials:", file=out)
    for j, row_point in enumerate(plan.row_points):
        print(f"  u {_point_label(_atom_tokens(row_point))} = {format_number(u[j])}", file=out)
    for k, col_point in enumerate(plan.col_points):
        print(f"  v {_point_label(_atom_tokens(col_point))} = {format_number(v[k])}", file=out)
    if cfg.order == 1:
        witness = kr_dual(mu, nu, independent=False, tol=cfg.tol)
        print(f"dual_value = {format_number(witness.value)}", file=out)
    return EXIT_PASS


def cmd_transform(cfg, name, mu_path, out=None):
    """Apply a named transform to a measure file and print the image."""
    out = sys.stdout if out is None else out
    space = build_space(cfg)
    mu, space_id = load_measure(mu_path, space, exact=cfg.exact)
    if name == "fiber-flip":
        if not isinstance(space, Product):
            raise DomainError("fiber-flip needs a product space; pass --space product")
        image = fiber_flip(mu)
    elif name == "id":
        image = mu
    else:
        if isinstance(space, Product):
            raise DomainError(f"{name} acts on interval measures; use fiber-flip on products")
        image = apply_interval_isometry(_INTERVAL_TRANSFORMS[name], mu)
    out.write(dump_measure(image, space_id))
    return EXIT_PASS


def _campaign_exit(report):
    if report.passed:
        return EXIT_PASS
    for record in report.trials:
        if record.note.startswith("SolverStallError"):
            return EXIT_NUMERICAL
    return EXIT_INVARIANT


def _emit_campaign(report, cfg, default_stem, out):
    text = campaign.render_report(report)
    out.write(text)
    report_path = cfg.report or f"{default_stem}-report.txt"
    csv_path = cfg.csv or f"{default_stem}-residuals.csv"
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(campaign.render_csv(report))
    print(f"report written to {report_path}", file=out)
    print(f"csv written to {csv_path}", file=out)
    return _campaign_exit(report)


def cmd_verify(cfg, suite, out=None):
    """Run one invariant campaign; write its report and residual CSV."""
    out = sys.stdout if out is None else out
    space = None
    if cfg.space_explicit and cfg.space_kind == "product":
        space = build_space(cfg)
    report = campaign.run_suite(
        suite,
        seed=cfg.seed,
        trials=cfg.trials,
        tol=cfg.tol,
        mode=cfg.mode,
        space=space,
        window=cfg.window,
    )
    return _emit_campaign(report, cfg, suite, out)


def cmd_scenario(cfg, name, out=None):
    """Run the flexibility campaigns on a packaged example space."""
    out = sys.stdout if out is None else out
    report = campaign.run_scenario(
        name,
        seed=cfg.seed,
        trials=cfg.trials,
        tol=cfg.tol,
        mode=cfg.mode,
    )
    return _emit_campaign(report, cfg, name, out)


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def _add_common(parser, trailing):
    # trailing parsers use SUPPRESS so an unset flag does not clobber a value
    # that was already given before the subcommand
    kw = {"default": argparse.SUPPRESS} if trailing else {}
    parser.add_argument("--config", help="key = value config file; flags override it", **kw)
    parser.add_argument("--mode", choices=("float", "rational"), **kw)
    parser.add_argument("--seed", type=int, **kw)
    parser.add_argument("--trials", type=int, **kw)
    parser.add_argument("--tol", type=float, **kw)
    parser.add_argument("--space", choices=("interval", "product"), **kw)
    parser.add_argument("--alpha", help="product snowflake exponent in (0, 1]", **kw)
    parser.add_argument("--q", help="product combining exponent, q >= 1", **kw)
    parser.add_argument("--base", choices=("euclidean", "interval"), help="product base space", **kw)
    parser.add_argument("--dim", type=int, help="euclidean base dimension", **kw)
    parser.add_argument("--order", help="transport order p (dist)", **kw)
    parser.add_argument("--window", help="sampling window: radius or lo:hi", **kw)
    parser.add_argument("--report", help="report output path (verify/scenario)", **kw)
    parser.add_argument("--csv", help="residual CSV output path (verify/scenario)", **kw)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="otlab",
        description="exact discrete optimal transport: distances, transforms, invariant campaigns",
    )
    _add_common(parser, trailing=False)
    sub = parser.add_subparsers(dest="command", required=True)
    p_dist = sub.add_parser("dist", help="distance between two measure files")
    p_dist.add_argument("mu_file")
    p_dist.add_argument("nu_file")
    _add_common(p_dist, trailing=True)
    p_tr = sub.add_parser("transform", help="apply a named map to a measure file")
    p_tr.add_argument("name", choices=_TRANSFORMS)
    p_tr.add_argument("mu_file")
    _add_common(p_tr, trailing=True)
    p_ver = sub.add_parser("verify", help="run an invariant campaign")
    p_ver.add_argument("suite", choices=campaign.SUITE_NAMES)
    _add_common(p_ver, trailing=True)
    p_sc = sub.add_parser("scenario", help="run flexibility campaigns on a packaged space")
    p_sc.add_argument("name", choices=campaign.SCENARIO_NAMES)
    _add_common(p_sc, trailing=True)
    return parser


def entry(argv=None):
    """Console entry point; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code in (None, 0):
            return EXIT_PASS
        return EXIT_USAGE
    try:
        cfg = build_config(args)
        if args.command == "dist":
            return cmd_dist(cfg, args.mu_file, args.nu_file)
        if args.command == "transform":
            return cmd_transform(cfg, args.name, args.mu_file)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite)
        return cmd_scenario(cfg, args.name)
    except ParseError as exc:
        print(f"otlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverStallError as exc:
        print(f"otlab: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (
        DomainError,
        InvalidSpaceError,
        InvalidMeasureError,
        SpaceMismatchError,
        FiberCollisionError,
    ) as exc:
        print(f"otlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"otlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OTLabError as exc:
        print(f"otlab: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(entry())
