"""Command-line front end.

Exit status: 0 on success, 1 for invalid input, 2 when a computed report
fails one of its own invariant checks.
"""

from __future__ import annotations

import argparse
import re
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .counting import build_count_report, prime_pi, sato_tate_grid
from .density import (
    SetSelector,
    bound_entry,
    bound_tables,
    density_estimate,
    theorem_constants,
)
from .errors import InvariantError, ValidationError
from .forms import BUILTINS, GENERATOR_LIMIT, angles, format_sequence, load_sequence, twist
from .majorants import check_grid
from . import report

COMMANDS = ("gen", "count", "densities", "sato-tate", "majorant-check", "bounds")
HARD_CAP = GENERATOR_LIMIT

COUNT_COLUMNS = [
    "x", "pi_x", "n_square_equal", "n_angle_equal", "n_angle_flip",
    "majorant_rhs_plus", "majorant_rhs_minus", "bound_shape_uncond", "bound_shape_grh", "decay_ratio",
]
DENSITY_COLUMNS = ["s", "numerator", "denominator", "ratio", "tail_bound", "full_ratio"]
SATO_TATE_COLUMNS = ["x", "m1", "m2", "sum", "normalized"]
MAJORANT_COLUMNS = ["M", "delta", "check", "worst", "passed"]
BOUNDS_COLUMNS = ["theorem", "case", "value", "formula"]


@dataclass
class RunConfig:
    command: str
    forms: list = field(default_factory=list)
    bound: int | None = None
    grid: list = field(default_factory=list)
    M: list = field(default_factory=lambda: [10])
    delta: list = field(default_factory=lambda: [None])
    m_max: int = 4
    selector: str = "S_star"
    s_schedule: list | None = None
    output_format: str = "json"
    out: str | None = None
    allow_large: bool = False
    theorem: str | None = None
    case: tuple | None = None
    alpha: float | None = None
    kappa1: int | None = None
    kappa2: int | None = None
    quantity: str | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        cap = None if self.allow_large else HARD_CAP
        for x in [self.bound, *self.grid]:
            if x is not None and cap is not None and x > cap:
                raise ValidationError(f"{x} exceeds the cap {cap}; pass --allow-large to proceed")
        for M in self.M:
            if M < 1:
                raise ValidationError(f"M must be >= 1, got {M}")
        for d in self.delta:
            if d is not None and not 0 < d < 1:
                raise ValidationError(f"delta must lie in (0, 1), got {d}")
        if self.m_max < 1:
            raise ValidationError("m_max must be >= 1")


# ---------------------------------------------------------------- parsing helpers

def _number(text):
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f"not a number: {text!r}") from None
    if value != int(value):
        raise ValidationError(f"expected an integer, got {text!r}")
    return int(value)


def _int_list(text):
    return [_number(t) for t in text.split(",") if t.strip()]


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"bad number list {text!r}") from None


def _range_list(text):
    out = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        out.extend(range(_number(lo), _number(hi) + 1) if sep else [_number(lo)])
    return out


def split_pair(text):
    """Split ``A,B`` at the top-level comma (``twist(delta,-4)`` stays whole)."""
    depth, parts, cur = 0, [], ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    parts = [p.strip() for p in parts]
    if len(parts) != 2 or not all(parts):
        raise ValidationError(f"--pair needs exactly two forms, got {text!r}")
    return parts


_TWIST = re.compile(r"twist\((.+),\s*(-?\d+)\)\Z")


def resolve_form(name, bound, allow_large=False):
    """Builtin name, ``twist(<form>, d)`` or a path to an exchange-format file."""
    m = _TWIST.match(name)
    if m:
        return twist(resolve_form(m.group(1), bound, allow_large), int(m.group(2)))
    if name in BUILTINS:
        if bound is None:
            raise ValidationError(f"a bound is needed to generate {name}")
        limit = sys.maxsize if allow_large else GENERATOR_LIMIT
        return BUILTINS[name](bound, limit=limit)
    path = Path(name)
    if path.exists():
        seq = load_sequence(path)
        if bound is not None and seq.bound < bound:
            raise ValidationError(f"{name} only covers primes up to {seq.bound}, need {bound}")
        return seq
    raise ValidationError(f"unknown form {name!r}: not a builtin ({', '.join(BUILTINS)}), twist or file")


def _dihedral_flags(text):
    flags = []
    for token in text.split(","):
        token = token.strip().lower().replace("-", "")
        if token in ("dihedral", "cm", "d"):
            flags.append(True)
        elif token in ("nondihedral", "noncm", "n"):
            flags.append(False)
        else:
            raise ValidationError(f"case flags are dihedral/nondihedral, got {token!r}")
    if len(flags) != 2:
        raise ValidationError("--case needs two flags, e.g. nondihedral,nondihedral")
    return tuple(flags)


# ---------------------------------------------------------------- commands

def _envelope(cfg, body, invariants):
    return {
        "artifact": "strongmult",
        "version": __version__,
        "command": cfg.command,
        "constants": theorem_constants(),
        **body,
        "invariants": invariants,
        "invariants_passed": all(i["passed"] for i in invariants),
    }


def _cmd_gen(cfg):
    if len(cfg.forms) != 1:
        raise ValidationError("gen takes exactly one --form")
    seq = resolve_form(cfg.forms[0], cfg.bound, cfg.allow_large)
    return format_sequence(seq), True


def _pair(cfg, bound):
    if len(cfg.forms) != 2:
        raise ValidationError("this command needs --pair A,B")
    return [resolve_form(f, bound, cfg.allow_large) for f in cfg.forms]


def _cmd_count(cfg):
    if not cfg.grid:
        raise ValidationError("count needs --grid")
    s1, s2 = _pair(cfg, cfg.bound or max(cfg.grid))
    rep = build_count_report(s1, s2, cfg.grid, cfg.M[0], cfg.delta[0], cfg.m_max)
    data = rep.to_dict()
    invariants = data.pop("invariants")
    rows = [
        [x, data["pi_x"][i], data["n_square_equal"][i], data["n_angle_equal"][i], data["n_angle_flip"][i],
         data["majorant_rhs_plus"][i], data["majorant_rhs_minus"][i], data["bound_shape_uncond"][i],
         data["bound_shape_grh"][i], data["decay_ratio"][i]]
        for i, x in enumerate(cfg.grid)
    ]
    return _render(cfg, _envelope(cfg, {"report": data}, invariants), COUNT_COLUMNS, rows), rep.ok


def _density_invariants(est, default):
    inv = [
        {"name": "ratio_within_full_set", "s": s, "passed": 0.0 <= r <= f}
        for s, r, f in zip(est.s_schedule, est.ratios, est.full_ratios)
    ]
    if default:
        inv.append({"name": "full_set_sanity_window", "s": est.s_schedule[-1],
                    "passed": 0.8 <= est.full_ratios[-1] <= 1.2})
    return inv


def _cmd_densities(cfg):
    X = cfg.bound
    if X is None:
        raise ValidationError("densities needs --X")
    s1, s2 = _pair(cfg, X)
    sel = SetSelector.parse(cfg.selector)
    est = density_estimate(s1, s2, sel, X, cfg.s_schedule)
    inv = _density_invariants(est, cfg.s_schedule is None)
    body = {"params": {"forms": [s1.descriptor.label, s2.descriptor.label], "X": X,
                       "selector": str(sel), "cm": [s1.descriptor.cm, s2.descriptor.cm]},
            "estimate": est.to_dict()}
    rows = list(zip(est.s_schedule, est.numerators, est.denominators, est.ratios, est.tail_bound, est.full_ratios))
    return _render(cfg, _envelope(cfg, body, inv), DENSITY_COLUMNS, rows), all(i["passed"] for i in inv)


def _cmd_sato_tate(cfg):
    x = cfg.bound
    if x is None:
        raise ValidationError("sato-tate needs --x")
    s1, s2 = _pair(cfg, x)
    sums = sato_tate_grid(angles(s1), angles(s2), cfg.m_max, x)
    pi = prime_pi(x)
    rows = [[x, i, j, v, abs(v) / pi] for (i, j), v in sums.items()]
    body = {"params": {"forms": [s1.descriptor.label, s2.descriptor.label], "x": x, "m_max": cfg.m_max},
            "pi": pi, "sato_tate": {f"{i},{j}": v for (i, j), v in sums.items()}}
    return _render(cfg, _envelope(cfg, body, []), SATO_TATE_COLUMNS, rows), True


def _cmd_majorant_check(cfg):
    rows = check_grid(cfg.M, cfg.delta)
    inv = [{"name": f"{r[2]}:M={r[0]}:delta={r[1]!r}", "passed": bool(r[4])} for r in rows]
    body = {"rows": [dict(zip(MAJORANT_COLUMNS, r)) for r in rows]}
    return _render(cfg, _envelope(cfg, body, inv), MAJORANT_COLUMNS, rows), all(i["passed"] for i in inv)


def _cmd_bounds(cfg):
    if cfg.theorem:
        value, formula = bound_entry(cfg.theorem, cfg.alpha, cfg.case, cfg.kappa1, cfg.kappa2, cfg.quantity)
        rows = [[cfg.theorem, ",".join("dihedral" if f else "nondihedral" for f in cfg.case or ()), value, formula]]
    else:
        rows = [list(r) for r in bound_tables(cfg.case or (False, False), cfg.alpha, cfg.kappa1, cfg.kappa2)]
    if cfg.output_format == "table" and cfg.theorem:
        return f"{rows[0][3]} = {format(rows[0][2], '.17g')}\n", True
    body = {"rows": [dict(zip(BOUNDS_COLUMNS, r)) for r in rows]}
    return _render(cfg, _envelope(cfg, body, []), BOUNDS_COLUMNS, rows), True


def _render(cfg, payload, columns, rows):
    if cfg.output_format == "json":
        return report.dumps(payload)
    if cfg.output_format == "csv":
        return report.to_csv(columns, rows)
    return report.to_table(columns, rows)


HANDLERS = {
    "gen": _cmd_gen,
    "count": _cmd_count,
    "densities": _cmd_densities,
    "sato-tate": _cmd_sato_tate,
    "majorant-check": _cmd_majorant_check,
    "bounds": _cmd_bounds,
}


def run(cfg, stdout=None):
    """Execute one command; returns the exit status."""
    stdout = stdout or sys.stdout
    try:
        cfg.validate()
        text, ok = HANDLERS[cfg.command](cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    if not ok:
        print("invariant failure: see the invariants section of the report", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------- argparse

def build_parser():
    parser = argparse.ArgumentParser(prog="strongmult", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="json"):
        p.add_argument("--format", dest="output_format", choices=("json", "table", "csv"), default=fmt_default)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--allow-large", action="store_true", help=f"lift the {HARD_CAP} cap")

    p = sub.add_parser("gen", help="write an eigenvalue file")
    p.add_argument("--form", required=True, help="delta, e11, cm32, twist(<form>,d) or a file")
    p.add_argument("--bound", type=_number, required=True)
    p.add_argument("--out")
    p.add_argument("--allow-large", action="store_true")

    p = sub.add_parser("count", help="coincidence counts and majorant bounds")
    p.add_argument("--pair", required=True)
    p.add_argument("--grid", type=_int_list, required=True, help="ascending cutoffs, e.g. 1e3,1e4")
    p.add_argument("--M", type=int, default=10)
    p.add_argument("--delta", type=float, default=None, help="default 1/(pi (M+1))")
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--bound", type=_number, default=None, help="generation bound (default: max cutoff)")
    common(p)

    p = sub.add_parser("densities", help="truncated Dirichlet density estimates")
    p.add_argument("--pair", required=True)
    p.add_argument("--selector", default="S_star", help="S_0, S_pi, S_alpha:<rad>, S_star, S_upper_star, S_ad")
    p.add_argument("--X", type=_number, default=10**5)
    p.add_argument("--schedule", type=_float_list, default=None, help="comma-separated s values > 1")
    common(p)

    p = sub.add_parser("sato-tate", help="joint Chebyshev sums")
    p.add_argument("--pair", required=True)
    p.add_argument("--x", type=_number, default=10**5)
    p.add_argument("--m-max", type=int, default=4)
    common(p)

    p = sub.add_parser("majorant-check", help="Selberg majorant invariants as a CSV table")
    p.add_argument("--M", type=_range_list, default=list(range(1, 25)), help="e.g. 1-24 or 5,10,20")
    p.add_argument("--delta", default="default,0.01,0.1", help="'default' means 1/(pi (M+1))")
    common(p, fmt_default="csv")

    p = sub.add_parser("bounds", help="theorem lower-bound tables")
    p.add_argument("--theorem", default=None)
    p.add_argument("--case", type=_dihedral_flags, default=None, help="e.g. nondihedral,dihedral")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--kappa1", type=int, choices=(0, 1), default=None)
    p.add_argument("--kappa2", type=int, choices=(0, 1), default=None)
    p.add_argument("--quantity", default=None, help="for --theorem abstract: S_alpha, S_alpha_non_twist, S_star")
    common(p, fmt_default="table")
    return parser


def config_from_args(ns):
    cfg = RunConfig(ns.command, out=getattr(ns, "out", None), allow_large=getattr(ns, "allow_large", False),
                    output_format=getattr(ns, "output_format", "json"))
    if ns.command == "gen":
        cfg.forms, cfg.bound = [ns.form], ns.bound
    elif ns.command == "count":
        cfg.forms, cfg.grid, cfg.bound = split_pair(ns.pair), ns.grid, ns.bound
        cfg.M, cfg.delta, cfg.m_max = [ns.M], [ns.delta], ns.m_max
    elif ns.command == "densities":
        cfg.forms, cfg.bound, cfg.selector, cfg.s_schedule = split_pair(ns.pair), ns.X, ns.selector, ns.schedule
    elif ns.command == "sato-tate":
        cfg.forms, cfg.bound, cfg.m_max = split_pair(ns.pair), ns.x, ns.m_max
    elif ns.command == "majorant-check":
        cfg.M = ns.M
        cfg.delta = [None if d.strip() == "default" else float(d) for d in ns.delta.split(",")]
    elif ns.command == "bounds":
        cfg.theorem, cfg.case, cfg.alpha = ns.theorem, ns.case, ns.alpha
        cfg.kappa1, cfg.kappa2, cfg.quantity = ns.kappa1, ns.kappa2, ns.quantity
    return cfg


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = config_from_args(ns)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # argparse exits 2 on usage errors; map to the validation status
        return 0 if exc.code == 0 else 1
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
