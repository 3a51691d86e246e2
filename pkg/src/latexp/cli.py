"""Command-line front end: ``latexp <command> [options]``.

Exit codes: 0 success, 1 audit failure, 2 configuration error,
3 precision or size limit reached, 4 filter/oracle disagreement.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import __version__
from .audit import report_table, report_to_json, run_audit
from .cfcore import DepthUnavailable
from .construct import (
    DegenerateEqualValues,
    Mode,
    PairConstruction,
    generate_beta,
    generate_bounded,
    generate_superexp,
    to_json,
)
from .exactreal import PRECISION_ENV, BetaSpec, PrecisionExhausted, default_precision_cap, int_to_dec
from .exponents import (
    EmptySequence,
    estimate_to_json,
    omega_lattice,
    omega_number,
    target_omega_lattice,
    target_omega_number,
    target_weak_uniform,
    weak_uniform,
    with_target,
)
from .lattice import (
    BoundTooSmall,
    UnresolvableOrder,
    candidates,
    compute_minima,
    minima_to_json,
    oracle_hyperbolic,
    oracle_relative,
    point_to_json,
    relative_minima_in_box,
)
from .plot import SvgOptions, TooFewMinima, render_svg

EXIT_OK, EXIT_AUDIT, EXIT_CONFIG, EXIT_PRECISION, EXIT_MISMATCH = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: Mode = Mode.BETA
    beta: Optional[BetaSpec] = BetaSpec(2)
    a_pattern: Optional[tuple[int, ...]] = None
    b_pattern: Optional[tuple[int, ...]] = None
    depth: int = 4
    precision_cap: int = 2**20
    bound: Optional[int] = None
    fmt: str = "table"
    output: Optional[str] = None
    svg: SvgOptions = SvgOptions()

    def __post_init__(self):
        if self.depth < 2:
            raise ConfigError("depth must be at least 2")
        if self.precision_cap < 128:
            raise ConfigError("precision cap must be at least 128 bits")
        if self.bound is not None and self.bound < 1:
            raise ConfigError("oracle bound must be at least 1")
        if self.mode is Mode.BOUNDED and not (self.a_pattern and self.b_pattern):
            raise ConfigError("bounded mode needs --a and --b patterns")

    def as_args(self) -> list[str]:
        """Options that reproduce this configuration."""
        args = ["--mode", self.mode.value, "--depth", str(self.depth), "--precision-cap", str(self.precision_cap),
                "--format", self.fmt]
        if self.mode is Mode.BETA:
            args += ["--beta", _beta_text(self.beta)]
        if self.mode is Mode.BOUNDED:
            args += ["--a", ",".join(map(str, self.a_pattern)), "--b", ",".join(map(str, self.b_pattern))]
        if self.bound is not None:
            args += ["--bound", str(self.bound)]
        if self.output is not None:
            args += ["--output", self.output]
        return args

    def describe(self) -> dict:
        return {
            "mode": self.mode.value,
            "beta": _beta_text(self.beta) if self.mode is Mode.BETA else None,
            "a_pattern": _pattern_text(self.a_pattern),
            "b_pattern": _pattern_text(self.b_pattern),
            "depth": str(self.depth),
        }


def _beta_text(beta: BetaSpec) -> str:
    return str(beta.num) if beta.is_integer else str(beta)


def _pattern_text(pattern) -> Optional[str]:
    return ",".join(map(str, pattern)) if pattern else None


def _parse_pattern(text: Optional[str]) -> Optional[tuple[int, ...]]:
    if text is None:
        return None
    try:
        values = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"bad pattern {text!r}") from None
    if not values or min(values) < 1:
        raise ConfigError("pattern entries must be positive integers")
    return values


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    mode = Mode(ns.mode)
    try:
        beta = BetaSpec.parse(ns.beta) if mode is Mode.BETA else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(
        mode=mode,
        beta=beta,
        a_pattern=_parse_pattern(ns.a),
        b_pattern=_parse_pattern(ns.b),
        depth=ns.depth,
        precision_cap=ns.precision_cap if ns.precision_cap is not None else default_precision_cap(),
        bound=ns.bound,
        fmt=ns.format,
        output=ns.output,
        svg=SvgOptions(ns.width, ns.height, ns.samples, ns.log_scale),
    )


def build(config: RunConfig, depth: int) -> PairConstruction:
    if config.mode is Mode.BETA:
        return generate_beta(config.beta, depth, cap=config.precision_cap)
    if config.mode is Mode.SUPEREXP:
        return generate_superexp(depth, cap=config.precision_cap)
    return generate_bounded(config.a_pattern, config.b_pattern, depth)


def _minima(config: RunConfig):
    c = build(config, config.depth + 2)
    return compute_minima(c, config.depth, cap=config.precision_cap)


# --------------------------------------------------------------------------
# commands: each returns (exit code, JSON document, table text, csv rows)


def cmd_construct(config: RunConfig):
    c = build(config, config.depth)
    doc = to_json(c)
    rows = [["k", "a_k", "b_k", "digits(q_k)", "digits(s_k)"]]
    for k in range(c.depth + 1):
        rows.append([str(k), _short(c.theta.a[k]), _short(c.eta.a[k]),
                     str(len(int_to_dec(c.theta.q[k]))), str(len(int_to_dec(c.eta.q[k])))])
    return EXIT_OK, doc, _table(rows), rows


def _short(n: int) -> str:
    text = int_to_dec(n)
    return text if len(text) <= 24 else f"{text[:10]}...({len(text)} digits)"


def cmd_minima(config: RunConfig):
    seq, _ = _minima(config)
    doc = minima_to_json(seq)
    rows = [["label", "supnorm_lo", "supnorm_hi", "pi2_lo", "pi2_hi", "certified"]]
    for i, z in enumerate(seq.points):
        j = point_to_json(z)
        rows.append([z.label, *j["supnorm"], *j["pi2"], "yes" if i >= seq.certified_from else "no"])
    return EXIT_OK, doc, _table(rows), rows


def cmd_exponents(config: RunConfig):
    seq, lat = _minima(config)
    c = lat.construction
    beta_mode = config.mode is Mode.BETA
    targets = {
        "omega_number": target_omega_number(config.beta) if beta_mode else None,
        "omega_lattice": target_omega_lattice(config.beta) if beta_mode else None,
        "weak_uniform": target_weak_uniform(config.beta) if beta_mode else None,
    }
    makers = {
        "omega_number": lambda: omega_number(c.theta, config.depth),
        "omega_lattice": lambda: omega_lattice(seq),
        "weak_uniform": lambda: weak_uniform(seq),
    }
    estimates, rows = [], [["kind", "key", "gamma", "error"]]
    lines = []
    for kind, make in makers.items():
        try:
            est = with_target(make(), targets[kind])
        except EmptySequence as exc:
            estimates.append({"kind": kind, "unavailable": str(exc)})
            lines.append(f"{kind}: unavailable ({exc})")
            continue
        doc = estimate_to_json(est)
        estimates.append(doc)
        rows += [[kind, g["key"], g["gamma"], g["error"]] for g in doc["per_k"]]
        line = f"{kind}: {doc['running_stat']} ± {doc['running_error']} (finite-depth estimate)"
        if doc["target"] is not None:
            line += f", target {doc['target']}, deviation <= {doc['deviation']}"
        lines.append(line)
    return EXIT_OK, {"schema": "latexp/exponents", "estimates": estimates}, "\n".join(lines), rows


def cmd_audit(config: RunConfig):
    if config.mode is not Mode.BETA:
        raise ConfigError("audit applies to beta mode only")
    if config.depth < 3:
        raise ConfigError("audit depth must be at least 3")
    report = run_audit(build(config, config.depth + 2), config.depth, cap=config.precision_cap)
    rows = [["check", "k", "verdict"]]
    for check in report.checks:
        rows += [[check.check_id, str(v.k), v.verdict.value] for v in check.verdicts]
    code = EXIT_OK if report.overall else EXIT_AUDIT
    return code, report_to_json(report), report_table(report), rows


def cmd_oracle(config: RunConfig):
    if config.bound is None:
        raise ConfigError("oracle needs --bound")
    seq, lat = _minima(config)
    bound = Fraction(config.bound)
    every = candidates(lat, config.depth)
    cands = [z for z in every if z.supnorm.hi <= bound]
    in_range = {z.label for z in cands}
    from_filter = [z.label for z in seq.points if z.label in in_range]
    verdicts = []
    for z in cands:
        hyp = oracle_hyperbolic(z, lat, config.bound)
        rel = oracle_relative(z, lat, config.bound)
        verdicts.append((z, hyp, rel))
    from_oracle = [z.label for z, hyp, _ in verdicts if hyp]
    implies_relative = all(rel for _, hyp, rel in verdicts if hyp)
    found = relative_minima_in_box(lat, bound, config.bound)
    known_pre = {z.preimage for z in every}
    stray = [f"({int_to_dec(z.preimage[0])},{int_to_dec(z.preimage[1])})" for z in found if z.preimage not in known_pre]
    equal = from_filter == from_oracle
    doc = {
        "schema": "latexp/oracle",
        "bound": str(config.bound),
        "filter": from_filter,
        "oracle": from_oracle,
        "equal": equal,
        "hyperbolic_implies_relative": implies_relative,
        "relative_minima_are_candidates": not stray,
        "stray_relative_minima": stray,
        "candidates": [{"label": z.label, "hyperbolic": hyp, "relative": rel} for z, hyp, rel in verdicts],
    }
    text = "\n".join([
        f"filter == oracle: {str(equal).lower()}",
        f"hyperbolic implies relative: {str(implies_relative).lower()}",
        f"relative minima within bound are candidates: {str(not stray).lower()}",
        f"filter: {' '.join(from_filter)}",
    ])
    rows = [["label", "filter", "hyperbolic", "relative"]]
    rows += [[z.label, str(z.label in from_filter).lower(), str(h).lower(), str(r).lower()] for z, h, r in verdicts]
    ok = equal and implies_relative and not stray
    return (EXIT_OK if ok else EXIT_MISMATCH), doc, text, rows


def cmd_plot(config: RunConfig):
    if config.output is None:
        raise ConfigError("plot needs --output")
    seq, _ = _minima(config)
    try:
        svg = render_svg(seq, config.svg)
    except TooFewMinima as exc:
        raise ConfigError(str(exc)) from None
    return EXIT_OK, svg, f"wrote {config.output}", None


COMMANDS = {
    "construct": cmd_construct,
    "minima": cmd_minima,
    "exponents": cmd_exponents,
    "audit": cmd_audit,
    "oracle": cmd_oracle,
    "plot": cmd_plot,
}


# --------------------------------------------------------------------------


def dump_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows)


def _csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[m.value for m in Mode], default="beta")
    common.add_argument("--beta", default="2", help="rational exponent, e.g. 2 or 3/2")
    common.add_argument("--a", help="bounded mode: comma-separated pattern for theta")
    common.add_argument("--b", help="bounded mode: comma-separated pattern for eta")
    common.add_argument("--depth", type=int, default=4)
    common.add_argument("--precision-cap", type=int, default=None,
                        help=f"bit cap for precision escalation (default from ${PRECISION_ENV} or 2^20)")
    common.add_argument("--bound", type=int, help="oracle search bound")
    common.add_argument("--format", choices=["json", "csv", "table"], default="table")
    common.add_argument("--output", help="write the JSON document (or SVG) here")
    common.add_argument("--width", type=int, default=640)
    common.add_argument("--height", type=int, default=640)
    common.add_argument("--samples", type=int, default=200)
    common.add_argument("--log-scale", action="store_true")

    parser = argparse.ArgumentParser(prog="latexp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__name__.replace("cmd_", ""))
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = make_parser()
    ns = parser.parse_args(argv)
    try:
        config = config_from_args(ns)
        code, doc, text, rows = COMMANDS[ns.command](config)
    except (ConfigError, DegenerateEqualValues, BoundTooSmall, DepthUnavailable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PrecisionExhausted, UnresolvableOrder) as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_PRECISION

    if ns.command == "plot":
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(doc)
        print(text)
        return code
    doc = {"config": config.describe(), **doc}
    payload = dump_json(doc)
    if config.output is not None:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(payload)
    if config.fmt == "json":
        sys.stdout.write(payload)
    elif config.fmt == "csv":
        sys.stdout.write(_csv(rows))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
