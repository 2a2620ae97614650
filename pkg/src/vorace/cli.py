"""Command-line entry point: ``vorace {theory,simulate,run,aggregate}``.

Results go to stdout as JSON (or CSV with ``--format csv``); diagnostics go
to stderr.  Exit status is 0 on success, 2 on usage or input errors and 1 on
any other failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from . import theory
from .core import InvalidInputError, Profile
from .data import FIXTURES, load_csv, load_fixture
from .ensemble import EnsembleConfig, evaluate_rules, reports_to_csv
from .montecarlo import MODELS, SIM_RULES, SIM_TIES, SimConfig, simulate
from .voting import RULE_NAMES, TiePolicy, elect

log = logging.getLogger("vorace")

THEORY_METHODS = ("paper", "model", "oracle", "mu", "binary", "overlap", "derivative")
THEORY_FIELDS = ("n", "m", "p", "method", "variant", "value_exact", "value_float", "error")


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _expand(spec: str, convert: Callable[[str], Any]) -> list:
    """'a,b,c' or inclusive 'start:stop:step' ranges, mixed freely."""
    values = []
    for part in str(spec).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise UsageError(f"range must be start:stop:step, got {part!r}")
            start, stop, step = (convert(b) for b in bits)
            if step <= 0:
                raise UsageError(f"range step must be positive in {part!r}")
            k = 0
            while start + k * step <= stop:
                values.append(start + k * step)
                k += 1
        else:
            values.append(convert(part))
    if not values:
        raise UsageError(f"empty list: {spec!r}")
    return values


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"not an integer: {text!r}") from None


def _plain(value: Any) -> Any:
    """Make theory results JSON-friendly: Fractions become exact strings."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            out[k] = _plain(v)
            if isinstance(v, Fraction):
                out[f"{k}_float"] = float(v)
        return out
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _emit(obj: Any, fmt: str, fields: Sequence[str] | None = None) -> str:
    if fmt == "json":
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in obj if isinstance(obj, list) else [obj]:
        writer.writerow({k: "" if row.get(k) is None else row.get(k) for k in fields})
    return buf.getvalue()


# --------------------------------------------------------------------------
# theory
# --------------------------------------------------------------------------


def _theory_value(method: str, n: int, m: int, p: Fraction, args) -> tuple[str | None, Fraction]:
    if method == "paper":
        return args.variant, theory.t_p_paper(n, m, p, args.variant)
    if method == "model":
        return "model", theory.t_p_paper(n, m, p, "model")
    if method == "oracle":
        return args.oracle_tie, theory.t_p_oracle(n, m, p, args.oracle_tie)
    if method == "mu":
        return None, theory.mu_pid(n, m, p)
    if method == "binary":
        if m != 2:
            raise InvalidInputError("the binary closed form needs m=2")
        return args.tie, theory.t_p_binary(n, p, args.tie)
    if method == "overlap":
        if args.rho is None:
            raise InvalidInputError("overlap rows need --rho")
        return f"rho={args.rho}", theory.overlap_bound(n, m, p, _fraction(str(args.rho)))
    if m != 2:
        raise InvalidInputError("the binary derivative needs m=2")
    return None, theory.t_p_derivative_binary(n, p)


def cmd_theory(args) -> str:
    ns = _expand(args.n, _int)
    ms = _expand(args.m, _int)
    ps = _expand(args.p, _fraction)
    if args.audit:
        audits = [_plain(theory.formula_audit(n, m, p)) for n in ns for m in ms for p in ps]
        if args.format == "csv":
            raise UsageError("--audit output is JSON only")
        return _emit(audits[0] if len(audits) == 1 else audits, "json")
    methods = args.compare or ["model"]
    rows = []
    for n in ns:
        for m in ms:
            for p in ps:
                for method in methods:
                    row = {"n": n, "m": m, "p": str(p), "method": method, "variant": None,
                           "value_exact": None, "value_float": None, "error": None}
                    try:
                        row["variant"], value = _theory_value(method, n, m, p, args)
                        row["value_exact"], row["value_float"] = str(value), float(value)
                    except InvalidInputError as exc:
                        row["error"] = str(exc)
                    rows.append(row)
    return _emit(rows, args.format, THEORY_FIELDS)


# --------------------------------------------------------------------------
# simulate / run / aggregate
# --------------------------------------------------------------------------


def cmd_simulate(args) -> str:
    if args.trials is None or args.n is None or args.m is None:
        raise UsageError("simulate needs --n, --m and --trials")
    accuracies = None if args.accuracies is None else tuple(float(a) for a in _expand(args.accuracies, _fraction))
    config = SimConfig(
        n=args.n, m=args.m, trials=args.trials, seed=args.seed, model=args.model,
        p=None if args.p is None else float(args.p), accuracies=accuracies,
        rho=None if args.rho is None else float(args.rho),
        rule=args.rule, tie=args.tie, kemeny_threshold=args.kemeny_threshold,
    )
    result = simulate(config, threads=args.threads)
    out = {"config": config.to_dict(), **result.to_dict()}
    return _emit(out, args.format, ("wins", "trials", "rate", "stderr"))


def _load_dataset(args):
    if args.dataset:
        if args.csv or args.schema:
            raise UsageError("give either --dataset or --csv/--schema, not both")
        return load_fixture(args.dataset), args.dataset
    if not (args.csv and args.schema):
        raise UsageError("run needs --dataset NAME or both --csv and --schema")
    return load_csv(args.csv, args.schema), Path(args.csv).stem


def cmd_run(args) -> str:
    dataset, name = _load_dataset(args)
    rules = list(RULE_NAMES) if args.rule == "all" else [r.strip() for r in args.rule.split(",")]
    bad = [r for r in rules if r not in RULE_NAMES]
    if bad:
        raise UsageError(f"unknown rule(s) {bad}; valid rules: {', '.join(RULE_NAMES)}, all")
    config = EnsembleConfig(args.n, rules[0], args.tie, args.seed, args.kemeny_threshold)
    reports = evaluate_rules(dataset, config, rules, args.folds, args.repeats, name)
    ordered = [reports[r] for r in rules]
    if args.format == "csv":
        return reports_to_csv(ordered)
    dicts = [r.to_dict() for r in ordered]
    return _emit(dicts[0] if len(dicts) == 1 else dicts, "json")


def cmd_aggregate(args) -> str:
    try:
        data = json.loads(Path(args.profile).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.profile}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.profile} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("a profile file must hold a JSON object")
    scores = data.get("scores")
    if "rankings" not in data and scores is not None:
        profile = Profile.from_scores(scores, data.get("validation_accuracy"), data.get("weights"))
    else:
        profile = Profile.from_dict(data)
    result = elect(profile, args.rule, args.tie, args.kemeny_threshold, scores)
    out = result.to_dict(data.get("labels"))
    out["rule"] = args.rule
    return _emit(out, args.format, ("rule", "winner", "winner_label", "rule_scores", "tied_set"))


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file whose keys supply defaults for this command's flags")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vorace", description="Voting ensembles: theory, simulation, experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    th = sub.add_parser("theory", help="exact correct-class probabilities")
    _common(th)
    th.add_argument("--n", default="10", help="ensemble sizes: list and/or start:stop:step")
    th.add_argument("--m", default="2", help="class counts")
    th.add_argument("--p", default="0:1:1/20", help="accuracies, exact decimals or fractions")
    th.add_argument("--compare", action="append", choices=THEORY_METHODS, help="method (repeatable; default model)")
    th.add_argument("--variant", choices=[v.value for v in theory.KVariant], default="model")
    th.add_argument("--tie", choices=("strict", "as-written"), default="strict", help="binary tail start")
    th.add_argument("--oracle-tie", choices=theory.ORACLE_TIES, default="strict-win")
    th.add_argument("--rho", help="overlap ratio for --compare overlap")
    th.add_argument("--audit", action="store_true", help="print the normalization audit instead of rows")
    th.set_defaults(func=cmd_theory)

    si = sub.add_parser("simulate", help="Monte Carlo estimate of the correct-class rate")
    _common(si)
    si.add_argument("--model", choices=MODELS, default="iid")
    si.add_argument("--n", type=int)
    si.add_argument("--m", type=int)
    si.add_argument("--p")
    si.add_argument("--accuracies", help="comma-separated per-voter accuracies (hetero model)")
    si.add_argument("--rho")
    si.add_argument("--trials", type=int)
    si.add_argument("--rule", choices=tuple(SIM_RULES), default="plurality")
    si.add_argument("--tie", choices=tuple(SIM_TIES), default="strict")
    si.add_argument("--kemeny-threshold", type=int, default=5)
    si.add_argument("--threads", type=int, help="worker threads (default: VORACE_THREADS or 1)")
    si.set_defaults(func=cmd_simulate)

    ru = sub.add_parser("run", help="cross-validated ensemble evaluation")
    _common(ru)
    ru.add_argument("--dataset", choices=FIXTURES, help="bundled dataset")
    ru.add_argument("--csv", help="CSV file with a header row")
    ru.add_argument("--schema", help="JSON schema for --csv")
    ru.add_argument("--n", type=int, default=50)
    ru.add_argument("--rule", default="plurality", help=f"one of {', '.join(RULE_NAMES)}, a comma list, or all")
    ru.add_argument("--tie", choices=[t.value for t in TiePolicy])
    ru.add_argument("--folds", type=int, default=10)
    ru.add_argument("--repeats", type=int, default=1)
    ru.add_argument("--kemeny-threshold", type=int, default=5)
    ru.set_defaults(func=cmd_run)

    ag = sub.add_parser("aggregate", help="elect a winner from a profile file")
    _common(ag)
    ag.add_argument("--profile", required=True, help="profile JSON (rankings and/or scores)")
    ag.add_argument("--rule", choices=RULE_NAMES + ("kemeny-exact", "kemeny-heuristic"), default="plurality")
    ag.add_argument("--tie", choices=[t.value for t in TiePolicy])
    ag.add_argument("--kemeny-threshold", type=int, default=5)
    ag.set_defaults(func=cmd_aggregate)
    parser._subcommands = sub.choices  # type: ignore[attr-defined]
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str], args) -> argparse.Namespace:
    """Re-parse with the --config file's keys as defaults so explicit flags still win."""
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    sub = parser._subcommands[args.command]  # type: ignore[attr-defined]
    known = {a.dest for a in sub._actions}
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    unknown = sorted(set(cfg) - known - {"config"})
    if unknown:
        raise UsageError(f"unknown config keys {unknown} for {args.command}")
    for k in ("n", "m", "p", "rho", "accuracies"):
        if k in cfg and isinstance(cfg[k], list):
            cfg[k] = ",".join(str(v) for v in cfg[k])
    sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    try:
        if args.config:
            args = _apply_config(parser, argv, args)
        text = args.func(args)
    except (UsageError, InvalidInputError) as exc:
        print(f"vorace {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("failure", exc_info=True)
        print(f"vorace {args.command}: failed: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
