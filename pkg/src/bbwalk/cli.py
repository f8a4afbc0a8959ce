"""``bbwalk`` command-line entry point."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import REGISTRY, ExperimentConfig, Report, list_experiments, run
from .groups import GroupError


def apply_override(data: dict, assignment: str) -> None:
    """Set a flat dotted key, e.g. ``params.trials=100``; values are parsed as JSON when possible."""
    key, sep, raw = assignment.partition("=")
    if not sep or not key:
        raise ValueError(f"expected key=value, got {assignment!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    *path, last = key.split(".")
    node = data
    for part in path:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ValueError(f"cannot set {key!r}: {part!r} is not an object")
    node[last] = value


def load_config(path: str, overrides: list[str]) -> ExperimentConfig:
    data = json.loads(Path(path).read_text())
    for item in overrides:
        apply_override(data, item)
    return ExperimentConfig.from_dict(data)


def _print_report(report: Report, paths) -> None:
    for c in report.checks:
        print(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name} ({c.anchor})"
              + (f": {c.detail}" if c.detail else ""))
    print(f"  -> {paths[0]}  {paths[1]}")


def cmd_list(args) -> int:
    for name, desc in list_experiments():
        print(f"{name:22s} {desc}")
    return 0


def cmd_run(args) -> int:
    config = load_config(args.config, args.set or [])
    report = run(config, jobs=args.jobs)
    print(f"{report.experiment}: {'PASS' if report.passed else 'FAIL'}")
    _print_report(report, report.write(config.output_dir))
    return 0 if report.passed else 1


def cmd_verify_all(args) -> int:
    ok = True
    for name in REGISTRY:
        report = run(ExperimentConfig(name, seed=args.seed), jobs=args.jobs)
        print(f"{name}: {'PASS' if report.passed else 'FAIL'}")
        _print_report(report, report.write(args.out))
        ok &= report.passed
    print("all checks passed" if ok else "some checks FAILED")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbwalk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config field by dotted key (repeatable)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("list", help="list registered experiments")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("verify-all", help="run every registered experiment with defaults")
    p.add_argument("--out", default="reports")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KeyError, ValueError, GroupError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"bbwalk: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
