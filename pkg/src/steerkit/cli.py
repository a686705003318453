"""``steerctl``: thresholds, verdicts, adapted criteria and table regeneration.

Exit codes: 0 steerable (or success), 1 not steerable, 2 input error,
3 enumeration budget exceeded, 4 reproduction failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from .adapted import r2_criterion, r3_criterion, r_infinity_criterion
from .errors import BudgetExceeded, InputError, SteerkitError
from .io import as_plain, load_assembly, load_json, load_state
from .reproduce import build_tables, write_tables
from .steering import verdict
from .thresholds import general_nst, probabilistic_oracle, qubit_nst

EXIT_STEERABLE = 0
EXIT_NOT_STEERABLE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_REPRODUCE = 4

FORMATS = ("table", "csv", "json")
COMMANDS = ("nst", "verdict", "adapted", "reproduce")
KINDS = ("r2", "r3", "rinf")


@dataclass
class RunConfig:
    command: str = ""
    inputs: list = field(default_factory=list)
    resolution: int = 64
    format: str = "table"
    seed: int = 0
    out: str | None = None
    kind: str = "r2"
    oracle_samples: int = 0

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise InputError(f"command must be one of {list(COMMANDS)}, got {self.command!r}")
        if self.format not in FORMATS:
            raise InputError(f"format must be one of {list(FORMATS)}, got {self.format!r}")
        if self.kind not in KINDS:
            raise InputError(f"kind must be one of {list(KINDS)}, got {self.kind!r}")
        for name in ("resolution", "seed", "oracle_samples"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, int):
                raise InputError(f"{name} must be an integer, got {val!r}")
        if self.resolution < 32:
            raise InputError(f"resolution must be >= 32, got {self.resolution}")
        if self.oracle_samples < 0:
            raise InputError("oracle_samples must be nonnegative")
        if not isinstance(self.inputs, list) or not all(isinstance(p, str) for p in self.inputs):
            raise InputError("inputs must be a list of paths")
        return self

    @classmethod
    def from_file(cls, path) -> dict:
        """Strict config loading: returns only the keys present in the file."""
        obj = load_json(path)
        if not isinstance(obj, dict):
            raise InputError(f"{path}: config must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise InputError(f"{path}: unknown config keys {sorted(extra)}")
        return obj


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # defaults are None so config-file values survive unless overridden
    common.add_argument("--resolution", type=int, default=None, help="quadrature polar nodes (>= 32)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--out", default=None, help="output file (output directory for reproduce)")
    common.add_argument("--config", default=None, help="JSON RunConfig file")

    parser = _Parser(prog="steerctl", description="Linear steering criteria toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("nst", parents=[common], help="nonsteering threshold of a measurement set")
    p.add_argument("measurements")
    p.add_argument("--oracle-samples", type=int, default=None, help="also run the random-response oracle")
    p = sub.add_parser("verdict", parents=[common], help="steering verdict for a state and two measurement sets")
    p.add_argument("state")
    p.add_argument("alice")
    p.add_argument("bob")
    p = sub.add_parser("adapted", parents=[common], help="state-adapted criterion for a two-qubit state")
    p.add_argument("state")
    p.add_argument("--kind", choices=KINDS, default=None)
    sub.add_parser("reproduce", parents=[common], help="regenerate the reference tables as CSV")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = RunConfig.from_file(args.config) if args.config else {}
    values["command"] = args.command
    inputs = [getattr(args, k) for k in ("measurements", "state", "alice", "bob") if getattr(args, k, None)]
    if inputs:
        values["inputs"] = inputs
    for name in ("resolution", "seed", "format", "out", "kind", "oracle_samples"):
        val = getattr(args, name, None)
        if val is not None:
            values[name] = val
    return RunConfig(**values).validate()


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def render(record: dict, fmt: str) -> str:
    record = as_plain(record)
    if fmt == "json":
        return json.dumps(record) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(record.keys())
        writer.writerow([json.dumps(v) if isinstance(v, list) else _fmt(v) for v in record.values()])
        return buf.getvalue()
    width = max(len(k) for k in record)
    return "".join(f"{k:<{width}}  {_fmt(v)}\n" for k, v in record.items())


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_nst(cfg: RunConfig) -> int:
    assembly = load_assembly(cfg.inputs[0])
    report = qubit_nst(assembly) if assembly.dim == 2 else general_nst(assembly)
    record = {"dim": assembly.dim, "settings": assembly.n_settings, **report.to_json()}
    if cfg.oracle_samples:
        record["oracle_f"] = probabilistic_oracle(assembly, cfg.oracle_samples, cfg.seed)
        record["oracle_seed"] = cfg.seed
    _emit(render(record, cfg.format), cfg.out)
    return 0


def cmd_verdict(cfg: RunConfig) -> int:
    state, alice, bob = cfg.inputs
    v = verdict(load_state(state), load_assembly(alice), load_assembly(bob))
    _emit(render(v.to_json(), cfg.format), cfg.out)
    return EXIT_STEERABLE if v.steerable else EXIT_NOT_STEERABLE


def cmd_adapted(cfg: RunConfig) -> int:
    w = load_state(cfg.inputs[0])
    if cfg.kind == "r2":
        crit = r2_criterion(w)
    elif cfg.kind == "r3":
        crit = r3_criterion(w)
    else:
        crit = r_infinity_criterion(w, cfg.resolution)
    record = crit.to_json()
    if cfg.kind == "rinf":
        record["error_estimate"] = crit.error_estimate
    _emit(render(record, cfg.format), cfg.out)
    return EXIT_STEERABLE if crit.steerable else EXIT_NOT_STEERABLE


def cmd_reproduce(cfg: RunConfig) -> int:
    out = Path(cfg.out or "reproduction")
    try:
        out.mkdir(parents=True, exist_ok=True)
        tables = build_tables(cfg.resolution)
        write_tables(tables, out)
    except OSError as exc:
        raise _ReproductionFailure(f"cannot write to {out}: {exc.strerror}") from exc
    except SteerkitError as exc:
        raise _ReproductionFailure(f"{type(exc).__name__}: {exc}") from exc
    if cfg.format == "json":
        text = json.dumps({t.name: {"max_abs_error": t.max_error, "tolerance": t.tolerance, "passed": t.passed}
                           for t in tables}) + "\n"
    else:
        lines = [f"{t.name:<12} rows={len(t.rows):<3} max_abs_error={t.max_error:.3e} "
                 f"tol={t.tolerance:.0e} {'ok' if t.passed else 'FAIL'}" for t in tables]
        text = "\n".join(lines) + f"\nwrote {len(tables)} tables to {out}\n"
    sys.stdout.write(text)
    failed = [t.name for t in tables if not t.passed]
    if failed:
        raise _ReproductionFailure(f"tables out of tolerance: {failed}")
    return 0


class _ReproductionFailure(SteerkitError):
    pass


_HANDLERS = {"nst": cmd_nst, "verdict": cmd_verdict, "adapted": cmd_adapted, "reproduce": cmd_reproduce}


def _diagnose(exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__.lstrip("_"), "message": str(exc), "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        return _HANDLERS[cfg.command](cfg)
    except _ReproductionFailure as exc:
        return _diagnose(exc, EXIT_REPRODUCE)
    except BudgetExceeded as exc:
        return _diagnose(exc, EXIT_BUDGET)
    except (SteerkitError, ValueError, OSError) as exc:
        return _diagnose(exc, EXIT_INPUT)


if __name__ == "__main__":
    raise SystemExit(main())
