"""Command-line driver: invariant suites, attack scans, MUB export, function reports.

Exit status is 0 on success, 1 when a verification or invariant check fails
and 2 on usage or configuration errors. All files written are byte-identical
for identical command lines.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .attack import ATTACK_KINDS, builtin_attack, extract_kraus_vectors
from .errors import InvariantError
from .fm import GROUP_KINDS, FunctionSpec, GroupLaw, check_theorem2
from .mub import fourier_matrix, hadamard_by_name, is_mub_pair, is_prime, prime_mub_set, MAX_PRIME
from .optimizer import SCAN_COLUMNS, OptimizerConfig, tightness_scan
from .verify import DEFAULT_DIMS, SUITES, run_suites

COMMANDS = ("verify", "scan", "mub", "fm", "report")
FORMATS = ("json", "csv")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    dim: Optional[int] = None
    probe_dim: Optional[int] = None
    trials: int = 200
    seed: int = 1
    tol: float = 1e-9
    out_path: str = "-"
    format: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.dim is not None and self.dim < 2:
            raise UsageError(f"dim must be at least 2, got {self.dim}")
        if self.probe_dim is not None and self.probe_dim < 1:
            raise UsageError(f"probe_dim must be positive, got {self.probe_dim}")
        if self.trials < 1:
            raise UsageError(f"trials must be at least 1, got {self.trials}")
        if not self.tol > 0:
            raise UsageError(f"tol must be positive, got {self.tol}")
        if self.format is not None and self.format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}, got {self.format!r}")


CONFIG_FIELDS = tuple(f.name for f in dataclasses.fields(RunConfig))
_FLAG_TO_FIELD = {"out": "out_path"}


def load_config(path: str) -> dict:
    """Read a JSON object whose keys are RunConfig fields."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = sorted(set(data) - set(CONFIG_FIELDS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, then the config file, then explicit flags."""
    values = {}
    if args.config:
        values.update(load_config(args.config))
        if values.get("command", args.command) != args.command:
            raise UsageError(f"config is for {values['command']!r}, not {args.command!r}")
    for name in ("dim", "probe_dim", "trials", "seed", "tol", "out", "format"):
        v = getattr(args, name, None)
        if v is not None:
            values[_FLAG_TO_FIELD.get(name, name)] = v
    values["command"] = args.command
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise UsageError(f"bad config value: {exc}") from None


# serialization

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def to_json(obj) -> str:
    """JSON text; floats use the shortest repr that round-trips exactly, non-finite become null."""
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def _fmt_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt_cell(r[c]) for c in columns])
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out_path == "-":
        sys.stdout.write(text)
    else:
        Path(cfg.out_path).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.out_path).write_text(text)


def _json_only(cfg: RunConfig) -> None:
    if cfg.format == "csv":
        raise UsageError(f"{cfg.command} output is JSON only")


# commands

def cmd_verify(cfg: RunConfig, suites=None, timings: bool = False) -> int:
    dims = DEFAULT_DIMS if cfg.dim is None else (cfg.dim,)
    names = list(SUITES) if not suites else suites
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suites: {', '.join(unknown)}")

    def progress(res):
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name} worst_slack={res.worst_slack} checks={res.n_checks} "
              f"time={res.runtime:.2f}s" + (f" error={res.error}" if res.error else ""),
              file=sys.stderr)

    results = run_suites(names, dims, cfg.trials, cfg.seed, cfg.tol, progress)
    passed = all(r.passed for r in results)
    if cfg.format == "csv":
        cols = ["name", "passed", "worst_slack", "threshold", "n_checks", "error"]
        cols += ["runtime_s"] if timings else []
        text = to_csv([r.to_dict(timings) for r in results], cols)
    else:
        text = to_json({"command": "verify", "dims": list(dims), "trials": cfg.trials,
                        "seed": cfg.seed, "tol": cfg.tol, "passed": passed,
                        "suites": [r.to_dict(timings) for r in results]})
    _emit(cfg, text)
    return EXIT_OK if passed else EXIT_FAIL


def parse_theta_grid(text: Optional[str]) -> np.ndarray:
    """``linspace:<start>:<stop>:<n>`` or a comma-separated list; default 32 points on [0, pi/2]."""
    if text is None:
        return np.linspace(0.0, math.pi / 2, 32)
    try:
        if text.startswith("linspace:"):
            start, stop, n = text.split(":")[1:]
            return np.linspace(float(start), float(stop), int(n))
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise UsageError(f"bad theta grid {text!r}") from None


def cmd_scan(cfg: RunConfig, attack: str = "partial_copy", theta_grid=None,
             hadamard: str = "fourier") -> int:
    dim = cfg.dim or 2
    if attack not in ATTACK_KINDS:
        raise UsageError(f"unknown attack {attack!r}; expected one of {ATTACK_KINDS}")
    grid = parse_theta_grid(theta_grid) if attack == "partial_copy" else [math.nan] * cfg.trials
    try:
        h = hadamard_by_name(dim, hadamard)
        builtin_attack(attack, dim, cfg.probe_dim, theta=grid[0] if attack == "partial_copy" else None,
                       seed=0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = tightness_scan(attack, dim, grid, h, OptimizerConfig(seed=cfg.seed),
                          probe_dim=cfg.probe_dim, seed=cfg.seed, tol=cfg.tol)
    if cfg.format == "json":
        _emit(cfg, to_json({"command": "scan", "columns": list(SCAN_COLUMNS), "rows": rows}))
    else:
        _emit(cfg, to_csv(rows, SCAN_COLUMNS))
    return EXIT_OK


def mub_payload(dim: int) -> dict:
    if is_prime(dim) and dim <= MAX_PRIME:
        mubs = prime_mub_set(dim)
        bases, names, construction, dev = mubs.bases, mubs.names, mubs.construction, mubs.max_deviation
    else:
        f = fourier_matrix(dim)
        ok, dev = is_mub_pair(np.eye(dim), f.matrix)
        if not ok:
            raise InvariantError(f"Fourier basis not unbiased in dimension {dim}")
        bases, names, construction = (np.eye(dim), f.matrix), ("computational", "fourier"), "fourier-pair"
    return {
        "header": {"dim": dim, "n_bases": len(bases), "construction": construction,
                   "max_unbiasedness_deviation": dev, "names": list(names)},
        "bases": [[[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(b)] for b in bases],
    }


def cmd_mub(cfg: RunConfig) -> int:
    _json_only(cfg)
    _emit(cfg, to_json(mub_payload(cfg.dim or 2)))
    return EXIT_OK


def cmd_fm(cfg: RunConfig, attack: str = "random", theta: Optional[float] = None,
           function: str = "identity", group: str = "cyclic", hadamard: str = "fourier") -> int:
    _json_only(cfg)
    dim = cfg.dim or 2
    try:
        f = FunctionSpec.parse(function, dim)
        g = GroupLaw(group, dim)
        h = hadamard_by_name(dim, hadamard)
        if attack == "partial_copy" and theta is None:
            raise ValueError("partial_copy needs --theta")
        eve = builtin_attack(attack, dim, cfg.probe_dim,
                             theta=theta if attack == "partial_copy" else None, seed=cfg.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = check_theorem2(extract_kraus_vectors(eve), h, f, g, cfg=OptimizerConfig(seed=cfg.seed),
                         tol=cfg.tol)
    _emit(cfg, to_json({"command": "fm", "dim": dim, "probe_dim": eve.probe_dim, "attack": attack,
                        "theta": eve.theta, "function": list(f.values), "group": group,
                        "hadamard_id": h.name, "seed": cfg.seed, **rep.to_dict()}))
    return EXIT_OK


def _describe(path: Path) -> dict:
    data = path.read_bytes()
    entry = {"file": path.name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)}
    if path.suffix == ".json":
        try:
            obj = json.loads(data)
        except json.JSONDecodeError:
            entry["kind"] = "invalid-json"
            return entry
        if isinstance(obj, dict):
            entry["kind"] = obj.get("command", "mub" if "bases" in obj else "unknown")
            if "passed" in obj:
                entry["passed"] = obj["passed"]
            if "rows" in obj:
                entry["n_rows"] = len(obj["rows"])
    else:
        rows = list(csv.reader(io.StringIO(data.decode())))
        entry["kind"] = "scan" if rows and tuple(rows[0]) == SCAN_COLUMNS else "csv"
        entry["n_rows"] = max(0, len(rows) - 1)
    return entry


def cmd_report(cfg: RunConfig, inputs: Optional[str] = None) -> int:
    _json_only(cfg)
    if not inputs:
        raise UsageError("report needs --inputs DIR")
    root = Path(inputs)
    if not root.is_dir():
        raise UsageError(f"{inputs} is not a directory")
    out = Path(cfg.out_path).resolve() if cfg.out_path != "-" else None
    files = sorted(p for p in root.iterdir()
                   if p.is_file() and p.suffix in (".json", ".csv") and p.resolve() != out)
    if not files:
        raise UsageError(f"no .json or .csv outputs in {inputs}")
    entries = [_describe(p) for p in files]
    failed = [e["file"] for e in entries if e.get("passed") is False]
    _emit(cfg, to_json({"command": "report", "n_files": len(entries), "failed": failed,
                        "files": entries}))
    return EXIT_OK


# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, help="system dimension D")
    common.add_argument("--probe-dim", dest="probe_dim", type=int, help="probe dimension (default D^2)")
    common.add_argument("--trials", type=int, help="random trials per dimension")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--tol", type=float, help="numerical tolerance")
    common.add_argument("--out", help="output file ('-' for stdout)")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--config", help="JSON file with RunConfig fields")

    p = argparse.ArgumentParser(prog="mubsec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    v.add_argument("--suite", action="append", dest="suites", metavar="NAME",
                   help="restrict to named suites (repeatable)")
    v.add_argument("--timings", action="store_true", help="include per-suite runtime in the report")
    v.add_argument("--list", action="store_true", help="list suite names and exit")

    s = sub.add_parser("scan", parents=[common], help="tightness scan over an attack family")
    s.add_argument("--attack", default="partial_copy")
    s.add_argument("--theta-grid", dest="theta_grid")
    s.add_argument("--hadamard", default="fourier")

    sub.add_parser("mub", parents=[common], help="export a certified set of unbiased bases")

    f = sub.add_parser("fm", parents=[common], help="function-of-message report")
    f.add_argument("--attack", default="random")
    f.add_argument("--theta", type=float)
    f.add_argument("--function", default="identity")
    f.add_argument("--group", default="cyclic", choices=GROUP_KINDS)
    f.add_argument("--hadamard", default="fourier")

    r = sub.add_parser("report", parents=[common], help="summarize a directory of outputs")
    r.add_argument("--inputs", help="directory holding earlier outputs")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "verify":
            if args.list:
                print("\n".join(SUITES))
                return EXIT_OK
            return cmd_verify(cfg, args.suites, args.timings)
        if args.command == "scan":
            return cmd_scan(cfg, args.attack, args.theta_grid, args.hadamard)
        if args.command == "mub":
            return cmd_mub(cfg)
        if args.command == "fm":
            return cmd_fm(cfg, args.attack, args.theta, args.function, args.group, args.hadamard)
        return cmd_report(cfg, args.inputs)
    except UsageError as exc:
        print(f"mubsec {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"mubsec {args.command}: invariant violated: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
