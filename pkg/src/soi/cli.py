"""Command-line front end.

Each run writes ``<command>-<hash>.csv`` (series) or ``<command>-<hash>.json``
(scalar reports) plus ``<command>-<hash>.config.json`` into ``--out``; the hash
covers the run configuration, and ``soi --config FILE`` replays a run.

Exit codes: 0 success, 2 invalid arguments, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import reports
from .asymptotics import NumericFailure
from .purification import MetricError

log = logging.getLogger("soi")

COMMANDS = ("volume", "curves", "coarse-grain", "so4-compare", "asymptotics", "fidelity")
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


@dataclass
class RunConfig:
    command: str
    group: str | None = None
    spectrum: list[float] | None = None
    method: str | None = None
    samples: int = 100_000
    nodes: int = 32
    seed: int = 0
    ell: int = 300
    k: int = 10
    observable: list[str] = field(default_factory=lambda: ["volume", "von_neumann", "linear"])
    weyl_filter: bool = True
    n_list: list[int] = field(default_factory=lambda: [3, 5, 7, 11, 30])
    level: float = 1e-4
    weighting: str = "uniform"
    budget: int = 20
    resolution: int | None = None
    count: int = 1000
    rho: list[float] | None = None
    sigma: list[float] | None = None
    rho_basis: list[float] | None = None
    sigma_basis: list[float] | None = None

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def digest(self) -> str:
        blob = json.dumps(dataclasses.asdict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _words(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="soi", description="Volumes and coarse-graining of purification manifolds.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="replay a run from its emitted config file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--group")
    p.add_argument("--spectrum", type=_floats)
    p.add_argument("--method")
    p.add_argument("--samples", type=int)
    p.add_argument("--nodes", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--observable", type=_words)
    p.add_argument("--weyl-filter", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--n-list", type=_ints)
    p.add_argument("--level", type=float)
    p.add_argument("--weighting", choices=("uniform", "volume"))
    p.add_argument("--budget", type=int)
    p.add_argument("--resolution", type=int, help="grid divisions for curves / asymptotics")
    p.add_argument("--count", type=int, help="number of spectra for so4-compare")
    p.add_argument("--rho", type=_floats, help="spectrum of rho (fidelity)")
    p.add_argument("--sigma", type=_floats, help="spectrum of sigma (fidelity)")
    p.add_argument("--rho-basis", type=_floats, help="U(N) chart parameters of rho's eigenbasis")
    p.add_argument("--sigma-basis", type=_floats, help="U(N) chart parameters of sigma's eigenbasis")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config is not None:
        cfg = RunConfig.from_json(args.config.read_text(encoding="utf-8"))
        if args.command and args.command != cfg.command:
            raise ValueError(f"config is for {cfg.command!r}, not {args.command!r}")
        return cfg
    if args.command is None:
        raise ValueError("a command or --config is required")
    cfg = RunConfig(args.command)
    for f in dataclasses.fields(RunConfig):
        if f.name == "command":
            continue
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(cfg, f.name, value)
    return cfg


def execute(cfg: RunConfig, out: Path) -> list[Path]:
    """Run one configured command and write its artifacts; returns the paths written."""
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{cfg.command}-{cfg.digest()}"
    written = []

    def csv_out(table, suffix=""):
        path = out / f"{stem}{suffix}.csv"
        write_csv(path, *table)
        written.append(path)

    def json_out(payload):
        path = out / f"{stem}.json"
        write_json(path, payload)
        written.append(path)

    if cfg.command == "volume":
        if not cfg.group or not cfg.spectrum:
            raise ValueError("volume needs --group and --spectrum")
        json_out(reports.cmd_volume(cfg.group, cfg.spectrum, cfg.method or "closed",
                                    cfg.samples, cfg.nodes, cfg.seed))
    elif cfg.command == "curves":
        csv_out(reports.cmd_curves(cfg.group or "su2", cfg.resolution))
    elif cfg.command == "coarse-grain":
        cells, segments = reports.cmd_coarse_grain(cfg.ell, cfg.k, cfg.observable, cfg.weyl_filter)
        csv_out(cells, "-cells")
        csv_out(segments, "-segments")
    elif cfg.command == "so4-compare":
        csv_out(reports.cmd_so4_compare(cfg.count, cfg.samples, cfg.seed))
    elif cfg.command == "asymptotics":
        table, curves = reports.cmd_asymptotics(cfg.n_list, cfg.level, cfg.weighting, cfg.resolution or 200)
        csv_out(table)
        csv_out(curves, "-curves")
    elif cfg.command == "fidelity":
        if not cfg.rho or not cfg.sigma:
            raise ValueError("fidelity needs --rho and --sigma")
        json_out(reports.cmd_fidelity(cfg.rho, cfg.sigma, cfg.method or "closed", cfg.budget,
                                      cfg.seed, cfg.rho_basis, cfg.sigma_basis))
    else:
        raise ValueError(f"unknown command {cfg.command!r}")

    cfg_path = out / f"{stem}.config.json"
    cfg_path.write_text(cfg.to_json(), encoding="utf-8")
    written.append(cfg_path)
    return written


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        paths = execute(cfg, args.out)
    except (NumericFailure, MetricError, ArithmeticError) as exc:
        print(f"soi: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, OSError) as exc:
        print(f"soi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
