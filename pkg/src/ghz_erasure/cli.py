"""Command-line runner: encode tables, single erasure runs, sweeps, circuit export.

Exit status: 0 when the report passes, 1 when it does not, 2 for a bad
configuration and 3 when the requested size exceeds the simulator.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import codec, oracle
from .channel import ErasureEvent, apply_erasure, parse_model
from .codec import CodeLayout, ErasureFlags
from .errors import CapacityError, GHZErasureError
from .statevector import fidelity, random_state

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3

SCENARIOS = ("encode-table", "single-run", "sweep", "export-circuit")
CIRCUITS = ("enc", "red", "had", "ghz", "dec", "rec")
FORMATS = ("json", "csv")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    k: int = 5
    scenario: str = "single-run"
    erase: str = ""
    model: str = "all"
    seed: int = 0
    trials: int = 1
    output: str | None = None
    format: str = "json"
    which: str = "enc"
    threads: int | None = None

    def validate(self) -> None:
        if self.k > 5:
            needed = self.k * (self.k // 2 + 2) + self.k // 2
            raise CapacityError(f"k={self.k} needs {needed} qubits; the runner supports k <= 5")
        if self.k < 3:
            raise ConfigError(f"k must be at least 3, got {self.k}")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if self.which not in CIRCUITS:
            raise ConfigError(f"unknown circuit {self.which!r}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.scenario == "export-circuit" and self.which == "rec" and not self.erase:
            raise ConfigError("--which rec needs --erase")

    def echo(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name not in ("output", "threads")}


_INT_FIELDS = {"k", "seed", "trials", "threads"}


def _coerce(key: str, value) -> object:
    known = {f.name for f in fields(RunConfig)}
    if key not in known:
        raise ConfigError(f"unknown config key {key!r}")
    if key in _INT_FIELDS and value is not None:
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None
    return None if value is None else str(value)


def load_config_file(path: str) -> dict:
    """JSON object, or ``key = value`` lines with ``#`` comments."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"bad JSON in {path}: {e}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config JSON must be an object")
    else:
        raw = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{n}: expected key=value")
            raw[key.strip()] = value.strip()
    return {key.replace("-", "_"): _coerce(key.replace("-", "_"), v) for key, v in raw.items()}


def parse_erasures(text: str, default_seed: int) -> list[ErasureEvent]:
    """``block:position:model`` items, comma separated. ``model`` may be ``leak@7``."""
    events = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        parts = item.split(":")
        if len(parts) != 3:
            raise ConfigError(f"erasure {item!r} is not block:position:model")
        try:
            block, position = int(parts[0]), int(parts[1])
        except ValueError:
            raise ConfigError(f"erasure {item!r}: block and position must be integers") from None
        try:
            model = parse_model(parts[2], default_seed)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        events.append(ErasureEvent(block, position, model))
    return events


def parse_models(text: str, default_seed: int) -> list:
    if text.strip().lower() == "all":
        return oracle.default_models()
    try:
        return [parse_model(s, default_seed) for s in text.split(",") if s.strip()]
    except ValueError as e:
        raise ConfigError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ghz-erasure", description=__doc__.splitlines()[0])
    p.add_argument("--config", metavar="PATH", help="JSON or key=value file; flags override it")
    p.add_argument("--k", type=int)
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--erase", metavar="B:POS:MODEL,...",
                   help="flagged erasures, e.g. 0:1:phase,1:5:phase")
    p.add_argument("--model", help="sweep models, comma separated, or 'all'")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--output", metavar="PATH", help="report file (default: stdout)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--which", choices=CIRCUITS, help="circuit for export-circuit")
    p.add_argument("--threads", type=int, help="sweep workers (capped by GHZ_ERASURE_THREADS)")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = load_config_file(args.config) if args.config else {}
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _single_run(cfg: RunConfig) -> oracle.Report:
    layout = CodeLayout(cfg.k)
    events = parse_erasures(cfg.erase, cfg.seed)
    flags = ErasureFlags(tuple((e.block, e.position) for e in events))
    flags.check(layout)
    model_name = ",".join(e.model.name for e in events) or "NONE"
    report = oracle.Report(cfg.echo())
    for j in range(cfg.trials):
        start = time.perf_counter()
        psi = random_state(cfg.k, np.random.default_rng(cfg.seed + j))
        corrupted = apply_erasure(codec.encode(psi, layout), layout, events)
        restored = codec.restore(corrupted, layout, flags)
        f = fidelity(codec.extract_message(restored, layout), psi)
        report.cases.append(oracle.CaseRecord(
            str(flags), model_name, cfg.seed + j, f, (time.perf_counter() - start) * 1e3))
    return report


def export_circuit(cfg: RunConfig) -> str:
    layout = CodeLayout(cfg.k)
    if cfg.which in ("dec", "rec"):
        full = layout.with_restore_block()
        events = parse_erasures(cfg.erase, cfg.seed)
        flags = ErasureFlags(tuple((e.block, e.position) for e in events))
        flags.check(layout)
        if cfg.which == "dec":
            seq = codec.build_u_dec(full, flags)
        else:
            seq = codec.GateSequence(())
            for b, a in flags.entries:
                seq = seq + codec.build_u_rec(full, a, b)
        return codec.circuit_to_text(seq, full.n_qubits)
    builders = {
        "enc": codec.build_u_enc,
        "red": codec.build_u_red,
        "had": codec.build_hadamard_layer,
        "ghz": codec.build_u_ghz,
    }
    return codec.circuit_to_text(builders[cfg.which](layout), layout.n_qubits)


def run(cfg: RunConfig) -> tuple[int, oracle.Report | None]:
    """Execute a validated config and write its output. Returns (exit status, report)."""
    if cfg.scenario == "export-circuit":
        _emit(cfg, export_circuit(cfg))
        return EXIT_PASS, None
    if cfg.scenario == "encode-table":
        report = oracle.verify_encoding_table(cfg.k)
        report.config = cfg.echo()
    elif cfg.scenario == "single-run":
        report = _single_run(cfg)
    else:
        models = parse_models(cfg.model, cfg.seed)
        report = oracle.sweep_all_patterns(cfg.k, models, cfg.trials, cfg.seed, cfg.threads)
        report.config = {**cfg.echo(), "models": report.config["models"],
                         "n_patterns": report.config["n_patterns"]}
    _emit(cfg, report.to_json() if cfg.format == "json" else report.to_csv())
    return (EXIT_PASS if report.passed else EXIT_FAIL), report


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        status, report = run(cfg)
    except CapacityError as e:
        print(f"ghz-erasure: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, GHZErasureError, ValueError, TypeError) as e:
        print(f"ghz-erasure: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"ghz-erasure: {e}", file=sys.stderr)
        return EXIT_USAGE
    if report is not None:
        s = report.summary()
        print(f"{len(report.cases)} cases, min fidelity {s['min_fidelity']:.15f}, "
              f"{'PASS' if s['pass'] else 'FAIL'}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
