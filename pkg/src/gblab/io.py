"""Configuration parsing and persistence helpers."""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from pathlib import Path

import numpy as np

from .errors import DomainError
from .grid import Grid
from .simulator import FieldPair, SimulationConfig, Trajectory

OUTPUT_ENV = "GBLAB_OUTPUT_DIR"


def fmt(v) -> str:
    return f"{float(v):.17g}"


def _coerce(raw: str, kind):
    if kind is bool:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise DomainError(f"not a boolean: {raw!r}")
    try:
        return kind(raw.strip())
    except ValueError as exc:
        raise DomainError(f"cannot read {raw!r} as {kind.__name__}") from exc


def parse_key_values(lines) -> dict[str, str]:
    """``key = value`` lines; blank lines and ``#`` comments ignored."""
    out = {}
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {num}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def simulation_config(values: dict[str, str] | None = None, **overrides) -> SimulationConfig:
    """Build a validated config from string values plus typed overrides."""
    types = {f.name: type(f.default) for f in dataclasses.fields(SimulationConfig)}
    kw = {}
    for k, v in (values or {}).items():
        if k not in types:
            raise DomainError(f"unknown config key {k!r}")
        kw[k] = _coerce(v, types[k])
    for k, v in overrides.items():
        if v is None:
            continue
        if k not in types:
            raise DomainError(f"unknown config key {k!r}")
        kw[k] = _coerce(v, types[k]) if isinstance(v, str) else types[k](v)
    return SimulationConfig(**kw).validate()


def load_config(path) -> dict[str, str]:
    try:
        with open(path) as fh:
            return parse_key_values(fh)
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from exc


def output_dir(flag: str | None = None) -> Path:
    """Explicit flag, else the environment override, else the working directory."""
    d = Path(flag or os.environ.get(OUTPUT_ENV) or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_rows(path, header_line: str, columns: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header_line + "\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def save_trajectory(directory, traj: Trajectory, stem: str = "trajectory") -> tuple[Path, Path]:
    directory = Path(directory)
    cfg = traj.meta.get("config")
    npz = directory / f"{stem}.npz"
    np.savez(
        npz,
        schema=np.array("gblab/trajectory v1"),
        times=traj.times,
        u1=np.array([s.u1 for s in traj.snapshots]),
        u2=np.array([s.u2 for s in traj.snapshots]),
        E=traj.E, P=traj.P, p=traj.p, L=traj.grid.L, n=traj.grid.n,
        blowup=traj.blowup,
        config=np.array(json.dumps(dataclasses.asdict(cfg) if cfg is not None else {}, sort_keys=True)),
    )
    cons = directory / f"{stem}_conserved.csv"
    write_rows(cons, "# gblab conserved v1", ["t", "E", "P"], zip(traj.times, traj.E, traj.P))
    return npz, cons


def load_trajectory(path) -> Trajectory:
    try:
        data = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as exc:
        raise DomainError(f"cannot read trajectory {path}: {exc}") from exc
    with data:
        if str(data["schema"]) != "gblab/trajectory v1":
            raise DomainError("unsupported trajectory schema")
        grid = Grid(float(data["L"]), int(data["n"]))
        snaps = [FieldPair(a, b) for a, b in zip(data["u1"], data["u2"])]
        cfg = json.loads(str(data["config"]))
        meta = {"config": SimulationConfig(**cfg)} if cfg else {}
        return Trajectory(np.array(data["times"]), snaps, np.array(data["E"]), np.array(data["P"]),
                          float(data["p"]), grid, bool(data["blowup"]), meta)
