"""Run persistence: sweep containers, CSV/plot-data emission, manifests,
immutable run directories and flat key=value configs.

Numeric CSV content is deterministic (17 significant digits, fixed
column order); timestamps live only in the manifest, which is written
last as the completion marker.
"""
from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError

RUN_ROOT_ENV = "BUCKLAB_RUNS"
ARTIFACT_VERSION = "0.1.0"


def fmt(value) -> str:
    """Deterministic text for CSV cells."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        if np.isposinf(value):
            return "+inf"
        if np.isneginf(value):
            return "-inf"
        return f"{float(value):.17g}"
    return str(value)


@dataclass
class SweepResult:
    """Per-point records of a parameter sweep plus skip log and summary."""

    parameter: str
    grid: list[float]
    records: list[dict] = field(default_factory=list)
    skips: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_csv(self, columns: list[str]) -> str:
        lines = [",".join(columns)]
        for rec in self.records:
            lines.append(",".join(fmt(rec[c]) for c in columns))
        return "\n".join(lines) + "\n"


@dataclass
class RunManifest:
    command: str
    params: dict
    version: str = ARTIFACT_VERSION
    hashes: dict = field(default_factory=dict)
    started_utc: str = ""
    finished_utc: str = ""
    outputs: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "params": self.params,
                "version": self.version,
                "hashes": self.hashes,
                "started_utc": self.started_utc,
                "finished_utc": self.finished_utc,
                "outputs": self.outputs,
            },
            indent=2,
            sort_keys=True,
        )


def default_run_root() -> Path:
    return Path(os.environ.get(RUN_ROOT_ENV, "runs"))


def new_run_dir(root: Path | str, command: str) -> Path:
    """Fresh timestamped directory; collisions get a numeric suffix,
    existing runs are never reused or overwritten."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    stamp = time.strftime("%Y%m%d-%H%M%S", time.gmtime())
    base = root / f"{stamp}-{command}"
    candidate = base
    suffix = 0
    while True:
        try:
            candidate.mkdir()
            return candidate
        except FileExistsError:
            suffix += 1
            candidate = Path(f"{base}-{suffix}")


def write_results(run_dir: Path | str, manifest: RunManifest, tables: dict[str, str]) -> list[Path]:
    """Write output files then the manifest (atomic completion marker).

    ``tables`` maps file names to fully formatted text content. Returns
    the written paths, manifest last.
    """
    run_dir = Path(run_dir)
    paths = []
    for name, content in tables.items():
        p = run_dir / name
        p.write_text(content)
        paths.append(p)
    manifest.outputs = sorted(tables)
    manifest.finished_utc = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    tmp = run_dir / "manifest.json.tmp"
    tmp.write_text(manifest.to_json() + "\n")
    final = run_dir / "manifest.json"
    os.replace(tmp, final)
    paths.append(final)
    return paths


def is_complete_run(run_dir: Path | str) -> bool:
    run_dir = Path(run_dir)
    manifest = run_dir / "manifest.json"
    if not manifest.exists():
        return False
    meta = json.loads(manifest.read_text())
    return all((run_dir / name).exists() for name in meta.get("outputs", []))


def emit_plot_data(
    series: dict[str, np.ndarray], path: Path | str, xlog: bool = False, ylog: bool = False
) -> Path:
    """Whitespace-delimited columns with a '#' header naming columns and
    log-axis hints; consumable by gnuplot-style tools."""
    names = list(series)
    columns = [np.asarray(series[n], dtype=np.float64) for n in names]
    if columns and any(len(c) != len(columns[0]) for c in columns):
        raise ValueError("plot series must have equal lengths")
    lines = ["# " + " ".join(names)]
    hints = [h for h, on in (("xlog", xlog), ("ylog", ylog)) if on]
    if hints:
        lines.append("# " + " ".join(hints))
    n_rows = len(columns[0]) if columns else 0
    for i in range(n_rows):
        lines.append(" ".join(fmt(c[i]) for c in columns))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def plot_data_content(series: dict[str, np.ndarray], xlog: bool = False, ylog: bool = False) -> str:
    """Same format as :func:`emit_plot_data`, returned as text."""
    names = list(series)
    columns = [np.asarray(series[n], dtype=np.float64) for n in names]
    if columns and any(len(c) != len(columns[0]) for c in columns):
        raise ValueError("plot series must have equal lengths")
    lines = ["# " + " ".join(names)]
    hints = [h for h, on in (("xlog", xlog), ("ylog", ylog)) if on]
    if hints:
        lines.append("# " + " ".join(hints))
    n_rows = len(columns[0]) if columns else 0
    for i in range(n_rows):
        lines.append(" ".join(fmt(c[i]) for c in columns))
    return "\n".join(lines) + "\n"


def load_config(path: Path | str) -> dict[str, str]:
    """Flat `key = value` file; '#' comments and blank lines ignored."""
    raw: dict[str, str] = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            key, value = key.strip(), value.strip()
            if not key or not value:
                raise ConfigError(f"{path}:{lineno}: empty key or value")
            if key in raw:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = value
    return raw
