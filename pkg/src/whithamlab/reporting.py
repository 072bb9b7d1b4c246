"""Run artifacts: delimited output, manifests, and binary state dumps.

Numbers in CSV files are serialized with 17 significant digits so a
64-bit float round-trips exactly; re-running a recorded config must
reproduce every CSV byte for byte. Manifests are JSON, one file per run
plus an append-only ``manifests.jsonl`` ledger at the output root.
"""

from __future__ import annotations

import dataclasses
import json
import os
import struct
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .solvers import Trajectory

FLOAT_FMT = ".17g"
OUT_ENV = "WHITHAMLAB_OUT"
DEFAULT_OUT = "runs"

# header: n, period, N, representation tag, eta_bar (little-endian)
_DUMP_HEADER = struct.Struct("<QdQBd")
_REPRESENTATION_TAGS = {"symmetric": 0, "physical": 1, "velocity": 2}
_TAG_NAMES = {v: k for k, v in _REPRESENTATION_TAGS.items()}


def format_value(value) -> str:
    """One CSV cell. Floats get the full 17-digit treatment."""
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FMT)
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    lines = [",".join(str(h) for h in header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def read_csv(path):
    """Inverse of write_csv: header list plus rows of strings."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines:
        raise ConfigError(f"empty CSV file {path}")
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def resolve_out_root(explicit: str | None = None) -> Path:
    """Output root precedence: explicit flag, environment, ./runs."""
    if explicit:
        return Path(explicit)
    env = os.environ.get(OUT_ENV)
    if env:
        return Path(env)
    return Path(DEFAULT_OUT)


def new_run_id() -> str:
    return time.strftime("%Y%m%dT%H%M%S") + "-" + uuid.uuid4().hex[:8]


@dataclass
class RunManifest:
    """Everything needed to reproduce and audit one scenario run."""

    scenario: str
    run_id: str
    status: str
    grid: dict
    solve: dict
    seed: int
    parameters: dict
    version: str
    started: str
    finished: str
    duration_s: float
    headline_name: str
    headline_value: float
    fitted: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        names = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


def write_manifest(run_dir: Path, manifest: RunManifest) -> Path:
    path = Path(run_dir) / "manifest.json"
    path.write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n",
                    encoding="ascii")
    return path


def append_manifest(out_root: Path, manifest: RunManifest) -> Path:
    """Append one line to the ledger; never rewrites previous entries."""
    ledger = Path(out_root) / "manifests.jsonl"
    with open(ledger, "a", encoding="ascii") as fh:
        fh.write(manifest.to_json() + "\n")
    return ledger


def load_manifests(out_root: Path) -> list[RunManifest]:
    ledger = Path(out_root) / "manifests.jsonl"
    if not ledger.exists():
        return []
    out = []
    for line in ledger.read_text(encoding="ascii").splitlines():
        if line.strip():
            out.append(RunManifest.from_dict(json.loads(line)))
    return out


def trajectory_energy_csv(path, traj: Trajectory) -> Path:
    """Per-time spectral-energy summary: time, then ``|d^k f|^2`` per field."""
    names = {"symmetric": ("zeta", "u"), "physical": ("eta", "u"),
             "velocity": ("u",)}[traj.representation]
    grid = traj.grid
    coeffs = np.fft.fft(traj.values, axis=-1) / grid.n
    xi = grid.wavenumbers
    N = traj.config.N
    weights = np.array([np.abs(xi) ** (2 * k) for k in range(N + 1)])
    # (steps, fields, k): period * sum_m xi^{2k} |c_m|^2
    energies = grid.period * np.einsum("sfm,km->sfk",
                                       (coeffs * np.conj(coeffs)).real, weights)
    header = ["time"]
    for name in names:
        header.extend(f"{name}_E{k}" for k in range(N + 1))
    rows = []
    for i, t in enumerate(traj.times):
        row = [float(t)]
        for f in range(len(names)):
            row.extend(float(v) for v in energies[i, f])
        rows.append(row)
    return write_csv(path, header, rows)


def dump_trajectory(path, traj: Trajectory) -> Path:
    """Binary full-state dump.

    Header: n, period, N, representation tag, eta_bar; payload is the
    stored samples as little-endian 64-bit floats, component rows in
    order (zeta/eta then u) per stored time. Times are not duplicated
    here; they live in the run's CSV output.
    """
    path = Path(path)
    tag = _REPRESENTATION_TAGS[traj.representation]
    eta_bar = float("nan") if traj.eta_bar is None else float(traj.eta_bar)
    header = _DUMP_HEADER.pack(traj.grid.n, traj.grid.period,
                               traj.config.N, tag, eta_bar)
    payload = np.ascontiguousarray(traj.values, dtype="<f8").tobytes()
    path.write_bytes(header + payload)
    return path


def load_state_dump(path) -> dict:
    raw = Path(path).read_bytes()
    if len(raw) < _DUMP_HEADER.size:
        raise ConfigError(f"state dump {path} is truncated")
    n, period, N, tag, eta_bar = _DUMP_HEADER.unpack_from(raw)
    if tag not in _TAG_NAMES:
        raise ConfigError(f"state dump {path} has unknown representation tag {tag}")
    representation = _TAG_NAMES[tag]
    fields = 1 if representation == "velocity" else 2
    payload = np.frombuffer(raw, dtype="<f8", offset=_DUMP_HEADER.size)
    if payload.size % (fields * n) != 0:
        raise ConfigError(f"state dump {path} payload does not tile {fields}x{n}")
    values = payload.reshape(-1, fields, n)
    return {
        "n": int(n),
        "period": float(period),
        "N": int(N),
        "representation": representation,
        "eta_bar": None if np.isnan(eta_bar) else float(eta_bar),
        "values": values,
    }
