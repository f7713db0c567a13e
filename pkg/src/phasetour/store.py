"""Content-addressed persistence.

Every artifact is named by an ArtifactId: the first 8 hex characters of the
SHA-256 digest of its canonical bytes. Floats are written with 17
significant digits so files round-trip bit-exactly.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from pathlib import Path

import numpy as np

from .errors import InvalidArgument, ProvenanceError

ID_LEN = 8
_HEADER_RE = re.compile(
    r"^# phase-grid m=(?P<m>\d+) kind=(?P<kind>rect|rand) N=(?P<N>\d+|-) seed=(?P<seed>-?\d+|-)"
    r"(?: id=(?P<id>[0-9a-f]{8}))?$"
)


def content_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:ID_LEN]


def fmt(x) -> str:
    return format(float(x), ".17g")


def csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue().encode()


def json_bytes(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode()


def write_artifact(directory, prefix: str, data: bytes, suffix: str) -> tuple[Path, str]:
    """Write ``<prefix>_<id><suffix>`` and return (path, id)."""
    aid = content_hash(data)
    path = Path(directory) / f"{prefix}_{aid}{suffix}"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    return path, aid


def id_from_name(path) -> str:
    stem = Path(path).name.split(".")[0]
    aid = stem.rsplit("_", 1)[-1]
    if not re.fullmatch(r"[0-9a-f]{8}", aid):
        raise ProvenanceError(f"{path}: file name carries no ArtifactId")
    return aid


def verify_file(path, expected: str | None = None) -> bytes:
    """Read a content-addressed file, checking its bytes against its id."""
    path = Path(path)
    data = path.read_bytes()
    expected = expected or id_from_name(path)
    actual = content_hash(data)
    if actual != expected:
        raise ProvenanceError(f"{path}: content hash {actual} does not match id {expected}")
    return data


# grids ---------------------------------------------------------------------

def _grid_header(grid) -> str:
    n = grid.n_per_axis if grid.n_per_axis is not None else "-"
    seed = grid.seed if grid.seed is not None else "-"
    return f"# phase-grid m={grid.dim_m} kind={grid.kind} N={n} seed={seed}"


def _grid_body(points) -> bytes:
    return csv_bytes(None, points.tolist())


def grid_id(grid) -> str:
    # the id covers header and body, minus the id token itself
    return content_hash((_grid_header(grid) + "\n").encode() + _grid_body(grid.points))


def grid_bytes(grid) -> bytes:
    return f"{_grid_header(grid)} id={grid.id}\n".encode() + _grid_body(grid.points)


def write_grid(grid, directory) -> Path:
    path = Path(directory) / f"grid_{grid.id}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(grid_bytes(grid))
    return path


def read_grid(path):
    from .grid import Grid

    text = Path(path).read_text()
    head, _, body = text.partition("\n")
    m = _HEADER_RE.match(head)
    if not m:
        raise InvalidArgument(f"{path}: not a phase-grid file")
    rows = [list(map(float, r)) for r in csv.reader(io.StringIO(body)) if r]
    pts = np.array(rows, dtype=float)
    if pts.shape[1] != int(m["m"]):
        raise InvalidArgument(f"{path}: header says m={m['m']} but rows have {pts.shape[1]} columns")
    grid = Grid(
        pts,
        kind=m["kind"],
        n_per_axis=None if m["N"] == "-" else int(m["N"]),
        seed=None if m["seed"] == "-" else int(m["seed"]),
    )
    if m["id"] and m["id"] != grid.id:
        raise ProvenanceError(f"{path}: grid id {m['id']} does not match content hash {grid.id}")
    return grid


# cost matrices ---------------------------------------------------------------

def matrix_data_bytes(entries: np.ndarray) -> bytes:
    return np.ascontiguousarray(entries, dtype="<f8").tobytes()


def write_matrix(matrix, directory) -> Path:
    """Raw little-endian float64 dump plus a JSON sidecar manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data_path = directory / f"matrix_{matrix.id}.f8"
    data_path.write_bytes(matrix_data_bytes(matrix.entries))
    manifest = {
        "grid_id": matrix.grid_id,
        "kind": matrix.kind.value,
        "a_max": matrix.a_max,
        "tol": matrix.tol,
        "n": matrix.n,
        "matrix_id": matrix.id,
        "data_file": data_path.name,
    }
    man_path = directory / f"matrix_{matrix.id}.json"
    man_path.write_bytes(json_bytes(manifest))
    return man_path


def read_matrix(manifest_path, grid=None):
    from .costspace import CostKind, CostMatrix

    manifest_path = Path(manifest_path)
    man = json.loads(manifest_path.read_text())
    data = verify_file(manifest_path.parent / man["data_file"], man["matrix_id"])
    if grid is not None and grid.id != man["grid_id"]:
        raise ProvenanceError(
            f"{manifest_path}: matrix built on grid {man['grid_id']}, not {grid.id}"
        )
    n = man["n"]
    entries = np.frombuffer(data, dtype="<f8").reshape(n, n).astype(float)
    return CostMatrix(
        entries,
        kind=CostKind(man["kind"]),
        grid_id=man["grid_id"],
        a_max=man["a_max"],
        tol=man["tol"],
    )


def find_matrix(directory, grid_id: str, kind: str, a_max: float, tol: float):
    """Manifest path of a cached matrix with these keys, or None."""
    directory = Path(directory)
    if not directory.is_dir():
        return None
    for path in sorted(directory.glob("matrix_*.json")):
        man = json.loads(path.read_text())
        if (man["grid_id"], man["kind"], man["a_max"], man["tol"]) == (grid_id, kind, a_max, tol):
            return path
    return None
