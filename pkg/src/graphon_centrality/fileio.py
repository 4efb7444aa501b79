"""Deterministic, atomic output writers and graph readers."""
import csv
import io
import json
import math
import os
import tempfile

import numpy as np

from .errors import ConfigError


def _plain(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def canonical_json(doc):
    return json.dumps(_plain(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def atomic_write(path, data):
    """Write through a temporary file in the target directory, then rename."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, doc):
    return atomic_write(path, canonical_json(doc))


def csv_text(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    for row in rows:
        w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for v in row])
    return buf.getvalue()


def write_csv(path, rows):
    return atomic_write(path, csv_text(rows))


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def read_adjacency(path):
    """Dense 0/1 (or weighted) CSV matrix, or an edge list ``i,j[,w]`` with 0-based nodes.

    Edge lists are recognised by a header line ``i,j`` or ``i,j,w``.
    """
    with open(path, encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise ConfigError(f"{path}: empty matrix file")
    try:
        if [c.strip() for c in rows[0][:2]] == ["i", "j"]:
            edges = np.array([[float(c) for c in r] for r in rows[1:]], dtype=np.float64).reshape(-1, len(rows[0]))
            n = int(edges[:, :2].max()) + 1 if len(edges) else 0
            A = np.zeros((n, n))
            w = edges[:, 2] if edges.shape[1] > 2 else 1.0
            A[edges[:, 0].astype(int), edges[:, 1].astype(int)] = w
            A[edges[:, 1].astype(int), edges[:, 0].astype(int)] = w
            return A
        A = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError(f"{path}: matrix is not square")
    return A
