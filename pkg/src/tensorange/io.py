"""Matrix Market input and output, multi-block basis files and boundary CSV export."""

from __future__ import annotations

import csv
import io
import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.io
import scipy.sparse as sp

from .tensor import MapBlocks, choi_from_blocks
from .validation import check_matrix

HEADER = "%%MatrixMarket"
_SHAPE_RE = re.compile(r"^%\s*shape:\s*(\d+)\s*,\s*(\d+)\s*$", re.IGNORECASE)


class MatrixFileError(ValueError):
    """Raised for unreadable or malformed matrix files."""


def _parse(text: str, source: str):
    try:
        M = scipy.io.mmread(io.BytesIO(text.encode()))
    except Exception as exc:  # scipy raises a mix of ValueError/OSError/IndexError
        raise MatrixFileError(f"{source}: malformed Matrix Market data ({exc})") from exc
    if np.iscomplexobj(M.data if sp.issparse(M) else M):
        raise MatrixFileError(f"{source}: complex matrices are not supported")
    return M


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc.strerror}") from exc


def read_matrix(path, *, sparse: bool | None = None):
    """Read a real square matrix.

    Coordinate files come back as ``csr_array`` and array files as ``ndarray``
    unless ``sparse`` forces one or the other.
    """
    M = _parse(_read_text(path), str(path))
    if sparse is True or (sparse is None and sp.issparse(M)):
        M = sp.csr_array(M)
    elif sp.issparse(M):
        M = M.toarray()
    try:
        return check_matrix(M)
    except ValueError as exc:
        raise MatrixFileError(f"{path}: {exc}") from exc


def write_matrix(path, M, comment: str = "") -> None:
    """Write ``M`` in coordinate (sparse input) or array (dense input) format.

    Values are written with round-trip precision, so reading back is exact.
    """
    M = check_matrix(M)
    target = M if sp.issparse(M) else np.asarray(M)
    buf = io.BytesIO()
    scipy.io.mmwrite(buf, sp.coo_array(target) if sp.issparse(target) else target,
                     comment=comment, precision=17)
    Path(path).write_bytes(buf.getvalue())


def split_blocks(text: str) -> list[str]:
    """Split concatenated Matrix Market documents on their header lines."""
    blocks: list[list[str]] = []
    for line in text.splitlines(keepends=True):
        if line.startswith(HEADER):
            blocks.append([])
        if not blocks:
            if line.strip():
                raise MatrixFileError("content before the first Matrix Market header")
            continue
        blocks[-1].append(line)
    return ["".join(b) for b in blocks]


def read_basis(path, m: int, n: int) -> list[np.ndarray]:
    """Read a sequence of ``m x n`` matrices stored as consecutive Matrix Market blocks."""
    blocks = split_blocks(_read_text(path))
    if not blocks:
        raise MatrixFileError(f"{path}: no Matrix Market blocks found")
    out = []
    for i, text in enumerate(blocks, 1):
        Y = _parse(text, f"{path} block {i}")
        Y = Y.toarray() if sp.issparse(Y) else np.asarray(Y, dtype=np.float64)
        if Y.shape != (m, n):
            raise MatrixFileError(f"{path} block {i}: expected {m}x{n}, got {Y.shape[0]}x{Y.shape[1]}")
        out.append(Y.astype(np.float64))
    return out


def write_basis(path, basis: Sequence[np.ndarray]) -> None:
    parts = []
    for Y in basis:
        buf = io.BytesIO()
        scipy.io.mmwrite(buf, np.asarray(Y, dtype=np.float64), precision=17)
        parts.append(buf.getvalue().decode())
    Path(path).write_text("".join(parts))


def read_choi(path) -> tuple[np.ndarray, tuple[int, int] | None]:
    """Read a Choi matrix and its ``% shape: m,n`` annotation, if present."""
    text = _read_text(path)
    shape = None
    for line in text.splitlines():
        match = _SHAPE_RE.match(line.strip())
        if match:
            shape = (int(match.group(1)), int(match.group(2)))
            break
    C = read_matrix(path, sparse=False)
    if shape is not None and shape[0] * shape[1] != C.shape[0]:
        raise MatrixFileError(f"{path}: annotated shape {shape} does not match dimension {C.shape[0]}")
    return C, shape


def write_choi(path, phi: MapBlocks) -> None:
    write_matrix(path, choi_from_blocks(phi), comment=f" shape: {phi.m},{phi.n}")


def boundary_csv(rows: Iterable[tuple[float, float, float, float]]) -> str:
    """CSV with columns ``theta, support_value, re, im``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta", "support_value", "re", "im"])
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
