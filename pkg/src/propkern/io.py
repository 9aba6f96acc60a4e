"""Dataset, image and Gram-matrix input/output."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .graph import UNLABELED, Graph, GraphDatabase

GRAM_HEADER = "propkern-gram v1"


class FormatError(ValueError):
    """Malformed input file; the message names the file and line."""


def _read_lines(path: Path):
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if line:
                yield lineno, line


def _read_ints(path: Path, per_line: Optional[int] = None):
    rows = []
    for lineno, line in _read_lines(path):
        parts = [p for p in re.split(r"[,\s]+", line) if p]
        if per_line is not None and len(parts) != per_line:
            raise FormatError(f"{path.name}:{lineno}: expected {per_line} values, got {len(parts)}")
        try:
            rows.append([int(p) for p in parts] if per_line != 1 else int(parts[0]))
        except ValueError:
            raise FormatError(f"{path.name}:{lineno}: not an integer: {line!r}") from None
    return rows


def _prefix(directory: Path) -> str:
    hits = sorted(directory.glob("*_A.txt"))
    if not hits:
        raise FormatError(f"{directory}: no *_A.txt edge file found")
    if len(hits) > 1:
        raise FormatError(f"{directory}: several *_A.txt files: {[h.name for h in hits]}")
    return hits[0].name[:-len("_A.txt")]


def load_tu_dataset(directory, *, symmetrize: bool = False) -> GraphDatabase:
    """Read a graph database in TU text layout.

    Node label ``-1`` marks an unlabeled node.  Edges are taken as listed
    unless ``symmetrize`` adds the reverse of every edge.
    """
    directory = Path(directory)
    ds = _prefix(directory)
    f = lambda suffix: directory / f"{ds}_{suffix}.txt"

    indicator = np.array(_read_ints(f("graph_indicator"), 1), dtype=np.int64)
    N = indicator.size
    if N == 0:
        raise FormatError(f"{f('graph_indicator').name}: no nodes")
    if indicator[0] != 1 or np.any(np.diff(indicator) < 0) or np.any(np.diff(indicator) > 1):
        bad = 1 if indicator[0] != 1 else int(np.flatnonzero((np.diff(indicator) < 0) | (np.diff(indicator) > 1))[0]) + 2
        raise FormatError(f"{f('graph_indicator').name}:{bad}: graph ids must be contiguous and sorted from 1")
    n_graphs = int(indicator[-1])
    gid = indicator - 1
    starts = np.searchsorted(gid, np.arange(n_graphs))
    ends = np.append(starts[1:], N)

    edges = []
    for lineno, line in _read_lines(f("A")):
        parts = [p for p in re.split(r"[,\s]+", line) if p]
        if len(parts) != 2:
            raise FormatError(f"{ds}_A.txt:{lineno}: expected 'i, j'")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"{ds}_A.txt:{lineno}: not an integer pair: {line!r}") from None
        if not (1 <= i <= N and 1 <= j <= N):
            raise FormatError(f"{ds}_A.txt:{lineno}: dangling edge ({i}, {j}) with {N} nodes")
        if gid[i - 1] != gid[j - 1]:
            raise FormatError(f"{ds}_A.txt:{lineno}: edge ({i}, {j}) crosses graphs")
        edges.append((i - 1, j - 1))
    edges = np.array(edges, dtype=np.int64).reshape(-1, 2)

    if f("node_labels").exists():
        labels = np.array(_read_ints(f("node_labels"), 1), dtype=np.int64)
        if labels.size != N:
            raise FormatError(f"{ds}_node_labels.txt: {labels.size} lines for {N} nodes")
        if labels.size and labels.min() < UNLABELED:
            line = int(np.flatnonzero(labels < UNLABELED)[0]) + 1
            raise FormatError(f"{ds}_node_labels.txt:{line}: labels must be >= -1")
    else:
        labels = np.full(N, UNLABELED, dtype=np.int64)

    classes = None
    if f("graph_labels").exists():
        classes = _read_ints(f("graph_labels"), 1)
        if len(classes) != n_graphs:
            raise FormatError(f"{ds}_graph_labels.txt: {len(classes)} lines for {n_graphs} graphs")

    attrs = None
    if f("node_attributes").exists():
        rows, width = [], None
        for lineno, line in _read_lines(f("node_attributes")):
            try:
                vals = [float(p) for p in re.split(r"[,\s]+", line) if p]
            except ValueError:
                raise FormatError(f"{ds}_node_attributes.txt:{lineno}: not a number list") from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise FormatError(f"{ds}_node_attributes.txt:{lineno}: ragged row ({len(vals)} != {width})")
            rows.append(vals)
        if len(rows) != N:
            raise FormatError(f"{ds}_node_attributes.txt: {len(rows)} rows for {N} nodes")
        attrs = np.array(rows, dtype=np.float64)

    A = sp.coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(N, N)).tocsr()
    A.data[:] = 1.0
    if symmetrize:
        A = A.maximum(A.T).tocsr()
    graphs = []
    for g in range(n_graphs):
        lo, hi = starts[g], ends[g]
        graphs.append(Graph(A[lo:hi, lo:hi], labels[lo:hi],
                            None if attrs is None else attrs[lo:hi],
                            None if classes is None else int(classes[g])))
    return GraphDatabase(graphs)


def write_tu_dataset(db: GraphDatabase, directory, name: str = "DS") -> Path:
    """Write ``db`` in TU layout; unlabeled nodes are written as ``-1``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    f = lambda suffix: directory / f"{name}_{suffix}.txt"
    offset = 0
    with open(f("A"), "w") as fa, open(f("graph_indicator"), "w") as fi:
        for gi, g in enumerate(db.graphs):
            A = g.adjacency.tocoo()
            order = np.lexsort((A.col, A.row))
            for r, c in zip(A.row[order], A.col[order]):
                fa.write(f"{r + 1 + offset}, {c + 1 + offset}\n")
            fi.write(f"{gi + 1}\n" * g.node_count)
            offset += g.node_count
    if db.num_labels > 0:
        np.savetxt(f("node_labels"), db.node_labels, fmt="%d")
    classes = db.graph_classes
    if classes is not None:
        np.savetxt(f("graph_labels"), classes, fmt="%d")
    if db.attr_dim:
        np.savetxt(f("node_attributes"), db.attributes, fmt="%.17g", delimiter=", ")
    return directory


def load_pgm(path) -> np.ndarray:
    """Read an 8-bit P2 (ASCII) or P5 (binary) portable graymap."""
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    # header: magic, width, height, maxval; '#' starts a comment
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise FormatError(f"{path}: truncated header")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"{path}: unsupported magic {magic!r}; need P2 or P5")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError(f"{path}: malformed header") from None
    if width < 1 or height < 1:
        raise FormatError(f"{path}: bad dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise FormatError(f"{path}: maxval {maxval} unsupported (need 1..255)")
    count = width * height
    if magic == b"P5":
        raster = data[pos + 1:pos + 1 + count]
        if len(raster) < count:
            raise FormatError(f"{path}: truncated raster ({len(raster)} of {count} bytes)")
        pixels = np.frombuffer(raster, dtype=np.uint8).astype(np.int64)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:]).split()
        if len(body) < count:
            raise FormatError(f"{path}: truncated raster ({len(body)} of {count} values)")
        try:
            pixels = np.array([int(v) for v in body[:count]], dtype=np.int64)
        except ValueError:
            raise FormatError(f"{path}: non-integer pixel value") from None
    if pixels.max() > maxval:
        raise FormatError(f"{path}: pixel value above maxval {maxval}")
    return pixels.reshape(height, width)


def write_pgm(path, image, binary: bool = True) -> None:
    img = np.asarray(image, dtype=np.int64)
    h, w = img.shape
    if binary:
        Path(path).write_bytes(f"P5\n{w} {h}\n255\n".encode() + img.astype(np.uint8).tobytes())
    else:
        rows = "\n".join(" ".join(str(v) for v in row) for row in img)
        Path(path).write_text(f"P2\n{w} {h}\n255\n{rows}\n")


def mask_labels(db: GraphDatabase, fraction: float, rng: np.random.Generator) -> GraphDatabase:
    """Remove the labels of ``floor(fraction * N)`` randomly chosen nodes."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    labels = db.node_labels.copy()
    N = labels.size
    drop = rng.choice(N, size=int(np.floor(fraction * N)), replace=False)
    labels[drop] = UNLABELED
    return db.with_labels(labels, num_labels=db.num_labels)


def write_kernel(K, path) -> None:
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("kernel matrix must be square")
    if not np.all(np.isfinite(K)):
        raise ValueError("kernel matrix has non-finite entries")
    if not np.array_equal(K, K.T):
        raise ValueError("kernel matrix is not symmetric")
    n = K.shape[0]
    with open(path, "w") as fh:
        fh.write(f"{GRAM_HEADER} n={n}\n")
        for row in K:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_kernel(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        m = re.fullmatch(re.escape(GRAM_HEADER) + r" n=(\d+)", header)
        if not m:
            raise FormatError(f"{path}:1: bad header {header!r}")
        n = int(m.group(1))
        K = np.zeros((n, n))
        row = 0
        for lineno, line in enumerate(fh, 2):
            if not line.strip():
                continue
            if row >= n:
                raise FormatError(f"{path}:{lineno}: more than {n} rows")
            vals = line.split()
            if len(vals) != n:
                raise FormatError(f"{path}:{lineno}: expected {n} values, got {len(vals)}")
            K[row] = [float(v) for v in vals]
            row += 1
    if row != n:
        raise FormatError(f"{path}: expected {n} rows, got {row}")
    return K


def read_classes(path) -> np.ndarray:
    return np.array(_read_ints(Path(path), 1), dtype=np.int64)


def list_images(directory) -> list:
    return sorted(p for p in Path(directory).iterdir() if p.suffix.lower() == ".pgm")


__all__ = [
    "FormatError", "load_tu_dataset", "write_tu_dataset", "load_pgm", "write_pgm", "mask_labels",
    "write_kernel", "read_kernel", "read_classes", "list_images", "GRAM_HEADER",
]
