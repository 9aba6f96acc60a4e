import numpy as np
import pytest

from propkern import io
from propkern.graph import GraphDatabase
from propkern.synthetic import random_database


def write_fixture(d, labels="0\n1\n0\n1\n-1\n", attrs=None, edges=None):
    d.mkdir(exist_ok=True)
    (d / "T_A.txt").write_text(edges or "1, 2\n2, 3\n4, 5\n")
    (d / "T_graph_indicator.txt").write_text("1\n1\n1\n2\n2\n")
    (d / "T_node_labels.txt").write_text(labels)
    (d / "T_graph_labels.txt").write_text("1\n-1\n")
    if attrs:
        (d / "T_node_attributes.txt").write_text(attrs)
    return d


def test_tu_fixture(tmp_path):
    db = io.load_tu_dataset(write_fixture(tmp_path / "T"))
    assert db.node_counts.tolist() == [3, 2]
    assert db.num_labels == 2
    assert db[0].adjacency.nnz == 2 and db[1].adjacency.nnz == 1
    assert db.node_labels.tolist() == [0, 1, 0, 1, -1]
    assert db.graph_classes.tolist() == [1, -1]
    sym = io.load_tu_dataset(tmp_path / "T", symmetrize=True)
    assert sym[0].adjacency.nnz == 4
    assert (sym[0].adjacency != sym[0].adjacency.T).nnz == 0


def test_tu_errors(tmp_path):
    d = write_fixture(tmp_path / "a", edges="1, 2\n2, 9\n")
    with pytest.raises(io.FormatError, match="T_A.txt:2"):
        io.load_tu_dataset(d)
    d = write_fixture(tmp_path / "b", attrs="1.0, 2.0\n1.0\n0\n0\n0\n")
    with pytest.raises(io.FormatError, match="node_attributes.txt:2"):
        io.load_tu_dataset(d)
    d = write_fixture(tmp_path / "c")
    (d / "T_graph_indicator.txt").write_text("1\n1\n3\n3\n3\n")
    with pytest.raises(io.FormatError, match="graph_indicator.txt:3"):
        io.load_tu_dataset(d)
    d = write_fixture(tmp_path / "e", edges="1, 4\n")
    with pytest.raises(io.FormatError, match="crosses graphs"):
        io.load_tu_dataset(d)


def test_tu_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    db = random_database(rng, n_graphs=6, k=3, directed=True, attr_dim=2, p_unlabeled=0.2)
    db = GraphDatabase(db.graphs, int(db.node_labels.max()) + 1)
    io.write_tu_dataset(db, tmp_path / "rt", "RT")
    back = io.load_tu_dataset(tmp_path / "rt")
    assert back.num_labels == db.num_labels and len(back) == len(db)
    assert np.array_equal(back.node_labels, db.node_labels)
    assert np.array_equal(back.attributes, db.attributes)
    assert np.array_equal(back.graph_classes, db.graph_classes)
    for a, b in zip(db.graphs, back.graphs):
        assert (a.adjacency != b.adjacency).nnz == 0


def test_mask_labels():
    rng = np.random.default_rng(1)
    db = random_database(rng, n_graphs=2, max_nodes=5, k=2, attr_dim=1)
    same = io.mask_labels(db, 0.0, rng)
    assert np.array_equal(same.node_labels, db.node_labels)
    assert np.all(io.mask_labels(db, 1.0, rng).node_labels == -1)
    with pytest.raises(ValueError):
        io.mask_labels(db, 1.5, rng)
    ten = random_database(np.random.default_rng(2), n_graphs=1, max_nodes=10, k=2)
    while ten.total_nodes != 10:
        ten = random_database(rng, n_graphs=2, max_nodes=6, k=2)
    half = io.mask_labels(ten, 0.5, np.random.default_rng(3))
    assert (half.node_labels == -1).sum() == 5
    masked = io.mask_labels(db, 0.5, np.random.default_rng(4))
    assert np.array_equal(masked.attributes, db.attributes)
    for a, b in zip(db.graphs, masked.graphs):
        assert (a.adjacency != b.adjacency).nnz == 0
    again = io.mask_labels(db, 0.5, np.random.default_rng(4))
    assert np.array_equal(again.node_labels, masked.node_labels)


def test_pgm(tmp_path):
    (tmp_path / "a.pgm").write_text("P2 2 2 255 0 255 128 64")
    grid = io.load_pgm(tmp_path / "a.pgm")
    assert grid.tolist() == [[0, 255], [128, 64]]
    (tmp_path / "b.pgm").write_bytes(b"P5\n# comment\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    assert np.array_equal(io.load_pgm(tmp_path / "b.pgm"), grid)
    io.write_pgm(tmp_path / "c.pgm", grid)
    assert np.array_equal(io.load_pgm(tmp_path / "c.pgm"), grid)
    (tmp_path / "d.pgm").write_text("P2 2 2 65535 0 1 2 3")
    with pytest.raises(io.FormatError, match="maxval"):
        io.load_pgm(tmp_path / "d.pgm")
    (tmp_path / "e.pgm").write_bytes(b"P5 2 2 255\n" + bytes([1, 2]))
    with pytest.raises(io.FormatError, match="truncated"):
        io.load_pgm(tmp_path / "e.pgm")
    (tmp_path / "f.pgm").write_text("P3 1 1 255 0 0 0")
    with pytest.raises(io.FormatError):
        io.load_pgm(tmp_path / "f.pgm")


def test_gram_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    X = rng.normal(size=(7, 3))
    K = X @ X.T
    K = (K + K.T) / 2
    io.write_kernel(K, tmp_path / "k.txt")
    assert (tmp_path / "k.txt").read_text().startswith("propkern-gram v1 n=7\n")
    assert np.array_equal(io.read_kernel(tmp_path / "k.txt"), K)
    io.write_kernel(np.zeros((0, 0)), tmp_path / "e.txt")
    assert (tmp_path / "e.txt").read_text() == "propkern-gram v1 n=0\n"
    assert io.read_kernel(tmp_path / "e.txt").shape == (0, 0)
    with pytest.raises(ValueError):
        io.write_kernel(np.array([[1.0, 2.0], [0.0, 1.0]]), tmp_path / "x.txt")
    (tmp_path / "bad.txt").write_text("propkern-gram v1 n=2\n1 2\n2\n")
    with pytest.raises(io.FormatError, match=":3"):
        io.read_kernel(tmp_path / "bad.txt")
    (tmp_path / "hdr.txt").write_text("gram n=1\n1\n")
    with pytest.raises(io.FormatError):
        io.read_kernel(tmp_path / "hdr.txt")
