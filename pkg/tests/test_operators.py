from math import comb, sqrt

import numpy as np
import pytest

from simpspec.bounds import complete_spectrum
from simpspec.cells import OrientedCell, enumerate_cells, induced_boundary, sample_complex
from simpspec.errors import DomainError
from simpspec.operators import (
    adjacency,
    centered_H,
    coboundary,
    complete_adjacency,
    dump_matrix_csv,
    kappa,
    laplacian_decomposition,
    projection_compress,
)


def _oracle_adjacency(X):
    """Build A straight from oriented incidence: +1 for sigma ~ sigma', -1 for sigma ~ flip."""
    faces = enumerate_cells(X.n, X.d - 1)
    index = {f: i for i, f in enumerate(faces)}
    A = np.zeros((len(faces), len(faces)))
    for tau in X.present_cells():
        bd = induced_boundary(OrientedCell(tuple(int(v) for v in tau)))
        for f, _ in bd:
            for g, _ in bd:
                if f.vertices != g.vertices:
                    # same tau induces f and flip(g) iff parities differ
                    A[index[f.vertices], index[g.vertices]] = -f.parity * g.parity
    return A


@pytest.mark.parametrize("n,d,p", [(3, 1, 1.0), (5, 2, 0.5), (6, 3, 0.7), (7, 2, 0.3)])
def test_adjacency_matches_incidence_oracle(n, d, p):
    X = sample_complex(n, d, p, 4)
    assert np.array_equal(adjacency(X).matrix, _oracle_adjacency(X))


def test_graph_case_is_ordinary_adjacency():
    A = adjacency(sample_complex(3, 1, 1.0, 0)).matrix
    assert np.array_equal(A, np.ones((3, 3)) - np.eye(3))
    assert np.array_equal(complete_adjacency(3, 1).matrix, A)


def test_empty_complex_gives_zero():
    assert not adjacency(sample_complex(6, 2, 0.0, 1)).matrix.any()


def test_operator_basic_invariants():
    A = adjacency(sample_complex(9, 3, 0.5, 8))
    m = A.matrix
    assert m.shape == (comb(9, 3),) * 2
    assert np.array_equal(m, m.T)
    assert not np.diag(m).any()
    assert set(np.unique(m)) <= {-1.0, 0.0, 1.0}
    assert not m.flags.writeable


@pytest.mark.parametrize("n,d", [(4, 2), (5, 2), (3, 1), (6, 3), (7, 4)])
def test_complete_spectrum_small(n, d):
    w = np.linalg.eigvalsh(complete_adjacency(n, d).matrix)
    expected = np.sort(np.concatenate([np.full(m, float(v)) for v, m in complete_spectrum(n, d)]))
    assert np.allclose(w, expected, atol=1e-8)


def test_p_one_equals_complete():
    assert np.array_equal(adjacency(sample_complex(7, 2, 1.0, 3)).matrix, complete_adjacency(7, 2).matrix)


def test_expected_adjacency_is_p_times_complete():
    n, d, p, T = 5, 2, 0.4, 2000
    total = np.zeros((10, 10))
    for s in range(T):
        total += adjacency(sample_complex(n, d, p, s)).matrix
    mean = total / T
    full = complete_adjacency(n, d).matrix
    mask = full != 0
    sd = sqrt(p * (1 - p) / T)
    assert np.all(np.abs(mean - p * full)[mask] <= 3.5 * sd)
    assert not mean[~mask].any()


@pytest.mark.parametrize("n,d", [(5, 1), (6, 2), (8, 2), (7, 3), (12, 2)])
def test_laplacian_identity_exact(n, d):
    for seed in range(3):
        X = sample_complex(n, d, 0.45, seed)
        D, up = laplacian_decomposition(X)
        assert np.array_equal(adjacency(X).matrix, D.matrix - up.matrix)
        assert np.linalg.eigvalsh(up.matrix).min() >= -1e-9
        deg = np.diag(D.matrix)
        assert np.all(deg == np.round(deg)) and deg.min() >= 0 and deg.max() <= n - d


def test_laplacian_extremes():
    D, up = laplacian_decomposition(sample_complex(6, 2, 1.0, 0))
    assert np.array_equal(D.matrix, 4 * np.eye(15))
    D, up = laplacian_decomposition(sample_complex(6, 2, 0.0, 0))
    assert not D.matrix.any() and not up.matrix.any()


def test_coboundary_rows_are_boundaries():
    X = sample_complex(6, 2, 0.5, 1)
    delta = coboundary(X)
    assert delta.shape == (X.present.sum(), 15)
    assert np.all(np.abs(delta).sum(axis=1) == 3)


def test_centered_H_entries_and_errors():
    n, d, p = 8, 2, 0.3
    H = centered_H(sample_complex(n, d, p, 2)).matrix
    r = sqrt(n * p * (1 - p))
    allowed = np.array([0.0, (1 - p) / r, -(1 - p) / r, p / r, -p / r])
    assert np.all(np.min(np.abs(H[..., None] - allowed), axis=-1) < 1e-15)
    for q in (0.0, 1.0):
        with pytest.raises(DomainError):
            centered_H(sample_complex(n, d, q, 2))


def test_centered_H_mean_zero():
    T = 2000
    acc = np.zeros((10, 10))
    for s in range(T):
        acc += centered_H(sample_complex(5, 2, 0.4, s)).matrix
    # each nonzero entry is (chi - p)/sqrt(nq) with variance 1/n
    assert np.all(np.abs(acc / T) <= 3.5 * sqrt(1 / 5 / T))


def test_projection_properties():
    for n, d in [(5, 2), (10, 2), (12, 3), (30, 2)]:
        H = centered_H(sample_complex(n, d, 0.5, 1))
        P, PHP, kap = projection_compress(H)
        m = P.matrix
        assert np.abs(m @ m - m).max() <= 1e-12
        assert np.array_equal(m, m.T)
        assert int(np.sum(np.linalg.eigvalsh(m) > 0.5)) == comb(n - 1, d - 1)
        assert kap == pytest.approx(sqrt(n * 0.25) / 0.5)
        assert np.linalg.norm(PHP.matrix, 2) <= np.linalg.norm(H.matrix, 2) + 1e-12
    P, _, _ = projection_compress(centered_H(sample_complex(5, 2, 0.5, 0)))
    assert np.trace(P.matrix) == pytest.approx(4)
    assert kappa(4, 0.5) == 2.0


@pytest.mark.parametrize("n,d,p", [(8, 2, 0.3), (9, 3, 0.6)])
def test_rank_one_decomposition(n, d, p):
    X = sample_complex(n, d, p, 6)
    A = adjacency(X)
    H = centered_H(X, A)
    P, _, kap = projection_compress(H)
    lhs = (A.matrix + p * d * np.eye(A.size)) / sqrt(n * p * (1 - p))
    assert np.abs(lhs - (H.matrix + kap * P.matrix)).max() <= 1e-12


def test_matrix_dump(tmp_path):
    A = adjacency(sample_complex(5, 2, 0.5, 3))
    path = tmp_path / "a.csv"
    dump_matrix_csv(A, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "row_index,col_index,value"
    assert len(lines) - 1 == np.count_nonzero(A.matrix)
    assert (tmp_path / "a.csv.meta").read_text() == "5 2 0.5 3 A\n"
