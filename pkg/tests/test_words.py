from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simpspec.bounds import catalan, crude_class_bound, two_word_class_bound
from simpspec.errors import DomainError, ResourceError, WordValidationError
from simpspec.words import (
    TwoWord,
    Word,
    canonicalize,
    enumerate_labeled_trees,
    enumerate_word_classes,
    format_letters,
    format_tree,
    is_canonical,
    is_wigner,
    iter_closed_walks,
    orbit_size,
    orbit_size_bruteforce,
    orbit_size_printed,
    parse_letters,
    parse_tree,
    tree_decode,
    tree_edges,
    tree_encode,
    validate_two_word,
    validate_word,
    word_statistics,
)

SAMPLE_WORD = "[1,2][1,3][1,4][4,5][1,4][1,5][5,6]"
TREE_WORD = "[1,2][1,3][1,4][4,5][1,4][4,6][4,7][4,6][1,4][1,3][3,8][1,3][1,2]"


def W(text):
    return validate_word(parse_letters(text))


def random_word(rng, n, d, length):
    cur = tuple(sorted(rng.choice(np.arange(1, n + 1), d, replace=False).tolist()))
    out = [cur]
    for _ in range(length - 1):
        drop = cur[rng.integers(d)]
        add = rng.choice([v for v in range(1, n + 1) if v not in cur])
        cur = tuple(sorted([v for v in cur if v != drop] + [int(add)]))
        out.append(cur)
    return Word(tuple(out), d)


def test_literal_roundtrip():
    assert format_letters(parse_letters(SAMPLE_WORD)) == SAMPLE_WORD
    for bad in ("[1,2][", "1,2", "[a,b]", ""):
        with pytest.raises(DomainError):
            W(bad)


def test_validation_examples():
    w = W(SAMPLE_WORD)
    assert w.k == 6 and not w.closed
    one = W("[3,5]")
    assert one.closed and one.k == 0
    with pytest.raises(WordValidationError) as err:
        W("[1,2][3,4]")
    assert err.value.index == 0
    with pytest.raises(WordValidationError) as err:
        W("[1,2][1,3][1,3]")
    assert err.value.index == 1


def test_mixed_or_unsorted_letters_rejected():
    with pytest.raises(DomainError):
        W("[1,2][1,2,3]")
    with pytest.raises(DomainError):
        W("[2,1][1,3]")


def test_two_word_validation():
    w = validate_two_word(parse_letters("[1,2][1,3][1,3][1,2][1,2]"))
    assert isinstance(w, TwoWord) and w.k == 2 and w.closed
    with pytest.raises(WordValidationError) as err:
        validate_two_word(parse_letters("[1,2][1,2][1,3]"))
    assert err.value.index == 0
    with pytest.raises(DomainError):
        validate_two_word(parse_letters("[1,2][1,3]"))


def test_sample_word_statistics():
    s = word_statistics(W(SAMPLE_WORD))
    assert s.cell_counts[(1, 4, 5)] == 3
    assert s.nonneighbor_edges[(1, 4, 5)] == [((1, 4), (4, 5))]
    assert s.edge_counts[((1, 4), (4, 5))] == 2 and s.edge_counts[((1, 4), (1, 5))] == 1
    assert s.cell_times[(1, 4, 5)] == [3, 4, 5]
    assert s.supp0 == (1, 2, 3, 4, 5, 6)
    assert len(s.suppd) == 4


def test_crossings_sum_to_k(rng):
    for _ in range(300):
        w = random_word(rng, 9, int(rng.integers(1, 4)), int(rng.integers(1, 12)))
        s = word_statistics(w)
        assert sum(s.cell_counts.values()) == w.k
        assert sum(s.edge_counts.values()) == w.k
        assert set(s.signs.values()) <= {-1, 1}


def test_support_bound_on_random_words(rng):
    for _ in range(10_000):
        d = int(rng.integers(1, 4))
        w = random_word(rng, 10, d, int(rng.integers(1, 10)))
        s = word_statistics(w)
        assert len(s.supp0) <= len(s.suppd) + d


def test_two_word_odd_counts():
    w = validate_two_word(parse_letters("[1,2][1,3][1,3][1,2][1,2]"))
    s = word_statistics(w)
    assert s.loops == [((1, 3), (1, 3)), ((1, 2), (1, 2))]
    assert sum(s.odd_cell_counts.values()) == w.k
    assert s.odd_cell_counts == {(1, 2, 3): 2}
    assert s.suppd_odd == [(1, 2, 3)]


def test_canonical_examples():
    c = canonicalize(W("[7,9][7,12]"))
    assert str(c) == "[1,2][1,3]"
    assert canonicalize(c) == c and is_canonical(c)
    assert str(canonicalize(W("[5,8][2,8][2,5]"))) == "[1,2][2,3][1,3]"


def _relabel(w, perm):
    # keep the first letter's vertices in increasing order (its orientation is fixed)
    first = w.letters[0]
    targets = sorted(int(perm[v - 1]) for v in first)
    mapping = {v: int(perm[v - 1]) for v in range(1, len(perm) + 1)}
    mapping.update(zip(first, targets))
    return Word(tuple(tuple(sorted(mapping[v] for v in letter)) for letter in w.letters), w.d)


def test_relabelings_canonicalize_identically(rng):
    for _ in range(10_000):
        d = int(rng.integers(1, 4))
        w = random_word(rng, 8, d, int(rng.integers(1, 7)))
        a, b = (_relabel(w, rng.permutation(np.arange(1, 13))) for _ in range(2))
        assert canonicalize(a) == canonicalize(b) == canonicalize(w)


def test_first_letter_orientation_matters():
    # swapping the two vertices of the first letter is not an admissible relabeling
    assert canonicalize(W("[1,2][1,3]")) != canonicalize(W("[1,2][2,3]"))


def test_orbit_size_against_bruteforce():
    w = W("[1,2][1,3][1,2]")
    assert orbit_size_bruteforce(w, 6) == 60
    assert orbit_size(6, 3, 2) == 60
    # the product with one extra factor overcounts by n - s
    assert orbit_size_printed(6, 3, 2) == 180


@pytest.mark.parametrize("text,n", [("[1,2][2,3][1,2]", 5), ("[1,2][1,3][1,4][1,3][1,2]", 6), ("[1,2,3][1,2,4][1,2,3]", 5)])
def test_orbit_formula_various(text, n):
    w = W(text)
    s = len(word_statistics(w).supp0)
    assert orbit_size_bruteforce(w, n) == orbit_size(n, s, w.d)


@pytest.mark.parametrize("k,d,count", [(2, 2, 2), (4, 2, 8), (6, 2, 40), (2, 3, 3), (4, 3, 18), (2, 1, 1), (4, 1, 2)])
def test_wigner_class_counts(k, d, count):
    ws = enumerate_word_classes(k, k // 2 + d, d)
    assert len(ws) == count == catalan(k // 2) * d ** (k // 2)
    assert all(is_wigner(w) for w in ws)


def test_enumeration_respects_crude_bound():
    for d in (1, 2, 3):
        for k in range(1, 6 if d < 3 else 5):
            for s in range(d, k // 2 + d + 1):
                ws = enumerate_word_classes(k, s, d)
                assert len(ws) <= crude_class_bound(k, s, d)
                assert len(set(ws)) == len(ws)
                for w in ws:
                    st_ = word_statistics(w)
                    assert w.closed and is_canonical(w) and len(st_.supp0) == s
                    assert 1 not in st_.cell_counts.values()


def test_enumeration_matches_walk_classes():
    # every closed walk on K(2, 6) with no crossing count 1 lands in an enumerated class
    for k in (2, 3, 4):
        classes = set()
        for letters in iter_closed_walks(6, 2, k + 1):
            w = Word(letters, 2)
            if 1 not in word_statistics(w).cell_counts.values():
                classes.add(canonicalize(w))
        assert classes == set(enumerate_word_classes(k, None, 2))


def test_enumeration_guardrails():
    with pytest.raises(ResourceError):
        enumerate_word_classes(9, 3, 2)
    with pytest.raises(ResourceError):
        enumerate_word_classes(2, 5, 4)


@pytest.mark.parametrize("k,d", [(2, 2), (4, 2), (6, 2), (2, 3), (4, 3), (6, 3)])
def test_wigner_invariants(k, d):
    for w in enumerate_word_classes(k, k // 2 + d, d):
        s = word_statistics(w)
        assert set(s.cell_counts.values()) == {2}
        assert set(s.edge_counts.values()) == {2}
        assert set(s.signs.values()) == {1}
        assert len(s.vertices) == len(s.edges) + 1


def test_tree_of_long_word():
    t = tree_encode(W(TREE_WORD))
    assert format_tree(t) == "(2(2(1)(1(2)))(1))"
    assert tree_edges(t) == 6
    assert str(tree_decode("(2(2(1)(1(2)))(1))", 2)) == TREE_WORD
    assert parse_tree(format_tree(t)) == t


def test_trivial_trees():
    assert tree_encode(W("[1,2]")) == ()
    assert str(tree_decode((), 3)) == "[1,2,3]"
    assert format_tree(()) == "" and parse_tree("") == ()


def test_tree_encode_rejects():
    with pytest.raises(DomainError):
        tree_encode(W("[1,2][1,3][1,2][1,3][1,2]"))
    with pytest.raises(DomainError):
        tree_decode("(3)", 2)
    with pytest.raises(DomainError):
        tree_decode("(0)", 2)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_tree_bijection(d):
    for k in (2, 4, 6):
        ws = enumerate_word_classes(k, k // 2 + d, d)
        for w in ws:
            t = tree_encode(w)
            assert tree_edges(t) == k // 2
            assert tree_decode(t, d) == w
    for edges in range(4):
        trees = enumerate_labeled_trees(edges, d)
        assert len(trees) == catalan(edges) * d**edges
        for t in trees:
            assert tree_encode(tree_decode(t, d)) == t


@pytest.mark.parametrize("k,d", [(2, 2), (4, 2), (2, 3)])
def test_tree_count_matches_classes(k, d):
    decoded = {tree_decode(t, d) for t in enumerate_labeled_trees(k // 2, d)}
    assert decoded == set(enumerate_word_classes(k, k // 2 + d, d))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_two_word_support_inequality(d):
    for k in (1, 2, 3) if d < 3 else (1, 2):
        for w in enumerate_word_classes(k, None, d, odd_constraint=True):
            s = word_statistics(w)
            assert len(w.letters) == 2 * k + 1
            assert (len(s.supp0) - d) / 2 <= len(s.suppd_odd) <= k // 2
            assert len(s.supp0) <= k + d


def test_two_word_counts_respect_bound():
    for d in (1, 2):
        for k in (1, 2, 3):
            for s in range(d, k + d + 1):
                assert len(enumerate_word_classes(k, s, d, odd_constraint=True)) <= two_word_class_bound(k, s, d)
    assert len(enumerate_word_classes(2, 3, 2, odd_constraint=True)) == 12
    assert enumerate_word_classes(1, None, 2, odd_constraint=True) == []


def test_support_inequality_needs_odd_constraint():
    # [1,2][1,3][1,3]: one odd crossing of {1,2,3}; supp0 = 3 but no odd d-cell repeats
    w = validate_two_word(parse_letters("[1,2][1,3][1,3]"))
    s = word_statistics(w)
    assert s.odd_cell_counts == {(1, 2, 3): 1}
    assert len(s.suppd_odd) > w.k // 2


@settings(max_examples=50)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_closed_walks_closed(d, seed):
    rng = np.random.default_rng(seed)
    n = d + 3
    length = int(rng.integers(1, 5))
    walks = list(iter_closed_walks(n, d, length))
    if length == 1:
        assert len(walks) == comb(n, d)
    for letters in walks[:50]:
        w = validate_word(letters)
        assert w.closed


def test_letters_are_complete_skeleton_cells():
    letters = {c for walk in iter_closed_walks(5, 2, 3) for c in walk}
    assert letters == set(combinations(range(1, 6), 2))
