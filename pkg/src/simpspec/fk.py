"""FK parsing of words and 2-words, FK sentence checks, Wigner decomposition, gluing counts.

A sentence is a tuple of :class:`~simpspec.words.Word`.  Its graph has the
letters as vertices and one edge per consecutive pair inside a word; an FK
sentence has a tree graph, no edge crossed more than twice, at most one
doubly crossed edge per d-cell, and every word after the first starts at a
letter already seen.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, ResourceError
from .words import (
    TwoWord,
    Word,
    _apply_map,
    _edge,
    _relabel_map,
    canonicalize,
    format_letters,
    is_wigner,
    validate_word,
)

__all__ = [
    "FkSentence",
    "SentenceGraph",
    "sentence_graph",
    "fk_parse",
    "fk_parse_two_word",
    "is_fk_sentence",
    "is_fk_word",
    "wigner_decompose",
    "enumerate_fk_word_classes",
    "enumerate_fk_sentences",
    "glue_count",
    "geodesic_endpoint_pairs",
    "canonical_sentence",
    "parse_sentence",
    "format_sentence",
]


@dataclass(frozen=True)
class SentenceGraph:
    vertices: tuple
    edge_counts: dict
    cell_counts: dict
    edges_by_cell: dict

    def is_tree(self):
        if not self.vertices:
            return False
        if len(self.edge_counts) != len(self.vertices) - 1:
            return False
        adj = {v: [] for v in self.vertices}
        for a, b in self.edge_counts:
            if a == b:
                return False
            adj[a].append(b)
            adj[b].append(a)
        seen, stack = {self.vertices[0]}, [self.vertices[0]]
        while stack:
            for u in adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.vertices)


def sentence_graph(words):
    vertices, seen = [], set()
    edge_counts, cell_counts, by_cell = {}, {}, {}
    for w in words:
        letters = w.letters
        for letter in letters:
            if letter not in seen:
                seen.add(letter)
                vertices.append(letter)
        for a, b in zip(letters, letters[1:]):
            e = _edge(a, b)
            edge_counts[e] = edge_counts.get(e, 0) + 1
            if a == b:
                continue
            tau = tuple(sorted(set(a) | set(b)))
            cell_counts[tau] = cell_counts.get(tau, 0) + 1
            by_cell.setdefault(tau, [])
            if e not in by_cell[tau]:
                by_cell[tau].append(e)
    return SentenceGraph(tuple(vertices), edge_counts, cell_counts, by_cell)


@dataclass(frozen=True)
class FkSentence:
    """Words of a parsing; ``parse_points`` are the 1-based times i split between letters i and i+1."""

    words: tuple
    parse_points: tuple = ()

    @property
    def m(self):
        return len(self.words)

    @property
    def length(self):
        return sum(len(w.letters) for w in self.words)

    @property
    def graph(self):
        return sentence_graph(self.words)

    def concatenation(self):
        return tuple(letter for w in self.words for letter in w.letters)

    def __str__(self):
        return format_sentence(self.words)


def format_sentence(words):
    return "|".join(format_letters(w.letters) for w in words)


def parse_sentence(text):
    return tuple(validate_word(part) for part in text.split("|"))


def _parse(letters, d, split_loops):
    visited = {letters[0]}
    old = set()
    counts = {}
    points = []
    for i in range(len(letters) - 1):
        a, b = letters[i], letters[i + 1]
        e = _edge(a, b)
        first = e not in counts
        if first and b in visited:
            old.add(e)
        visited.add(b)
        prior = counts.get(e, 0)
        split = e in old or prior >= 2
        if not split and prior == 1 and a != b:
            tau = tuple(sorted(set(a) | set(b)))
            # another edge of the same d-cell already crossed twice in the prefix
            split = any(
                c >= 2 and f != e and f[0] != f[1] and tuple(sorted(set(f[0]) | set(f[1]))) == tau
                for f, c in counts.items()
            )
        if split_loops and a == b:
            split = True
        counts[e] = prior + 1
        if split:
            points.append(i + 1)
    words, start = [], 0
    for t in points:
        words.append(Word(tuple(letters[start:t]), d))
        start = t
    words.append(Word(tuple(letters[start:]), d))
    return FkSentence(tuple(words), tuple(points))


def fk_parse(w):
    """Parse a closed word at old edges, third+ crossings, and blocked second crossings."""
    if not isinstance(w, Word):
        w = validate_word(w)
    if not w.closed:
        raise DomainError("FK parsing is defined for closed words")
    return _parse(w.letters, w.d, split_loops=False)


def fk_parse_two_word(w: TwoWord):
    """As :func:`fk_parse`, additionally splitting at every loop step."""
    if not isinstance(w, TwoWord):
        raise DomainError("expected a TwoWord")
    if not w.closed:
        raise DomainError("FK parsing is defined for closed 2-words")
    return _parse(w.letters, w.d, split_loops=True)


def is_fk_sentence(a):
    """``(ok, reason)``; reason is ``""`` on success."""
    words = a.words if isinstance(a, FkSentence) else tuple(a)
    if not words:
        return False, "empty sentence"
    d = words[0].d
    for w in words:
        if w.d != d:
            return False, "mixed letter sizes"
        for x, y in zip(w.letters, w.letters[1:]):
            if len(set(x) | set(y)) != d + 1:
                return False, "not a tree"  # a loop or non-adjacent step cannot sit in a tree
    seen = set(words[0].letters)
    for w in words[1:]:
        if w.letters[0] not in seen:
            return False, "first-letter rule"
        seen.update(w.letters)
    g = sentence_graph(words)
    if not g.is_tree():
        return False, "not a tree"
    if any(c > 2 for c in g.edge_counts.values()):
        return False, "edge crossed more than twice"
    for es in g.edges_by_cell.values():
        if sum(1 for e in es if g.edge_counts[e] == 2) > 1:
            return False, "two doubly crossed edges in one d-cell"
    return True, ""


def is_fk_word(w):
    return is_fk_sentence((w,))[0]


def wigner_decompose(w, strict=False):
    """Cut an FK word at its singly crossed edges.

    Returns ``(segments, skeleton)`` with the skeleton formed by the first
    letters of the segments.  Each segment is a closed tree walk crossing
    every edge twice; it is a Wigner word unless one of its letters reuses a
    0-cell, e.g. ``[1,2][2,3][3,4][1,4][3,4][2,3][1,2]`` has support 4 < k/2 + d.
    Use ``strict=True`` to demand Wigner segments.
    """
    if not isinstance(w, Word):
        w = validate_word(w)
    ok, reason = is_fk_sentence((w,))
    if not ok:
        raise DomainError(f"not an FK word: {reason}")
    g = sentence_graph((w,))
    letters = w.letters
    segments, start = [], 0
    for i in range(len(letters) - 1):
        if g.edge_counts[_edge(letters[i], letters[i + 1])] == 1:
            segments.append(Word(letters[start : i + 1], w.d))
            start = i + 1
    segments.append(Word(letters[start:], w.d))
    if strict and not all(is_wigner(seg) for seg in segments):
        raise DomainError("segment is not a Wigner word")
    skeleton = Word(tuple(seg.letters[0] for seg in segments), w.d)
    return segments, skeleton


def enumerate_fk_word_classes(length, d):
    """Canonical representatives of FK words with ``length`` letters."""
    if length < 1:
        raise DomainError("length must be >= 1")
    if length > 9 or d > 3:
        raise ResourceError("FK enumeration guardrail: length <= 9, d <= 3")

    def accept(letters, support):
        return is_fk_word(Word(tuple(letters), d))

    return [Word(letters, d) for letters in _grow_open(d, length - 1, accept)]


def _grow_open(d, steps, accept):
    """Canonical growth without the N(tau) != 1 pruning, with FK-style pruning."""
    first = tuple(range(1, d + 1))
    letters = [first]
    edge_counts = {}

    def rec(support):
        if len(letters) - 1 == steps:
            if accept(letters, support):
                yield tuple(letters)
            return
        cur = letters[-1]
        for drop in cur:
            keep = [v for v in cur if v != drop]
            for v in range(1, support + 2):
                if v in cur:
                    continue
                nxt = tuple(sorted(keep + [v]))
                e = _edge(cur, nxt)
                c = edge_counts.get(e, 0)
                if c == 2:
                    continue
                if c == 0 and nxt in set(letters):
                    continue  # would close a cycle in the graph
                edge_counts[e] = c + 1
                letters.append(nxt)
                yield from rec(max(support, v))
                letters.pop()
                if c:
                    edge_counts[e] = c
                else:
                    del edge_counts[e]

    yield from rec(d)


def canonical_sentence(words):
    """Relabel a sentence by first appearance across its words, first letter increasing."""
    flat = tuple(letter for w in words for letter in w.letters)
    mapping = _relabel_map(flat)
    return tuple(Word(_apply_map(w.letters, mapping), w.d) for w in words)


def _gluings(b, z):
    """Distinct words w with canonical form z such that (b, w) is an FK sentence.

    New 0-cells of z go either to unused 0-cells of b or to fresh labels,
    fresh labels being issued in order so that gluings differing only by
    fresh names coincide.
    """
    d = z.d
    z = canonicalize(z)
    b_letters = []
    for w in b:
        for letter in w.letters:
            if letter not in b_letters:
                b_letters.append(letter)
    b_support = sorted({v for letter in b_letters for v in letter})
    top = b_support[-1]
    s_z = max(v for letter in z.letters for v in letter)
    results = set()
    for start in b_letters:
        base = {i + 1: start[i] for i in range(d)}
        free = [v for v in b_support if v not in start]
        found = []

        def rec(label, mapping, fresh):
            if label > s_z:
                found.append(dict(mapping))
                return
            used = set(mapping.values())
            for v in free:
                if v not in used:
                    mapping[label] = v
                    rec(label + 1, mapping, fresh)
                    del mapping[label]
            mapping[label] = top + fresh + 1
            rec(label + 1, mapping, fresh + 1)
            del mapping[label]

        rec(d + 1, base, 0)
        for mapping in found:
            w = Word(_apply_map(z.letters, mapping), d)
            if is_fk_sentence(tuple(b) + (w,))[0]:
                results.add(w.letters)
    return sorted(results)


def glue_count(b, z, by="cells"):
    """Number of inequivalent ways to append a word equivalent to z to the FK sentence b.

    ``by="cells"`` counts gluings up to relabelling of fresh 0-cells, which is
    equivalence of the sentence (b, w).  ``by="letters"`` only records which
    letters of w coincide with letters of b, the data fixed by a geodesic.
    """
    found = _gluings(tuple(b), z)
    if by == "cells":
        return len(found)
    if by == "letters":
        seen = {letter for w in b for letter in w.letters}
        return len({tuple(x if x in seen else None for x in w) for w in found})
    raise DomainError(f"unknown gluing count mode {by!r}")


def geodesic_endpoint_pairs(b):
    """Ordered vertex pairs joined by a path of singly crossed edges of the sentence b."""
    g = sentence_graph(tuple(b))
    adj = {v: [] for v in g.vertices}
    for (x, y), c in g.edge_counts.items():
        if c == 1:
            adj[x].append(y)
            adj[y].append(x)
    seen, total = set(), 0
    for v in g.vertices:
        if v in seen:
            continue
        comp, stack = {v}, [v]
        while stack:
            for u in adj[stack.pop()]:
                if u not in comp:
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        total += len(comp) ** 2
    return total


def enumerate_fk_sentences(total_length, d, max_word_length=None):
    """Canonical FK sentences of the given total length (sum of word lengths)."""
    if total_length > 7 or d > 3:
        raise ResourceError("FK sentence guardrail: total length <= 7, d <= 3")
    cap = total_length if max_word_length is None else max_word_length
    classes = {length: enumerate_fk_word_classes(length, d) for length in range(1, cap + 1)}
    out = set()

    def rec(words, used):
        if used == total_length:
            out.add(tuple(w.letters for w in canonical_sentence(words)))
            return
        for length in range(1, min(cap, total_length - used) + 1):
            for z in classes[length]:
                for letters in _gluings(words, z):
                    rec(words + (Word(letters, d),), used + length)

    for length in range(1, min(cap, total_length) + 1):
        for z in classes[length]:
            rec((z,), length)
    return [tuple(Word(l, d) for l in s) for s in sorted(out)]
