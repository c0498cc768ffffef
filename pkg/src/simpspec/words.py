"""Words and 2-words over (d-1)-cells: statistics, canonical forms, enumeration, trees.

A letter is a canonical (increasing) tuple of ``d`` vertex labels.  Two words
are equivalent when they have the same canonical form: the first letter is
relabelled to ``1..d`` in increasing order and every later 0-cell gets the
next unused label at its first appearance.

Wigner words (closed, every d-cell crossed 0 or 2 times, ``k/2 + d`` support
0-cells) are in bijection with rooted planar trees whose edges carry labels
in ``1..d``.  Trees are nested tuples: a node is the tuple of its children,
each child a ``(label, subtree)`` pair, so the single-node tree is ``()``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product

from .errors import DomainError, ResourceError, WordValidationError

__all__ = [
    "Word",
    "TwoWord",
    "WordStats",
    "parse_letters",
    "format_letters",
    "validate_word",
    "validate_two_word",
    "word_statistics",
    "edge_sign",
    "canonicalize",
    "is_canonical",
    "enumerate_word_classes",
    "iter_closed_walks",
    "is_wigner",
    "tree_encode",
    "tree_decode",
    "parse_tree",
    "format_tree",
    "enumerate_labeled_trees",
    "orbit_size",
    "orbit_size_printed",
    "orbit_size_bruteforce",
    "MAX_ENUM_K",
    "MAX_ENUM_D",
]

MAX_ENUM_K = 8
MAX_ENUM_D = 3

_LETTER_RE = re.compile(r"\[([^\[\]]*)\]")


def parse_letters(text):
    """``"[1,2][1,3]"`` -> ``[(1, 2), (1, 3)]``; whitespace is ignored."""
    compact = re.sub(r"\s+", "", text)
    try:
        letters = [tuple(int(v) for v in m.split(",") if v) for m in _LETTER_RE.findall(compact)]
    except ValueError as exc:
        raise DomainError(f"malformed word literal: {text!r}") from exc
    if not letters or "".join(f"[{','.join(map(str, l))}]" for l in letters) != compact:
        raise DomainError(f"malformed word literal: {text!r}")
    return letters


def format_letters(letters):
    return "".join("[" + ",".join(str(v) for v in letter) + "]" for letter in letters)


def _coerce_letters(letters):
    if isinstance(letters, str):
        letters = parse_letters(letters)
    out = []
    for letter in letters:
        letter = tuple(int(v) for v in letter)
        if not letter or any(a >= b for a, b in zip(letter, letter[1:])) or letter[0] < 1:
            raise DomainError(f"letter {letter} is not a canonical cell")
        out.append(letter)
    if not out:
        raise DomainError("a word needs at least one letter")
    d = len(out[0])
    if any(len(letter) != d for letter in out):
        raise DomainError("all letters must have the same size d")
    return tuple(out), d


def _spans_cell(a, b, d):
    return len(set(a) | set(b)) == d + 1


@dataclass(frozen=True)
class Word:
    letters: tuple
    d: int

    @property
    def k(self):
        """Number of crossings (length minus one)."""
        return len(self.letters) - 1

    @property
    def closed(self):
        return self.letters[0] == self.letters[-1]

    def __str__(self):
        return format_letters(self.letters)


@dataclass(frozen=True)
class TwoWord:
    letters: tuple
    d: int

    @property
    def k(self):
        """Half the number of steps: the length is 2k + 1."""
        return (len(self.letters) - 1) // 2

    @property
    def closed(self):
        return self.letters[0] == self.letters[-1]

    def __str__(self):
        return format_letters(self.letters)


def validate_word(letters):
    letters, d = _coerce_letters(letters)
    for i in range(len(letters) - 1):
        if not _spans_cell(letters[i], letters[i + 1], d):
            raise WordValidationError(
                f"letters {i} and {i + 1} do not span a {d}-cell", index=i
            )
    return Word(letters, d)


def validate_two_word(letters):
    letters, d = _coerce_letters(letters)
    if len(letters) < 3 or len(letters) % 2 == 0:
        raise DomainError("a 2-word has odd length 2k + 1 >= 3")
    for i in range(len(letters) - 1):
        a, b = letters[i], letters[i + 1]
        # step i joins positions i+1, i+2 (1-based); even i is an odd-position pair
        if _spans_cell(a, b, d) or (i % 2 == 1 and a == b):
            continue
        raise WordValidationError(f"invalid step between letters {i} and {i + 1}", index=i)
    return TwoWord(letters, d)


def edge_sign(a, b):
    """Entry of the complete-complex adjacency between letters a != b.

    +1 for neighbouring orientations, -1 for non-neighbouring ones, 0 if the
    union is not a d-cell.
    """
    tau = tuple(sorted(set(a) | set(b)))
    if len(tau) != len(a) + 1:
        return 0
    i = tau.index(next(v for v in tau if v not in a))
    j = tau.index(next(v for v in tau if v not in b))
    return -((-1) ** (i + j))


def _edge(a, b):
    return (a, b) if a <= b else (b, a)


@dataclass
class WordStats:
    """Graph and crossing statistics of a word or 2-word.

    Crossing times are 1-based step indices: step ``t`` is the crossing
    from letter ``t`` to letter ``t + 1`` (1-based letters).
    """

    vertices: list
    edges: list
    edge_counts: dict
    cell_counts: dict
    edges_by_cell: dict
    nonneighbor_edges: dict
    signs: dict
    supp0: tuple
    suppd: list
    edge_times: dict
    cell_times: dict
    loops: list = field(default_factory=list)
    odd_edge_counts: dict | None = None
    odd_cell_counts: dict | None = None
    suppd_odd: list | None = None

    @property
    def sign(self):
        out = 1
        for s in self.signs.values():
            out *= s
        return out


def word_statistics(w):
    letters = w.letters
    two = isinstance(w, TwoWord)
    vertices, seen = [], set()
    for letter in letters:
        if letter not in seen:
            seen.add(letter)
            vertices.append(letter)
    edges, edge_counts, edge_times = [], {}, {}
    cell_counts, cell_times, edges_by_cell = {}, {}, {}
    odd_edge, odd_cell, suppd_odd = {}, {}, []
    loops = []
    for t in range(len(letters) - 1):
        a, b = letters[t], letters[t + 1]
        e = _edge(a, b)
        if e not in edge_counts:
            edges.append(e)
            edge_counts[e] = 0
            edge_times[e] = []
            if a == b:
                loops.append(e)
        edge_counts[e] += 1
        edge_times[e].append(t + 1)
        odd_step = two and t % 2 == 0
        if odd_step:
            odd_edge[e] = odd_edge.get(e, 0) + 1
        if a == b:
            continue
        tau = tuple(sorted(set(a) | set(b)))
        if tau not in cell_counts:
            cell_counts[tau] = 0
            cell_times[tau] = []
            edges_by_cell[tau] = []
        cell_counts[tau] += 1
        cell_times[tau].append(t + 1)
        if e not in edges_by_cell[tau]:
            edges_by_cell[tau].append(e)
        if odd_step:
            odd_cell[tau] = odd_cell.get(tau, 0) + 1
            if tau not in suppd_odd:
                suppd_odd.append(tau)
    nonneighbor = {
        tau: [e for e in es if edge_sign(*e) == -1] for tau, es in edges_by_cell.items()
    }
    signs = {
        tau: (-1) ** sum(edge_counts[e] for e in es) for tau, es in nonneighbor.items()
    }
    supp0 = tuple(sorted({v for letter in letters for v in letter}))
    return WordStats(
        vertices=vertices,
        edges=edges,
        edge_counts=edge_counts,
        cell_counts=cell_counts,
        edges_by_cell=edges_by_cell,
        nonneighbor_edges=nonneighbor,
        signs=signs,
        supp0=supp0,
        suppd=list(cell_counts),
        edge_times=edge_times,
        cell_times=cell_times,
        loops=loops,
        odd_edge_counts=odd_edge if two else None,
        odd_cell_counts=odd_cell if two else None,
        suppd_odd=suppd_odd if two else None,
    )


def _relabel_map(letters):
    mapping = {v: i + 1 for i, v in enumerate(letters[0])}
    for letter in letters[1:]:
        for v in letter:
            if v not in mapping:
                mapping[v] = len(mapping) + 1
    return mapping


def _apply_map(letters, mapping):
    return tuple(tuple(sorted(mapping[v] for v in letter)) for letter in letters)


def canonicalize(w):
    """Class representative: first-appearance relabelling with the first letter increasing."""
    letters = _apply_map(w.letters, _relabel_map(w.letters))
    return type(w)(letters, w.d)


def is_canonical(w):
    return canonicalize(w).letters == tuple(w.letters)


def _prefix_feasible(counts_one, remaining):
    return counts_one <= remaining


def _grow(d, steps, s_max, closed, accept, two_word):
    """Depth-first generation of canonical words with ``steps`` crossings.

    Yields letter tuples; ``accept(letters, counts, support)`` filters complete words.
    """
    first = tuple(range(1, d + 1))
    letters = [first]
    counts = {}
    ones = [0]

    def add(tau, delta):
        old = counts.get(tau, 0)
        new = old + delta
        if new:
            counts[tau] = new
        else:
            del counts[tau]
        ones[0] += (new == 1) - (old == 1)

    def rec(support):
        t = len(letters) - 1
        remaining = steps - t
        if remaining == 0:
            if closed and letters[-1] != first:
                return
            if accept(letters, counts, support):
                yield tuple(letters)
            return
        cur = letters[-1]
        if closed and len(set(first) - set(cur)) > remaining:
            return
        counted = (not two_word) or t % 2 == 0
        options = []
        if two_word and t % 2 == 1:
            options.append(cur)
        for drop in cur:
            keep = [v for v in cur if v != drop]
            for v in range(1, min(support + 1, s_max) + 1):
                if v in cur:
                    continue
                options.append(tuple(sorted(keep + [v])))
        for nxt in options:
            if nxt == cur:
                letters.append(nxt)
                yield from rec(support)
                letters.pop()
                continue
            tau = tuple(sorted(set(cur) | set(nxt)))
            new_support = max(support, tau[-1])
            if counted:
                add(tau, 1)
            future = steps - t - 1
            if two_word:
                future = (future + 1) // 2  # odd-position steps still to come
            if ones[0] <= future:
                letters.append(nxt)
                yield from rec(new_support)
                letters.pop()
            if counted:
                add(tau, -1)

    yield from rec(d)


def enumerate_word_classes(k, s, d, closed_only=True, odd_constraint=False):
    """Canonical representatives of closed words of length k+1 with no d-cell crossed once.

    ``s`` fixes the support size (``None`` allows every size).  With
    ``odd_constraint`` the closed 2-words of length 2k+1 with no d-cell
    crossed exactly once at odd positions are listed instead.
    """
    if k > MAX_ENUM_K or d > MAX_ENUM_D:
        raise ResourceError(f"enumeration guardrail: need k <= {MAX_ENUM_K}, d <= {MAX_ENUM_D}")
    if k < 0 or d < 1:
        raise DomainError("need k >= 0 and d >= 1")
    steps = 2 * k if odd_constraint else k
    s_max = d + steps if s is None else s

    def accept(letters, counts, support):
        if s is not None and support != s:
            return False
        return all(c != 1 for c in counts.values())

    cls = TwoWord if odd_constraint else Word
    if odd_constraint and k == 0:
        return []
    return [cls(letters, d) for letters in _grow(d, steps, s_max, closed_only, accept, odd_constraint)]


def iter_closed_walks(n, d, length, two_word=False):
    """Every closed word (or 2-word) of the given length on K(d, n), as letter tuples."""
    from itertools import combinations

    letters = list(combinations(range(1, n + 1), d))
    nbrs = {a: [b for b in letters if _spans_cell(a, b, d)] for a in letters}
    path = []

    def rec():
        t = len(path) - 1
        if t == length - 1:
            if path[-1] == path[0]:
                yield tuple(path)
            return
        cur = path[-1]
        options = nbrs[cur]
        if two_word and t % 2 == 1:
            options = [cur] + options
        for nxt in options:
            path.append(nxt)
            yield from rec()
            path.pop()

    for start in letters:
        path.append(start)
        yield from rec()
        path.pop()


def is_wigner(w):
    """True iff w is a closed word in W^k_{k/2+d} (k = 0 counts as Wigner)."""
    if not isinstance(w, Word) or not w.closed:
        return False
    if w.k == 0:
        return True
    if w.k % 2:
        return False
    st = word_statistics(w)
    if len(st.supp0) != w.k // 2 + w.d:
        return False
    return all(c != 1 for c in st.cell_counts.values())


def tree_encode(w):
    """Labelled rooted planar tree of a canonical Wigner word."""
    if isinstance(w, (str, list, tuple)):
        w = validate_word(w)
    if not is_wigner(w):
        raise DomainError("input is not a Wigner word")
    if not is_canonical(w):
        raise DomainError("Wigner word must be in canonical (special representative) form")
    root = []
    stack = [(w.letters[0], root)]
    seen = {w.letters[0]}
    for a, b in zip(w.letters, w.letters[1:]):
        if len(stack) >= 2 and stack[-2][0] == b:
            stack.pop()
            continue
        if b in seen:
            raise DomainError("word graph is not a tree")
        seen.add(b)
        dropped = next(v for v in a if v not in b)
        label = a.index(dropped) + 1
        children = []
        stack[-1][1].append((label, children))
        stack.append((b, children))

    def freeze(node):
        return tuple((label, freeze(child)) for label, child in node)

    return freeze(root)


def tree_decode(tree, d):
    """Inverse of :func:`tree_encode`: the canonical Wigner word of a labelled tree."""
    if isinstance(tree, str):
        tree = parse_tree(tree)
    letters = [tuple(range(1, d + 1))]
    counter = [d]

    def rec(node, letter):
        for label, child in node:
            if not 1 <= label <= d:
                raise DomainError(f"edge label {label} outside 1..{d}")
            counter[0] += 1
            kept = letter[: label - 1] + letter[label:]
            nxt = tuple(sorted(kept + (counter[0],)))
            letters.append(nxt)
            rec(child, nxt)
            letters.append(letter)

    rec(tree, letters[0])
    return Word(tuple(letters), d)


def parse_tree(text):
    """``"(1(2)(1))"``: each group is an edge label followed by its subtree."""
    text = re.sub(r"\s+", "", text)
    pos = 0

    def node():
        nonlocal pos
        children = []
        while pos < len(text) and text[pos] == "(":
            pos += 1
            m = re.match(r"\d+", text[pos:])
            if not m:
                raise DomainError(f"expected edge label at position {pos} in {text!r}")
            label = int(m.group())
            pos += len(m.group())
            sub = node()
            if pos >= len(text) or text[pos] != ")":
                raise DomainError(f"unbalanced tree literal {text!r}")
            pos += 1
            children.append((label, sub))
        return tuple(children)

    tree = node()
    if pos != len(text):
        raise DomainError(f"trailing characters in tree literal {text!r}")
    return tree


def format_tree(tree):
    return "".join(f"({label}{format_tree(sub)})" for label, sub in tree)


def tree_edges(tree):
    return sum(1 + tree_edges(sub) for _, sub in tree)


def _plane_trees(edges):
    if edges == 0:
        yield ()
        return
    # first child subtree uses i edges, the rest of the root uses edges - 1 - i
    for i in range(edges):
        for first in _plane_trees(i):
            for rest in _plane_trees(edges - 1 - i):
                yield ((0, first),) + rest


def _relabel_tree(tree, labels):
    out = []
    for _, sub in tree:
        label = next(labels)
        out.append((label, _relabel_tree(sub, labels)))
    return tuple(out)


def enumerate_labeled_trees(edges, d):
    """All rooted planar trees with ``edges`` edges labelled from 1..d."""
    out = []
    for shape in _plane_trees(edges):
        for labels in product(range(1, d + 1), repeat=edges):
            out.append(_relabel_tree(shape, iter(labels)))
    return out


def _falling(n, m):
    out = 1
    for i in range(m):
        out *= n - i
    return out


def orbit_size(n, s, d):
    """Words on 1..n sharing a canonical form with s support 0-cells: n(n-1)...(n-s+1)/d!."""
    from math import factorial

    return _falling(n, s) // factorial(d)


def orbit_size_printed(n, s, d):
    """The product n(n-1)...(n-s)/d! as literally printed for the class size."""
    from math import factorial

    return _falling(n, s + 1) / factorial(d)


def orbit_size_bruteforce(w, n):
    """Count words of the same length on K(d, n) whose canonical form equals w's.

    Exhaustive over all walks; intended for tiny n and k only.
    """
    target = canonicalize(w).letters
    two = isinstance(w, TwoWord)
    length = len(w.letters)
    from itertools import combinations

    letters = list(combinations(range(1, n + 1), w.d))
    nbrs = {a: [b for b in letters if _spans_cell(a, b, w.d)] for a in letters}
    count = 0
    path = []

    def rec():
        nonlocal count
        t = len(path) - 1
        if t == length - 1:
            if _apply_map(path, _relabel_map(path)) == target:
                count += 1
            return
        options = nbrs[path[-1]]
        if two and t % 2 == 1:
            options = [path[-1]] + options
        for nxt in options:
            path.append(nxt)
            rec()
            path.pop()

    for start in letters:
        path.append(start)
        rec()
        path.pop()
    return count
