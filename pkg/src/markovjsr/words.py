"""Classification and enumeration of index words over the transition digraph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from markovjsr.core import (
    TransitionMatrix,
    ValidationError,
    WordClass,
    surviving_nodes,
    validate_word,
)

__all__ = [
    "TransitionDigraph",
    "classify",
    "enumerate_words",
    "count_words",
]


@dataclass(frozen=True, eq=False)
class TransitionDigraph:
    """Successor structure of a transition matrix with reachability flags.

    Node j has an edge to node i iff letter i may follow letter j, i.e.
    iff entry (i, j) of the transition matrix is 1.  ``has_out_edge``
    marks letters with any continuation, ``can_reach_cycle`` marks letters
    from which an infinite walk exists; both are precomputed so class
    membership of a word is O(1) once the chain condition is known.
    """

    size: int
    successors: tuple[tuple[int, ...], ...]
    has_out_edge: tuple[bool, ...]
    can_reach_cycle: tuple[bool, ...]

    @classmethod
    def from_omega(cls, omega: TransitionMatrix) -> "TransitionDigraph":
        n = omega.size
        succ = tuple(
            tuple(int(i) + 1 for i in np.flatnonzero(omega.entries[:, j]))
            for j in range(n)
        )
        alive = surviving_nodes(omega)
        return cls(
            size=n,
            successors=succ,
            has_out_edge=tuple(bool(s) for s in succ),
            can_reach_cycle=tuple((j + 1) in alive for j in range(n)),
        )

    def out_of(self, node: int) -> tuple[int, ...]:
        return self.successors[node - 1]


def classify(
    word: Sequence[int],
    omega: TransitionMatrix,
    digraph: TransitionDigraph | None = None,
) -> frozenset[WordClass]:
    """Word-class memberships of an index word.

    Empty when a consecutive transition is forbidden; otherwise contains
    CHAIN plus the stronger classes decided by the final letter (and, for
    periodic extendability, by the wrap transition back to the first
    letter).  A single letter satisfies the chain condition vacuously.
    """
    w = validate_word(word, omega.size)
    dg = digraph if digraph is not None else TransitionDigraph.from_omega(omega)
    for a, b in zip(w, w[1:]):
        if not omega.allows(a, b):
            return frozenset()
    found = {WordClass.CHAIN}
    last = w[-1]
    if dg.has_out_edge[last - 1]:
        found.add(WordClass.MARKOV)
    if dg.can_reach_cycle[last - 1]:
        found.add(WordClass.INFINITELY_EXTENDABLE)
    if omega.allows(last, w[0]):
        found.add(WordClass.PERIODICALLY_EXTENDABLE)
    return frozenset(found)


def _final_test(dg: TransitionDigraph, omega: TransitionMatrix, word_class: WordClass):
    if word_class is WordClass.CHAIN:
        return lambda first, last: True
    if word_class is WordClass.MARKOV:
        return lambda first, last: dg.has_out_edge[last - 1]
    if word_class is WordClass.INFINITELY_EXTENDABLE:
        return lambda first, last: dg.can_reach_cycle[last - 1]
    return lambda first, last: omega.allows(last, first)


def enumerate_words(
    omega: TransitionMatrix,
    n: int,
    word_class: WordClass = WordClass.CHAIN,
) -> Iterator[tuple[int, ...]]:
    """Yield the length-n words of the class in lexicographic order.

    Depth-first with transition pruning: only chain prefixes are ever
    extended (cost proportional to the number of chain words, not to the
    alphabet power), and the class condition is applied at the final
    letter.  Lazy, so callers can fold products without materializing the
    word list.
    """
    if n < 1:
        raise ValidationError(f"word length must be positive, got {n}")
    dg = TransitionDigraph.from_omega(omega)
    accept = _final_test(dg, omega, word_class)

    def walk(prefix: list[int]) -> Iterator[tuple[int, ...]]:
        if len(prefix) == n:
            if accept(prefix[0], prefix[-1]):
                yield tuple(prefix)
            return
        options = dg.out_of(prefix[-1]) if prefix else range(1, omega.size + 1)
        for nxt in options:
            prefix.append(nxt)
            yield from walk(prefix)
            prefix.pop()

    yield from walk([])


def _int_rows(omega: TransitionMatrix) -> list[list[int]]:
    return [[int(v) for v in row] for row in omega.entries]


def _int_mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    n = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]


def count_words(
    omega: TransitionMatrix,
    n: int,
    word_class: WordClass = WordClass.CHAIN,
) -> int:
    """Transfer-matrix count of the length-n words of the class.

    Chain words of length n are walks of length n-1, so their number is
    the total of the (n-1)-th power of the transition matrix; the other
    classes restrict the final letter (rows with a continuation / rows
    that reach a cycle) or close the walk (trace, for the periodic class).
    Exact integer arithmetic, so counts never overflow.
    """
    if n < 1:
        raise ValidationError(f"word length must be positive, got {n}")
    base = _int_rows(omega)
    power = [[1 if i == j else 0 for j in range(omega.size)] for i in range(omega.size)]
    for _ in range(n - 1):
        power = _int_mat_mul(base, power)
    if word_class is WordClass.PERIODICALLY_EXTENDABLE:
        closed = _int_mat_mul(base, power)  # walks of length n from i1 back to i1
        return sum(closed[i][i] for i in range(omega.size))
    if word_class is WordClass.CHAIN:
        rows = range(omega.size)
    else:
        dg = TransitionDigraph.from_omega(omega)
        flags = (
            dg.has_out_edge
            if word_class is WordClass.MARKOV
            else dg.can_reach_cycle
        )
        rows = [i for i in range(omega.size) if flags[i]]
    return sum(power[i][j] for i in rows for j in range(omega.size))
