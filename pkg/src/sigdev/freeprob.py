"""Non-crossing pair partitions, Dyck words, generations, and the mixed
moments of free semicircular variables.

Moments come in two independent implementations: an exhaustive enumerator
over non-crossing pairings (the test oracle) and a memoized recursion on
the Schwinger-Dyson identity phi(Ij) = sum_{I=KjL} phi(K) phi(L) (the fast
path).  Everything here is exact integer combinatorics.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, ResourceLimitError

MAX_PAIRING_ELEMENTS = 20
MAX_CATALAN_INDEX = 30

OPEN, CLOSE = "(", ")"


def catalan(k: int) -> int:
    """k-th Catalan number, exact."""
    if k < 0 or k > MAX_CATALAN_INDEX:
        raise DomainError(f"catalan index must lie in 0..{MAX_CATALAN_INDEX}")
    return math.comb(2 * k, k) // (k + 1)


@dataclass(frozen=True)
class PairPartition:
    """Non-crossing perfect matching of {1..2k} (k = 0 allowed)."""

    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        pairs = frozenset(tuple(sorted(p)) for p in self.pairs)
        elements = sorted(itertools.chain.from_iterable(pairs))
        n = 2 * len(pairs)
        if elements != list(range(1, n + 1)):
            raise DomainError("pairs must partition {1..2k} into disjoint two-sets")
        for (a, b), (c, d) in itertools.combinations(sorted(pairs), 2):
            if a < c < b < d:
                raise DomainError(f"pairs {{{a},{b}}} and {{{c},{d}}} cross")
        object.__setattr__(self, "pairs", pairs)

    @property
    def size(self) -> int:
        """Number of matched elements, 2k."""
        return 2 * len(self.pairs)

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)


@dataclass(frozen=True)
class DyckWord:
    """Balanced parenthesis string; every prefix has #open >= #close."""

    parens: str

    def __post_init__(self):
        depth = 0
        for ch in self.parens:
            if ch == OPEN:
                depth += 1
            elif ch == CLOSE:
                depth -= 1
                if depth < 0:
                    raise DomainError("close parenthesis without matching open")
            else:
                raise DomainError(f"invalid character {ch!r} in Dyck word")
        if depth != 0:
            raise DomainError("unbalanced Dyck word")

    def __len__(self) -> int:
        return len(self.parens)

    def __str__(self) -> str:
        return self.parens


@dataclass(frozen=True)
class GenerationLabels:
    """Generation of each pair of a Dyck word.

    The pair closed by the word's final parenthesis has generation 1; a pair
    has generation k+1 when the parenthesis immediately following its close
    belongs to a pair of generation k.  ``maximal_pairs`` collects the pairs
    at ``word_generation``; they are always adjacent "()" pairs.
    """

    labels: Mapping[tuple[int, int], int]
    word_generation: int
    maximal_pairs: frozenset[tuple[int, int]] = field(init=False)

    def __post_init__(self):
        top = frozenset(p for p, g in self.labels.items() if g == self.word_generation)
        object.__setattr__(self, "maximal_pairs", top)
        for i, j in top:
            if j != i + 1:
                raise DomainError("maximal-generation pair is not adjacent")


def nc2_enumerate(n: int) -> list[PairPartition]:
    """All non-crossing pair partitions of {1..n}; empty for odd n.

    The count is the Catalan number C_{n/2}.  Bounded at n <= 20.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n > MAX_PAIRING_ELEMENTS:
        raise ResourceLimitError(f"non-crossing enumeration capped at n = {MAX_PAIRING_ELEMENTS}")
    if n % 2 == 1:
        return []

    def rec(positions: tuple[int, ...]) -> list[frozenset[tuple[int, int]]]:
        if not positions:
            return [frozenset()]
        first = positions[0]
        out = []
        # the partner must leave an even number of positions enclosed
        for offset in range(1, len(positions), 2):
            partner = positions[offset]
            inside = positions[1:offset]
            outside = positions[offset + 1 :]
            for inner in rec(inside):
                for outer in rec(outside):
                    out.append(inner | outer | {(first, partner)})
        return out

    return [PairPartition(p) for p in rec(tuple(range(1, n + 1)))]


def dyck_from_partition(partition: PairPartition) -> DyckWord:
    """Encode a non-crossing pair partition: pair openers become '(',
    closers become ')'."""
    chars = [""] * partition.size
    for i, j in partition.pairs:
        chars[i - 1] = OPEN
        chars[j - 1] = CLOSE
    return DyckWord("".join(chars))


def partition_from_dyck(word: DyckWord) -> PairPartition:
    """Inverse of :func:`dyck_from_partition` (matching by nesting)."""
    stack: list[int] = []
    pairs = set()
    for pos, ch in enumerate(word.parens, start=1):
        if ch == OPEN:
            stack.append(pos)
        else:
            pairs.add((stack.pop(), pos))
    return PairPartition(frozenset(pairs))


def generation_labels(word: DyckWord) -> GenerationLabels:
    """Generation label of every pair of the word (see GenerationLabels)."""
    pairs = partition_from_dyck(word).sorted_pairs()
    if not pairs:
        return GenerationLabels({}, 0)
    by_close = sorted(pairs, key=lambda p: p[1], reverse=True)
    pair_at_position = {}
    for p in pairs:
        pair_at_position[p[0]] = p
        pair_at_position[p[1]] = p
    labels: dict[tuple[int, int], int] = {}
    last = len(word.parens)
    for p in by_close:
        if p[1] == last:
            labels[p] = 1
        else:
            labels[p] = labels[pair_at_position[p[1] + 1]] + 1
    return GenerationLabels(labels, max(labels.values()))


def insert_generation(word: DyckWord) -> set[DyckWord]:
    """Dyck words obtained by inserting "()" immediately to the left of at
    least one parenthesis belonging to a maximal-generation pair."""
    info = generation_labels(word)
    sites = sorted(itertools.chain.from_iterable(info.maximal_pairs))
    if not sites:
        return {DyckWord("()")}
    out: set[DyckWord] = set()
    for r in range(1, len(sites) + 1):
        for chosen in itertools.combinations(sites, r):
            chosen_set = set(chosen)
            chars: list[str] = []
            for pos, ch in enumerate(word.parens, start=1):
                if pos in chosen_set:
                    chars.append(OPEN + CLOSE)
                chars.append(ch)
            out.add(DyckWord("".join(chars)))
    return out


def tree_text(word: DyckWord) -> str:
    """Nested-list rendering of the rooted plane tree of a Dyck word.

    Each '(' walks down an edge, each ')' walks back up; children print in
    left-to-right order.  Display form only.
    """
    stack: list[list] = [[]]
    for ch in word.parens:
        if ch == OPEN:
            child: list = []
            stack[-1].append(child)
            stack.append(child)
        else:
            stack.pop()

    def render(node: list) -> str:
        return "[" + ",".join(render(c) for c in node) + "]"

    return render(stack[0])


def semicircular_moment(word: Sequence[int]) -> int:
    """Mixed moment of free semicircular variables, by exhaustive count of
    non-crossing pairings whose pairs join equal letters.

    The empty word has moment 1; odd lengths give 0.  This is the slow,
    obviously-correct route; see :func:`semicircular_moment_fast`.
    """
    letters = tuple(word)
    if len(letters) > MAX_PAIRING_ELEMENTS:
        raise ResourceLimitError(f"moment enumeration capped at words of length {MAX_PAIRING_ELEMENTS}")
    count = 0
    for partition in nc2_enumerate(len(letters)):
        if all(letters[i - 1] == letters[j - 1] for i, j in partition.pairs):
            count += 1
    return count


@functools.lru_cache(maxsize=None)
def _moment_rec(word: tuple[int, ...]) -> int:
    if not word:
        return 1
    if len(word) % 2 == 1:
        return 0
    head, last = word[:-1], word[-1]
    total = 0
    for p in range(len(head)):
        if head[p] == last:
            total += _moment_rec(head[:p]) * _moment_rec(head[p + 1 :])
    return total


def semicircular_moment_fast(word: Sequence[int]) -> int:
    """Same moment via the memoized Schwinger-Dyson recursion."""
    return _moment_rec(tuple(word))


def _rotations(word: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
    for r in range(1, len(word)):
        yield word[r:] + word[:r]


def schwinger_dyson_check(max_len: int, alphabet: int) -> bool:
    """Exhaustively verify the two Schwinger-Dyson identities.

    For every word I (and letter j) up to ``max_len`` over {1..alphabet}:
    traciality phi(IJ) = phi(JI), and the recursion
    phi(Ij) = sum over decompositions I = K j L of phi(K) phi(L),
    evaluated with the enumerating implementation.  Exact integer check.
    """
    if max_len > 10:
        raise ResourceLimitError("exhaustive identity check capped at max_len = 10")
    memo: dict[tuple[int, ...], int] = {}

    def phi(w: tuple[int, ...]) -> int:
        if w not in memo:
            memo[w] = semicircular_moment(w)
        return memo[w]

    for length in range(0, max_len + 1):
        for word in itertools.product(range(1, alphabet + 1), repeat=length):
            value = phi(word)
            for rotated in _rotations(word):
                if phi(rotated) != value:
                    return False
            if length >= 1:
                head, last = word[:-1], word[-1]
                recursion = sum(
                    phi(head[:p]) * phi(head[p + 1 :])
                    for p in range(len(head))
                    if head[p] == last
                )
                if recursion != value:
                    return False
    return True
