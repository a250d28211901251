import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigdev import (
    DomainError,
    DyckWord,
    PairPartition,
    ResourceLimitError,
    catalan,
    dyck_from_partition,
    generation_labels,
    insert_generation,
    nc2_enumerate,
    partition_from_dyck,
    schwinger_dyson_check,
    semicircular_moment,
    semicircular_moment_fast,
)
from sigdev.freeprob import tree_text


def brute_force_nc2(n):
    """All pairings of {1..n}, filtered for the non-crossing property."""

    def pairings(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for i, other in enumerate(rest):
            for sub in pairings(rest[:i] + rest[i + 1 :]):
                yield [(first, other)] + sub

    def crossing(pairs):
        for (a, b), (c, d) in itertools.combinations(pairs, 2):
            lo1, hi1 = sorted((a, b))
            lo2, hi2 = sorted((c, d))
            if lo1 < lo2 < hi1 < hi2 or lo2 < lo1 < hi2 < hi1:
                return True
        return False

    out = set()
    for p in pairings(list(range(1, n + 1))):
        if not crossing(p):
            out.add(frozenset(tuple(sorted(q)) for q in p))
    return out


class TestCatalan:
    def test_small_values(self):
        assert catalan(0) == 1
        assert catalan(1) == 1
        assert catalan(5) == 42

    def test_recurrence(self):
        for k in range(10):
            assert catalan(k + 1) == sum(catalan(i) * catalan(k - i) for i in range(k + 1))

    def test_domain(self):
        with pytest.raises(DomainError):
            catalan(-1)
        with pytest.raises(DomainError):
            catalan(31)


class TestNc2Enumerate:
    def test_two_elements(self):
        assert nc2_enumerate(2) == [PairPartition(frozenset({(1, 2)}))]

    def test_four_elements(self):
        got = {p.pairs for p in nc2_enumerate(4)}
        assert got == {
            frozenset({(1, 2), (3, 4)}),
            frozenset({(1, 4), (2, 3)}),
        }
        assert frozenset({(1, 3), (2, 4)}) not in got  # crossing

    def test_six_elements_count(self):
        assert len(nc2_enumerate(6)) == 5

    def test_odd_is_empty(self):
        assert nc2_enumerate(5) == []

    def test_matches_brute_force(self):
        for n in (2, 4, 6, 8):
            assert {p.pairs for p in nc2_enumerate(n)} == brute_force_nc2(n)

    def test_counts_are_catalan(self):
        for k in range(7):
            assert len(nc2_enumerate(2 * k)) == catalan(k)

    def test_no_duplicates(self):
        parts = nc2_enumerate(10)
        assert len(parts) == len({p.pairs for p in parts})

    def test_resource_bound(self):
        with pytest.raises(ResourceLimitError):
            nc2_enumerate(22)


class TestPairPartitionValidation:
    def test_crossing_rejected(self):
        with pytest.raises(DomainError):
            PairPartition(frozenset({(1, 3), (2, 4)}))

    def test_cover_required(self):
        with pytest.raises(DomainError):
            PairPartition(frozenset({(1, 3)}))


class TestDyckBijection:
    def test_reference_example(self):
        part = PairPartition(frozenset({(1, 6), (2, 3), (4, 5), (7, 8)}))
        assert dyck_from_partition(part).parens == "(()())()"

    def test_single_pair(self):
        assert partition_from_dyck(DyckWord("()")) == PairPartition(frozenset({(1, 2)}))

    def test_roundtrip_up_to_twelve(self):
        for n in range(0, 13, 2):
            parts = nc2_enumerate(n)
            assert len(parts) == catalan(n // 2)
            for p in parts:
                assert partition_from_dyck(dyck_from_partition(p)) == p

    def test_dyck_validation(self):
        for bad in ("(()", ")(", "(]"):
            with pytest.raises(DomainError):
                DyckWord(bad)


class TestGenerations:
    def test_reference_word(self):
        info = generation_labels(DyckWord("()()(()(()))"))
        assert info.word_generation == 3
        assert info.labels == {
            (5, 12): 1,
            (3, 4): 2,
            (8, 11): 2,
            (1, 2): 3,
            (6, 7): 3,
            (9, 10): 3,
        }
        assert info.maximal_pairs == frozenset({(1, 2), (6, 7), (9, 10)})

    def test_single_pair(self):
        info = generation_labels(DyckWord("()"))
        assert info.labels == {(1, 2): 1}
        assert info.word_generation == 1

    def test_nested_pair(self):
        info = generation_labels(DyckWord("(())"))
        assert info.labels == {(1, 4): 1, (2, 3): 2}

    def test_maximal_pairs_are_adjacent(self):
        for n in range(2, 13, 2):
            for part in nc2_enumerate(n):
                info = generation_labels(dyck_from_partition(part))
                for i, j in info.maximal_pairs:
                    assert j == i + 1

    def test_insert_on_single_pair(self):
        got = {w.parens for w in insert_generation(DyckWord("()"))}
        assert got == {"()()", "(())", "()(())"}

    def test_insert_bootstraps_from_empty(self):
        assert {w.parens for w in insert_generation(DyckWord(""))} == {"()"}

    def _words_by_generation(self, max_len):
        by_gen = {}
        for n in range(0, max_len + 1, 2):
            for part in nc2_enumerate(n):
                word = dyck_from_partition(part)
                by_gen.setdefault(generation_labels(word).word_generation, set()).add(word)
        return by_gen

    def test_insertions_are_disjoint(self):
        by_gen = self._words_by_generation(8)
        for gen, words in by_gen.items():
            for d1, d2 in itertools.combinations(sorted(words, key=str), 2):
                assert insert_generation(d1).isdisjoint(insert_generation(d2))

    def test_insertions_partition_next_generation(self):
        by_gen = self._words_by_generation(10)
        for gen in range(0, 4):
            parents = by_gen.get(gen, set()) if gen else {DyckWord("")}
            children = by_gen.get(gen + 1, set())
            for child in children:
                producers = [p for p in parents if child in insert_generation(p)]
                assert len(producers) == 1, f"{child.parens} from {len(producers)} parents"


class TestTreeText:
    def test_reference_shape(self):
        assert tree_text(DyckWord("(()())()")) == "[[[],[]],[]]"

    def test_empty(self):
        assert tree_text(DyckWord("")) == "[]"


class TestMoments:
    def test_basic_words(self):
        assert semicircular_moment((1, 1)) == 1
        assert semicircular_moment((1, 1, 1, 1)) == 2 == catalan(2)
        assert semicircular_moment((1, 2, 1, 2)) == 0
        assert semicircular_moment((1, 2, 2, 1)) == 1

    def test_empty_and_odd(self):
        assert semicircular_moment(()) == 1
        assert semicircular_moment((1,)) == 0
        assert semicircular_moment((1, 1, 2)) == 0

    def test_single_letter_words_give_catalan(self):
        for k in range(7):
            assert semicircular_moment((1,) * (2 * k)) == catalan(k)
            assert semicircular_moment_fast((3,) * (2 * k)) == catalan(k)

    def test_length_cap(self):
        with pytest.raises(ResourceLimitError):
            semicircular_moment((1,) * 22)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(1, 3), max_size=10))
    def test_fast_matches_enumeration(self, word):
        assert semicircular_moment_fast(word) == semicircular_moment(word)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(1, 3), max_size=8), st.permutations([1, 2, 3]))
    def test_relabeling_invariance(self, word, perm):
        relabeled = [perm[letter - 1] for letter in word]
        assert semicircular_moment(word) == semicircular_moment(relabeled)


class TestSchwingerDyson:
    def test_identities_hold(self):
        assert schwinger_dyson_check(6, 2)
        assert schwinger_dyson_check(4, 3)

    def test_length_cap(self):
        with pytest.raises(ResourceLimitError):
            schwinger_dyson_check(11, 2)
