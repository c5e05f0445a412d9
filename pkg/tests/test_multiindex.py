from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hwtaylor.multiindex import (
    MultiIndex,
    count_upto,
    enumerate_upto,
    grlex_key,
    iter_dominated,
)

from oracles import pascal_binomial, tuple_binomial, tuples_upto


indices = st.integers(min_value=0, max_value=6)


def multiindices(width: int | None = None):
    widths = st.just(width) if width else st.integers(min_value=1, max_value=3)
    return widths.flatmap(
        lambda w: st.tuples(*([indices] * w)).map(MultiIndex)
    )


class TestBasics:
    def test_zero_and_unit(self):
        assert MultiIndex.zero(3).entries == (0, 0, 0)
        assert MultiIndex.unit(3, 1).entries == (0, 1, 0)
        assert MultiIndex.of(2, 0, 1).degree == 3

    def test_validation(self):
        with pytest.raises(ValueError):
            MultiIndex(())
        with pytest.raises(ValueError):
            MultiIndex((1, -1))
        with pytest.raises(ValueError):
            MultiIndex.unit(2, 2)

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            MultiIndex.of(1, 2) + MultiIndex.of(1)
        with pytest.raises(ValueError):
            MultiIndex.of(1, 2).le(MultiIndex.of(1, 2, 3))

    def test_sub_needs_domination(self):
        with pytest.raises(ValueError):
            MultiIndex.of(1, 0) - MultiIndex.of(0, 1)
        assert (MultiIndex.of(3, 2) - MultiIndex.of(1, 2)).entries == (2, 0)

    def test_factorial(self):
        assert MultiIndex.of(3, 0, 2).factorial() == 12
        assert MultiIndex.zero(2).factorial() == 1


class TestBinomial:
    def test_frozen_value(self):
        # independent Pascal oracle gives 6 * 6 = 36
        assert MultiIndex.of(4, 4).binomial(MultiIndex.of(2, 2)) == 36

    def test_needs_domination(self):
        with pytest.raises(ValueError):
            MultiIndex.of(1, 1).binomial(MultiIndex.of(2, 0))

    @given(multiindices(), st.data())
    def test_against_pascal(self, alpha, data):
        lower = MultiIndex(
            tuple(data.draw(st.integers(min_value=0, max_value=e)) for e in alpha)
        )
        assert alpha.binomial(lower) == tuple_binomial(alpha.entries, lower.entries)

    @given(multiindices())
    def test_factorial_quotient(self, alpha):
        # binom(alpha, beta) * beta! * (alpha - beta)! == alpha!
        for beta in iter_dominated(alpha):
            assert alpha.binomial(beta) * beta.factorial() * (alpha - beta).factorial() == alpha.factorial()


class TestEnumeration:
    def test_grlex_prefix(self):
        got = [a.entries for a in enumerate_upto(2, 2)]
        assert got == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]

    def test_frozen_count(self):
        # stars and bars: binom(6 + 2, 2) = 28
        assert len(enumerate_upto(2, 6)) == 28
        assert count_upto(2, 6) == 28

    @given(st.integers(min_value=1, max_value=3), st.integers(min_value=0, max_value=5))
    def test_count_and_membership(self, width, bound):
        got = enumerate_upto(width, bound)
        assert len(got) == count_upto(width, bound) == math.comb(bound + width, width)
        assert sorted(a.entries for a in got) == sorted(tuples_upto(width, bound))

    @given(st.integers(min_value=1, max_value=3), st.integers(min_value=0, max_value=5))
    def test_strictly_increasing(self, width, bound):
        got = enumerate_upto(width, bound)
        keys = [grlex_key(a) for a in got]
        assert all(x < y for x, y in zip(keys, keys[1:]))


class TestDominated:
    def test_box(self):
        got = [b.entries for b in iter_dominated(MultiIndex.of(1, 2))]
        assert sorted(got) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]

    @given(multiindices())
    def test_count(self, alpha):
        n = 1
        for e in alpha:
            n *= e + 1
        assert len(list(iter_dominated(alpha))) == n
        assert all(b.le(alpha) for b in iter_dominated(alpha))


def test_pascal_oracle_sanity():
    assert [pascal_binomial(4, k) for k in range(5)] == [1, 4, 6, 4, 1]
