from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hwtaylor.multiindex import MultiIndex
from hwtaylor.rings import (
    QQ,
    DifferentialRing,
    PolynomialRing,
    PrimeField,
    RingHom,
    constant_structure,
    differential_polynomial_carrier,
    is_differential_hom,
    ring_from_json,
)


class TestRationals:
    def test_ops(self):
        assert QQ.add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)
        assert QQ.try_invert(Fraction(-2, 3)) == Fraction(-3, 2)
        assert QQ.try_invert(Fraction(0)) is None
        assert QQ.characteristic == 0 and QQ.is_field

    def test_parse_render(self):
        assert QQ.parse("-7/3") == Fraction(-7, 3)
        assert QQ.render(Fraction(5, 10)) == "1/2"
        with pytest.raises(ValueError):
            QQ.parse("1.5")


class TestPrimeField:
    def test_char(self):
        F = PrimeField(5)
        assert F.characteristic == 5
        # p * 1 == 0
        assert F.is_zero(F.sum(F.one() for _ in range(5)))

    def test_invert_all_nonzero(self):
        F = PrimeField(7)
        for a in range(1, 7):
            assert F.mul(a, F.try_invert(a)) == F.one()
        assert F.try_invert(0) is None

    def test_requires_prime(self):
        with pytest.raises(ValueError):
            PrimeField(6)
        with pytest.raises(ValueError):
            PrimeField(1)

    def test_embed_wraps(self):
        F = PrimeField(3)
        assert F.embed_int(-1) == 2
        assert F.parse("14") == 2


class TestPolynomialRing:
    def setup_method(self):
        self.R = PolynomialRing(QQ, ["u", "v"])

    def test_parse_render_roundtrip(self):
        for text in ["0", "1", "-u", "2*u^2*v - 1/3*u + 4", "u*v", "-3/2"]:
            p = self.R.parse(text)
            assert self.R.eq(self.R.parse(self.R.render(p)), p)

    def test_parse_rejects(self):
        for bad in ["w", "u +", "u ^ v", "1.5", "u**2"]:
            with pytest.raises(ValueError):
                self.R.parse(bad)

    def test_arithmetic(self):
        u, v = self.R.gen("u"), self.R.gen("v")
        lhs = self.R.mul(self.R.add(u, v), self.R.add(u, v))
        rhs = self.R.parse("u^2 + 2*u*v + v^2")
        assert self.R.eq(lhs, rhs)

    def test_constant_only_units(self):
        assert self.R.try_invert(self.R.parse("2")) == self.R.parse("1/2")
        assert self.R.try_invert(self.R.gen("u")) is None
        assert self.R.try_invert(self.R.zero()) is None

    def test_char_p_coefficients(self):
        R3 = PolynomialRing(PrimeField(3), ["u"])
        # (u + 1)^3 == u^3 + 1 in characteristic 3
        cube = R3.pow(R3.parse("u + 1"), 3)
        assert R3.eq(cube, R3.parse("u^3 + 1"))

    def test_degree(self):
        assert self.R.degree(self.R.zero()) == -1
        assert self.R.degree(self.R.parse("u^2*v + 1")) == 3


class TestDerivations:
    def test_polynomial_rule(self):
        R = PolynomialRing(QQ, ["u"])
        d = R.derivation(["1"])
        # d(u^3 - 2u) = 3u^2 - 2
        assert R.eq(d(R.parse("u^3 - 2*u")), R.parse("3*u^2 - 2"))

    def test_leibniz_brute_force(self):
        R = PolynomialRing(QQ, ["u", "v"])
        d = R.derivation(["v", "u^2"])
        rng = random.Random(7)
        for _ in range(25):
            a, b = R.sample(rng), R.sample(rng)
            lhs = d(R.mul(a, b))
            rhs = R.add(R.mul(d(a), b), R.mul(a, d(b)))
            assert R.eq(lhs, rhs)

    def test_base_derivation_extends(self):
        # base Q[u] with d/du, extended to Q[u][x] sending x to 0
        base = PolynomialRing(QQ, ["u"])
        du = base.derivation(["1"])
        R = PolynomialRing(base, ["x"])
        d = R.derivation([R.zero()], base_derivation=du)
        p = R.mul(R.constant(base.gen("u")), R.gen("x"))
        assert R.eq(d(p), R.gen("x"))

    def test_derive_iter(self):
        D = differential_polynomial_carrier(QQ, ["u"], [["1"]])
        R = D.ring
        got = D.derive_iter(R.parse("u^2"), MultiIndex.of(2))
        assert R.eq(got, R.parse("2"))
        with pytest.raises(ValueError):
            D.derive_iter(R.one(), MultiIndex.of(1, 1))

    def test_is_constant(self):
        D = differential_polynomial_carrier(QQ, ["u", "v"], [["1", "0"]])
        R = D.ring
        assert D.is_constant(R.parse("v^2 - 3"))
        assert not D.is_constant(R.parse("u"))

    def test_constant_structure(self):
        D = constant_structure(PrimeField(5), 2)
        assert D.width == 2
        assert D.is_constant(3)

    def test_commutation_validated(self):
        # two slots: slot 0 sends u -> 1; slot 1 sends u -> u.  They do not
        # commute: d0 d1 (u) = 1 but d1 d0 (u) = 0.
        with pytest.raises(ValueError, match="do not commute"):
            differential_polynomial_carrier(QQ, ["u"], [["1"], ["u"]])
        # constant-image families always pass
        differential_polynomial_carrier(QQ, ["u", "v"], [["1", "2"], ["3", "0"]])
        # diagonal families always pass
        differential_polynomial_carrier(QQ, ["u", "v"], [["u", "0"], ["0", "2*v"]])


class TestHoms:
    def test_is_ring_hom(self):
        R = PolynomialRing(QQ, ["u"])
        ev_at_2 = RingHom(
            R, QQ, lambda p: sum((c * Fraction(2) ** e[0] for e, c in p.terms), Fraction(0))
        )
        rng = random.Random(3)
        samples = [R.sample(rng) for _ in range(6)]
        assert ev_at_2.is_ring_hom(samples)
        not_hom = RingHom(R, QQ, lambda p: Fraction(len(p.terms)))
        assert not not_hom.is_ring_hom(samples)

    def test_is_differential_hom(self):
        D = differential_polynomial_carrier(QQ, ["u"], [["1"]])
        ident = RingHom(D, D, lambda a: a)
        rng = random.Random(5)
        samples = [D.ring.sample(rng) for _ in range(6)]
        assert is_differential_hom(ident, samples)
        # squaring is not even additive, and certainly not differential
        sq = RingHom(D, D, lambda a: D.ring.mul(a, a))
        assert not is_differential_hom(sq, [D.ring.gen("u")])

    def test_width_mismatch_errors(self):
        D1 = differential_polynomial_carrier(QQ, ["u"], [["1"]])
        D2 = differential_polynomial_carrier(QQ, ["u"], [["1", ], ["0"]][:1] * 2)
        f = RingHom(D1, D2, lambda a: a)
        with pytest.raises(ValueError, match="width"):
            is_differential_hom(f, [])
        with pytest.raises(ValueError, match="differential rings"):
            is_differential_hom(RingHom(QQ, QQ, lambda a: a), [])


class TestJson:
    def test_roundtrip(self):
        for ring in [QQ, PrimeField(7), PolynomialRing(QQ, ["u", "v"]), PolynomialRing(PrimeField(3), ["x"])]:
            assert ring_from_json(ring.to_json()) == ring

    def test_errors_name_path(self):
        with pytest.raises(ValueError, match="ring.kind"):
            ring_from_json({"kind": "Z"})
        with pytest.raises(ValueError, match="ring.p"):
            ring_from_json({"kind": "Fp", "p": 4})
        with pytest.raises(ValueError, match="ring.generators"):
            ring_from_json({"kind": "poly", "generators": []})
        with pytest.raises(ValueError, match="unknown field"):
            ring_from_json({"kind": "Q", "extra": 1})


@st.composite
def field_and_pair(draw):
    ring = draw(st.sampled_from([QQ, PrimeField(2), PrimeField(5)]))
    seed = draw(st.integers(min_value=0, max_value=10**6))
    rng = random.Random(seed)
    return ring, ring.sample(rng), ring.sample(rng), ring.sample(rng)


@given(field_and_pair())
def test_field_axioms_hypothesis(data):
    ring, a, b, c = data
    assert ring.eq(ring.add(a, b), ring.add(b, a))
    assert ring.eq(ring.mul(a, b), ring.mul(b, a))
    assert ring.eq(ring.mul(a, ring.add(b, c)), ring.add(ring.mul(a, b), ring.mul(a, c)))
    assert ring.is_zero(ring.add(a, ring.neg(a)))
    assert ring.eq(ring.mul(a, ring.one()), a)
