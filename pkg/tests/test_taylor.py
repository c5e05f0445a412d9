from __future__ import annotations

import random
from fractions import Fraction

import pytest

from hwtaylor.diffpoly import DiffPolyRing
from hwtaylor.hurwitz import HurwitzRing
from hwtaylor.multiindex import MultiIndex, enumerate_upto
from hwtaylor.rings import (
    QQ,
    DomainError,
    PrimeField,
    constant_structure,
    differential_polynomial_carrier,
)
from hwtaylor.taylor import (
    MorphismSpec,
    classical_taylor,
    ev_twist,
    ev_untwist,
    hurwitz_morphism,
    twisted_hurwitz,
    twisted_taylor,
)

from oracles import (
    FRACTION_OPS,
    Ops,
    ev_twist_coeff,
    fp_ops,
    twisted_divided_coeff,
    twisted_hurwitz_coeff,
)


def poly_ops(R):
    return Ops(zero=R.zero(), add=R.add, mul=R.mul, neg=R.neg, embed=R.embed_int)


def rational_poly_carrier():
    """K = Q[u] with the single derivation u -> 1."""
    return differential_polynomial_carrier(QQ, ["u"], [["1"]])


class TestGoldenLinear:
    """Expansion of u over (Q[u], d/du) with a trivially derived source."""

    def setup_method(self):
        self.K = rational_poly_carrier()
        self.R = self.K.ring
        self.source = constant_structure(self.R, 1)
        rng = random.Random(0)
        self.spec = MorphismSpec(
            source=self.source,
            coefficients=self.K,
            phi=lambda a: a,
            trunc=8,
            samples=tuple(self.R.sample(rng) for _ in range(4)),
        )
        self.u = self.R.gen("u")

    def expected(self, H):
        return H.from_table(
            {
                MultiIndex.of(0): self.u,
                MultiIndex.of(1): self.R.embed_int(-1),
            }
        )

    def test_twisted_hurwitz_gives_u_minus_t(self):
        got = twisted_hurwitz(self.spec, self.u)
        assert got.valid == 8
        assert self.spec.target.eq(got, self.expected(self.spec.target))

    def test_twisted_taylor_gives_u_minus_t(self):
        got = twisted_taylor(self.spec, self.u)
        assert self.spec.target.eq(got, self.expected(self.spec.target))

    def test_compositional_route_agrees(self):
        # independent route: expand with the coefficients read as constant,
        # then untwist by the coefficient family
        constant_view = MorphismSpec(
            source=self.source,
            coefficients=constant_structure(self.R, 1),
            phi=lambda a: a,
            trunc=8,
        )
        plain = hurwitz_morphism(constant_view, self.u)
        via_twist = ev_untwist(plain, self.K.derivations)
        assert self.spec.target.eq(via_twist, twisted_hurwitz(self.spec, self.u))


class TestGoldenExponential:
    """Expansion of x with every derivative of x sent to 1."""

    def setup_method(self):
        self.K = constant_structure(QQ, 1)
        self.A = DiffPolyRing(self.K, ["x"])
        self.values = {
            (0, MultiIndex.of(n)): Fraction(1) for n in range(11)
        }
        rng = random.Random(1)
        self.spec = MorphismSpec(
            source=self.A.differential_ring(),
            coefficients=self.K,
            phi=self.A.value_hom(self.values),
            trunc=10,
            samples=tuple(self.A.sample(rng) for _ in range(4)),
        )
        self.x = self.A.gen("x")

    def test_hurwitz_coefficients_all_one(self):
        got = hurwitz_morphism(self.spec, self.x)
        for n in range(11):
            assert got.coeff(MultiIndex.of(n)) == Fraction(1)

    def test_classical_coefficients_inverse_factorials(self):
        got = classical_taylor(self.spec, self.x)
        import math

        for n in range(11):
            assert got.coeff(MultiIndex.of(n)) == Fraction(1, math.factorial(n))

    def test_divided_bridge_connects_them(self):
        H = self.spec.target
        lhs = H.to_divided(hurwitz_morphism(self.spec, self.x))
        rhs = classical_taylor(self.spec, self.x)
        assert H.eq(lhs, rhs)


class TestConstantCoincidence:
    """With vanishing coefficient derivations the twist does nothing."""

    def test_twisted_equals_plain(self):
        K = constant_structure(PrimeField(5), 2)
        A = DiffPolyRing(K, ["x", "y"])
        rng = random.Random(2)
        values = {
            (v, alpha): K.ring.sample(rng)
            for v in range(2)
            for alpha in enumerate_upto(2, 7)
        }
        spec = MorphismSpec(
            source=A.differential_ring(),
            coefficients=K,
            phi=A.value_hom(values),
            trunc=4,
            samples=tuple(A.sample(rng) for _ in range(3)),
        )
        for _ in range(5):
            a = A.sample(rng)
            assert spec.target.eq(
                twisted_hurwitz(spec, a), hurwitz_morphism(spec, a)
            )

    def test_twisted_taylor_equals_classical(self):
        K = constant_structure(QQ, 1)
        A = DiffPolyRing(K, ["x"])
        rng = random.Random(3)
        values = {(0, alpha): QQ.sample(rng) for alpha in enumerate_upto(1, 8)}
        spec = MorphismSpec(
            source=A.differential_ring(),
            coefficients=K,
            phi=A.value_hom(values),
            trunc=5,
            samples=tuple(A.sample(rng) for _ in range(3)),
        )
        for _ in range(5):
            a = A.sample(rng)
            assert spec.target.eq(twisted_taylor(spec, a), classical_taylor(spec, a))


class TestOracleCrossChecks:
    def _spec_rational(self, trunc):
        K = rational_poly_carrier()
        source = constant_structure(K.ring, 1)
        return MorphismSpec(source=source, coefficients=K, phi=lambda a: a, trunc=trunc)

    def test_twisted_hurwitz_against_direct_sum(self):
        spec = self._spec_rational(5)
        R = spec.coefficients.ring
        rng = random.Random(4)
        ops = poly_ops(R)
        for _ in range(5):
            a = R.sample(rng)
            got = twisted_hurwitz(spec, a)
            for alpha in spec.target.indices:
                want = twisted_hurwitz_coeff(
                    a,
                    alpha.entries,
                    [lambda _x: R.zero()],
                    spec.coefficients.derivations,
                    lambda v: v,
                    ops,
                )
                assert R.eq(got.coeff(alpha), want)

    def test_twisted_taylor_against_direct_sum(self):
        spec = self._spec_rational(4)
        R = spec.coefficients.ring
        rng = random.Random(5)
        ops = poly_ops(R)

        def divide(v, n):
            return R.mul(R.constant(Fraction(1, n)), v)

        for _ in range(5):
            a = R.sample(rng)
            got = twisted_taylor(spec, a)
            for alpha in spec.target.indices:
                want = twisted_divided_coeff(
                    a,
                    alpha.entries,
                    [lambda _x: R.zero()],
                    spec.coefficients.derivations,
                    lambda v: v,
                    ops,
                    divide,
                )
                assert R.eq(got.coeff(alpha), want)

    def test_ev_twist_against_direct_sum(self):
        F = PrimeField(3)
        # diagonal commuting family on F3[u, v]
        K = differential_polynomial_carrier(
            F, ["u", "v"], [["u", "0"], ["0", "2*v"]]
        )
        R = K.ring
        H = HurwitzRing(R, 2, 3)
        rng = random.Random(6)
        ops = poly_ops(R)
        a = H.sample(rng)
        got = ev_twist(a, K.derivations)
        table = {alpha.entries: c for alpha, c in a.coeffs.items()}
        for alpha in H.indices:
            want = ev_twist_coeff(table, alpha.entries, K.derivations, ops)
            assert R.eq(got.coeff(alpha), want)


class TestEvTwist:
    def test_shift_example(self):
        K = rational_poly_carrier()
        R = K.ring
        H = HurwitzRing(R, 1, 4)
        got = ev_twist(H.embed(R.gen("u")), K.derivations)
        want = H.from_table(
            {MultiIndex.of(0): R.gen("u"), MultiIndex.of(1): R.one()}
        )
        assert H.eq(got, want)

    def test_zero_family_is_identity(self):
        H = HurwitzRing(QQ, 2, 3)
        a = H.sample(random.Random(7))
        got = ev_twist(a, [lambda _x: Fraction(0)] * 2)
        assert H.eq(got, a) and got.valid == a.valid

    def test_composition_is_family_sum(self):
        # two commuting constant-image families on Q[u]
        K1 = differential_polynomial_carrier(QQ, ["u"], [["1"]])
        K2 = differential_polynomial_carrier(QQ, ["u"], [["2"]])
        R = K1.ring
        H = HurwitzRing(R, 1, 4)
        rng = random.Random(8)
        a = H.sample(rng)
        one_then_two = ev_twist(ev_twist(a, K1.derivations), K2.derivations)
        combined = ev_twist(
            a, [lambda x: R.add(K1.derivations[0](x), K2.derivations[0](x))]
        )
        assert H.eq(one_then_two, combined)

    def test_untwist_inverts(self):
        F = PrimeField(5)
        K = differential_polynomial_carrier(F, ["u"], [["u"]])
        H = HurwitzRing(K.ring, 1, 5)
        a = H.sample(random.Random(9))
        back = ev_untwist(ev_twist(a, K.derivations), K.derivations)
        assert H.eq(back, a) and back.valid == a.valid

    def test_family_arity_checked(self):
        H = HurwitzRing(QQ, 2, 2)
        with pytest.raises(ValueError, match="twisting derivations"):
            ev_twist(H.zero(), [lambda x: x])


class TestAxioms:
    def _twisted_spec(self):
        K = rational_poly_carrier()
        # source: the same carrier, derived by the same family, phi identity
        return MorphismSpec(source=K, coefficients=K, phi=lambda a: a, trunc=5)

    def test_tm1_differential_phi_collapses(self):
        # phi identity between equal structures is differential, so the
        # expansion telescopes to the constant embedding
        spec = self._twisted_spec()
        R = spec.coefficients.ring
        H = spec.target
        rng = random.Random(10)
        for _ in range(5):
            a = R.sample(rng)
            want = H.embed(a)
            assert H.eq(twisted_hurwitz(spec, a), want)
            assert H.eq(twisted_taylor(spec, a), want)

    def test_ev1_recovers_phi(self):
        spec = self._twisted_spec()
        R = spec.coefficients.ring
        H = spec.target
        rng = random.Random(11)
        for _ in range(5):
            a = R.sample(rng)
            assert R.eq(H.ev(twisted_hurwitz(spec, a)), a)
            assert R.eq(H.ev(twisted_taylor(spec, a)), a)

    def test_ev2_expanding_a_series_by_ev_is_identity(self):
        K = rational_poly_carrier()
        H = HurwitzRing(K.ring, 1, 5)
        source = H.differential_structure(K.derivations)
        rng = random.Random(12)
        spec = MorphismSpec(
            source=source,
            coefficients=K,
            phi=H.ev,
            trunc=5,
            samples=tuple(H.sample(rng) for _ in range(3)),
        )
        for _ in range(5):
            a = H.sample(rng)
            got = twisted_hurwitz(spec, a)
            assert H.agree_up_to(got, a, 5)

    def test_outputs_are_ring_maps(self):
        spec = self._twisted_spec()
        R = spec.coefficients.ring
        H = spec.target
        rng = random.Random(13)
        for _ in range(5):
            a, b = R.sample(rng), R.sample(rng)
            Ta, Tb = twisted_hurwitz(spec, a), twisted_hurwitz(spec, b)
            assert H.eq(twisted_hurwitz(spec, R.add(a, b)), H.add(Ta, Tb))
            assert H.eq(twisted_hurwitz(spec, R.mul(a, b)), H.mul(Ta, Tb))
        assert H.eq(twisted_hurwitz(spec, R.one()), H.one())

    def test_divided_outputs_multiply_by_plain_convolution(self):
        # the divided constructors land in the divided reading, whose
        # product is the unweighted convolution, not the binomial one;
        # a constant source with a nonzero coefficient family keeps the
        # outputs genuinely nonconstant
        K = rational_poly_carrier()
        spec = MorphismSpec(
            source=constant_structure(K.ring, 1),
            coefficients=K,
            phi=lambda a: a,
            trunc=5,
        )
        R = K.ring
        H = spec.target
        rng = random.Random(19)
        saw_difference = False
        for _ in range(5):
            a, b = R.sample(rng), R.sample(rng)
            Ta, Tb = twisted_taylor(spec, a), twisted_taylor(spec, b)
            Tab = twisted_taylor(spec, R.mul(a, b))
            assert H.eq(Tab, H.cauchy_mul(Ta, Tb))
            if not H.eq(H.cauchy_mul(Ta, Tb), H.mul(Ta, Tb)):
                saw_difference = True
        assert saw_difference, "samples never separated the two products"

    def test_outputs_are_differential(self):
        # expanding the derivative matches deriving the expansion, one grade down
        spec = self._twisted_spec()
        K = spec.coefficients
        R = K.ring
        H = spec.target
        structure = H.differential_structure(K.derivations)
        rng = random.Random(14)
        for _ in range(5):
            a = R.sample(rng)
            lhs = twisted_hurwitz(spec, K.derive(a, 0))
            rhs = structure.derive(twisted_hurwitz(spec, a), 0)
            assert H.agree_up_to(lhs, rhs, 4)


class TestGuards:
    def test_classical_needs_char_zero(self):
        K = constant_structure(PrimeField(3), 1)
        A = DiffPolyRing(K, ["x"])
        spec = MorphismSpec(
            source=A.differential_ring(),
            coefficients=K,
            phi=A.value_hom({}, default_zero=True),
            trunc=4,
        )
        with pytest.raises(DomainError, match="characteristic"):
            classical_taylor(spec, A.gen("x"))
        with pytest.raises(DomainError, match="characteristic"):
            twisted_taylor(spec, A.gen("x"))

    def test_plain_constructors_need_constant_coefficients(self):
        K = rational_poly_carrier()
        spec = MorphismSpec(
            source=constant_structure(K.ring, 1),
            coefficients=K,
            phi=lambda a: a,
            trunc=3,
        )
        with pytest.raises(DomainError, match="constant coefficients"):
            hurwitz_morphism(spec, K.ring.gen("u"))
        with pytest.raises(DomainError, match="constant coefficients"):
            classical_taylor(spec, K.ring.gen("u"))

    def test_width_mismatch_rejected(self):
        with pytest.raises(ValueError, match="width mismatch"):
            MorphismSpec(
                source=constant_structure(QQ, 2),
                coefficients=constant_structure(QQ, 1),
                phi=lambda a: a,
                trunc=3,
            )

    def test_phi_spot_check(self):
        with pytest.raises(ValueError, match="spot check"):
            MorphismSpec(
                source=constant_structure(QQ, 1),
                coefficients=constant_structure(QQ, 1),
                phi=lambda a: a + 1,
                trunc=3,
                samples=(Fraction(1), Fraction(2)),
            )
