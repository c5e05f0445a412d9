"""Expansion maps from a differential ring into truncated Hurwitz series.

Given a ring map phi from the source carrier A into the coefficient ring K,
four constructors produce a series whose coefficients are built from the
iterated source derivatives of the argument:

* ``hurwitz_morphism``: coefficient alpha is phi of the alpha-th derivative.
  Needs the coefficient derivations to vanish; works in any characteristic.
* ``classical_taylor``: the same divided by alpha factorial.  Needs constant
  coefficients and a ring containing the rationals.
* ``twisted_hurwitz``: the signed double sum over gamma <= alpha of
  (-1)^{|gamma|} binom(alpha, gamma) delta^gamma(phi(d^{alpha-gamma} a)).
  No restrictions; the twist cancels whatever the coefficient derivations do.
* ``twisted_taylor``: the same sum written over beta = alpha - gamma, then
  divided by alpha factorial; rational algebras only.

The two sum forms match term by term: substituting beta = alpha - gamma
swaps the binomial to its mirror (binom(alpha, gamma) = binom(alpha, beta))
and the sign exponent |alpha - beta| = |gamma| is unchanged, so the twisted
constructors agree through the divided-power bridge.  The tests keep both
code paths honest against each other and against the evaluation twist.

``ev_twist`` reshuffles an existing series by a commuting family acting on
its coefficients; composing twists adds the families, and twisting by the
negated family inverts.  All of this is exact; validity orders pass through
untouched because the twist only ever reads coefficients at or below the
index it writes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .hurwitz import HurwitzRing, HurwitzSeries
from .multiindex import MultiIndex, enumerate_upto, iter_dominated
from .rings import (
    Derivation,
    DifferentialRing,
    DomainError,
    Element,
    RingHom,
)


@dataclass(frozen=True, eq=False)
class MorphismSpec:
    """A source structure, a coefficient structure, and a ring map between.

    ``phi`` is spot-checked on ``samples`` (plus 0 and 1) at construction;
    a full proof of the hom property is the caller's business.  Both
    structures must have the same number of derivation slots.
    """

    source: DifferentialRing
    coefficients: DifferentialRing
    phi: Callable[[Element], Element]
    trunc: int
    samples: tuple = ()

    def __post_init__(self) -> None:
        if self.source.width != self.coefficients.width:
            raise ValueError(
                f"width mismatch: source has {self.source.width} derivations,"
                f" coefficients have {self.coefficients.width}"
            )
        if self.trunc < 0:
            raise ValueError("truncation order must be nonnegative")
        hom = RingHom(self.source, self.coefficients, self.phi)
        if not hom.is_ring_hom(self.samples):
            raise ValueError("phi fails the ring map spot check on the samples")

    @property
    def width(self) -> int:
        return self.source.width

    @property
    def target(self) -> HurwitzRing:
        return HurwitzRing(self.coefficients.ring, self.width, self.trunc)


def derivative_table(
    structure: DifferentialRing, a: Element, upto: int
) -> dict[MultiIndex, Element]:
    """All iterated derivatives of ``a`` with order degree <= upto.

    Graded-lex enumeration guarantees each index extends an already computed
    one by a single slot, so every value is derived exactly once.
    """
    table = {MultiIndex.zero(structure.width): a}
    for alpha in enumerate_upto(structure.width, upto):
        if alpha.is_zero():
            continue
        slot = next(i for i, e in enumerate(alpha) if e)
        table[alpha] = structure.derive(table[alpha - MultiIndex.unit(alpha.width, slot)], slot)
    return table


def _phi_derivative_tables(
    spec: MorphismSpec, a: Element
) -> dict[MultiIndex, dict[MultiIndex, Element]]:
    """For each source order beta, the coefficient-side derivative table of
    phi(d^beta a), deep enough that beta plus the inner order reaches trunc."""
    src = derivative_table(spec.source, a, spec.trunc)
    return {
        beta: derivative_table(
            spec.coefficients, spec.phi(v), spec.trunc - beta.degree
        )
        for beta, v in src.items()
    }


def _require_constant_coefficients(spec: MorphismSpec, values) -> None:
    K = spec.coefficients.ring
    for beta, v in values.items():
        for slot, d in enumerate(spec.coefficients.derivations):
            if not K.is_zero(d(v)):
                raise DomainError(
                    "constructor needs constant coefficients: derivation slot"
                    f" {slot} does not vanish on phi applied to the derivative"
                    f" at order {tuple(beta.entries)}"
                )


class _FactorialInverses:
    """Per-call cache of inverses of alpha factorial in the coefficient ring."""

    def __init__(self, ring):
        if ring.characteristic != 0:
            raise DomainError(
                "divided form needs characteristic 0 coefficients, got"
                f" characteristic {ring.characteristic}"
            )
        self.ring = ring
        self.cache: dict[int, Element] = {1: ring.one()}

    def __call__(self, alpha: MultiIndex) -> Element:
        f = alpha.factorial()
        if f not in self.cache:
            inv = self.ring.try_invert(self.ring.embed_int(f))
            if inv is None:
                raise DomainError(
                    f"coefficient ring does not invert {f}; divided form needs"
                    " a ring containing the rationals"
                )
            self.cache[f] = inv
        return self.cache[f]


def hurwitz_morphism(spec: MorphismSpec, a: Element) -> HurwitzSeries:
    """Coefficient alpha is phi of the alpha-th source derivative of ``a``."""
    src = derivative_table(spec.source, a, spec.trunc)
    values = {beta: spec.phi(v) for beta, v in src.items()}
    _require_constant_coefficients(spec, values)
    H = spec.target
    return H.from_table({alpha: values[alpha] for alpha in H.indices}, spec.trunc)


def classical_taylor(spec: MorphismSpec, a: Element) -> HurwitzSeries:
    """Divided coefficients: phi of the alpha-th derivative over alpha factorial."""
    inv = _FactorialInverses(spec.coefficients.ring)
    src = derivative_table(spec.source, a, spec.trunc)
    values = {beta: spec.phi(v) for beta, v in src.items()}
    _require_constant_coefficients(spec, values)
    H = spec.target
    K = spec.coefficients.ring
    return H.from_table(
        {alpha: K.mul(inv(alpha), values[alpha]) for alpha in H.indices}, spec.trunc
    )


def twisted_hurwitz(spec: MorphismSpec, a: Element) -> HurwitzSeries:
    """Signed double sum over gamma; valid in every characteristic."""
    tables = _phi_derivative_tables(spec, a)
    H = spec.target
    K = spec.coefficients.ring
    out: dict[MultiIndex, Element] = {}
    for alpha in H.indices:
        acc = K.zero()
        for gamma in iter_dominated(alpha):
            term = tables[alpha - gamma][gamma]
            w = alpha.binomial(gamma)
            if w != 1:
                term = K.mul(K.embed_int(w), term)
            if gamma.degree % 2:
                term = K.neg(term)
            acc = K.add(acc, term)
        out[alpha] = acc
    return H.from_table(out, spec.trunc)


def twisted_taylor(spec: MorphismSpec, a: Element) -> HurwitzSeries:
    """Signed double sum over beta, divided by alpha factorial."""
    inv = _FactorialInverses(spec.coefficients.ring)
    tables = _phi_derivative_tables(spec, a)
    H = spec.target
    K = spec.coefficients.ring
    out: dict[MultiIndex, Element] = {}
    for alpha in H.indices:
        acc = K.zero()
        for beta in iter_dominated(alpha):
            gamma = alpha - beta
            term = tables[beta][gamma]
            w = alpha.binomial(beta)
            if w != 1:
                term = K.mul(K.embed_int(w), term)
            if gamma.degree % 2:
                term = K.neg(term)
            acc = K.add(acc, term)
        out[alpha] = K.mul(inv(alpha), acc)
    return H.from_table(out, spec.trunc)


def ev_twist(a: HurwitzSeries, family: Sequence[Derivation]) -> HurwitzSeries:
    """Reshuffle a series by a commuting family acting on its coefficients.

    Coefficient alpha of the result is the sum over gamma <= alpha of
    binom(alpha, gamma) applied-family^gamma of coefficient alpha - gamma.
    The valid order is preserved: index alpha only reads indices of degree
    <= alpha and coefficient derivations cost nothing.
    """
    if len(family) != a.width:
        raise ValueError(
            f"need {a.width} twisting derivations, got {len(family)}"
        )
    K = a.ring
    H = HurwitzRing(K, a.width, a.trunc)
    structure = DifferentialRing(K, tuple(family))
    tables = {
        beta: derivative_table(structure, a.coeffs[beta], a.trunc - beta.degree)
        for beta in H.indices
    }
    out: dict[MultiIndex, Element] = {}
    for alpha in H.indices:
        acc = K.zero()
        for gamma in iter_dominated(alpha):
            term = tables[alpha - gamma][gamma]
            w = alpha.binomial(gamma)
            if w != 1:
                term = K.mul(K.embed_int(w), term)
            acc = K.add(acc, term)
        out[alpha] = acc
    return H.from_table(out, a.valid)


def ev_untwist(a: HurwitzSeries, family: Sequence[Derivation]) -> HurwitzSeries:
    """Inverse reshuffle: twist by the negated family."""
    K = a.ring
    negated = tuple((lambda x, d=d: K.neg(d(x))) for d in family)
    return ev_twist(a, negated)
