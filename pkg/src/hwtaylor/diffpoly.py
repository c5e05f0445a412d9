"""Differential polynomial rings over a differential coefficient ring.

The carrier is the free commutative algebra on symbols (variable, order):
one symbol per formal mixed derivative of each indeterminate.  Slot i of the
derivation family sends symbol (x, order) to (x, order + unit_i), acts on
coefficients through the base family, and extends by the Leibniz rule, so
the result is again a differential ring of the same width.

Value tables turn these carriers into test points: assigning a coefficient
ring element to every symbol defines an algebra map back to the base, and
choosing the values along a derivation chain makes it differential.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Mapping, Sequence

from .multiindex import MultiIndex, grlex_key
from .rings import (
    DifferentialRing,
    DomainError,
    Element,
    Ring,
    RingError,
)

# (variable slot, derivative order); the order width is the derivation width
Symbol = tuple[int, MultiIndex]
# sorted ((symbol, power), ...) with positive powers
Monomial = tuple[tuple[Symbol, int], ...]


class UncoveredSymbolError(RingError):
    """A value table was asked for a symbol it does not cover."""


@lru_cache(maxsize=None)
def _symbol_key(sym: Symbol) -> tuple:
    var, order = sym
    return (grlex_key(order), var)


def _monomial_key(mon: Monomial) -> tuple:
    return (sum(p for _, p in mon), tuple((_symbol_key(s), p) for s, p in mon))


@dataclass(frozen=True)
class DiffPolynomial:
    """Normalized term list; equality is structural on the canonical form."""

    terms: tuple[tuple[Monomial, Element], ...]


class DiffPolyRing(Ring):
    """Free differential polynomial algebra on named indeterminates."""

    is_field = False

    def __init__(self, base: DifferentialRing, variables: Sequence[str]):
        names = tuple(variables)
        if not names:
            raise ValueError("need at least one indeterminate")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate indeterminate names: {names}")
        self.base = base
        self.variables = names
        self.characteristic = base.ring.characteristic

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DiffPolyRing)
            and other.base is self.base
            and other.variables == self.variables
        )

    def __hash__(self) -> int:
        return hash(("DiffPolyRing", id(self.base), self.variables))

    def __repr__(self) -> str:
        return f"{self.base.ring!r}{{{', '.join(self.variables)}}}"

    @property
    def width(self) -> int:
        return self.base.width

    def _make(self, table: Mapping[Monomial, Element]) -> DiffPolynomial:
        K = self.base.ring
        items = [(m, c) for m, c in table.items() if not K.is_zero(c)]
        items.sort(key=lambda t: _monomial_key(t[0]))
        return DiffPolynomial(tuple(items))

    def _normalize_monomial(self, counts: Mapping[Symbol, int]) -> Monomial:
        items = [(s, p) for s, p in counts.items() if p]
        items.sort(key=lambda t: _symbol_key(t[0]))
        return tuple(items)

    def symbol(self, var: int | str, order: MultiIndex | Sequence[int]) -> DiffPolynomial:
        """The single symbol for the given variable at the given order."""
        slot = self.variables.index(var) if isinstance(var, str) else var
        if not 0 <= slot < len(self.variables):
            raise ValueError(f"variable slot {slot} out of range")
        idx = order if isinstance(order, MultiIndex) else MultiIndex(tuple(order))
        if idx.width != self.width:
            raise ValueError(
                f"order width {idx.width} does not match {self.width} derivations"
            )
        return DiffPolynomial(
            (((((slot, idx), 1),), self.base.ring.one()),)
        )

    def gen(self, var: int | str) -> DiffPolynomial:
        return self.symbol(var, MultiIndex.zero(self.width))

    def constant(self, c: Element) -> DiffPolynomial:
        if self.base.ring.is_zero(c):
            return DiffPolynomial(())
        return DiffPolynomial((((), c),))

    def zero(self) -> DiffPolynomial:
        return DiffPolynomial(())

    def one(self) -> DiffPolynomial:
        return self.constant(self.base.ring.one())

    def add(self, a: DiffPolynomial, b: DiffPolynomial) -> DiffPolynomial:
        K = self.base.ring
        table: dict[Monomial, Element] = dict(a.terms)
        for mon, c in b.terms:
            table[mon] = K.add(table[mon], c) if mon in table else c
        return self._make(table)

    def neg(self, a: DiffPolynomial) -> DiffPolynomial:
        K = self.base.ring
        return DiffPolynomial(tuple((m, K.neg(c)) for m, c in a.terms))

    def mul(self, a: DiffPolynomial, b: DiffPolynomial) -> DiffPolynomial:
        K = self.base.ring
        table: dict[Monomial, Element] = {}
        for ma, ca in a.terms:
            for mb, cb in b.terms:
                counts = dict(ma)
                for sym, p in mb:
                    counts[sym] = counts.get(sym, 0) + p
                key = self._normalize_monomial(counts)
                prod = K.mul(ca, cb)
                table[key] = K.add(table[key], prod) if key in table else prod
        return self._make(table)

    def eq(self, a: DiffPolynomial, b: DiffPolynomial) -> bool:
        return a == b

    def embed_int(self, n: int) -> DiffPolynomial:
        return self.constant(self.base.ring.embed_int(n))

    def try_invert(self, a: DiffPolynomial) -> DiffPolynomial | None:
        if len(a.terms) != 1 or a.terms[0][0] != ():
            return None
        inv = self.base.ring.try_invert(a.terms[0][1])
        return None if inv is None else self.constant(inv)

    def derive(self, a: DiffPolynomial, slot: int) -> DiffPolynomial:
        """Slot derivation: base family on coefficients, shift on symbols."""
        if not 0 <= slot < self.width:
            raise ValueError(f"slot {slot} out of range for width {self.width}")
        K = self.base.ring
        table: dict[Monomial, Element] = {}

        def accumulate(mon: Monomial, c: Element) -> None:
            table[mon] = K.add(table[mon], c) if mon in table else c

        unit = MultiIndex.unit(self.width, slot)
        for mon, c in a.terms:
            dc = self.base.derive(c, slot)
            if not K.is_zero(dc):
                accumulate(mon, dc)
            for sym, power in mon:
                var, order = sym
                counts = dict(mon)
                counts[sym] -= 1
                shifted = (var, order + unit)
                counts[shifted] = counts.get(shifted, 0) + 1
                accumulate(
                    self._normalize_monomial(counts), K.mul(c, K.embed_int(power))
                )
        return self._make(table)

    def differential_ring(self) -> DifferentialRing:
        return DifferentialRing(
            self, tuple((lambda a, s=slot: self.derive(a, s)) for slot in range(self.width))
        )

    def highest_order(self, a: DiffPolynomial) -> int:
        """Largest total degree of a symbol order appearing in ``a``; 0 if none."""
        return max(
            (order.degree for mon, _ in a.terms for (_, order), _p in mon), default=0
        )

    def evaluate(
        self,
        a: DiffPolynomial,
        target: DifferentialRing,
        point: Sequence[Element],
        embed: Callable[[Element], Element],
    ) -> Element:
        """Substitute target elements for the indeterminates.

        Symbol (x, order) goes to the iterated target derivative of
        ``point[x]``; coefficients go through ``embed``, which must be a ring
        map from the base coefficients into the target carrier.
        """
        if embed is None:
            raise DomainError("evaluate needs a structure map for the coefficients")
        if len(point) != len(self.variables):
            raise ValueError(
                f"need {len(self.variables)} point values, got {len(point)}"
            )
        if target.width != self.width:
            raise ValueError(
                f"target width {target.width} does not match {self.width}"
            )
        T = target.ring
        cache: dict[Symbol, Element] = {}

        def symbol_value(sym: Symbol) -> Element:
            if sym not in cache:
                var, order = sym
                cache[sym] = target.derive_iter(point[var], order)
            return cache[sym]

        acc = T.zero()
        for mon, c in a.terms:
            v = embed(c)
            for sym, power in mon:
                v = T.mul(v, T.pow(symbol_value(sym), power))
            acc = T.add(acc, v)
        return acc

    def value_hom(
        self,
        values: Mapping[Symbol, Element],
        default_zero: bool = False,
    ) -> Callable[[DiffPolynomial], Element]:
        """Algebra map to the coefficients given a value for every symbol."""
        K = self.base.ring
        powers: dict[tuple[Symbol, int], Element] = {}

        def symbol_power(sym: Symbol, power: int) -> Element:
            key = (sym, power)
            if key not in powers:
                if sym in values:
                    sv = values[sym]
                elif default_zero:
                    sv = K.zero()
                else:
                    raise UncoveredSymbolError(
                        f"value table does not cover symbol {self.render_symbol(sym)}"
                    )
                powers[key] = K.pow(sv, power)
            return powers[key]

        def apply(a: DiffPolynomial) -> Element:
            acc = K.zero()
            for mon, c in a.terms:
                v = c
                for sym, power in mon:
                    v = K.mul(v, symbol_power(sym, power))
                acc = K.add(acc, v)
            return acc

        return apply

    def render_symbol(self, sym: Symbol) -> str:
        var, order = sym
        name = self.variables[var]
        if order.is_zero():
            return name
        if self.width == 1 and order.degree <= 3:
            return name + "'" * order.degree
        return f"D{list(order.entries)}{name}"

    def render(self, a: DiffPolynomial) -> str:
        if not a.terms:
            return "0"
        K = self.base.ring
        parts = []
        for mon, c in a.terms:
            factors = [
                self.render_symbol(s) if p == 1 else f"{self.render_symbol(s)}^{p}"
                for s, p in mon
            ]
            cs = K.render(c)
            if factors and cs == "1":
                body = "*".join(factors)
            elif factors:
                body = "*".join([f"({cs})"] + factors)
            else:
                body = f"({cs})"
            parts.append(body)
        return " + ".join(parts)

    def sample(self, rng, degree: int = 2) -> DiffPolynomial:
        """Random small element: few terms, symbol orders of degree <= 1."""
        K = self.base.ring
        orders = [MultiIndex.zero(self.width)] + [
            MultiIndex.unit(self.width, i) for i in range(self.width)
        ]
        table: dict[Monomial, Element] = {}
        for _ in range(rng.randint(1, 3)):
            counts: dict[Symbol, int] = {}
            for _ in range(rng.randint(0, 2)):
                sym = (rng.randrange(len(self.variables)), rng.choice(orders))
                counts[sym] = counts.get(sym, 0) + 1
            mon = self._normalize_monomial(counts)
            c = K.sample(rng, degree)
            if K.is_zero(c):
                c = K.one()
            table[mon] = K.add(table[mon], c) if mon in table else c
        return self._make(table)

    def element_to_json(self, a: DiffPolynomial) -> list:
        K = self.base.ring
        return [
            {
                "coeff": K.render(c),
                "monomial": [
                    [var, list(order.entries), power] for (var, order), power in mon
                ],
            }
            for mon, c in a.terms
        ]

    def element_from_json(self, doc: Any, path: str = "element") -> DiffPolynomial:
        if not isinstance(doc, list):
            raise ValueError(f"{path}: expected a list of terms")
        K = self.base.ring
        table: dict[Monomial, Element] = {}
        for pos, item in enumerate(doc):
            where = f"{path}[{pos}]"
            if not isinstance(item, dict):
                raise ValueError(f"{where}: expected an object")
            unknown = sorted(set(item) - {"coeff", "monomial"})
            if unknown:
                raise ValueError(f"{where}: unknown field {unknown[0]!r}")
            if "coeff" not in item or "monomial" not in item:
                raise ValueError(f"{where}: needs coeff and monomial")
            if not isinstance(item["coeff"], str):
                raise ValueError(f"{where}.coeff: expected a string")
            try:
                c = K.parse(item["coeff"])
            except ValueError as exc:
                raise ValueError(f"{where}.coeff: {exc}") from exc
            if not isinstance(item["monomial"], list):
                raise ValueError(f"{where}.monomial: expected a list")
            counts: dict[Symbol, int] = {}
            for spos, entry in enumerate(item["monomial"]):
                spath = f"{where}.monomial[{spos}]"
                if not isinstance(entry, list) or len(entry) != 3:
                    raise ValueError(f"{spath}: expected [var, order, power]")
                var, order, power = entry
                if not isinstance(var, int) or not 0 <= var < len(self.variables):
                    raise ValueError(
                        f"{spath}: variable index must be in [0, {len(self.variables)})"
                    )
                if (
                    not isinstance(order, list)
                    or len(order) != self.width
                    or not all(isinstance(e, int) and e >= 0 for e in order)
                ):
                    raise ValueError(
                        f"{spath}: order must be {self.width} nonnegative integers"
                    )
                if not isinstance(power, int) or power < 1:
                    raise ValueError(f"{spath}: power must be a positive integer")
                sym = (var, MultiIndex(tuple(order)))
                if sym in counts:
                    raise ValueError(f"{spath}: duplicate symbol in monomial")
                counts[sym] = power
            mon = self._normalize_monomial(counts)
            table[mon] = K.add(table[mon], c) if mon in table else c
        return self._make(table)
