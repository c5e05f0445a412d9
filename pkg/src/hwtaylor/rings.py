"""Commutative ring and differential ring descriptors with exact elements.

Elements are plain immutable values (``fractions.Fraction`` for rationals,
canonical residues for prime fields, normalized term tuples for polynomials)
and all arithmetic goes through the descriptor that owns them.  Descriptors
never coerce between carriers: mixing elements of different rings is a caller
bug.  Equality of elements is exact and decidable; there are no floats
anywhere and no tolerance parameters.

A ``DifferentialRing`` pairs a carrier descriptor with a tuple of commuting
derivations.  Commutation of user-supplied polynomial derivation families is
validated on the generators at construction time; the checker module
additionally property-tests it on random elements.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from .multiindex import MultiIndex

# Ring elements are heterogeneous by design (Fraction | int | Poly | series);
# the descriptor owning them is the source of truth for their type.
Element = Any
Derivation = Callable[[Element], Element]


class RingError(Exception):
    """Base class for ring-domain failures."""


class MixedRingError(RingError):
    """Elements of different carriers were combined."""


class NotUnitError(RingError):
    """Inversion was requested for a non-unit."""


class DomainError(RingError):
    """The operation falls outside the ring's supported domain."""


class Ring:
    """Descriptor for a commutative unital ring with exact elements.

    ``characteristic`` is 0 or a prime p (p * 1 == 0).  ``try_invert``
    returns None when the element is not a unit or when deciding that is
    unsupported; it never guesses.
    """

    characteristic: int
    is_field: bool = False

    def zero(self) -> Element:
        raise NotImplementedError

    def one(self) -> Element:
        raise NotImplementedError

    def add(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def neg(self, a: Element) -> Element:
        raise NotImplementedError

    def mul(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def eq(self, a: Element, b: Element) -> bool:
        raise NotImplementedError

    def embed_int(self, n: int) -> Element:
        raise NotImplementedError

    def render(self, a: Element) -> str:
        raise NotImplementedError

    def parse(self, text: str) -> Element:
        raise DomainError(f"{self!r} does not support parsing")

    def sample(self, rng, degree: int = 2) -> Element:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise DomainError(f"{self!r} has no JSON descriptor")

    # defaults layered on the primitives

    def sub(self, a: Element, b: Element) -> Element:
        return self.add(a, self.neg(b))

    def try_invert(self, a: Element) -> Element | None:
        return None

    def agree(self, a: Element, b: Element) -> bool:
        """Equality up to whatever bookkeeping the carrier tracks.

        Plain rings compare exactly; truncated carriers override this to
        compare up to the shared valid order.
        """
        return self.eq(a, b)

    def is_zero(self, a: Element) -> bool:
        return self.eq(a, self.zero())

    def is_one(self, a: Element) -> bool:
        return self.eq(a, self.one())

    def sum(self, items: Iterable[Element]) -> Element:
        acc = self.zero()
        for x in items:
            acc = self.add(acc, x)
        return acc

    def mul_int(self, n: int, a: Element) -> Element:
        return self.mul(self.embed_int(n), a)

    def pow(self, a: Element, n: int) -> Element:
        if n < 0:
            raise ValueError("negative power")
        acc = self.one()
        for _ in range(n):
            acc = self.mul(acc, a)
        return acc


class RationalField(Ring):
    """The rationals; elements are ``fractions.Fraction``."""

    characteristic = 0
    is_field = True

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("RationalField")

    def __repr__(self) -> str:
        return "QQ"

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def add(self, a: Fraction, b: Fraction) -> Fraction:
        return a + b

    def neg(self, a: Fraction) -> Fraction:
        return -a

    def mul(self, a: Fraction, b: Fraction) -> Fraction:
        return a * b

    def eq(self, a: Fraction, b: Fraction) -> bool:
        return a == b

    def is_zero(self, a: Fraction) -> bool:
        return a == 0

    def is_one(self, a: Fraction) -> bool:
        return a == 1

    def embed_int(self, n: int) -> Fraction:
        return Fraction(n)

    def try_invert(self, a: Fraction) -> Fraction | None:
        return None if a == 0 else 1 / Fraction(a)

    def render(self, a: Fraction) -> str:
        return str(a)

    def parse(self, text: str) -> Fraction:
        # strict integer-ratio syntax; no decimal points on the wire
        if not re.fullmatch(r"-?\d+(/[1-9]\d*)?", text.strip()):
            raise ValueError(f"not a rational literal: {text!r}")
        return Fraction(text.strip())

    def sample(self, rng, degree: int = 2) -> Fraction:
        return Fraction(rng.randint(-4, 4), rng.randint(1, 3))

    def to_json(self) -> dict:
        return {"kind": "Q"}


QQ = RationalField()


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for d in range(2, math.isqrt(p) + 1):
        if p % d == 0:
            return False
    return True


class PrimeField(Ring):
    """Integers mod a prime p; elements are canonical residues in [0, p)."""

    is_field = True

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"modulus must be prime: {p}")
        self.p = p
        self.characteristic = p

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1 % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def eq(self, a: int, b: int) -> bool:
        return (a - b) % self.p == 0

    def is_zero(self, a: int) -> bool:
        return a % self.p == 0

    def embed_int(self, n: int) -> int:
        return n % self.p

    def try_invert(self, a: int) -> int | None:
        a %= self.p
        return None if a == 0 else pow(a, -1, self.p)

    def render(self, a: int) -> str:
        return str(a % self.p)

    def parse(self, text: str) -> int:
        try:
            return int(text.strip(), 10) % self.p
        except ValueError as exc:
            raise ValueError(f"not an integer literal: {text!r}") from exc

    def sample(self, rng, degree: int = 2) -> int:
        return rng.randrange(self.p)

    def to_json(self) -> dict:
        return {"kind": "Fp", "p": self.p}


@dataclass(frozen=True)
class Poly:
    """Normalized polynomial value: grlex-sorted terms, no zero coefficients.

    Each term is (exponent tuple, coefficient).  Normalization makes the
    dataclass equality structural equality of polynomials.
    """

    terms: tuple[tuple[tuple[int, ...], Element], ...]


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class PolynomialRing(Ring):
    """Multivariate polynomials over an exact base ring, named generators."""

    is_field = False

    def __init__(self, base: Ring, generators: Sequence[str]):
        names = tuple(generators)
        if not names:
            raise ValueError("polynomial ring needs at least one generator")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names: {names}")
        for n in names:
            if not _NAME_RE.fullmatch(n):
                raise ValueError(f"bad generator name: {n!r}")
        self.base = base
        self.generators = names
        self.characteristic = base.characteristic

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PolynomialRing)
            and other.base == self.base
            and other.generators == self.generators
        )

    def __hash__(self) -> int:
        return hash(("PolynomialRing", self.base, self.generators))

    def __repr__(self) -> str:
        return f"{self.base!r}[{', '.join(self.generators)}]"

    def _make(self, table: Mapping[tuple[int, ...], Element]) -> Poly:
        items = [(e, c) for e, c in table.items() if not self.base.is_zero(c)]
        # Graded-lex on the bare exponent tuples; same order as grlex_key.
        if len(items) > 1:
            items.sort(key=lambda t: (sum(t[0]), tuple(-e for e in t[0])))
        return Poly(tuple(items))

    def constant(self, c: Element) -> Poly:
        if self.base.is_zero(c):
            return Poly(())
        return Poly((((0,) * len(self.generators), c),))

    def gen(self, name: str) -> Poly:
        slot = self.generators.index(name)
        exps = tuple(1 if i == slot else 0 for i in range(len(self.generators)))
        return Poly(((exps, self.base.one()),))

    def zero(self) -> Poly:
        return Poly(())

    def one(self) -> Poly:
        return self.constant(self.base.one())

    def add(self, a: Poly, b: Poly) -> Poly:
        table: dict[tuple[int, ...], Element] = dict(a.terms)
        for exps, c in b.terms:
            table[exps] = self.base.add(table[exps], c) if exps in table else c
        return self._make(table)

    def neg(self, a: Poly) -> Poly:
        return Poly(tuple((e, self.base.neg(c)) for e, c in a.terms))

    def mul(self, a: Poly, b: Poly) -> Poly:
        table: dict[tuple[int, ...], Element] = {}
        for ea, ca in a.terms:
            for eb, cb in b.terms:
                key = tuple(x + y for x, y in zip(ea, eb))
                prod = self.base.mul(ca, cb)
                table[key] = self.base.add(table[key], prod) if key in table else prod
        return self._make(table)

    def eq(self, a: Poly, b: Poly) -> bool:
        return a == b

    def is_zero(self, a: Poly) -> bool:
        return not a.terms

    def embed_int(self, n: int) -> Poly:
        return self.constant(self.base.embed_int(n))

    def try_invert(self, a: Poly) -> Poly | None:
        if not a.terms:
            return None
        if len(a.terms) > 1 or any(a.terms[0][0]):
            return None
        inv = self.base.try_invert(a.terms[0][1])
        return None if inv is None else self.constant(inv)

    def degree(self, a: Poly) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e, _ in a.terms), default=-1)

    def render(self, a: Poly) -> str:
        if not a.terms:
            return "0"
        parts: list[str] = []
        for exps, coeff in reversed(a.terms):
            factors = [
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.generators, exps)
                if e
            ]
            cs = self.base.render(coeff)
            neg = cs.startswith("-")
            if neg:
                cs = cs[1:]
            if factors and cs == "1":
                body = "*".join(factors)
            elif factors:
                body = "*".join([cs] + factors)
            else:
                body = cs
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(parts)

    def parse(self, text: str) -> Poly:
        return _parse_poly(self, text)

    def sample(self, rng, degree: int = 2) -> Poly:
        table: dict[tuple[int, ...], Element] = {}
        for _ in range(rng.randint(1, 3)):
            exps = [0] * len(self.generators)
            for _ in range(rng.randint(0, degree)):
                exps[rng.randrange(len(self.generators))] += 1
            key = tuple(exps)
            c = self.base.sample(rng, degree)
            if self.base.is_zero(c):
                c = self.base.one()
            table[key] = self.base.add(table[key], c) if key in table else c
        return self._make(table)

    def to_json(self) -> dict:
        doc: dict = {"kind": "poly", "generators": list(self.generators)}
        if isinstance(self.base, PrimeField):
            doc["p"] = self.base.p
        elif not isinstance(self.base, RationalField):
            doc["base"] = self.base.to_json()
        return doc

    def derivation(
        self,
        gen_images: Sequence[Poly | str],
        base_derivation: Derivation | None = None,
    ) -> Derivation:
        """Derivation sending generator j to ``gen_images[j]``, by Leibniz.

        ``base_derivation`` acts on coefficients (defaults to zero), so the
        result extends a derivation of the base ring.
        """
        if len(gen_images) != len(self.generators):
            raise ValueError(
                f"need {len(self.generators)} generator images, got {len(gen_images)}"
            )
        images = tuple(self.parse(g) if isinstance(g, str) else g for g in gen_images)

        def derive(a: Poly) -> Poly:
            table: dict[tuple[int, ...], Element] = {}

            def accumulate(exps: tuple[int, ...], c: Element) -> None:
                table[exps] = self.base.add(table[exps], c) if exps in table else c

            for exps, coeff in a.terms:
                if base_derivation is not None:
                    dc = base_derivation(coeff)
                    if not self.base.is_zero(dc):
                        accumulate(exps, dc)
                for j, e in enumerate(exps):
                    if e == 0:
                        continue
                    lowered = tuple(x - 1 if i == j else x for i, x in enumerate(exps))
                    factor = self.base.mul(coeff, self.base.embed_int(e))
                    for iexps, icoeff in images[j].terms:
                        key = tuple(x + y for x, y in zip(lowered, iexps))
                        accumulate(key, self.base.mul(factor, icoeff))
            return self._make(table)

        return derive


def _parse_poly(ring: PolynomialRing, text: str) -> Poly:
    """Parse ``2*u^2*v - 1/3*u + 4`` style strings into normalized polynomials."""
    tokens = re.findall(r"\d+/\d+|\d+|[A-Za-z_][A-Za-z0-9_]*|[-+*^]|\S", text)
    bad = [t for t in tokens if not re.fullmatch(r"\d+/\d+|\d+|[A-Za-z_][A-Za-z0-9_]*|[-+*^]", t)]
    if bad:
        raise ValueError(f"bad token {bad[0]!r} in {text!r}")
    pos = 0

    def peek() -> str | None:
        return tokens[pos] if pos < len(tokens) else None

    def take() -> str:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_factor() -> Poly:
        tok = peek()
        if tok is None:
            raise ValueError(f"unexpected end of input in {text!r}")
        if re.fullmatch(r"\d+/\d+|\d+", tok):
            return ring.constant(ring.base.parse(take()))
        if _NAME_RE.fullmatch(tok):
            name = take()
            if name not in ring.generators:
                raise ValueError(f"unknown generator {name!r} in {text!r}")
            p = ring.gen(name)
            if peek() == "^":
                take()
                exp_tok = peek()
                if exp_tok is None or not exp_tok.isdigit():
                    raise ValueError(f"expected integer exponent in {text!r}")
                p = ring.pow(p, int(take()))
            return p
        raise ValueError(f"unexpected token {tok!r} in {text!r}")

    def parse_term() -> Poly:
        acc = parse_factor()
        while peek() == "*":
            take()
            acc = ring.mul(acc, parse_factor())
        return acc

    acc = ring.zero()
    sign = 1
    if peek() in {"+", "-"}:
        sign = -1 if take() == "-" else 1
    term = parse_term()
    acc = ring.add(acc, ring.neg(term) if sign < 0 else term)
    while peek() is not None:
        op = take()
        if op not in {"+", "-"}:
            raise ValueError(f"expected + or - but found {op!r} in {text!r}")
        term = parse_term()
        acc = ring.add(acc, ring.neg(term) if op == "-" else term)
    return acc


@dataclass(frozen=True, eq=False)
class DifferentialRing:
    """A carrier ring with a tuple of pairwise commuting derivations."""

    ring: Ring
    derivations: tuple[Derivation, ...]

    @property
    def width(self) -> int:
        return len(self.derivations)

    def derive(self, a: Element, slot: int) -> Element:
        return self.derivations[slot](a)

    def derive_iter(self, a: Element, alpha: MultiIndex) -> Element:
        """Apply the family alpha[i] times in slot i (order immaterial)."""
        if alpha.width != self.width:
            raise ValueError(
                f"order width {alpha.width} does not match {self.width} derivations"
            )
        for slot, count in enumerate(alpha):
            for _ in range(count):
                a = self.derivations[slot](a)
        return a

    def is_constant(self, a: Element) -> bool:
        return all(self.ring.is_zero(d(a)) for d in self.derivations)


def constant_structure(ring: Ring, width: int) -> DifferentialRing:
    """The carrier with the zero derivation in every slot."""
    if width < 1:
        raise ValueError("need at least one derivation slot")
    return DifferentialRing(ring, tuple(lambda a: ring.zero() for _ in range(width)))


def differential_polynomial_carrier(
    base: Ring,
    generators: Sequence[str],
    images: Sequence[Sequence[Poly | str]],
    base_derivations: Sequence[Derivation] | None = None,
    check: bool = True,
) -> DifferentialRing:
    """Polynomial carrier with one derivation per row of ``images``.

    ``images[i][j]`` is the image of generator j under derivation i.  The
    family is validated to commute on the generators at construction; this is
    a necessary condition and, for derivations of a polynomial ring over a
    constant base, a sufficient one.
    """
    ring = PolynomialRing(base, generators)
    if base_derivations is None:
        base_derivations = [None] * len(images)
    if len(base_derivations) != len(images):
        raise ValueError("need one base derivation (or None) per image row")
    family = tuple(
        ring.derivation(row, bd) for row, bd in zip(images, base_derivations)
    )
    structure = DifferentialRing(ring, family)
    if check:
        for i in range(len(family)):
            for j in range(i + 1, len(family)):
                for name in generators:
                    g = ring.gen(name)
                    lhs = family[i](family[j](g))
                    rhs = family[j](family[i](g))
                    if not ring.eq(lhs, rhs):
                        raise ValueError(
                            f"derivations {i} and {j} do not commute on generator {name!r}"
                        )
    return structure


@dataclass(frozen=True, eq=False)
class RingHom:
    """A map between carriers, with spot checks instead of proofs.

    ``domain`` and ``codomain`` may be plain rings or differential rings;
    ``carrier`` unwraps either.
    """

    domain: Ring | DifferentialRing
    codomain: Ring | DifferentialRing
    apply: Callable[[Element], Element]

    def __call__(self, a: Element) -> Element:
        return self.apply(a)

    @property
    def domain_ring(self) -> Ring:
        return carrier(self.domain)

    @property
    def codomain_ring(self) -> Ring:
        return carrier(self.codomain)

    def is_ring_hom(self, samples: Sequence[Element]) -> bool:
        """Check unit/zero preservation and +,* compatibility on sample pairs."""
        dom, cod = self.domain_ring, self.codomain_ring
        if not cod.agree(self.apply(dom.zero()), cod.zero()):
            return False
        if not cod.agree(self.apply(dom.one()), cod.one()):
            return False
        for a in samples:
            for b in samples:
                if not cod.agree(self.apply(dom.add(a, b)), cod.add(self.apply(a), self.apply(b))):
                    return False
                if not cod.agree(self.apply(dom.mul(a, b)), cod.mul(self.apply(a), self.apply(b))):
                    return False
        return True


def carrier(structure: Ring | DifferentialRing) -> Ring:
    return structure.ring if isinstance(structure, DifferentialRing) else structure


def is_differential_hom(hom: RingHom, samples: Sequence[Element]) -> bool:
    """True iff the map commutes with every derivation slot on the samples.

    Both endpoints must be differential rings of the same width.
    """
    if not isinstance(hom.domain, DifferentialRing) or not isinstance(
        hom.codomain, DifferentialRing
    ):
        raise ValueError("is_differential_hom needs differential rings at both ends")
    if hom.domain.width != hom.codomain.width:
        raise ValueError(
            f"derivation width mismatch: {hom.domain.width} vs {hom.codomain.width}"
        )
    cod = hom.codomain.ring
    for a in samples:
        for slot in range(hom.domain.width):
            lhs = hom.apply(hom.domain.derive(a, slot))
            rhs = hom.codomain.derive(hom.apply(a), slot)
            if not cod.agree(lhs, rhs):
                return False
    return True


def ring_from_json(doc: Any, path: str = "ring") -> Ring:
    """Rebuild a coefficient ring descriptor from its JSON form."""
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected an object")
    kind = doc.get("kind")
    if kind == "Q":
        _reject_unknown(doc, {"kind"}, path)
        return QQ
    if kind == "Fp":
        _reject_unknown(doc, {"kind", "p"}, path)
        p = doc.get("p")
        if not isinstance(p, int) or not _is_prime(p):
            raise ValueError(f"{path}.p: expected a prime integer")
        return PrimeField(p)
    if kind == "poly":
        _reject_unknown(doc, {"kind", "p", "base", "generators"}, path)
        gens = doc.get("generators")
        if (
            not isinstance(gens, list)
            or not gens
            or not all(isinstance(g, str) for g in gens)
        ):
            raise ValueError(f"{path}.generators: expected a nonempty list of names")
        if "base" in doc:
            base = ring_from_json(doc["base"], f"{path}.base")
        elif "p" in doc:
            base = ring_from_json({"kind": "Fp", "p": doc["p"]}, path)
        else:
            base = QQ
        try:
            return PolynomialRing(base, gens)
        except ValueError as exc:
            raise ValueError(f"{path}.generators: {exc}") from exc
    raise ValueError(f"{path}.kind: expected one of Q, Fp, poly, got {kind!r}")


def _reject_unknown(doc: Mapping[str, Any], allowed: set[str], path: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ValueError(f"{path}: unknown field {unknown[0]!r}")
