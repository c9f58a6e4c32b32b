"""Exact arithmetic in finite fields F_q, q = p^k.

The field of order q = p^k is realized as F_p[x]/(f) for a monic
irreducible f of degree k.  An element sum_i c_i x^i (0 <= c_i < p) is
encoded as the integer sum_i c_i p^i, so elements are canonical and
hashable.  Arithmetic is table-driven for small q and falls back to
polynomial arithmetic above ``TABLE_LIMIT``.

Characters of the multiplicative group are stored as exponent maps
(integers mod q-1), never as floating-point phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

TABLE_LIMIT = 4096

# Monic irreducible polynomials (coefficients low-degree-first) for the
# built-in extension fields.  Anything else must be user-supplied.
IRREDUCIBLE_TABLE: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),            # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),         # x^3 + x + 1
    (3, 2): (1, 0, 1),            # x^2 + 1
    (2, 4): (1, 1, 0, 0, 1),      # x^4 + x + 1
    (5, 2): (2, 0, 1),            # x^2 + 2
    (3, 3): (1, 2, 0, 1),         # x^3 + 2x + 1
    (2, 5): (1, 0, 1, 0, 0, 1),   # x^5 + x^2 + 1
    (7, 2): (4, 0, 1),            # x^2 - 3
    (2, 6): (1, 1, 0, 0, 0, 0, 1),  # x^6 + x + 1
    (3, 4): (2, 0, 0, 2, 1),      # x^4 + 2x^3 + 2
    (11, 2): (9, 0, 1),           # x^2 - 2
    (13, 2): (11, 0, 1),          # x^2 - 2
}


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _poly_mul_mod(a: Sequence[int], b: Sequence[int], mod_poly: Sequence[int], p: int) -> list[int]:
    k = len(mod_poly) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce modulo the monic mod_poly
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            prod[d] = 0
            for j in range(k):
                prod[d - k + j] = (prod[d - k + j] - c * mod_poly[j]) % p
    return [c % p for c in prod[:k]] + [0] * max(0, k - len(prod))


class FieldSpec:
    """A finite field F_{p^k} with a fixed polynomial basis."""

    def __init__(self, p: int, k: int = 1, irreducible: Optional[Sequence[int]] = None):
        if not is_prime(p):
            raise FieldError(f"modulus {p} is not prime")
        if k < 1:
            raise FieldError("extension degree must be >= 1")
        self.p = p
        self.k = k
        self.q = p**k
        if self.q > 2**20:
            raise FieldError("fields beyond order 2^20 are out of scope")
        if irreducible is None:
            if k == 1:
                irreducible = (0, 1)
            elif (p, k) in IRREDUCIBLE_TABLE:
                irreducible = IRREDUCIBLE_TABLE[(p, k)]
            else:
                raise FieldError(
                    f"no built-in irreducible polynomial for p={p}, k={k}; supply one"
                )
        poly = tuple(c % p for c in irreducible)
        if len(poly) != k + 1 or poly[-1] != 1:
            raise FieldError("irreducible polynomial must be monic of degree k")
        self.irreducible = poly
        if k > 1:
            self._check_irreducible()
        self._mul_table: Optional[list[int]] = None
        self._add_table: Optional[list[int]] = None
        self._inv_table: Optional[list[int]] = None

    def _check_irreducible(self) -> None:
        # exhaustive root/factor check, practical for k <= 4
        p, k, poly = self.p, self.k, self.irreducible
        if k > 4:
            return  # accepted as supplied
        for a in range(p):
            val = 0
            for c in reversed(poly):
                val = (val * a + c) % p
            if val == 0:
                raise FieldError(f"{poly} has root {a} mod {p}: not irreducible")
        if k == 4:
            # no roots rules out linear/cubic factors; scan quadratic divisors
            for b0 in range(p):
                for b1 in range(p):
                    if self._divides_quadratic((b0, b1, 1)):
                        raise FieldError(f"{poly} has quadratic factor: not irreducible")

    def _divides_quadratic(self, quad: tuple[int, int, int]) -> bool:
        p = self.p
        rem = list(self.irreducible)
        for d in range(len(rem) - 1, 1, -1):
            c = rem[d]
            if c:
                rem[d] = 0
                rem[d - 1] = (rem[d - 1] - c * quad[1]) % p
                rem[d - 2] = (rem[d - 2] - c * quad[0]) % p
        return rem[0] == 0 and rem[1] == 0

    # -- encoding ---------------------------------------------------------

    def encode(self, coeffs: Sequence[int]) -> int:
        code = 0
        for c in reversed(list(coeffs)):
            code = code * self.p + (c % self.p)
        return code

    def decode(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return tuple(out)

    # -- code-level arithmetic (hot path) ---------------------------------

    def _build_tables(self) -> None:
        q = self.q
        add = [0] * (q * q)
        mul = [0] * (q * q)
        coeffs = [self.decode(c) for c in range(q)]
        for a in range(q):
            ca = coeffs[a]
            for b in range(a, q):
                cb = coeffs[b]
                s = self.encode([(x + y) % self.p for x, y in zip(ca, cb)])
                m = self.encode(_poly_mul_mod(ca, cb, self.irreducible, self.p))
                add[a * q + b] = add[b * q + a] = s
                mul[a * q + b] = mul[b * q + a] = m
        self._add_table = add
        self._mul_table = mul
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a * q + b] == 1:
                    inv[a] = b
                    break
        self._inv_table = inv

    def add(self, a: int, b: int) -> int:
        if self.q <= TABLE_LIMIT:
            if self._add_table is None:
                self._build_tables()
            return self._add_table[a * self.q + b]
        return self.encode([(x + y) % self.p for x, y in zip(self.decode(a), self.decode(b))])

    def neg(self, a: int) -> int:
        return self.encode([(-x) % self.p for x in self.decode(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.q <= TABLE_LIMIT:
            if self._mul_table is None:
                self._build_tables()
            return self._mul_table[a * self.q + b]
        return self.encode(_poly_mul_mod(self.decode(a), self.decode(b), self.irreducible, self.p))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("division by zero in finite field")
        if self.q <= TABLE_LIMIT:
            if self._inv_table is None:
                self._build_tables()
            return self._inv_table[a]
        return self.pow(a, self.q - 2)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frobenius_code(self, a: int, power: int = 1) -> int:
        return self.pow(a, self.p ** (power % self.k))

    # -- element-level API -------------------------------------------------

    def element(self, coeffs: Sequence[int] | int) -> FieldElement:
        if isinstance(coeffs, int):
            return FieldElement(self, coeffs % self.p if self.k == 1 else self._embed_int(coeffs))
        if len(coeffs) > self.k:
            raise FieldError("too many coefficients")
        padded = list(coeffs) + [0] * (self.k - len(coeffs))
        return FieldElement(self, self.encode(padded))

    def _embed_int(self, n: int) -> int:
        # integers embed through the prime subfield
        return n % self.p

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def elements(self) -> Iterator[FieldElement]:
        for code in range(self.q):
            yield FieldElement(self, code)

    # -- identity / serialization ------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldSpec)
            and (self.p, self.k, self.irreducible) == (other.p, other.k, other.irreducible)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.irreducible))

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, k={self.k})"

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "irreducible": list(self.irreducible)}

    @classmethod
    def from_json(cls, data: dict) -> FieldSpec:
        return cls(int(data["p"]), int(data["k"]), data.get("irreducible"))


@dataclass(frozen=True)
class FieldElement:
    """An element of a FieldSpec, in canonical reduced form."""

    spec: FieldSpec
    code: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.decode(self.code)

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldError("mismatched field specs")
            return other
        if isinstance(other, int):
            return self.spec.element(other)
        return NotImplemented

    def __add__(self, other) -> FieldElement:
        other = self._coerce(other)
        return FieldElement(self.spec, self.spec.add(self.code, other.code))

    __radd__ = __add__

    def __sub__(self, other) -> FieldElement:
        other = self._coerce(other)
        return FieldElement(self.spec, self.spec.sub(self.code, other.code))

    def __rsub__(self, other) -> FieldElement:
        return self._coerce(other).__sub__(self)

    def __mul__(self, other) -> FieldElement:
        other = self._coerce(other)
        return FieldElement(self.spec, self.spec.mul(self.code, other.code))

    __rmul__ = __mul__

    def __truediv__(self, other) -> FieldElement:
        other = self._coerce(other)
        return FieldElement(self.spec, self.spec.mul(self.code, self.spec.inv(other.code)))

    def __neg__(self) -> FieldElement:
        return FieldElement(self.spec, self.spec.neg(self.code))

    def __pow__(self, e: int) -> FieldElement:
        return FieldElement(self.spec, self.spec.pow(self.code, e))

    def inverse(self) -> FieldElement:
        return FieldElement(self.spec, self.spec.inv(self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def multiplicative_order(self) -> int:
        if self.code == 0:
            raise FieldError("zero has no multiplicative order")
        n = 1
        acc = self.code
        while acc != 1:
            acc = self.spec.mul(acc, self.code)
            n += 1
        return n

    def __repr__(self) -> str:
        return f"F{self.spec.q}:{self.coeffs}"


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Dispatch add/mul/sub/div on two elements of the same field."""
    if a.spec != b.spec:
        raise FieldError("mismatched field specs")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "sub":
        return a - b
    if op == "div":
        return a / b
    raise FieldError(f"unknown op {op!r}")


def frobenius(a: FieldElement, power: int = 1) -> FieldElement:
    """The p^power-th power map, a field automorphism fixing F_p."""
    return FieldElement(a.spec, a.spec.frobenius_code(a.code, power))


def primitive_element(spec: FieldSpec) -> FieldElement:
    """Smallest-code element of multiplicative order q-1 (exhaustive search)."""
    for code in range(1, spec.q):
        el = FieldElement(spec, code)
        if el.multiplicative_order() == spec.q - 1:
            return el
    raise FieldError("no primitive element found")  # unreachable for a field


class MultiplicativeCharacter:
    """Character of F_q^x determined by a primitive element and a level.

    With generator lam and level l, the character sends lam^j to the
    root of unity with exponent j*l in Z_{q-1}.  Exponents are exact
    integers; complex values appear only through ``value``.
    """

    def __init__(self, generator: FieldElement, level: int):
        self.spec = generator.spec
        self.generator = generator
        self.modulus = self.spec.q - 1
        self.level = level % self.modulus
        if generator.multiplicative_order() != self.modulus:
            raise FieldError("character generator must be primitive")
        self._dlog: dict[int, int] = {}
        acc = 1
        for j in range(self.modulus):
            self._dlog[acc] = j
            acc = self.spec.mul(acc, generator.code)

    @property
    def image_order(self) -> int:
        return self.modulus // math.gcd(self.level, self.modulus)

    @property
    def is_real(self) -> bool:
        return self.image_order <= 2

    def exponent(self, a: FieldElement) -> int:
        """Exponent of the character value in Z_{q-1}."""
        if a.code == 0:
            raise FieldError("character undefined at zero")
        return (self._dlog[a.code] * self.level) % self.modulus

    def value(self, a: FieldElement) -> complex:
        import cmath

        return cmath.exp(2j * cmath.pi * self.exponent(a) / self.modulus)

    def sign(self, a: FieldElement) -> int:
        """+1/-1 for real-valued characters."""
        e = self.exponent(a)
        if e == 0:
            return 1
        if 2 * e == self.modulus:
            return -1
        raise FieldError("character is not real-valued at this element")


def quadratic_residue_character(spec: FieldSpec) -> MultiplicativeCharacter:
    """The unique nontrivial real character of F_q^x (q odd): +1 on squares."""
    if spec.p == 2:
        raise FieldError("q even: the only real-valued character of F_q^x is trivial")
    return MultiplicativeCharacter(primitive_element(spec), (spec.q - 1) // 2)
