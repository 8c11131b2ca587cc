"""Exact arithmetic in finite fields F_{p^m}.

Elements are stored as integer codes ``sum(c_i * p**i)`` of their
coefficient vectors (ascending powers of the generator).  That code is
also the canonical total order used for tie-breaking throughout the
package.  :class:`FieldSpec` does the arithmetic on codes; the
:class:`FieldElement` wrapper exists for the public, operator-based API
and refuses to mix elements of different fields.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MAX_ORDER = 2 ** 16
_FULL_TABLE_LIMIT = 256


class FieldError(ValueError):
    pass


class FieldMismatchError(FieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(n: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``n == p**k``, or None if n is not a prime power."""
    if n < 2:
        return None
    p = 2
    while p * p <= n and n % p:
        p += 1
    if n % p:
        p = n
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return (p, k) if n == 1 else None


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over F_p, coefficient lists in ascending order ------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_divmod(a, b, p):
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        quot[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a = _trim(a)
    return quot, a


def poly_mulmod(a, b, modulus, p):
    prod = [0] * (len(a) + len(b))
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    return poly_divmod(prod, modulus, p)[1]


def _monic_polys(degree, p):
    """All monic polynomials of the given degree, ordered by integer code."""
    for low in range(p ** degree):
        coeffs = []
        for _ in range(degree):
            coeffs.append(low % p)
            low //= p
        yield coeffs + [1]


def find_factor(poly, p):
    """Return a monic proper factor of ``poly`` over F_p, or None if irreducible."""
    deg = len(_trim(poly)) - 1
    for d in range(1, deg // 2 + 1):
        for f in _monic_polys(d, p):
            if not poly_divmod(poly, f, p)[1]:
                return f
    return None


def lex_smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    for f in _monic_polys(m, p):
        if find_factor(f, p) is None:
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {m} over F_{p}")


def code_to_coeffs(code: int, p: int, m: int) -> tuple[int, ...]:
    out = []
    for _ in range(m):
        out.append(code % p)
        code //= p
    return tuple(out)


def coeffs_to_code(coeffs, p: int) -> int:
    code = 0
    for c in reversed(list(coeffs)):
        code = code * p + c
    return code


class FieldSpec:
    """The finite field F_p[X]/(modulus) of order p**m.

    Arithmetic methods take and return integer codes.  Tables are
    precomputed at construction: exp/log for multiplication, and a full
    addition table for odd characteristic fields of at most 256 elements.
    """

    def __init__(self, p: int, m: int, modulus):
        self.p = p
        self.m = m
        self.modulus = tuple(modulus)
        self.order = p ** m
        n = self.order
        self.zero = 0
        self.one = 1

        self.primitive = self._find_primitive()
        g = _trim(code_to_coeffs(self.primitive, p, m))
        exp = [0] * (2 * (n - 1))
        cur = [1]
        for i in range(n - 1):
            exp[i] = coeffs_to_code(cur, p)
            cur = poly_mulmod(cur, g, self.modulus, p)
        for i in range(n - 1, 2 * (n - 1)):
            exp[i] = exp[i - (n - 1)]
        log = [0] * n
        for i in range(n - 1):
            log[exp[i]] = i
        self._exp = exp
        self._log = log

        self._add_table = None
        self._neg = [self._add_digits(0, a, -1) for a in range(n)]
        if n <= _FULL_TABLE_LIMIT:
            self._add_table = [[self._add_digits(a, b, 1) for b in range(n)] for a in range(n)]

    def _find_primitive(self):
        n = self.order
        if n == 2:
            return 1
        factors = _prime_factors(n - 1)
        for cand in range(1, n):
            c = _trim(code_to_coeffs(cand, self.p, self.m))
            if all(self._poly_pow(c, (n - 1) // f) != [1] for f in factors):
                return cand
        raise FieldError("modulus does not define a field")  # pragma: no cover

    def _poly_pow(self, a, e):
        result = [1]
        base = a
        while e:
            if e & 1:
                result = poly_mulmod(result, base, self.modulus, self.p)
            base = poly_mulmod(base, base, self.modulus, self.p)
            e >>= 1
        return _trim(result)

    def _add_digits(self, a, b, sign):
        if self.p == 2 and sign == 1:
            return a ^ b
        p = self.p
        out = 0
        scale = 1
        while a or b:
            out += ((a % p + sign * (b % p)) % p) * scale
            a //= p
            b //= p
            scale *= p
        return out

    # -- arithmetic on codes ------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a][b]
        return self._add_digits(a, b, 1)

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise FieldError("negative exponent")
        if e == 0:
            return 1
        if a == 0:
            return 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def frob(self, a: int, k: int = 1) -> int:
        """a ** (p ** k)."""
        if a == 0:
            return 0
        e = pow(self.p, k, self.order - 1)
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_p -> this field."""
        return n % self.p

    def elements(self):
        return range(self.order)

    def coeffs(self, a: int) -> tuple[int, ...]:
        return code_to_coeffs(a, self.p, self.m)

    def generator(self) -> int:
        """Code of the residue class of X."""
        if self.m > 1:
            return self.p
        return (-self.modulus[0]) % self.p

    def eval_poly(self, coeffs, x: int) -> int:
        """Evaluate a polynomial with F_p coefficients at the element x."""
        acc = 0
        for c in reversed(list(coeffs)):
            acc = self.add(self.mul(acc, x), self.from_int(c))
        return acc

    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise FieldMismatchError("element belongs to another field")
            return value
        if isinstance(value, int):
            if not 0 <= value < self.order:
                raise FieldError(f"code {value} out of range for field of order {self.order}")
            return FieldElement(self, value)
        value = tuple(value)
        if len(value) != self.m or any(not 0 <= c < self.p for c in value):
            raise FieldError(f"bad coefficient vector {value}")
        return FieldElement(self, coeffs_to_code(value, self.p))

    def describe(self) -> str:
        return f"p={self.p} m={self.m} modulus={','.join(map(str, self.modulus))}"

    def __repr__(self):
        return f"FieldSpec({self.describe()})"


@lru_cache(maxsize=None)
def _cached_field(p, m, modulus):
    return FieldSpec(p, m, modulus)


def make_field(p: int, m: int, modulus=None) -> FieldSpec:
    """Construct F_{p^m}.

    Without an explicit modulus the monic irreducible polynomial of degree
    m with the smallest integer code is used.  Fields are cached, so equal
    arguments give the identical object.
    """
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if m < 1:
        raise FieldError("degree must be at least 1")
    if p ** m > MAX_ORDER:
        raise FieldError(f"field order {p}^{m} exceeds {MAX_ORDER}")
    if modulus is None:
        modulus = lex_smallest_irreducible(p, m)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(_trim(modulus)) != m + 1:
            raise FieldError(f"modulus {modulus} does not have degree {m}")
        modulus = tuple(_trim(modulus))
        if modulus[-1] != 1:
            raise FieldError(f"modulus {modulus} is not monic")
        factor = find_factor(modulus, p)
        if factor is not None:
            raise FieldError(f"modulus {modulus} is reducible, factor {tuple(factor)}")
    return _cached_field(p, m, tuple(modulus))


def parse_field(text: str) -> FieldSpec:
    """Inverse of :meth:`FieldSpec.describe`."""
    parts = dict(item.split("=", 1) for item in text.split())
    return make_field(int(parts["p"]), int(parts["m"]),
                      [int(c) for c in parts["modulus"].split(",")])


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    code: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.code)

    def _other(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return self.field.from_int(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field is not self.field:
            raise FieldMismatchError("operands belong to different fields")
        return other.code

    def __add__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.sub(self.code, b))

    def __rsub__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.sub(b, self.code))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.div(self.code, b))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.code))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.code, e))

    def frobenius(self, k: int = 1):
        return FieldElement(self.field, self.field.frob(self.code, k))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.code == other.code
        if isinstance(other, int) and not isinstance(other, bool):
            return self.code == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.code))

    def __lt__(self, other):
        return self.code < self._other(other)

    def __bool__(self):
        return self.code != 0

    def __int__(self):
        return self.code

    def __repr__(self):
        return f"<{self.code} in F_{self.field.order}>"


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Dispatch form of the element operators, ``op`` in add/sub/mul/div/inv/pow.

    For ``pow`` the second argument is a non-negative int exponent; for
    ``inv`` it is ignored.
    """
    if op == "inv":
        return a.inv()
    if op == "pow":
        return a ** int(b)
    ops = {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}
    if op not in ops:
        raise FieldError(f"unknown operation {op!r}")
    if not isinstance(b, FieldElement) or b.field is not a.field:
        raise FieldMismatchError("operands belong to different fields")
    return ops[op](b)


def frobenius(a: FieldElement, k: int) -> FieldElement:
    if k < 0:
        raise FieldError("k must be non-negative")
    return a.frobenius(k)


class SubfieldEmbedding:
    """The field monomorphism small -> big determined by the image of X."""

    def __init__(self, source: FieldSpec, target: FieldSpec, gen_image: int):
        self.source = source
        self.target = target
        self.gen_image = gen_image
        # images of X^i, then of every element by linearity over F_p
        powers = [target.pow(gen_image, i) if i else 1 for i in range(source.m)]
        table = []
        for code in range(source.order):
            acc = 0
            for c, xp in zip(source.coeffs(code), powers):
                if c:
                    acc = target.add(acc, target.mul(target.from_int(c), xp))
            table.append(acc)
        self.table = table
        self._preimage = {img: code for code, img in enumerate(table)}
        if len(self._preimage) != source.order:
            raise FieldError("embedding is not injective")

    def __call__(self, a):
        if isinstance(a, FieldElement):
            if a.field is not self.source:
                raise FieldMismatchError("element is not in the source field")
            return FieldElement(self.target, self.table[a.code])
        return self.table[a]

    def image(self) -> frozenset[int]:
        return frozenset(self.table)

    def contains(self, b: int) -> bool:
        return b in self._preimage

    def preimage(self, b: int) -> int:
        return self._preimage[b]

    def verify(self) -> bool:
        """Check multiplicativity on pairs of X-powers and that 1 -> 1."""
        s, t = self.source, self.target
        if self.table[1] != 1:
            return False
        basis = [s.pow(s.generator(), i) if i else 1 for i in range(s.m)]
        return all(
            self.table[s.mul(a, b)] == t.mul(self.table[a], self.table[b])
            for a in basis for b in basis
        )

    def __repr__(self):
        return (f"SubfieldEmbedding(F_{self.source.order} -> F_{self.target.order}, "
                f"X -> {self.gen_image})")


def roots_in(poly, field: FieldSpec) -> list[int]:
    """Roots (codes, ascending) in ``field`` of a polynomial over the prime field."""
    return [x for x in field.elements() if field.eval_poly(poly, x) == 0]


def embed_subfield(small: FieldSpec, big: FieldSpec) -> SubfieldEmbedding:
    if small.p != big.p:
        raise FieldError(f"characteristic mismatch: {small.p} vs {big.p}")
    if big.m % small.m:
        raise FieldError(f"degree {small.m} does not divide {big.m}")
    roots = roots_in(small.modulus, big)
    emb = SubfieldEmbedding(small, big, roots[0])
    if not emb.verify():
        raise FieldError("embedding failed homomorphism check")  # pragma: no cover
    return emb
