"""Prime-field arithmetic over a runtime-chosen modulus.

Two layers live here. ``PrimeField`` exposes integer-level operations on
canonical residues; the executor calls these directly because allocating a
wrapper object per operation is too slow inside the fuzz loop.
``FieldElement`` is the immutable value type used at API boundaries.

Relational operators compare *signed representatives*: a residue above
(q - 1) / 2 is treated as the negative number ``value - q``.
"""

from __future__ import annotations

from functools import total_ordering

import gmpy2

BN254_PRIME = 21888242871839275222246405745257275088548364400416034343698204186575808495617

PRIME_PRESETS = {"bn254": BN254_PRIME}


class FieldError(ValueError):
    """Misuse of the field API (bad modulus, mixed fields)."""


class ArithmeticAbort(ArithmeticError):
    """A runtime arithmetic fault: division or integer division by zero.

    The executor turns these into abort traces; they are not tool errors.
    """


class PrimeField:
    __slots__ = ("modulus", "half", "_nonresidue", "_two_adicity", "_odd_part")

    def __init__(self, modulus: int):
        modulus = int(modulus)
        if modulus < 2:
            raise FieldError(f"modulus must be >= 2, got {modulus}")
        if not gmpy2.is_prime(modulus, 50):
            raise FieldError(f"modulus {modulus} is not prime")
        self.modulus = modulus
        self.half = (modulus - 1) // 2
        odd, s = modulus - 1, 0
        while odd and odd % 2 == 0:
            odd //= 2
            s += 1
        self._odd_part = odd
        self._two_adicity = s
        self._nonresidue = None

    @classmethod
    def from_spec(cls, text: str | int) -> "PrimeField":
        """Build a field from a decimal string, an int, or a preset name."""
        if isinstance(text, int):
            return cls(text)
        key = text.strip().lower()
        if key in PRIME_PRESETS:
            return cls(PRIME_PRESETS[key])
        try:
            value = int(key, 0)
        except ValueError:
            raise FieldError(f"cannot parse prime {text!r}") from None
        return cls(value)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("PrimeField", self.modulus))

    def __repr__(self):
        return f"PrimeField({self.modulus})"

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    # -- integer-level operations on canonical residues --------------------

    def reduce(self, a: int) -> int:
        return a % self.modulus

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def neg(self, a: int) -> int:
        return (-a) % self.modulus

    def inv(self, a: int) -> int:
        if a % self.modulus == 0:
            raise ArithmeticAbort("division by zero")
        return pow(a, -1, self.modulus)

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ArithmeticAbort("division by zero")
        return a * pow(b, self.modulus - 2, self.modulus) % self.modulus

    def int_div(self, a: int, b: int) -> int:
        if b == 0:
            raise ArithmeticAbort("integer division by zero")
        return (a // b) % self.modulus

    def int_mod(self, a: int, b: int) -> int:
        if b == 0:
            raise ArithmeticAbort("integer division by zero")
        return (a % b) % self.modulus

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.modulus)

    def shl(self, a: int, k: int) -> int:
        # Shifting the unbounded integer then reducing equals a * 2^k mod q.
        return a * pow(2, k, self.modulus) % self.modulus

    def shr(self, a: int, k: int) -> int:
        if k >= a.bit_length():
            return 0
        return a >> k

    def bit_and(self, a: int, b: int) -> int:
        return a & b

    def bit_or(self, a: int, b: int) -> int:
        return (a | b) % self.modulus

    def bit_xor(self, a: int, b: int) -> int:
        return (a ^ b) % self.modulus

    def signed(self, a: int) -> int:
        return a if a <= self.half else a - self.modulus

    def lt(self, a: int, b: int) -> int:
        return 1 if self.signed(a) < self.signed(b) else 0

    def le(self, a: int, b: int) -> int:
        return 1 if self.signed(a) <= self.signed(b) else 0

    def gt(self, a: int, b: int) -> int:
        return 1 if self.signed(a) > self.signed(b) else 0

    def ge(self, a: int, b: int) -> int:
        return 1 if self.signed(a) >= self.signed(b) else 0

    def is_residue(self, a: int) -> bool:
        """Euler's criterion; 0 counts as a residue."""
        a %= self.modulus
        if a == 0 or self.modulus == 2:
            return True
        return pow(a, self.half, self.modulus) == 1

    def sqrt(self, a: int) -> int | None:
        """Tonelli-Shanks square root, or None for a non-residue."""
        p = self.modulus
        a %= p
        if a == 0 or p == 2:
            return a
        if not self.is_residue(a):
            return None
        if p % 4 == 3:
            return pow(a, (p + 1) // 4, p)
        m, c = self._two_adicity, pow(self._find_nonresidue(), self._odd_part, p)
        t = pow(a, self._odd_part, p)
        r = pow(a, (self._odd_part + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t = t * c % p
            r = r * b % p
        return r

    def _find_nonresidue(self) -> int:
        if self._nonresidue is None:
            z = 2
            while self.is_residue(z):
                z += 1
            self._nonresidue = z
        return self._nonresidue


@total_ordering
class FieldElement:
    """Immutable element of a ``PrimeField``.

    Ordering uses signed representatives, matching the DSL's comparison
    operators.
    """

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", int(value) % field.modulus)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("operands belong to different fields")
            return other.value
        if isinstance(other, int):
            return other % self.field.modulus
        return NotImplemented

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(v, self.field)

    def __add__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.sub(b, self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.div(self.value, b))

    def __floordiv__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.int_div(self.value, b))

    def __mod__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.int_mod(self.value, b))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return self._wrap(self.field.pow(self.value, e))

    def inv(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.value))

    def signed(self) -> int:
        return self.field.signed(self.value)

    def is_residue(self) -> bool:
        return self.field.is_residue(self.value)

    def sqrt(self) -> "FieldElement | None":
        r = self.field.sqrt(self.value)
        return None if r is None else self._wrap(r)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.modulus))

    def __lt__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self.signed() < self.field.signed(b)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElement({self.value}, q={self.field.modulus})"

    def __str__(self):
        return str(self.value)


# Module-level helpers mirroring the operation names used in documentation.

def _same(a: FieldElement, b: FieldElement) -> PrimeField:
    if a.field != b.field:
        raise FieldError("operands belong to different fields")
    return a.field


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return FieldElement(_same(a, b).add(a.value, b.value), a.field)


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return FieldElement(_same(a, b).sub(a.value, b.value), a.field)


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return FieldElement(_same(a, b).mul(a.value, b.value), a.field)


def div(a: FieldElement, b: FieldElement) -> FieldElement:
    return FieldElement(_same(a, b).div(a.value, b.value), a.field)


def int_div(a: FieldElement, b: FieldElement) -> FieldElement:
    return FieldElement(_same(a, b).int_div(a.value, b.value), a.field)


def int_mod(a: FieldElement, b: FieldElement) -> FieldElement:
    return FieldElement(_same(a, b).int_mod(a.value, b.value), a.field)


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


def signed_repr(a: FieldElement) -> int:
    return a.signed()


def is_quadratic_residue(a: FieldElement) -> bool:
    return a.is_residue()


def sqrt(a: FieldElement) -> FieldElement | None:
    return a.sqrt()
