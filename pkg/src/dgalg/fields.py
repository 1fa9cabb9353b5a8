"""Exact coefficient arithmetic: the rationals and prime fields.

Every scalar in the package is either a Fraction (field "Q") or a plain int
reduced into [0, p) (field "F<p>").  No floats anywhere; equality of scalars
is exact equality.
"""

from __future__ import annotations

from fractions import Fraction


class FieldError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


class FieldSpec:
    """A coefficient field, selected by the strings "Q" or "F<p>"."""

    __slots__ = ("name", "char")

    def __init__(self, name: str):
        name = name.strip()
        if name == "Q":
            self.name = "Q"
            self.char = 0
        elif name.startswith("F"):
            try:
                p = int(name[1:])
            except ValueError:
                raise FieldError(f"bad field name {name!r}")
            if not _is_prime(p):
                raise FieldError(f"{p} is not prime")
            self.name = f"F{p}"
            self.char = p
        else:
            raise FieldError(f"bad field name {name!r}")

    def __repr__(self):
        return f"FieldSpec({self.name!r})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    # -- scalar construction -------------------------------------------

    def zero(self):
        return Fraction(0) if self.char == 0 else 0

    def one(self):
        return Fraction(1) if self.char == 0 else 1

    def of(self, value):
        """Coerce an int, Fraction, or "a/b" string into this field."""
        if isinstance(value, str):
            value = Fraction(value)
        if self.char == 0:
            return Fraction(value)
        p = self.char
        if isinstance(value, Fraction):
            den = value.denominator % p
            if den == 0:
                raise FieldError(f"denominator divisible by {p}: {value}")
            return (value.numerator % p) * pow(den, p - 2, p) % p
        return int(value) % p

    # -- arithmetic ------------------------------------------------------

    def add(self, a, b):
        return (a + b) if self.char == 0 else (a + b) % self.char

    def sub(self, a, b):
        return (a - b) if self.char == 0 else (a - b) % self.char

    def mul(self, a, b):
        return (a * b) if self.char == 0 else (a * b) % self.char

    def neg(self, a):
        return -a if self.char == 0 else (-a) % self.char

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self.char == 0:
            return 1 / a
        return pow(a, self.char - 2, self.char)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def sign_pow(self, exponent: int):
        """(-1)^exponent as a field scalar; always one in characteristic 2."""
        if self.char == 2:
            return 1
        if exponent % 2 == 0:
            return self.one()
        return self.neg(self.one())

    def scalar_to_str(self, a) -> str:
        return str(a)


def field_from_name(name: str) -> FieldSpec:
    return FieldSpec(name)
