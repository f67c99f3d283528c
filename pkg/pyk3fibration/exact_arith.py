"""Exact rational numbers and univariate polynomials over the rationals.

Polynomials in the base coordinate ``t`` are held as :class:`QPoly`, an
immutable canonical coefficient tuple backed by :class:`sympy.Poly` over
``QQ`` for the ring operations. Valuations are ``int`` or :data:`INF`.
"""

import logging
import math
import re
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from sympy import QQ, Poly, Rational, Symbol
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .utils import format_rational

logger = logging.getLogger(__name__)

Rat = Fraction
ExtVal = Union[int, float]

INF = math.inf
T_SYMBOL = Symbol("t")

_POLY_PATTERN = re.compile(r"^[0-9t+\-*/^()\s]+$")
_TRANSFORMATIONS = standard_transformations + (convert_xor,)

Scalar = Union[int, Fraction]


def to_rat(value) -> Fraction:
    """Convert a sympy rational (or anything Fraction accepts) to Fraction."""
    if hasattr(value, "p") and hasattr(value, "q"):
        return Fraction(int(value.p), int(value.q))
    return Fraction(value)


class QPoly:
    """Polynomial in ``t`` with rational coefficients.

    Coefficients are stored in ascending degree order without trailing zeros,
    so the zero polynomial is the empty tuple and equality is structural.

    Parameters
    ----------
    coeffs : iterable
        Coefficients ``c_0, c_1, ...`` (ints, Fractions or rational strings).

    Examples
    --------
    >>> p = QPoly([0, 0, 1])
    >>> str(p * p + 1)
    't^4 + 1'
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Union[Scalar, str]] = ()):
        values = [to_rat(c) for c in coeffs]
        while values and values[-1] == 0:
            values.pop()
        self._coeffs: Tuple[Fraction, ...] = tuple(values)

    @classmethod
    def constant(cls, value: Scalar) -> "QPoly":
        return cls([value])

    @classmethod
    def monomial(cls, exponent: int, coefficient: Scalar = 1) -> "QPoly":
        if exponent < 0:
            raise ValueError(f"Monomial exponent must be non-negative, got {exponent}")
        return cls([0] * exponent + [coefficient])

    @classmethod
    def from_sympy(cls, poly: Poly) -> "QPoly":
        return cls(reversed([to_rat(c) for c in poly.all_coeffs()]))

    def to_sympy(self) -> Poly:
        if self.is_zero:
            return Poly(0, T_SYMBOL, domain=QQ)
        rep = [Rational(c.numerator, c.denominator) for c in reversed(self._coeffs)]
        return Poly.from_list(rep, T_SYMBOL, domain=QQ)

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return self._coeffs

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def degree(self) -> Union[int, float]:
        """Degree, with ``-inf`` for the zero polynomial."""
        return len(self._coeffs) - 1 if self._coeffs else -INF

    @property
    def leading_coefficient(self) -> Fraction:
        return self._coeffs[-1] if self._coeffs else Fraction(0)

    def coefficient(self, exponent: int) -> Fraction:
        if 0 <= exponent < len(self._coeffs):
            return self._coeffs[exponent]
        return Fraction(0)

    def support(self) -> List[int]:
        """Exponents carrying a nonzero coefficient."""
        return [i for i, c in enumerate(self._coeffs) if c != 0]

    def is_monic(self) -> bool:
        return not self.is_zero and self.leading_coefficient == 1

    def monic(self) -> "QPoly":
        if self.is_zero:
            raise ValueError("The zero polynomial has no monic associate")
        lead = self.leading_coefficient
        return QPoly(c / lead for c in self._coeffs)

    def derivative(self) -> "QPoly":
        return QPoly.from_sympy(self.to_sympy().diff(T_SYMBOL))

    def scale_variable(self, factor: Scalar) -> "QPoly":
        """Return ``p(factor * t)``."""
        factor = Fraction(factor)
        return QPoly(c * factor**i for i, c in enumerate(self._coeffs))

    def divrem(self, other: "QPoly") -> Tuple["QPoly", "QPoly"]:
        other = _coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("Polynomial division by the zero polynomial")
        quotient, remainder = self.to_sympy().div(other.to_sympy())
        return QPoly.from_sympy(quotient), QPoly.from_sympy(remainder)

    def exact_quotient(self, other: "QPoly") -> "QPoly":
        quotient, remainder = self.divrem(other)
        if not remainder.is_zero:
            raise ValueError(f"{other} does not divide {self}")
        return quotient

    def __call__(self, value: Scalar) -> Fraction:
        result = Fraction(0)
        for c in reversed(self._coeffs):
            result = result * value + c
        return result

    def __add__(self, other) -> "QPoly":
        other = _coerce(other)
        size = max(len(self._coeffs), len(other._coeffs))
        return QPoly(self.coefficient(i) + other.coefficient(i) for i in range(size))

    __radd__ = __add__

    def __neg__(self) -> "QPoly":
        return QPoly(-c for c in self._coeffs)

    def __sub__(self, other) -> "QPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "QPoly":
        return _coerce(other) - self

    def __mul__(self, other) -> "QPoly":
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return QPoly()
        return QPoly.from_sympy(self.to_sympy() * other.to_sympy())

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "QPoly":
        if exponent < 0:
            raise ValueError("Polynomials only support non-negative powers")
        if exponent == 0:
            return QPoly.constant(1)
        if self.is_zero:
            return QPoly()
        return QPoly.from_sympy(self.to_sympy() ** exponent)

    def __floordiv__(self, other) -> "QPoly":
        return self.divrem(other)[0]

    def __mod__(self, other) -> "QPoly":
        return self.divrem(other)[1]

    def __eq__(self, other) -> bool:
        if isinstance(other, QPoly):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self._coeffs == QPoly.constant(other)._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for exponent in range(len(self._coeffs) - 1, -1, -1):
            c = self._coeffs[exponent]
            if c == 0:
                continue
            if exponent == 0:
                body = format_rational(abs(c))
            else:
                power = "t" if exponent == 1 else f"t^{exponent}"
                body = power if abs(c) == 1 else f"{format_rational(abs(c))}*{power}"
            terms.append(("-" if c < 0 else "+", body))
        sign, body = terms[0]
        text = f"-{body}" if sign == "-" else body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"QPoly('{self}')"


def _coerce(value) -> QPoly:
    if isinstance(value, QPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return QPoly.constant(value)
    raise TypeError(f"Cannot use {type(value).__name__} as a polynomial")


T = QPoly([0, 1])


def poly_arith(p: QPoly, q: QPoly, op: str):
    """Exact ring operation ``op`` in ``{"add", "sub", "mul", "divrem"}``.

    Returns a :class:`QPoly`, or ``(quotient, remainder)`` for ``divrem``.

    Raises
    ------
    ZeroDivisionError
        For ``divrem`` by the zero polynomial.
    ValueError
        For an unknown operation.
    """
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "divrem":
        return p.divrem(q)
    raise ValueError(f"Unknown polynomial operation '{op}'; use add, sub, mul or divrem")


def gcd(p: QPoly, q: QPoly) -> QPoly:
    """Monic greatest common divisor.

    Raises
    ------
    ValueError
        If both inputs are zero.
    """
    if p.is_zero and q.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    if p.is_zero:
        return q.monic()
    if q.is_zero:
        return p.monic()
    return QPoly.from_sympy(p.to_sympy().gcd(q.to_sympy())).monic()


def squarefree_decomposition(p: QPoly) -> List[Tuple[QPoly, int]]:
    """Yun decomposition ``p = lc(p) * prod(A_m ** m)``.

    The returned factors are monic, squarefree and pairwise coprime; factors
    equal to 1 are omitted, so a constant input gives an empty list.

    Parameters
    ----------
    p : QPoly
        Nonzero polynomial.

    Returns
    -------
    list of (QPoly, int)
        ``(A_m, m)`` pairs in increasing multiplicity.

    Raises
    ------
    ValueError
        If ``p`` is zero.
    """
    if p.is_zero:
        raise ValueError("The zero polynomial has no squarefree decomposition")
    f = p.monic()
    if f.degree == 0:
        return []

    df = f.derivative()
    common = gcd(f, df)
    b = f.exact_quotient(common)
    c = df.exact_quotient(common)
    d = c - b.derivative()
    layers: List[Tuple[QPoly, int]] = []
    multiplicity = 1
    while b.degree > 0:
        a = gcd(b, d)
        if a.degree > 0:
            layers.append((a, multiplicity))
        b = b.exact_quotient(a)
        c = d.exact_quotient(a)
        d = c - b.derivative()
        multiplicity += 1
    return layers


def squarefree_part(p: QPoly) -> QPoly:
    """Monic product of the distinct irreducible factors of ``p``."""
    result = QPoly.constant(1)
    for factor, _ in squarefree_decomposition(p):
        result = result * factor
    return result


def _check_place(place: QPoly) -> None:
    if place.is_zero or place.degree < 1:
        raise ValueError(f"A place must be a non-constant polynomial, got {place}")
    if not place.is_monic():
        raise ValueError(f"A place must be monic, got {place}")
    if gcd(place, place.derivative()).degree > 0:
        raise ValueError(f"A place must be squarefree, got {place}")


def valuation_at(p: QPoly, place: QPoly) -> ExtVal:
    """Largest ``k`` with ``place**k`` dividing ``p``; :data:`INF` for ``p == 0``.

    Raises
    ------
    ValueError
        If ``place`` is not monic, non-constant and squarefree.
    """
    _check_place(place)
    if p.is_zero:
        return INF
    k = 0
    quotient, remainder = p.divrem(place)
    while remainder.is_zero:
        k += 1
        p = quotient
        quotient, remainder = p.divrem(place)
    return k


def reverse_at_infinity(p: QPoly, weight: int) -> QPoly:
    """Chart change ``s**weight * p(1/s)``.

    Raises
    ------
    ValueError
        If ``deg p > weight``; the model does not fit the weighted degree.
    """
    if p.is_zero:
        return QPoly()
    if p.degree > weight:
        raise ValueError(
            f"Degree {p.degree} of {p} exceeds the weight {weight} of the chart at infinity"
        )
    reversed_coeffs = [Fraction(0)] * (weight + 1)
    for i, c in enumerate(p.coeffs):
        reversed_coeffs[weight - i] = c
    return QPoly(reversed_coeffs)


def parse_poly(text: str) -> QPoly:
    """Parse a polynomial in ``t``.

    Accepts integer and rational literals, ``t``, ``+ - * / ^`` and
    parentheses; the result must be a polynomial.

    Raises
    ------
    ValueError
        On any character outside the grammar or an expression that is not a
        polynomial in ``t``.

    Examples
    --------
    >>> str(parse_poly("4*t^21 + 27*t^2"))
    '4*t^21 + 27*t^2'
    """
    if not isinstance(text, str) or not text.strip() or not _POLY_PATTERN.match(text):
        raise ValueError(f"Invalid polynomial {text!r}: use numbers, t, + - * / ^ and parentheses")
    try:
        expr = parse_expr(text, local_dict={"t": T_SYMBOL}, transformations=_TRANSFORMATIONS)
        poly = Poly(expr, T_SYMBOL, domain=QQ)
    except Exception as e:
        raise ValueError(f"Invalid polynomial {text!r}: {e}") from e
    return QPoly.from_sympy(poly)


def as_poly(value: Union[QPoly, str, int, Fraction]) -> QPoly:
    """Accept a QPoly, a scalar or polynomial text."""
    if isinstance(value, QPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return QPoly.constant(value)
    return parse_poly(str(value))


def product(polys: Sequence[QPoly]) -> QPoly:
    result = QPoly.constant(1)
    for p in polys:
        result = result * p
    return result
