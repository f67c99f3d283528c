"""Weierstrass models ``y^2 = x^3 + a(t) x + b(t)`` over the projective t-line.

The analysis pipeline is: minimalize, split the discriminant into places
with uniform valuations (gcd refinement rather than factorization), classify
each place with the Kodaira table, and check the Euler sum of a K3 surface.
"""

import logging
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

from sympy import integer_nthroot

from .exact_arith import (
    INF,
    ExtVal,
    QPoly,
    T,
    as_poly,
    gcd,
    parse_poly,
    reverse_at_infinity,
    squarefree_decomposition,
    squarefree_part,
    valuation_at,
)
from .kodaira import (
    I1,
    FiberType,
    classify_valuations,
    euler_number,
    root_lattice,
)
from .lattice import IntLattice, direct_sum, named_lattice
from .utils import format_extval, format_rational, parse_extval

logger = logging.getLogger(__name__)

K3_EULER = 24
RATIONAL_EULER = 12

# Prime order -> stable fibers (at t = 0, at infinity) of the monomial normal form.
NORMAL_FORM_PAIRS: Dict[int, Tuple[str, str]] = {
    19: ("II", "III"),
    17: ("IV", "III"),
    13: ("II", "III*"),
    11: ("II*", "III"),
    7: ("IV*", "III*"),
    5: ("II*", "III*"),
}


class RationalEllipticSurfaceError(ValueError):
    """The Euler numbers sum to 12: a rational elliptic surface, not a K3."""


class EulerSumError(ValueError):
    """The Euler numbers sum to neither 24 nor 12."""


@dataclass(frozen=True)
class WeierstrassModel:
    """Short Weierstrass equation ``y^2 = x^3 + a(t) x + b(t)``."""

    a: QPoly
    b: QPoly

    def __post_init__(self):
        object.__setattr__(self, "a", as_poly(self.a))
        object.__setattr__(self, "b", as_poly(self.b))

    @classmethod
    def from_strings(cls, a: str, b: str) -> "WeierstrassModel":
        return cls(parse_poly(a), parse_poly(b))

    def to_dict(self) -> Dict[str, str]:
        return {"a": str(self.a), "b": str(self.b)}

    def __str__(self) -> str:
        return f"y^2 = x^3 + ({self.a})*x + ({self.b})"


@dataclass(frozen=True)
class Place:
    """A finite place (monic squarefree polynomial) or the point at infinity."""

    poly: Optional[QPoly] = None

    def __post_init__(self):
        if self.poly is not None:
            if self.poly.degree < 1 or not self.poly.is_monic():
                raise ValueError(
                    f"A finite place needs a monic non-constant polynomial, got {self.poly}"
                )
            if gcd(self.poly, self.poly.derivative()).degree > 0:
                raise ValueError(f"A finite place needs a squarefree polynomial, got {self.poly}")

    @property
    def is_infinity(self) -> bool:
        return self.poly is None

    @property
    def is_zero(self) -> bool:
        return self.poly == T

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else int(self.poly.degree)

    @property
    def label(self) -> str:
        return "inf" if self.poly is None else str(self.poly)

    @property
    def sort_key(self) -> Tuple[int, int, str]:
        if self.poly is None:
            return (1, 0, "")
        return (0, self.degree, self.label)

    def __str__(self) -> str:
        return self.label


INFINITY = Place()
ZERO = Place(T)


@dataclass(frozen=True)
class FiberAssignment:
    place: Place
    fiber: FiberType
    va: ExtVal
    vb: ExtVal
    vd: int

    def __post_init__(self):
        if classify_valuations(self.va, self.vb, self.vd) != self.fiber:
            raise ValueError(
                f"Fiber {self.fiber} does not match valuations ({self.va}, {self.vb}, {self.vd})"
            )

    @property
    def euler(self) -> int:
        return euler_number(self.fiber)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "place": self.place.label,
            "degree": self.place.degree,
            "va": format_extval(self.va),
            "vb": format_extval(self.vb),
            "vd": self.vd,
            "fiber": str(self.fiber),
            "euler": self.euler,
        }


@dataclass(frozen=True)
class FiberConfiguration:
    """Classified places of a model: every place with ``vd > 0`` plus infinity."""

    assignments: Tuple[FiberAssignment, ...]
    model: Optional[WeierstrassModel] = field(default=None, compare=False)
    minimal_model: Optional[WeierstrassModel] = field(default=None, compare=False)

    @property
    def euler_total(self) -> int:
        return sum(item.place.degree * item.euler for item in self.assignments)

    @property
    def is_k3(self) -> bool:
        return self.euler_total == K3_EULER

    def assignment_at(self, place: Place) -> Optional[FiberAssignment]:
        return next((item for item in self.assignments if item.place == place), None)

    def fiber_at(self, place: Place) -> FiberType:
        """Fiber type at a place; smooth when the place is not listed."""
        item = self.assignment_at(place)
        return item.fiber if item is not None else FiberType("I", 0)

    @property
    def at_zero(self) -> FiberType:
        return self.fiber_at(ZERO)

    @property
    def at_infinity(self) -> FiberType:
        return self.fiber_at(INFINITY)

    def others(self) -> Counter:
        """Fiber counts over geometric points away from ``t = 0`` and infinity."""
        counts: Counter = Counter()
        for item in self.assignments:
            if item.place.is_infinity or item.place.is_zero or item.fiber.is_smooth:
                continue
            counts[str(item.fiber)] += item.place.degree
        return counts

    def fiber_counts(self) -> Counter:
        counts: Counter = Counter()
        for item in self.assignments:
            if not item.fiber.is_smooth:
                counts[str(item.fiber)] += item.place.degree
        return counts

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "places": [item.to_dict() for item in self.assignments],
            "euler_total": self.euler_total,
        }
        if self.model is not None:
            data["model"] = self.model.to_dict()
        if self.minimal_model is not None:
            data["minimal_model"] = self.minimal_model.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FiberConfiguration":
        """Rebuild a configuration from :meth:`to_dict` output.

        Raises
        ------
        ValueError
            If a place or fiber entry is malformed.
        """
        try:
            records = data["places"]
        except (KeyError, TypeError):
            raise ValueError("Configuration data needs a 'places' list") from None
        assignments = []
        for record in records:
            label = str(record["place"])
            place = INFINITY if label == "inf" else Place(parse_poly(label))
            assignments.append(
                FiberAssignment(
                    place=place,
                    fiber=FiberType.parse(record["fiber"]),
                    va=parse_extval(record["va"]),
                    vb=parse_extval(record["vb"]),
                    vd=int(record["vd"]),
                )
            )
        model = data.get("model")
        minimal = data.get("minimal_model")
        return cls(
            assignments=tuple(assignments),
            model=WeierstrassModel.from_strings(model["a"], model["b"]) if model else None,
            minimal_model=(
                WeierstrassModel.from_strings(minimal["a"], minimal["b"]) if minimal else None
            ),
        )


def discriminant(m: WeierstrassModel) -> QPoly:
    """``4a^3 + 27b^2``.

    Raises
    ------
    ValueError
        If the discriminant vanishes identically.
    """
    delta = 4 * m.a**3 + 27 * m.b**2
    if delta.is_zero:
        raise ValueError(f"Discriminant of {m} is identically zero")
    return delta


def k3_level(m: WeierstrassModel) -> int:
    """Smallest ``chi >= 1`` with ``deg a <= 4 chi`` and ``deg b <= 6 chi``.

    The chart at infinity then has weights ``(4 chi, 6 chi, 12 chi)`` and the
    Euler numbers sum to ``12 chi``.
    """
    level = 1
    if not m.a.is_zero:
        level = max(level, math.ceil(m.a.degree / 4))
    if not m.b.is_zero:
        level = max(level, math.ceil(m.b.degree / 6))
    return level


def _refine(pieces: Iterable[QPoly], polys: Iterable[QPoly]) -> List[QPoly]:
    """Split squarefree pieces until each has uniform valuation for every poly."""
    current = [piece for piece in pieces if piece.degree > 0]
    for poly in polys:
        if poly.is_zero:
            continue
        for layer, _ in squarefree_decomposition(poly):
            refined = []
            for piece in current:
                common = gcd(piece, layer)
                if 0 < common.degree < piece.degree:
                    refined.extend([common, piece.exact_quotient(common)])
                else:
                    refined.append(piece)
            current = refined
    return current


def minimalize(m: WeierstrassModel) -> WeierstrassModel:
    """Remove every finite place with ``v(a) >= 4`` and ``v(b) >= 6``.

    Each such place ``f`` is divided out as ``(a / f^4k, b / f^6k)``. The chart
    at infinity is minimal once the weight level is :func:`k3_level`.

    Examples
    --------
    >>> str(minimalize(WeierstrassModel(QPoly.monomial(11), QPoly.monomial(7))).a)
    't^7'
    """
    discriminant(m)
    a, b = m.a, m.b
    while True:
        if a.is_zero or b.is_zero:
            common = b if a.is_zero else a
        else:
            common = gcd(a, b)
        if common.degree < 1:
            break
        pieces = _refine([squarefree_part(common)], [a, b])
        reduced = False
        for piece in pieces:
            va, vb = valuation_at(a, piece), valuation_at(b, piece)
            k = min(va // 4 if va != INF else INF, vb // 6 if vb != INF else INF)
            if k and k != INF:
                logger.debug(f"Minimalizing at {piece} with exponent {k}")
                if not a.is_zero:
                    a = a.exact_quotient(piece ** (4 * k))
                if not b.is_zero:
                    b = b.exact_quotient(piece ** (6 * k))
                reduced = True
        if not reduced:
            break
    return WeierstrassModel(a, b)


def decompose_places(m: WeierstrassModel) -> List[Place]:
    """Places of the discriminant with uniform valuation triples, then infinity.

    ``t = 0`` is always split off as its own place. Finite places are ordered by
    degree and then by their printed polynomial.
    """
    delta = discriminant(m)
    pieces = _refine([squarefree_part(delta)], [T, m.a, m.b, delta]) if delta.degree > 0 else []
    places = sorted((Place(piece) for piece in pieces), key=lambda place: place.sort_key)
    return places + [INFINITY]


def place_valuations(m: WeierstrassModel, place: Place) -> Tuple[ExtVal, ExtVal, int]:
    """Valuation triple ``(va, vb, vd)`` of ``m`` at ``place``."""
    delta = discriminant(m)
    if not place.is_infinity:
        return (
            valuation_at(m.a, place.poly),
            valuation_at(m.b, place.poly),
            int(valuation_at(delta, place.poly)),
        )
    level = k3_level(m)
    va = INF if m.a.is_zero else 4 * level - int(m.a.degree)
    vb = INF if m.b.is_zero else 6 * level - int(m.b.degree)
    return va, vb, 12 * level - int(delta.degree)


def analyze(m: WeierstrassModel) -> FiberConfiguration:
    """Classify every singular fiber of a Weierstrass model.

    A non-minimal model is minimalized with a warning before analysis.

    Parameters
    ----------
    m : WeierstrassModel
        Model over the t-line.

    Returns
    -------
    FiberConfiguration
        Assignments for each singular place and infinity.

    Raises
    ------
    RationalEllipticSurfaceError
        If the Euler numbers sum to 12.
    EulerSumError
        If they sum to anything else but 24.
    ValueError
        If the discriminant vanishes identically.

    Examples
    --------
    >>> config = analyze(WeierstrassModel.from_strings("t^7", "t"))
    >>> str(config.at_zero), str(config.at_infinity), config.euler_total
    ('II', 'III', 24)
    """
    discriminant(m)
    minimal = minimalize(m)
    if minimal != m:
        warnings.warn(
            f"Model {m} is not minimal; analyzing its minimal model {minimal}", UserWarning
        )

    assignments = []
    for place in decompose_places(minimal):
        va, vb, vd = place_valuations(minimal, place)
        fiber = classify_valuations(va, vb, vd)
        logger.debug(f"Place {place}: valuations ({va}, {vb}, {vd}) -> {fiber}")
        assignments.append(FiberAssignment(place, fiber, va, vb, vd))

    config = FiberConfiguration(tuple(assignments), model=m, minimal_model=minimal)
    total = config.euler_total
    if total == RATIONAL_EULER:
        raise RationalEllipticSurfaceError(
            f"Euler numbers of {minimal} sum to 12: rational elliptic surface, not K3"
        )
    if total != K3_EULER:
        raise EulerSumError(f"Euler numbers of {minimal} sum to {total}, expected 24 for a K3")
    return config


def trivial_lattice(config: FiberConfiguration) -> IntLattice:
    """``U`` plus one root lattice per reducible geometric fiber."""
    parts = [named_lattice("U")]
    for item in config.assignments:
        name = root_lattice(item.fiber)
        if name is not None:
            parts.extend([named_lattice(name)] * item.place.degree)
    return direct_sum(parts)


def _proportionality(first: QPoly, second: QPoly) -> Union[None, bool, Fraction]:
    """``lambda`` with ``second = lambda * first``.

    None when both are zero, False if no such scalar exists.
    """
    if first.is_zero and second.is_zero:
        return None
    if first.is_zero or second.is_zero:
        return False
    factor = second.leading_coefficient / first.leading_coefficient
    return factor if first * factor == second else False


def twist_equivalent(m1: WeierstrassModel, m2: WeierstrassModel) -> bool:
    """Whether ``(x, y) -> (u^2 x, u^3 y)`` over the algebraic closure relates the models.

    Holds iff ``a2 = la * a1`` and ``b2 = lb * b1`` with ``la^3 == lb^2``.
    """
    la = _proportionality(m1.a, m2.a)
    lb = _proportionality(m1.b, m2.b)
    if la is False or lb is False:
        return False
    if la is None or lb is None:
        return True
    return la**3 == lb**2


def base_transform(
    m: WeierstrassModel, transform: str, factor: Fraction = Fraction(1)
) -> WeierstrassModel:
    """Reparametrize the base by ``t -> factor * t`` or ``t -> 1/t``.

    Parameters
    ----------
    m : WeierstrassModel
        K3 model (``deg a <= 8``, ``deg b <= 12``) for ``"invert"``.
    transform : str
        ``"scale"`` or ``"invert"``.
    factor : Fraction
        Nonzero scale factor for ``"scale"``.

    Raises
    ------
    ValueError
        For a zero factor, an unknown transform, or degrees above the K3 bounds.
    """
    if transform == "scale":
        factor = Fraction(factor)
        if factor == 0:
            raise ValueError("Scale factor must be nonzero")
        return WeierstrassModel(m.a.scale_variable(factor), m.b.scale_variable(factor))
    if transform == "invert":
        inverted = WeierstrassModel(reverse_at_infinity(m.a, 8), reverse_at_infinity(m.b, 12))
        return minimalize(inverted)
    raise ValueError(f"Unknown base transform '{transform}'; use 'scale' or 'invert'")


def _rational_roots(value: Fraction, n: int) -> List[Fraction]:
    """Rational solutions of ``x^n = value`` for ``n >= 1``."""
    if value == 0:
        return []
    sign = 1 if value > 0 else -1
    if sign < 0 and n % 2 == 0:
        return []
    num, num_exact = integer_nthroot(abs(value.numerator), n)
    den, den_exact = integer_nthroot(value.denominator, n)
    if not (num_exact and den_exact):
        return []
    root = Fraction(int(num), int(den))
    if sign < 0:
        return [-root]
    return [root, -root] if n % 2 == 0 else [root]


def _scale_conditions(first: QPoly, second: QPoly) -> List[Tuple[int, Fraction]]:
    """Pairs ``(e, r)`` with ``lambda^e = r`` forced by proportional coefficients."""
    ratios = [(i, second.coefficient(i) / first.coefficient(i)) for i in first.support()]
    return [(j - i, rj / ri) for (i, ri), (j, rj) in zip(ratios, ratios[1:])]


def scale_relating(m1: WeierstrassModel, m2: WeierstrassModel) -> Optional[Fraction]:
    """Rational ``lambda`` with ``t -> lambda * t`` taking ``m1`` to a twist of ``m2``.

    Returns ``Fraction(1)`` when the models are already twist equivalent and
    None when no rational scale factor works.

    Examples
    --------
    >>> scale_relating(WeierstrassModel.from_strings("t^7", "t"),
    ...                WeierstrassModel.from_strings("128*t^7", "2*t"))
    Fraction(2, 1)
    """
    if twist_equivalent(m1, m2):
        return Fraction(1)
    if m1.a.support() != m2.a.support() or m1.b.support() != m2.b.support():
        return None
    conditions = _scale_conditions(m1.a, m2.a) + _scale_conditions(m1.b, m2.b)
    if not (m1.a.is_zero or m1.b.is_zero):
        i, k = m1.a.support()[0], m1.b.support()[0]
        rho_a = m2.a.coefficient(i) / m1.a.coefficient(i)
        rho_b = m2.b.coefficient(k) / m1.b.coefficient(k)
        conditions.append((2 * k - 3 * i, rho_b**2 / rho_a**3))
    for exponent, value in conditions:
        if exponent == 0:
            continue
        if exponent < 0:
            exponent, value = -exponent, 1 / value
        for factor in _rational_roots(value, exponent):
            if twist_equivalent(base_transform(m1, "scale", factor), m2):
                logger.debug(f"Scale t -> {factor} t relates {m1} to {m2}")
                return factor
        return None
    return None


def j_invariant(m: WeierstrassModel) -> Tuple[QPoly, QPoly]:
    """Numerator and denominator of ``J = 4a^3 / Delta`` (``J = 1`` when ``b = 0``)."""
    return 4 * m.a**3, discriminant(m)


def j_invariant_at(m: WeierstrassModel, place: Place) -> Union[Fraction, float]:
    """Value of J at a degree-one place or at infinity; INF at a pole.

    Raises
    ------
    ValueError
        For a finite place of degree above one.
    """
    numerator, denominator = j_invariant(m)
    if numerator.is_zero:
        return Fraction(0)
    if place.is_infinity:
        if numerator.degree < denominator.degree:
            return Fraction(0)
        if numerator.degree > denominator.degree:
            return INF
        return numerator.leading_coefficient / denominator.leading_coefficient
    if place.degree != 1:
        raise ValueError(f"J can only be evaluated at rational points, got place {place}")
    vn, vd = valuation_at(numerator, place.poly), valuation_at(denominator, place.poly)
    if vn > vd:
        return Fraction(0)
    if vn < vd:
        return INF
    root = -place.poly.coefficient(0)
    factor = place.poly ** int(vn)
    return numerator.exact_quotient(factor)(root) / denominator.exact_quotient(factor)(root)


def j_kind(m: WeierstrassModel) -> str:
    """``"0"``, ``"1"``, ``"constant"`` or ``"nonconstant"``."""
    if m.a.is_zero:
        return "0"
    if m.b.is_zero:
        return "1"
    numerator, denominator = j_invariant(m)
    return "constant" if _proportionality(denominator, numerator) else "nonconstant"


def analysis_report(config: FiberConfiguration) -> Dict[str, Any]:
    """JSON-ready report of an analysis (rationals and infinities as strings)."""
    data = config.to_dict()
    minimal = config.minimal_model
    flags = ["k3"] if config.is_k3 else []
    if config.model is not None and minimal is not None and config.model != minimal:
        flags.append("minimalized")
    lattice = trivial_lattice(config)
    data["trivial_lattice"] = {
        "name": lattice.name,
        "rank": lattice.rank,
        "det_abs": lattice.det_abs,
    }
    if minimal is not None:
        kind = j_kind(minimal)
        data["j_invariant"] = {"kind": kind}
        if kind != "nonconstant":
            flags.append(f"j_{kind}")
        values = {}
        for place in (ZERO, INFINITY):
            value = j_invariant_at(minimal, place)
            values[place.label] = "inf" if value == INF else format_rational(value)
        data["j_invariant"]["values"] = values
    data["flags"] = flags
    return data


def matches_normal_form(config: FiberConfiguration, p: int) -> bool:
    """Whether the stable pair and a single degree-p place of I1 fibers match the normal form."""
    expected = sorted(FiberType.parse(name).sort_key for name in NORMAL_FORM_PAIRS[p])
    observed = sorted([config.at_zero.sort_key, config.at_infinity.sort_key])
    if expected != observed:
        return False
    others = [
        item
        for item in config.assignments
        if not (item.place.is_zero or item.place.is_infinity)
    ]
    return len(others) == 1 and others[0].place.degree == p and others[0].fiber == I1


@lru_cache(maxsize=None)
def reconstruct_monomial_model(p: int) -> Set[Tuple[int, int]]:
    """All ``(m, n)`` for which ``(t^m, t^n)`` realizes the order-p normal form configuration.

    Non-minimal and non-K3 monomial models are skipped. The result is one
    orientation class ``{(m, n), (8 - m, 12 - n)}``.

    Raises
    ------
    ValueError
        If ``p`` is not one of 5, 7, 11, 13, 17, 19.
    """
    if p not in NORMAL_FORM_PAIRS:
        raise ValueError(f"p must be one of {sorted(NORMAL_FORM_PAIRS)}, got {p}")
    found = set()
    for m_exp in range(9):
        for n_exp in range(13):
            model = WeierstrassModel(QPoly.monomial(m_exp), QPoly.monomial(n_exp))
            if minimalize(model) != model:
                continue
            try:
                config = analyze(model)
            except ValueError:
                continue
            if matches_normal_form(config, p):
                found.add((m_exp, n_exp))
    logger.debug(f"Monomial models for p = {p}: {sorted(found)}")
    return found


def orientation_classes(pairs: Iterable[Tuple[int, int]]) -> List[FrozenSet]:
    """Group exponent pairs under ``t -> 1/t``, i.e. ``(m, n) ~ (8 - m, 12 - n)``."""
    classes: List[FrozenSet] = []
    for m_exp, n_exp in sorted(pairs):
        orbit = frozenset({(m_exp, n_exp), (8 - m_exp, 12 - n_exp)})
        if orbit not in classes:
            classes.append(orbit)
    return classes
