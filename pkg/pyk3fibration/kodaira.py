"""Kodaira fiber types of minimal elliptic fibrations in short Weierstrass form.

Classification from the valuation triple ``(v(a), v(b), v(Delta))`` follows
the characteristic-zero table; the remaining lookups give Euler numbers,
component counts, root lattices of the non-identity components and the local
height correction terms.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Optional, Tuple

from .exact_arith import ExtVal
from .utils import require_prime

logger = logging.getLogger(__name__)

_KINDS = ("I", "I*", "II", "III", "IV", "IV*", "III*", "II*")
_INDEXED = re.compile(r"^I_?(\d+)(\*?)$")


@dataclass(frozen=True)
class FiberType:
    """Kodaira symbol; ``kind`` is one of I, I*, II, III, IV, IV*, III*, II*.

    ``n`` is only meaningful for ``I`` and ``I*``.
    """

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"Unknown Kodaira type '{self.kind}'")
        if self.n < 0:
            raise ValueError(f"Kodaira index must be non-negative, got {self.n}")
        if self.kind not in ("I", "I*") and self.n:
            raise ValueError(f"Type {self.kind} takes no index")

    @classmethod
    def parse(cls, text: str) -> "FiberType":
        """Parse ``I3``, ``I_3``, ``I3*``, ``II``, ``IV*`` and friends.

        Raises
        ------
        ValueError
            If the text names no Kodaira type.
        """
        label = str(text).strip().replace("^", "")
        match = _INDEXED.match(label)
        if match:
            return cls("I*" if match.group(2) else "I", int(match.group(1)))
        if label in ("II", "III", "IV", "IV*", "III*", "II*"):
            return cls(label)
        raise ValueError(f"Unknown Kodaira type '{text}'")

    @property
    def is_smooth(self) -> bool:
        return self.kind == "I" and self.n == 0

    @property
    def sort_key(self) -> Tuple[int, int]:
        return euler_number(self), _KINDS.index(self.kind)

    def __str__(self) -> str:
        if self.kind == "I":
            return f"I{self.n}"
        if self.kind == "I*":
            return f"I{self.n}*"
        return self.kind


def I(n: int) -> FiberType:  # noqa: E743
    return FiberType("I", n)


def Istar(n: int) -> FiberType:
    return FiberType("I*", n)


I0 = I(0)
I1 = I(1)
II = FiberType("II")
III = FiberType("III")
IV = FiberType("IV")
IVstar = FiberType("IV*")
IIIstar = FiberType("III*")
IIstar = FiberType("II*")

EXCEPTIONAL_TYPES = (II, III, IV, IVstar, IIIstar, IIstar)


def classify_valuations(va: ExtVal, vb: ExtVal, vd: int) -> FiberType:
    """Kodaira type of a minimal fiber from its valuation triple.

    Parameters
    ----------
    va, vb : int or INF
        Orders of vanishing of ``a`` and ``b``; INF for a zero polynomial.
    vd : int
        Order of vanishing of ``4a^3 + 27b^2``.

    Raises
    ------
    ValueError
        If the triple is non-minimal (``va >= 4`` and ``vb >= 6``) or matches
        no row of the table.

    Examples
    --------
    >>> str(classify_valuations(7, 1, 2))
    'II'
    """
    if va < 0 or vb < 0 or vd < 0:
        raise ValueError(f"Valuations must be non-negative, got ({va}, {vb}, {vd})")
    if va >= 4 and vb >= 6:
        raise ValueError(f"Valuation triple ({va}, {vb}, {vd}) is not minimal")

    fiber: Optional[FiberType] = None
    if vd == 0:
        if min(va, vb) == 0:
            fiber = I0
    elif va == 0 and vb == 0:
        fiber = I(int(vd))
    elif va >= 1 and vb == 1:
        fiber = II if vd == 2 else None
    elif va == 1 and vb >= 2:
        fiber = III if vd == 3 else None
    elif va >= 2 and vb == 2:
        fiber = IV if vd == 4 else None
    elif va >= 2 and vb >= 3 and vd == 6:
        fiber = Istar(0)
    elif va == 2 and vb == 3 and vd > 6:
        fiber = Istar(int(vd) - 6)
    elif va >= 3 and vb == 4:
        fiber = IVstar if vd == 8 else None
    elif va == 3 and vb >= 5:
        fiber = IIIstar if vd == 9 else None
    elif va >= 4 and vb == 5:
        fiber = IIstar if vd == 10 else None

    if fiber is None:
        raise ValueError(f"Valuation triple ({va}, {vb}, {vd}) is inconsistent")
    return fiber


def euler_number(fiber: FiberType) -> int:
    if fiber.kind == "I":
        return fiber.n
    if fiber.kind == "I*":
        return fiber.n + 6
    return {"II": 2, "III": 3, "IV": 4, "IV*": 8, "III*": 9, "II*": 10}[fiber.kind]


def component_count(fiber: FiberType) -> int:
    if fiber.kind == "I":
        return max(fiber.n, 1)
    if fiber.kind == "I*":
        return fiber.n + 5
    return {"II": 1, "III": 2, "IV": 3, "IV*": 7, "III*": 8, "II*": 9}[fiber.kind]


def root_lattice(fiber: FiberType) -> Optional[str]:
    """Name of the root lattice spanned by the non-identity components, if any."""
    if fiber.kind == "I":
        return f"A{fiber.n - 1}" if fiber.n >= 2 else None
    if fiber.kind == "I*":
        return f"D{fiber.n + 4}"
    return {"III": "A1", "IV": "A2", "IV*": "E6", "III*": "E7", "II*": "E8"}.get(fiber.kind)


def contribution_values(fiber: FiberType) -> FrozenSet[Fraction]:
    """Possible local height corrections of a section meeting this fiber.

    Examples
    --------
    >>> sorted(contribution_values(IVstar))
    [Fraction(0, 1), Fraction(4, 3)]
    """
    if fiber.kind == "I":
        n = fiber.n
        if n <= 1:
            return frozenset({Fraction(0)})
        return frozenset(Fraction(i * (n - i), n) for i in range(n))
    if fiber.kind == "I*":
        return frozenset({Fraction(0), Fraction(1), 1 + Fraction(fiber.n, 4)})
    table = {
        "III": Fraction(1, 2),
        "IV": Fraction(2, 3),
        "IV*": Fraction(4, 3),
        "III*": Fraction(3, 2),
    }
    if fiber.kind in table:
        return frozenset({Fraction(0), table[fiber.kind]})
    return frozenset({Fraction(0)})


def stable_type_allowed(fiber: FiberType, p: int) -> bool:
    """Whether ``fiber`` can be stable under an order-p base rotation.

    The admissible types are II, III, IV, IV*, III*, II* and ``I_n``,
    ``I_n*`` with ``p | n``; ``n = 0`` is allowed.

    Raises
    ------
    ValueError
        If ``p`` is not a prime of at least 5.
    """
    require_prime(p)
    if p < 5:
        raise ValueError(f"Stable fiber types need p >= 5, got {p}")
    if fiber.kind in ("I", "I*"):
        return fiber.n % p == 0
    return True
