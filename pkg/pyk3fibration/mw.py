"""Mordell–Weil arithmetic of a Jacobian elliptic K3 surface.

Sections are abstract: an intersection number with the zero section plus
the correction term chosen at each reducible fiber. That is enough for the
height pairing, the torsion bound and the determinant chain
``|det NS| * |tors|^2 = |det Triv| * det MW``.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence, Tuple

from .fibration import FiberConfiguration, trivial_lattice
from .kodaira import FiberType, contribution_values, root_lattice
from .utils import get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HeightContext:
    """Fibration data entering the height pairing.

    Parameters
    ----------
    config : FiberConfiguration
        Analyzed fibration.
    chi_structure : int
        Euler characteristic of the structure sheaf; 2 for a K3 surface.
    """

    config: FiberConfiguration
    chi_structure: int = 2

    def __post_init__(self):
        if self.config.is_k3 and self.chi_structure != 2:
            raise ValueError(f"A K3 configuration has chi(O) = 2, got {self.chi_structure}")

    @property
    def reducible_fibers(self) -> List[Tuple[str, FiberType]]:
        """Reducible geometric fibers as ``(place label, type)``, in configuration order."""
        fibers = []
        for item in self.config.assignments:
            if root_lattice(item.fiber) is not None:
                fibers.extend([(item.place.label, item.fiber)] * item.place.degree)
        return fibers


@dataclass(frozen=True)
class SectionData:
    """``P.O`` and one correction term per reducible fiber of the context."""

    intersection_with_zero: int
    contributions: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.intersection_with_zero < 0:
            raise ValueError(f"P.O must be non-negative, got {self.intersection_with_zero}")
        object.__setattr__(self, "contributions", tuple(Fraction(c) for c in self.contributions))


def height(ctx: HeightContext, section: SectionData) -> Fraction:
    """Height ``2 chi + 2 P.O - sum of corrections``.

    Raises
    ------
    ValueError
        If the number of corrections does not match the reducible fibers or a
        correction is not available at its fiber.
    """
    fibers = ctx.reducible_fibers
    if len(section.contributions) != len(fibers):
        raise ValueError(
            f"Expected {len(fibers)} correction terms (one per reducible fiber), "
            f"got {len(section.contributions)}"
        )
    for (label, fiber), value in zip(fibers, section.contributions):
        if value not in contribution_values(fiber):
            raise ValueError(
                f"Correction {value} is not available at the {fiber} fiber over {label}"
            )
    return 2 * ctx.chi_structure + 2 * section.intersection_with_zero - sum(
        section.contributions, Fraction(0)
    )


def torsion_free_bound(ctx: HeightContext) -> Fraction:
    """Smallest height a section with ``P.O = 0`` can have.

    Torsion sections have height zero, so a positive bound means the
    Mordell–Weil group is torsion free.
    """
    largest = sum(
        (max(contribution_values(fiber)) for _, fiber in ctx.reducible_fibers), Fraction(0)
    )
    return 2 * ctx.chi_structure - largest


def shioda_tate(ctx: HeightContext, rho: int) -> Tuple[int, int]:
    """``(Mordell–Weil rank, trivial lattice rank)`` for Picard number ``rho``.

    Raises
    ------
    ValueError
        If ``rho`` is below the trivial lattice rank.
    """
    trivial_rank = trivial_lattice(ctx.config).rank
    if rho < trivial_rank:
        raise ValueError(
            f"Picard number {rho} is smaller than the trivial lattice rank {trivial_rank}"
        )
    return rho - trivial_rank, trivial_rank


def mw_determinant(det_S_abs: int, det_trivial_abs: int, torsion_order: int = 1) -> Fraction:
    """``|det MW| = |det S| * |tors|^2 / |det Triv|``.

    Raises
    ------
    ValueError
        If any input is not positive.
    """
    if min(det_S_abs, det_trivial_abs, torsion_order) <= 0:
        raise ValueError("Determinants and torsion order must be positive")
    return Fraction(det_S_abs * torsion_order**2, det_trivial_abs)


def realize_height(
    ctx: HeightContext, target: Fraction, max_intersection: Optional[int] = None
) -> Optional[SectionData]:
    """Search ``P.O`` in ``0..max_intersection`` and all correction choices for a height.

    Parameters
    ----------
    ctx : HeightContext
        Fibration data.
    target : Fraction
        Height to realize.
    max_intersection : int, optional
        Largest ``P.O`` tried; defaults to the ``max_intersection`` setting.

    Returns
    -------
    SectionData or None
        The first match, in order of increasing ``P.O``.
    """
    if max_intersection is None:
        max_intersection = get_settings()["max_intersection"]
    target = Fraction(target)
    choices: Sequence = [sorted(contribution_values(fiber)) for _, fiber in ctx.reducible_fibers]
    for intersection in range(max_intersection + 1):
        for contributions in product(*choices):
            section = SectionData(intersection, tuple(contributions))
            if height(ctx, section) == target:
                logger.debug(f"Height {target} realized by P.O = {intersection}, {contributions}")
                return section
    return None
