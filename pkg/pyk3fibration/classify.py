"""Enumerations behind the classification of orders with trivial Néron–Severi action.

Stable fiber pairs for prime orders, solutions of the Euler orbit count,
the candidate Néron–Severi lattices for orders 3, 9, 27 with the base orders
they allow, and the rank comparison that forces trivial action for p >= 13.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Set, Tuple

import pandas as pd
from sympy import divisors

from .cyclotomic import phi_euler
from .kodaira import (
    EXCEPTIONAL_TYPES,
    FiberType,
    I,
    IIstar,
    IVstar,
    II,
    IV,
    Istar,
    euler_number,
    stable_type_allowed,
)
from .lattice import (
    IntLattice,
    discriminant_group,
    p_elementary_profile,
    parse_lattice_spec,
    signature,
)
from .utils import require_prime

logger = logging.getLogger(__name__)

MAX_INDEX = 24

# Orders of automorphisms of an elliptic curve that act on its 1-form.
FIBERWISE_ORDERS = (1, 2, 3, 4, 6)

CANDIDATE_NS: Dict[int, str] = {27: "U+A2", 9: "U+E8+E6", 3: "U+E8+E8+A2"}

THREE_POWER_STABLE_FIBERS: Dict[int, Tuple[FiberType, ...]] = {
    27: (II, IV),
    9: (IIstar, IVstar),
    3: (IIstar, IIstar, IV),
}


@dataclass(frozen=True)
class StablePair:
    """Unordered pair of fiber types over the two fixed points of the base."""

    t0: FiberType
    t_inf: FiberType

    def __post_init__(self):
        if self.t_inf.sort_key < self.t0.sort_key:
            first, second = self.t_inf, self.t0
            object.__setattr__(self, "t0", first)
            object.__setattr__(self, "t_inf", second)

    @classmethod
    def of(cls, first: str, second: str) -> "StablePair":
        return cls(FiberType.parse(first), FiberType.parse(second))

    @property
    def euler(self) -> int:
        return euler_number(self.t0) + euler_number(self.t_inf)

    def __str__(self) -> str:
        return f"({self.t0}, {self.t_inf})"


def candidate_stable_types(p: int, include_istar0: bool = True) -> List[FiberType]:
    """Fiber types allowed over a fixed point of an order-p rotation (smooth included)."""
    types = [I(0)] + list(EXCEPTIONAL_TYPES)
    types += [I(n) for n in range(1, MAX_INDEX + 1) if stable_type_allowed(I(n), p)]
    start = 0 if include_istar0 else 1
    types += [Istar(n) for n in range(start, MAX_INDEX + 1) if stable_type_allowed(Istar(n), p)]
    return types


def enumerate_stable_pairs(p: int, include_istar0: bool = True) -> Set[StablePair]:
    """Pairs of allowed stable fibers whose Euler numbers sum to ``24 - p``.

    Parameters
    ----------
    p : int
        Prime order, at least 5.
    include_istar0 : bool
        Whether ``I0*`` counts as ``I_{pm}*`` with ``m = 0``.

    Raises
    ------
    ValueError
        If ``p`` is not a prime of at least 5.

    Examples
    --------
    >>> sorted(str(pair) for pair in enumerate_stable_pairs(19))
    ['(II, III)']
    """
    require_prime(p)
    if p < 5:
        raise ValueError(f"Stable pair enumeration needs p >= 5, got {p}")
    target = 24 - p
    types = candidate_stable_types(p, include_istar0)
    pairs = set()
    for i, first in enumerate(types):
        for second in types[i:]:
            if euler_number(first) + euler_number(second) == target:
                pairs.add(StablePair(first, second))
    logger.debug(f"Stable pairs for p = {p}: {sorted(str(pair) for pair in pairs)}")
    return pairs


def orbit_count_solutions(p: int, chi_pair: int) -> Set[Tuple[int, int]]:
    """Non-negative ``(c1, c2)`` with ``24 - chi_pair = p c1 + 2p c2``."""
    if p < 1:
        raise ValueError(f"Orbit size must be positive, got {p}")
    residual = 24 - chi_pair
    if residual < 0:
        return set()
    return {
        (c1, c2)
        for c2 in range(residual // (2 * p) + 1)
        for c1 in [(residual - 2 * p * c2) // p]
        if p * c1 + 2 * p * c2 == residual
    }


def candidate_ns_lattices(N: int) -> IntLattice:
    """Néron–Severi lattice for orders 27, 9 and 3, after checking its invariants.

    The lattice is even, hyperbolic, 3-elementary with one generator and of
    rank ``22 - phi(N)``.

    Raises
    ------
    ValueError
        If ``N`` is not 3, 9 or 27.
    """
    if N not in CANDIDATE_NS:
        raise ValueError(f"Candidate lattices exist for N = 3, 9, 27, got {N}")
    lattice = parse_lattice_spec(CANDIDATE_NS[N])
    expected_rank = 22 - phi_euler(N)
    checks = {
        "even": lattice.is_even,
        "hyperbolic": signature(lattice) == (1, lattice.rank - 1),
        "3-elementary": p_elementary_profile(lattice, 3) == (True, 1),
        "rank": lattice.rank == expected_rank,
    }
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        raise RuntimeError(f"Candidate lattice {lattice} for N = {N} fails: {', '.join(failed)}")
    return lattice


def trivial_action_rank_check(p: int) -> Tuple[int, bool]:
    """``(22 - (p - 1), rank < p - 1)``: whether the Néron–Severi rank forces trivial action.

    Raises
    ------
    ValueError
        If ``p`` is not prime or ``p - 1 > 21``.
    """
    require_prime(p)
    if p - 1 > 21:
        raise ValueError(f"No K3 automorphism of prime order {p}: p - 1 exceeds 21")
    rank = 22 - (p - 1)
    return rank, rank < p - 1


def feasible_base_orders(N: int, stable_fibers: Sequence[FiberType]) -> Set[int]:
    """Orders b of the base rotation compatible with the given stable fibers.

    ``N / b`` must be the order of an elliptic curve automorphism acting on its
    1-form, the Euler numbers of moving fibers must come in orbits of size b,
    and a nontrivial rotation of the line fixes only two points.
    """
    residual = 24 - sum(euler_number(fiber) for fiber in stable_fibers)
    feasible = set()
    for b in (int(d) for d in divisors(N)):
        if N // b not in FIBERWISE_ORDERS:
            continue
        if b > 1 and (residual % b or len(stable_fibers) > 2):
            continue
        feasible.add(b)
    return feasible


def power_of_three_report(N: int) -> Dict[str, object]:
    """Summary of the order-N case for N in {3, 9, 27}."""
    lattice = candidate_ns_lattices(N)
    stable = THREE_POWER_STABLE_FIBERS[N]
    bases = feasible_base_orders(N, stable)
    chi_stable = sum(euler_number(fiber) for fiber in stable)
    return {
        "N": N,
        "lattice": lattice.name,
        "rank": lattice.rank,
        "signature": list(signature(lattice)),
        "discriminant": list(discriminant_group(lattice).invariant_factors),
        "stable_fibers": [str(fiber) for fiber in stable],
        "feasible_base_orders": sorted(bases),
        "orbit_solutions": {
            str(b): sorted(list(s) for s in orbit_count_solutions(b, chi_stable))
            for b in sorted(bases)
            if b > 1
        },
    }


def stable_pairs_table(p: int) -> pd.DataFrame:
    """Stable pairs for ``p`` with their Euler sums and orbit count solutions."""
    rows = []
    for pair in sorted(enumerate_stable_pairs(p), key=lambda s: (s.t0.sort_key, s.t_inf.sort_key)):
        rows.append(
            {
                "t0": str(pair.t0),
                "t_inf": str(pair.t_inf),
                "euler": pair.euler,
                "orbits (c1, c2)": sorted(orbit_count_solutions(p, pair.euler)),
            }
        )
    return pd.DataFrame(rows, columns=["t0", "t_inf", "euler", "orbits (c1, c2)"])
