"""Monomial automorphisms of Weierstrass models and weighted hypersurfaces.

A Weierstrass automorphism ``(x, y, t) -> (z^alpha x, z^beta y, z^gamma t)``
with ``z`` a primitive N-th root of unity preserves ``y^2 = x^3 + a x + b``
exactly when every monomial picks up the factor ``z^(2 beta)`` of ``y^2``.
"""

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from sympy import Poly, Symbol, divisors
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .cyclotomic import ramanujan_sum
from .exact_arith import Rat, to_rat
from .fibration import FiberConfiguration, Place, WeierstrassModel
from .kodaira import I1, II

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MonomialAutomorphism:
    """Exponents ``(alpha, beta, gamma)`` mod ``N`` on ``(x, y, t)``."""

    N: int
    alpha: int
    beta: int
    gamma: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"Order N must be positive, got {self.N}")
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, getattr(self, name) % self.N)

    @property
    def exponents(self) -> Tuple[int, int, int]:
        return self.alpha, self.beta, self.gamma

    @property
    def is_identity(self) -> bool:
        return self.exponents == (0, 0, 0)

    def compose(self, other: "MonomialAutomorphism") -> "MonomialAutomorphism":
        if other.N != self.N:
            raise ValueError(f"Cannot compose automorphisms of orders {self.N} and {other.N}")
        return MonomialAutomorphism(
            self.N, self.alpha + other.alpha, self.beta + other.beta, self.gamma + other.gamma
        )

    def power(self, k: int) -> "MonomialAutomorphism":
        return MonomialAutomorphism(self.N, k * self.alpha, k * self.beta, k * self.gamma)

    def inverse(self) -> "MonomialAutomorphism":
        return self.power(-1)

    def to_dict(self) -> Dict[str, int]:
        return {"N": self.N, "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}

    def __str__(self) -> str:
        return f"({self.N}; {self.alpha}, {self.beta}, {self.gamma})"


@dataclass(frozen=True)
class Congruence:
    """Required relation ``lhs == rhs (mod N)`` contributed by one monomial."""

    term: str
    lhs: int
    rhs: int
    N: int

    @property
    def holds(self) -> bool:
        return (self.lhs - self.rhs) % self.N == 0

    def __str__(self) -> str:
        relation = "==" if self.holds else "!="
        return f"{self.term}: {self.lhs % self.N} {relation} {self.rhs % self.N} (mod {self.N})"


def weierstrass_congruences(m: WeierstrassModel, g: MonomialAutomorphism) -> List[Congruence]:
    target = 2 * g.beta
    congruences = [Congruence("x^3", 3 * g.alpha, target, g.N)]
    for exponent in m.a.support():
        congruences.append(Congruence(f"t^{exponent}*x", exponent * g.gamma + g.alpha, target, g.N))
    for exponent in m.b.support():
        congruences.append(Congruence(f"t^{exponent}", exponent * g.gamma, target, g.N))
    return congruences


def check_weierstrass_invariance(
    m: WeierstrassModel, g: MonomialAutomorphism
) -> Tuple[bool, List[Congruence]]:
    """Whether ``g`` preserves the equation; also the violated congruences.

    Examples
    --------
    >>> model = WeierstrassModel.from_strings("t^7", "t")
    >>> check_weierstrass_invariance(model, MonomialAutomorphism(19, 7, 1, 2))[0]
    True
    """
    failures = [c for c in weierstrass_congruences(m, g) if not c.holds]
    for failure in failures:
        logger.debug(f"{g} fails on {m}: {failure}")
    return not failures, failures


def omega_multiplier(g: MonomialAutomorphism) -> int:
    """Exponent k with ``g* omega = z^k omega`` for ``omega = dx ^ dt / 2y``."""
    return (g.alpha + g.gamma - g.beta) % g.N


def orders(g: MonomialAutomorphism) -> Tuple[int, int]:
    """``(order of g, order of its action on the base)``."""
    total = g.N // gcd(g.N, gcd(g.alpha, gcd(g.beta, g.gamma)))
    base = g.N // gcd(g.N, g.gamma)
    return total, base


def orbit_structure(
    config: FiberConfiguration, g: MonomialAutomorphism
) -> Tuple[List[Place], List[Tuple[Place, int]]]:
    """Split the listed places into stable ones and orbits of the base rotation.

    ``t = 0`` and infinity are stable; with base order 1 every place is. Any
    other place must be mapped to itself, i.e. its exponents are constant
    modulo the base order, and its points then form orbits of that size.

    Returns
    -------
    tuple
        ``(stable places, [(place, orbit size), ...])``.

    Raises
    ------
    ValueError
        If a place is not mapped to itself or its degree is not a multiple
        of the base order.
    """
    _, base = orders(g)
    stable: List[Place] = []
    orbits: List[Tuple[Place, int]] = []
    for item in config.assignments:
        place = item.place
        if base == 1 or place.is_infinity or place.is_zero:
            stable.append(place)
            continue
        residues = {exponent % base for exponent in place.poly.support()}
        if len(residues) != 1:
            raise ValueError(f"Place {place} is not preserved by t -> z^{g.gamma} t")
        if place.degree % base:
            raise ValueError(
                f"Place {place} of degree {place.degree} cannot split into orbits of size {base}"
            )
        orbits.append((place, base))
    return stable, orbits


@dataclass(frozen=True)
class OrbitIdentity:
    chi_stable: int
    residual: int
    c1: int
    c2: int
    consistent: bool

    def as_tuple(self) -> Tuple[int, int, int, int, bool]:
        return self.chi_stable, self.residual, self.c1, self.c2, self.consistent


def euler_orbit_identity(config: FiberConfiguration, g: MonomialAutomorphism) -> OrbitIdentity:
    """Check ``24 = chi(stable fibers) + b c1 + 2b c2`` for base order ``b``.

    ``c1`` and ``c2`` count the orbits of I1 and II fibers.

    Raises
    ------
    ValueError
        If a moving fiber is neither I1 nor II.
    """
    _, base = orders(g)
    stable, orbits = orbit_structure(config, g)
    chi_stable = sum(place.degree * _euler(config, place) for place in stable)
    residual = 24 - chi_stable
    c1 = c2 = 0
    for place, size in orbits:
        fiber = config.fiber_at(place)
        count = place.degree // size
        if fiber == I1:
            c1 += count
        elif fiber == II:
            c2 += count
        else:
            raise ValueError(
                f"Fiber {fiber} at {place} moves under the base rotation; only I1 and II can"
            )
    if base == 1:
        consistent = residual == 0 and not orbits
    else:
        consistent = residual == base * c1 + 2 * base * c2
    return OrbitIdentity(chi_stable, residual, c1, c2, consistent)


def _euler(config: FiberConfiguration, place: Place) -> int:
    item = config.assignment_at(place)
    return item.euler if item is not None else 0


def chi_fixed_trace(rank_S: int, N: int, k: int) -> int:
    """Topological Lefschetz number ``2 + rank S + c_N(k)`` of ``g^k``.

    Raises
    ------
    ValueError
        If ``g^k`` is the identity (``k`` divisible by ``N``).
    """
    if k % N == 0:
        raise ValueError(f"k = {k} is a multiple of N = {N}; g^k is the identity")
    return 2 + rank_S + ramanujan_sum(N, k)


def generated_subgroup(g: MonomialAutomorphism) -> FrozenSet[MonomialAutomorphism]:
    return frozenset(g.power(k) for k in range(g.N))


def solve_automorphisms(m: WeierstrassModel, N: int) -> List[MonomialAutomorphism]:
    """All monomial automorphisms of order dividing N that preserve the equation.

    Elements of the same cyclic subgroup are listed contiguously.
    """
    if N < 1:
        raise ValueError(f"Order N must be positive, got {N}")
    a_support = m.a.support()
    b_support = m.b.support()
    solutions = []
    for gamma in range(N):
        for alpha in range(N):
            for beta in range(N):
                target = 2 * beta
                if (3 * alpha - target) % N:
                    continue
                if any((e * gamma + alpha - target) % N for e in a_support):
                    continue
                if any((e * gamma - target) % N for e in b_support):
                    continue
                solutions.append(MonomialAutomorphism(N, alpha, beta, gamma))

    def key(g: MonomialAutomorphism):
        group = generated_subgroup(g)
        return (-len(group), min(h.exponents[::-1] for h in group), g.gamma, g.alpha, g.beta)

    solutions.sort(key=key)
    logger.debug(f"{len(solutions)} monomial automorphisms of order dividing {N} for {m}")
    return solutions


def select_generator(solutions: Sequence[MonomialAutomorphism]) -> Optional[MonomialAutomorphism]:
    """Generator acting with full order on surface and base, smallest ``(gamma, alpha, beta)``."""
    full = [g for g in solutions if orders(g) == (g.N, g.N)]
    if not full:
        return None
    return min(full, key=lambda g: (g.gamma, g.alpha, g.beta))


@dataclass(frozen=True)
class WeightedHypersurface:
    """Hypersurface in weighted projective 3-space, given by its monomials.

    Parameters
    ----------
    weights : tuple of int
        Coordinate weights.
    degree : int
        Weighted degree of the equation.
    monomials : tuple of (exponent tuple, Fraction)
        Terms of the equation.
    variables : tuple of str
        Coordinate names, for display and parsing.
    """

    weights: Tuple[int, ...]
    degree: int
    monomials: Tuple[Tuple[Tuple[int, ...], Rat], ...]
    variables: Tuple[str, ...] = field(default=("x0", "x1", "x2", "y"))

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(
            self,
            "monomials",
            tuple((tuple(int(e) for e in exps), to_rat(c)) for exps, c in self.monomials),
        )
        if any(w <= 0 for w in self.weights):
            raise ValueError(f"Weights must be positive, got {self.weights}")
        if len(self.variables) != len(self.weights):
            raise ValueError("Need one variable name per weight")
        if sum(self.weights) != self.degree:
            raise ValueError(
                f"Weights {self.weights} sum to {sum(self.weights)}, not the degree {self.degree}"
            )
        for exps, _ in self.monomials:
            if len(exps) != len(self.weights):
                raise ValueError(
                    f"Monomial exponents {exps} do not match {len(self.weights)} weights"
                )
            weighted = sum(e * w for e, w in zip(exps, self.weights))
            if weighted != self.degree:
                raise ValueError(
                    f"Monomial {exps} has weighted degree {weighted}, not {self.degree}"
                )

    @classmethod
    def from_equation(
        cls,
        weights: Sequence[int],
        equation: str,
        variables: Sequence[str] = ("x0", "x1", "x2", "y"),
    ) -> "WeightedHypersurface":
        """Parse ``"y^2 + x0^6 + x0*x1^5 + x1*x2^5"`` over the given variables.

        Raises
        ------
        ValueError
            If the equation is not a polynomial in the variables.
        """
        symbols = [Symbol(name) for name in variables]
        try:
            expr = parse_expr(
                equation,
                local_dict=dict(zip(variables, symbols)),
                transformations=standard_transformations + (convert_xor,),
            )
            poly = Poly(expr, *symbols)
        except Exception as e:
            raise ValueError(f"Invalid weighted equation {equation!r}: {e}") from e
        if poly.is_zero:
            raise ValueError("The weighted equation is zero")
        monomials = tuple((exps, to_rat(c)) for exps, c in poly.terms())
        degrees = {sum(e * w for e, w in zip(exps, weights)) for exps, _ in monomials}
        if len(degrees) != 1:
            raise ValueError(
                f"Equation {equation!r} is not weighted homogeneous for {tuple(weights)}"
            )
        return cls(tuple(weights), degrees.pop(), monomials, tuple(variables))


@dataclass(frozen=True)
class WeightedAutomorphism:
    """Diagonal action ``x_i -> z^(e_i) x_i`` with ``z`` a primitive N-th root of unity."""

    N: int
    exponents: Tuple[int, ...]

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"Order N must be positive, got {self.N}")
        object.__setattr__(self, "exponents", tuple(int(e) % self.N for e in self.exponents))

    def to_dict(self):
        return {"N": self.N, "exponents": list(self.exponents)}


@dataclass(frozen=True)
class WeightedInvariance:
    valid: bool
    equation_multiplier: int
    omega_multiplier: int


def check_weighted_invariance(
    h: WeightedHypersurface, g: WeightedAutomorphism
) -> WeightedInvariance:
    """Whether every monomial picks up one common factor ``z^(a_f)``.

    The 2-form multiplier is ``sum(exponents) - a_f`` mod N.

    Raises
    ------
    ValueError
        If the exponent vector does not match the coordinates.
    """
    if len(g.exponents) != len(h.weights):
        raise ValueError(
            f"Automorphism has {len(g.exponents)} exponents for {len(h.weights)} coordinates"
        )
    shifts = [sum(e * k for e, k in zip(exps, g.exponents)) % g.N for exps, _ in h.monomials]
    valid = len(set(shifts)) <= 1
    a_f = shifts[0] if shifts else 0
    omega = (sum(g.exponents) - a_f) % g.N
    if not valid:
        logger.debug(f"Weighted automorphism {g.exponents} gives monomial factors {shifts}")
    return WeightedInvariance(valid, a_f, omega)


def weighted_order(h: WeightedHypersurface, g: WeightedAutomorphism) -> int:
    """Order of ``g`` as a map of weighted projective space.

    ``g^k`` is trivial when ``k e_i == c w_i (mod N)`` for some ``c`` and all
    coordinates, i.e. it agrees with a weighted scalar ``z^c``.
    """
    for k in (int(d) for d in divisors(g.N)):
        for c in range(g.N):
            if all((k * e - c * w) % g.N == 0 for e, w in zip(g.exponents, h.weights)):
                return k
    return g.N
