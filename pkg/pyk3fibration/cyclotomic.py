"""Cyclotomic polynomials and the companion-matrix model of ``Z[zeta_N]``.

The transcendental lattice of a K3 surface with an automorphism of order N
acting trivially on the Néron–Severi lattice is a free ``Z[zeta_N]``-module;
here it is modelled by multiplication by ``zeta_N`` on the power basis.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import List, Tuple

from sympy import Matrix, divisors, eye, factorint, totient

from .exact_arith import QPoly
from .utils import require_prime

logger = logging.getLogger(__name__)

# Orders whose transcendental lattice is not unimodular.
OMEGA: Tuple[int, ...] = (3, 9, 27, 5, 25, 7, 11, 13, 17, 19)

# Orders whose transcendental lattice is unimodular.
SIGMA: Tuple[int, ...] = (66, 44, 42, 36, 28, 12)


@dataclass(frozen=True)
class CycloModel:
    """Multiplication by ``zeta_N`` on ``1, zeta, ..., zeta^(phi-1)``."""

    N: int
    phi: int
    companion: Tuple[Tuple[int, ...], ...]

    @property
    def matrix(self) -> Matrix:
        return Matrix(self.companion)


def _require_positive(N: int) -> None:
    if not isinstance(N, int) or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")


@lru_cache(maxsize=None)
def cyclotomic_poly(N: int) -> QPoly:
    """N-th cyclotomic polynomial, by dividing ``t^N - 1`` by ``Phi_d`` for proper divisors d.

    Examples
    --------
    >>> str(cyclotomic_poly(9))
    't^6 + t^3 + 1'
    """
    _require_positive(N)
    result = QPoly.monomial(N) - 1
    for d in divisors(N)[:-1]:
        result = result.exact_quotient(cyclotomic_poly(int(d)))
    return result


def phi_euler(N: int) -> int:
    _require_positive(N)
    return int(totient(N))


def mobius(N: int) -> int:
    _require_positive(N)
    exponents = factorint(N).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def ramanujan_sum(N: int, k: int) -> int:
    """``c_N(k)``, the sum of the k-th powers of the primitive N-th roots of unity."""
    _require_positive(N)
    g = gcd(N, k)
    return sum(int(d) * mobius(N // int(d)) for d in divisors(g))


@lru_cache(maxsize=None)
def cyclo_model(N: int) -> CycloModel:
    _require_positive(N)
    poly = cyclotomic_poly(N)
    phi = int(poly.degree)
    rows = [[0] * phi for _ in range(phi)]
    for j in range(phi - 1):
        rows[j + 1][j] = 1
    for i in range(phi):
        rows[i][phi - 1] = -int(poly.coefficient(i))
    return CycloModel(N=N, phi=phi, companion=tuple(map(tuple, rows)))


def trace_power(N: int, k: int) -> int:
    """Trace of the k-th power of the companion matrix."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return int((cyclo_model(N).matrix ** k).trace())


def _kernel_mod_p(rows: List[List[int]], p: int) -> List[List[int]]:
    """Basis of the kernel over ``F_p``, each vector scaled so its first nonzero entry is 1."""
    size = len(rows[0]) if rows else 0
    m = [[x % p for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(size):
        pivot_row = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inverse = pow(m[r][c], -1, p)
        m[r] = [x * inverse % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                factor = m[i][c]
                m[i] = [(x - factor * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1

    basis = []
    for free in (c for c in range(size) if c not in pivots):
        vector = [0] * size
        vector[free] = 1
        for row, c in enumerate(pivots):
            vector[c] = -m[row][free] % p
        first = next(x for x in vector if x)
        scale = pow(first, -1, p)
        basis.append([x * scale % p for x in vector])
    return basis


def fixed_vectors_mod_p(N: int, p: int, power: int = 1) -> List[List[int]]:
    """Basis of ``ker(C**power - I)`` over the field with p elements.

    Raises
    ------
    ValueError
        If ``p`` is not a prime divisor of ``N``.
    """
    require_prime(p)
    _require_positive(N)
    if N % p:
        raise ValueError(f"p = {p} does not divide N = {N}")
    model = cyclo_model(N)
    shifted = model.matrix**power - eye(model.phi)
    return _kernel_mod_p([[int(x) for x in row] for row in shifted.tolist()], p)


def fixed_discriminant_dimension(N: int, p: int, power: int = 1) -> int:
    """Dimension of the part of ``(1/p)T/T`` fixed by the automorphism.

    With ``power=1`` this is the fixed space of ``g`` itself, which is
    one-dimensional for every N in :data:`OMEGA`. ``power=N // p`` gives
    the fixed space of the order-p element ``g**(N/p)`` instead, which has
    dimension ``p**(r-1)`` when ``N = p**r``.

    Parameters
    ----------
    N : int
        Order of the automorphism.
    p : int
        Prime divisor of ``N``.
    power : int
        Exponent of the companion matrix.

    Returns
    -------
    int
        ``dim ker(C**power - I)`` over ``F_p``.
    """
    dimension = len(fixed_vectors_mod_p(N, p, power))
    logger.debug(f"dim ker(C^{power} - I) mod {p} for N = {N}: {dimension}")
    return dimension
