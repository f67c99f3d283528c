"""Integral symmetric bilinear forms.

Named even lattices (U and the negative definite ADE root lattices), direct
sums, signature by congruence diagonalization, Smith normal form and the
discriminant group invariants used for Néron–Severi lattice checks.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sympy import ImmutableMatrix, Matrix

from .utils import require_prime

logger = logging.getLogger(__name__)

Gram = Tuple[Tuple[int, ...], ...]

_LATTICE_NAME = re.compile(r"^(U|A|D|E)_?(\d*)$")


@dataclass(frozen=True)
class IntLattice:
    """Lattice given by a symmetric integer Gram matrix.

    Parameters
    ----------
    gram : tuple of tuple of int
        Symmetric Gram matrix.
    name : str, optional
        Label such as ``"U+E8+E6"``.
    components : tuple of str
        Names of the orthogonal summands the lattice was built from.
    """

    gram: Gram
    name: Optional[str] = None
    components: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        size = len(gram)
        if any(len(row) != size for row in gram):
            raise ValueError("Gram matrix must be square")
        for i in range(size):
            for j in range(i + 1, size):
                if gram[i][j] != gram[j][i]:
                    raise ValueError(f"Gram matrix is not symmetric at ({i}, {j})")
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def matrix(self) -> ImmutableMatrix:
        return ImmutableMatrix(self.gram)

    @property
    def determinant(self) -> int:
        if self.rank == 0:
            return 1
        return int(self.matrix.det(method="bareiss"))

    @property
    def det_abs(self) -> int:
        return abs(self.determinant)

    @property
    def det_sign(self) -> int:
        det = self.determinant
        return (det > 0) - (det < 0)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def __str__(self) -> str:
        return self.name or f"lattice of rank {self.rank}"


@dataclass(frozen=True)
class DiscriminantGroup:
    """Finite abelian group ``L*/L`` as its invariant factors ``d_1 | d_2 | ...``."""

    invariant_factors: Tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(d) for d in self.invariant_factors)
        if any(d <= 1 for d in factors):
            raise ValueError(f"Invariant factors must exceed 1, got {factors}")
        for smaller, larger in zip(factors, factors[1:]):
            if larger % smaller:
                raise ValueError(f"Invariant factors {factors} do not form a divisibility chain")
        object.__setattr__(self, "invariant_factors", factors)

    @property
    def order(self) -> int:
        result = 1
        for d in self.invariant_factors:
            result *= d
        return result

    @property
    def length(self) -> int:
        """Minimal number of generators, l(L)."""
        return len(self.invariant_factors)

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors


def _dynkin_edges(kind: str, n: int) -> List[Tuple[int, int]]:
    chain = [(i, i + 1) for i in range(n - 2)]
    if kind == "A":
        return [(i, i + 1) for i in range(n - 1)]
    if kind == "D":
        return chain + [(n - 3, n - 1)]
    # E_n: branch node at position 2 of the chain
    return chain + [(2, n - 1)]


def named_lattice(name: str, n: Optional[int] = None) -> IntLattice:
    """Build ``U``, ``A_n``, ``D_n``, ``E6``, ``E7`` or ``E8``.

    Root lattices are negative definite (the Cartan matrix negated).

    Parameters
    ----------
    name : str
        ``"U"``, ``"A"``, ``"D"``, ``"E"``, or a full label like ``"A2"``,
        ``"D_4"`` or ``"E8"``.
    n : int, optional
        Rank parameter when ``name`` carries none.

    Raises
    ------
    ValueError
        For an unknown name or an invalid rank.

    Examples
    --------
    >>> named_lattice("A2").gram
    ((-2, 1), (1, -2))
    """
    match = _LATTICE_NAME.match(str(name).strip().upper())
    if not match:
        raise ValueError(f"Unknown lattice name '{name}'; use U, A<n>, D<n>, E6, E7 or E8")
    kind, digits = match.groups()
    if digits and n is not None and int(digits) != n:
        raise ValueError(f"Conflicting ranks in named_lattice('{name}', {n})")
    rank = int(digits) if digits else n

    if kind == "U":
        if rank not in (None, 2):
            raise ValueError("U takes no rank parameter")
        return IntLattice(((0, 1), (1, 0)), name="U", components=("U",))

    if rank is None:
        raise ValueError(f"Lattice {kind} needs a rank")
    if kind == "A" and rank < 1:
        raise ValueError(f"A_n needs n >= 1, got {rank}")
    if kind == "D" and rank < 4:
        raise ValueError(f"D_n needs n >= 4, got {rank}")
    if kind == "E" and rank not in (6, 7, 8):
        raise ValueError(f"E_n exists for n = 6, 7, 8, got {rank}")

    gram = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        gram[i][i] = -2
    for i, j in _dynkin_edges(kind, rank):
        gram[i][j] = gram[j][i] = 1
    label = f"{kind}{rank}"
    return IntLattice(tuple(map(tuple, gram)), name=label, components=(label,))


def direct_sum(parts: Sequence[IntLattice]) -> IntLattice:
    """Orthogonal direct sum (block diagonal Gram matrix)."""
    parts = list(parts)
    if not parts:
        raise ValueError("direct_sum needs at least one lattice")
    if len(parts) == 1:
        return parts[0]
    size = sum(part.rank for part in parts)
    gram = [[0] * size for _ in range(size)]
    offset = 0
    for part in parts:
        for i, row in enumerate(part.gram):
            for j, value in enumerate(row):
                gram[offset + i][offset + j] = value
        offset += part.rank
    components = tuple(c for part in parts for c in (part.components or (str(part),)))
    return IntLattice(tuple(map(tuple, gram)), name="+".join(components), components=components)


def parse_lattice_spec(text: str) -> IntLattice:
    """Parse ``"U+E8+E8+A2"`` into the direct sum of its summands."""
    names = [item.strip() for item in str(text).split("+")]
    if not names or any(not item for item in names):
        raise ValueError(f"Invalid lattice spec {text!r}")
    return direct_sum([named_lattice(item) for item in names])


def same_components(first: IntLattice, second: IntLattice) -> bool:
    """Whether two lattices were assembled from the same multiset of summands."""
    return Counter(first.components) == Counter(second.components)


def signature(lattice: IntLattice) -> Tuple[int, int]:
    """Sylvester inertia ``(positive, negative)`` by exact congruence diagonalization.

    Raises
    ------
    ValueError
        If the Gram matrix is degenerate.
    """
    size = lattice.rank
    m = [[Fraction(x) for x in row] for row in lattice.gram]
    positive = negative = 0

    for k in range(size):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if m[i][i] != 0), None)
            if swap is not None:
                m[k], m[swap] = m[swap], m[k]
                for row in m:
                    row[k], row[swap] = row[swap], row[k]
            else:
                partner = next((i for i in range(k + 1, size) if m[k][i] != 0), None)
                if partner is None:
                    raise ValueError(f"Gram matrix of {lattice} is degenerate")
                # replace e_k by e_k + e_partner; new diagonal entry is 2 * m[k][partner]
                for j in range(size):
                    m[k][j] += m[partner][j]
                for i in range(size):
                    m[i][k] += m[i][partner]

        pivot = m[k][k]
        for i in range(k + 1, size):
            factor = m[i][k] / pivot
            if factor:
                for j in range(size):
                    m[i][j] -= factor * m[k][j]
                for j in range(size):
                    m[j][i] -= factor * m[j][k]
        if pivot > 0:
            positive += 1
        else:
            negative += 1

    return positive, negative


def smith_normal_form(matrix) -> Tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``U * M * V = D`` over the integers.

    Pivots are the smallest nonzero entry in absolute value, found scanning
    rows first and then columns, so the transforms are reproducible.

    Parameters
    ----------
    matrix : sequence of sequences of int or sympy Matrix
        Integer matrix, not necessarily square.

    Returns
    -------
    tuple of sympy.Matrix
        ``(D, U, V)`` with ``U`` and ``V`` unimodular and ``D`` diagonal with
        non-negative entries ``d_1 | d_2 | ...``.
    """
    a = [[int(x) for x in row] for row in Matrix(matrix).tolist()]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(target, source, factor):
        a[target] = [x + factor * y for x, y in zip(a[target], a[source])]
        u[target] = [x + factor * y for x, y in zip(u[target], u[source])]

    def add_col(target, source, factor):
        for row in a:
            row[target] += factor * row[source]
        for row in v:
            row[target] += factor * row[source]

    steps = 0
    for k in range(min(rows, cols)):
        while True:
            entries = [
                (abs(a[i][j]), i, j)
                for i in range(k, rows)
                for j in range(k, cols)
                if a[i][j] != 0
            ]
            if not entries:
                break
            _, pi, pj = min(entries)
            swap_rows(k, pi)
            swap_cols(k, pj)
            steps += 1

            pivot = a[k][k]
            clean = True
            for i in range(k + 1, rows):
                q = a[i][k] // pivot
                if q:
                    add_row(i, k, -q)
                clean = clean and a[i][k] == 0
            for j in range(k + 1, cols):
                q = a[k][j] // pivot
                if q:
                    add_col(j, k, -q)
                clean = clean and a[k][j] == 0
            if not clean:
                continue

            offender = next(
                (
                    i
                    for i in range(k + 1, rows)
                    for j in range(k + 1, cols)
                    if a[i][j] % pivot
                ),
                None,
            )
            if offender is None:
                break
            add_row(k, offender, 1)

        if a[k][k] < 0:
            a[k] = [-x for x in a[k]]
            u[k] = [-x for x in u[k]]

    logger.debug(f"Smith normal form of a {rows}x{cols} matrix in {steps} pivot steps")
    return Matrix(a), Matrix(u), Matrix(v)


def discriminant_group(lattice: IntLattice) -> DiscriminantGroup:
    """Invariant factors of ``L*/L`` from the Smith form of the Gram matrix.

    Raises
    ------
    ValueError
        If the Gram matrix is degenerate.
    """
    if lattice.determinant == 0:
        raise ValueError(f"Gram matrix of {lattice} is degenerate")
    if lattice.rank == 0:
        return DiscriminantGroup(())
    d, _, _ = smith_normal_form(lattice.gram)
    factors = tuple(abs(int(d[i, i])) for i in range(lattice.rank) if abs(int(d[i, i])) > 1)
    return DiscriminantGroup(factors)


def p_elementary_profile(lattice: IntLattice, p: int) -> Tuple[bool, int]:
    """Return ``(is_p_elementary, l)`` where ``l`` is the number of invariant factors.

    Raises
    ------
    ValueError
        If ``p`` is not prime or the lattice is degenerate.
    """
    require_prime(p)
    group = discriminant_group(lattice)
    return all(d == p for d in group.invariant_factors), group.length
