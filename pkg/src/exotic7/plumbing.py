"""First homology of surgery presentations, Hirzebruch-Jung continued
fractions, lens-space boundaries of linear chains, and the C_p chains."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import InputError
from .exact import ExactMatrix, SmithDecomposition, determinant, smith_normal_form, to_rational


@dataclass(frozen=True)
class SurgeryPresentation:
    """Surgery on a link: coefficient p_i/q_i per component and pairwise linking numbers."""

    coefficients: tuple[Fraction, ...]
    linking: ExactMatrix

    def __post_init__(self):
        coeffs = tuple(to_rational(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        lk = self.linking if isinstance(self.linking, ExactMatrix) else ExactMatrix(self.linking, ncols=len(coeffs))
        object.__setattr__(self, "linking", lk)
        n = len(coeffs)
        if lk.shape != (n, n):
            raise InputError(f"linking matrix must be {n}x{n}, got {lk.shape}")
        if not lk.is_integer() or not lk.is_symmetric():
            raise InputError("linking matrix must be symmetric with integer entries")
        if any(lk[i, i] for i in range(n)):
            raise InputError("linking matrix must have zero diagonal")

    @property
    def n(self) -> int:
        return len(self.coefficients)

    @classmethod
    def chain(cls, framings: Sequence) -> "SurgeryPresentation":
        """Linear chain of unknots, each linking its neighbours once."""
        n = len(framings)
        lk = [[1 if abs(i - j) == 1 else 0 for j in range(n)] for i in range(n)]
        return cls(tuple(framings), ExactMatrix(lk, ncols=n))


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """Rows of ``relation_matrix`` are relations, columns are generators."""

    generators: tuple[str, ...]
    relation_matrix: ExactMatrix

    def __post_init__(self):
        if self.relation_matrix.ncols != len(self.generators):
            raise InputError("one relation-matrix column per generator")
        if len(set(self.generators)) != len(self.generators):
            raise InputError("generator names must be distinct")

    @cached_property
    def snf(self) -> SmithDecomposition:
        return smith_normal_form(self.relation_matrix)

    @property
    def torsion(self) -> tuple[int, ...]:
        return self.snf.torsion

    @property
    def free_rank(self) -> int:
        return self.snf.free_rank

    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        return math.prod(self.torsion)

    def describe(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z_{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def coordinates(self, gen: str) -> tuple[int, ...]:
        """Image of ``gen`` in the diagonal basis coming from the Smith form."""
        if gen not in self.generators:
            raise InputError(f"unknown generator {gen!r}")
        k = self.generators.index(gen)
        return tuple(int(x) for x in self.snf.right_transform.row(k))

    def is_cyclic(self) -> bool:
        return self.free_rank + len(self.torsion) <= 1


def h1(pres: SurgeryPresentation, names: Sequence[str] | None = None) -> AbelianGroupPresentation:
    """H_1 of the surgered manifold, presented by the meridians.

    Relation i is p_i mu_i + q_i sum_j lk(K_i, K_j) mu_j = 0; rows are scaled to
    integers only through p_i and q_i."""
    n = pres.n
    names = tuple(names) if names else tuple(f"a{i}" for i in range(n))
    rows = []
    for i, c in enumerate(pres.coefficients):
        p, q = c.numerator, c.denominator
        rows.append([p if j == i else q * int(pres.linking[i, j]) for j in range(n)])
    return AbelianGroupPresentation(names, ExactMatrix(rows, ncols=n))


INFINITE = None


def element_order(pres: AbelianGroupPresentation, gen: str) -> int | None:
    """Order of a generator's image; None for infinite order."""
    coords = pres.coordinates(gen)
    factors = pres.snf.invariant_factors
    if any(coords[j] for j in range(len(factors), len(coords))):
        return INFINITE
    order = 1
    for c, d in zip(coords, factors):
        order = math.lcm(order, d // math.gcd(c, d))
    return order


# -- continued fractions


def hj_expand(p: int, q: int) -> list[int]:
    """p/q = a1 - 1/(a2 - 1/(... - 1/ak)) with every ai >= 2."""
    if not (isinstance(p, int) and isinstance(q, int)) or not 0 < q < p or math.gcd(p, q) != 1:
        raise InputError(f"need coprime 0 < q < p, got p={p}, q={q}")
    out = []
    while q:
        a = -(-p // q)
        out.append(a)
        p, q = q, a * q - p
    return out


def hj_evaluate(coeffs: Sequence[int]) -> Fraction:
    if not coeffs:
        raise InputError("empty continued fraction")
    val = Fraction(coeffs[-1])
    for a in reversed(coeffs[:-1]):
        if val == 0:
            raise InputError("continued fraction hits a zero denominator")
        val = a - 1 / val
    return val


@dataclass(frozen=True)
class LensSpace:
    """L(p, q) with 0 < q < p; ``mirror`` marks the orientation-reversed copy."""

    p: int
    q: int
    mirror: bool = False

    def __post_init__(self):
        if self.p < 1 or math.gcd(self.p, self.q) != 1:
            raise InputError(f"invalid lens space parameters ({self.p}, {self.q})")
        if self.p > 1 and not 0 < self.q < self.p:
            raise InputError(f"lens space q must be reduced to 0 < q < p, got {self.q}")

    @classmethod
    def of(cls, p: int, q: int) -> "LensSpace":
        """Reduce q mod p; a negative q becomes the mirror of L(p, -q)."""
        if q < 0:
            return cls(p, (-q) % p or 1, mirror=True) if p > 1 else cls(1, 1)
        return cls(p, q % p or 1) if p > 1 else cls(1, 1)

    def oriented_q(self) -> int:
        """q of this manifold written as L(p, q') without a mirror flag."""
        return (self.p - self.q) % self.p if self.mirror else self.q

    def reversed(self) -> "LensSpace":
        return LensSpace(self.p, self.q, not self.mirror)

    def homeomorphic(self, other: "LensSpace") -> bool:
        """Unoriented classification: q' = ±q^{±1} mod p."""
        if self.p != other.p:
            return False
        p = self.p
        if p == 1:
            return True
        q, r = self.q, other.q
        inv = pow(q, -1, p)
        return r % p in {q % p, (-q) % p, inv, (-inv) % p}

    def __str__(self) -> str:
        body = f"L({self.p},{self.q})"
        return "-" + body if self.mirror else body


def chain_boundary(framings: Sequence[int]) -> LensSpace:
    """Boundary of the linear plumbing with framings -a1, ..., -ak (all <= -2)."""
    if not framings:
        raise InputError("empty chain")
    if any(f > -2 for f in framings):
        raise InputError("framings must all be <= -2 for the lens-space normal form")
    val = hj_evaluate([-f for f in framings])
    return LensSpace.of(val.numerator, val.denominator)


def chain_gram(framings: Sequence[int]) -> ExactMatrix:
    n = len(framings)
    return ExactMatrix(
        [[framings[i] if i == j else (1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)], ncols=n
    )


@dataclass(frozen=True)
class CpChain:
    """The chain C_p: a -(p+2) sphere followed by p-2 spheres of square -2.

    ``gram`` follows the order of ``framings``. ``configuration_gram`` lists the
    -2 chain first and the -(p+2) sphere last, the order in which the spheres
    are found inside the blown-up elliptic surface."""

    p: int
    framings: tuple[int, ...]
    gram: ExactMatrix

    @property
    def configuration_gram(self) -> ExactMatrix:
        return chain_gram(self.framings[::-1])

    @property
    def boundary(self) -> LensSpace:
        return chain_boundary(self.framings)

    @property
    def det(self) -> int:
        return int(determinant(self.gram))


def build_cp(p: int) -> CpChain:
    if not isinstance(p, int) or p < 2:
        raise InputError(f"C_p needs p >= 2, got {p!r}")
    framings = (-(p + 2),) + (-2,) * (p - 2)
    return CpChain(p, framings, chain_gram(framings))
