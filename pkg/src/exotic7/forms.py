"""Integral symmetric bilinear forms: invariants, indefinite classification,
characteristic vectors, and the homeomorphism / smoothability gates."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import InputError, UndecidedError
from .exact import ExactMatrix, block_diagonal, determinant

# Rows of -E8 in the basis of the plumbing spheres.
_E8_MINUS = [
    [-2, 1, 0, 0, 0, 0, 0, 0],
    [1, -2, 1, 0, 0, 0, 0, 0],
    [0, 1, -2, 1, 0, 0, 0, 0],
    [0, 0, 1, -2, 1, 0, 0, 0],
    [0, 0, 0, 1, -2, 1, 0, 1],
    [0, 0, 0, 0, 1, -2, 1, 0],
    [0, 0, 0, 0, 0, 1, -2, 0],
    [0, 0, 0, 0, 1, 0, 0, -2],
]


@dataclass(frozen=True)
class SymForm:
    matrix: ExactMatrix

    def __post_init__(self):
        m = self.matrix
        if not isinstance(m, ExactMatrix):
            object.__setattr__(self, "matrix", m := ExactMatrix(m))
        if not m.is_square():
            raise InputError(f"form matrix must be square, got {m.shape}")
        if not m.is_integer():
            raise InputError("form matrix must have integer entries")
        if not m.is_symmetric():
            raise InputError("form matrix is not symmetric")

    @classmethod
    def from_rows(cls, rows) -> "SymForm":
        return cls(ExactMatrix(rows))

    @property
    def dim(self) -> int:
        return self.matrix.nrows

    def __call__(self, x: Sequence, y: Sequence):
        return self.matrix.bilinear(x, y)

    def det(self) -> int:
        return int(determinant(self.matrix))

    def is_unimodular(self) -> bool:
        return abs(self.det()) == 1

    def __neg__(self) -> "SymForm":
        return SymForm(-self.matrix)

    def direct_sum(self, other: "SymForm") -> "SymForm":
        return SymForm(block_diagonal(self.matrix, other.matrix))

    def change_basis(self, b: ExactMatrix) -> "SymForm":
        return SymForm(b.transpose() @ self.matrix @ b)


@dataclass(frozen=True)
class FormInvariants:
    rank: int
    signature: int
    b2_plus: int
    b2_minus: int
    parity: str  # "even", "odd", or "undetermined" for bookkeeping results
    definiteness: str  # "positive", "negative", "indefinite"
    det: int

    def __post_init__(self):
        if self.rank != self.b2_plus + self.b2_minus:
            raise InputError("rank must equal b2_plus + b2_minus")
        if self.signature != self.b2_plus - self.b2_minus:
            raise InputError("signature must equal b2_plus - b2_minus")
        if self.definiteness != _definiteness(self.rank, self.signature):
            raise InputError("definiteness is inconsistent with rank and signature")

    @classmethod
    def from_counts(cls, b2_plus: int, b2_minus: int, parity: str) -> "FormInvariants":
        """Invariants of a unimodular form with the given counts of signs."""
        rank = b2_plus + b2_minus
        sig = b2_plus - b2_minus
        return cls(rank, sig, b2_plus, b2_minus, parity, _definiteness(rank, sig), (-1) ** b2_minus)

    @property
    def triple(self) -> tuple[int, int, str]:
        return (self.rank, self.signature, self.parity)

    @property
    def is_definite(self) -> bool:
        return self.definiteness != "indefinite"

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "signature": self.signature,
            "b2_plus": self.b2_plus,
            "b2_minus": self.b2_minus,
            "parity": self.parity,
            "definiteness": self.definiteness,
            "det": self.det,
        }


FormLike = Union[SymForm, FormInvariants]


def _definiteness(rank: int, signature: int) -> str:
    if rank == signature:
        return "positive"
    if rank == -signature:
        return "negative"
    return "indefinite"


def inertia(m: ExactMatrix) -> tuple[int, int, int]:
    """(positive, negative, zero) counts via symmetric congruence over Q."""
    a = [list(r) for r in m.rows]
    pos = neg = 0
    while a:
        n = len(a)
        piv = next((i for i in range(n) if a[i][i]), None)
        if piv is not None:
            d = a[piv][piv]
            if d > 0:
                pos += 1
            else:
                neg += 1
            keep = [i for i in range(n) if i != piv]
            a = [[a[r][s] - a[r][piv] * a[piv][s] / d for s in keep] for r in keep]
            continue
        pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if a[i][j]), None)
        if pair is None:
            break
        # zero diagonal with a nonzero off-diagonal entry: a hyperbolic block
        i, j = pair
        c = a[i][j]
        pos += 1
        neg += 1
        keep = [k for k in range(n) if k not in pair]
        a = [[a[r][s] - (a[r][i] * a[j][s] + a[r][j] * a[i][s]) / c for s in keep] for r in keep]
    return pos, neg, len(a)


def invariants(q: SymForm) -> FormInvariants:
    if not isinstance(q, SymForm):
        q = SymForm(q)
    pos, neg, _ = inertia(q.matrix)
    parity = "even" if all(q.matrix[i, i].numerator % 2 == 0 for i in range(q.dim)) else "odd"
    rank = pos + neg
    return FormInvariants(
        rank=rank,
        signature=pos - neg,
        b2_plus=pos,
        b2_minus=neg,
        parity=parity,
        definiteness=_definiteness(rank, pos - neg),
        det=q.det(),
    )


def _as_invariants(q: FormLike) -> FormInvariants:
    if isinstance(q, FormInvariants):
        if abs(q.det) != 1:
            raise InputError("form is not unimodular")
        return q
    if not isinstance(q, SymForm):
        q = SymForm(q)
    inv = invariants(q)
    if abs(inv.det) != 1:
        raise InputError(f"form is not unimodular (det {inv.det})")
    return inv


def indefinite_equivalent(q1: FormLike, q2: FormLike) -> bool:
    """Equivalence of unimodular forms when at least one is indefinite: the
    classification by rank, signature and parity."""
    i1, i2 = _as_invariants(q1), _as_invariants(q2)
    if i1.is_definite and i2.is_definite:
        raise InputError("both forms are definite; rank, signature and parity do not classify them")
    return (not i1.is_definite) and (not i2.is_definite) and i1.triple == i2.triple


def congruence_witness(q1: SymForm, q2: SymForm, bound: int = 2) -> ExactMatrix | None:
    """Search integer B with entries in [-bound, bound], det B = ±1, and
    B^T q1 B = q2. Exhaustive, so only sensible for tiny ranks."""
    n = q1.dim
    if q2.dim != n:
        return None
    rng = range(-bound, bound + 1)
    for entries in itertools.product(rng, repeat=n * n):
        b = ExactMatrix([entries[i * n:(i + 1) * n] for i in range(n)], ncols=n)
        if abs(determinant(b)) == 1 and q1.change_basis(b).matrix == q2.matrix:
            return b
    return None


def freedman_homeomorphic(q1: FormLike, q2: FormLike, both_smooth: bool = True) -> bool:
    """Homeomorphism decision for closed simply connected smooth 4-manifolds,
    read off from their intersection forms."""
    i1, i2 = _as_invariants(q1), _as_invariants(q2)
    if not (i1.is_definite and i2.is_definite):
        return both_smooth and indefinite_equivalent(i1, i2)
    if i1.triple != i2.triple:
        return False
    if i1.rank > 2:
        raise UndecidedError(f"equivalence of definite forms of rank {i1.rank} is not decided here")
    if not (isinstance(q1, SymForm) and isinstance(q2, SymForm)):
        raise InputError("definite comparison needs the form matrices, not only invariants")
    return both_smooth and congruence_witness(q1, q2) is not None


def is_characteristic(x: Sequence[int], q: SymForm) -> bool:
    if len(x) != q.dim:
        raise InputError(f"vector has length {len(x)}, form has rank {q.dim}")
    m = q.matrix
    for i in range(q.dim):
        s = sum(int(xj) * m[j, i] for j, xj in enumerate(x))
        if (s - m[i, i]) % 2:
            return False
    return True


def characteristic_mod2(q: SymForm) -> tuple[int, ...]:
    """The characteristic class reduced mod 2: solve Q x = diag(Q) over GF(2)."""
    n = q.dim
    m = q.matrix
    rows = [[int(m[i, j]) % 2 for j in range(n)] + [int(m[i, i]) % 2] for i in range(n)]
    r = 0
    pivots = []
    for c in range(n):
        piv = next((i for i in range(r, n) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(n):
            if i != r and rows[i][c]:
                rows[i] = [a ^ b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if r < n:
        raise InputError("form is degenerate mod 2")
    x = [0] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][n]
    return tuple(x)


@dataclass(frozen=True)
class ObstructionReport:
    parity: str
    signature: int
    rohlin: str  # "pass", "fail", "not-applicable"
    characteristic_checks: tuple[tuple[tuple[int, ...], int, bool], ...]

    @property
    def mod8_holds(self) -> bool:
        return all(ok for _, _, ok in self.characteristic_checks)

    def to_json(self) -> dict:
        return {
            "parity": self.parity,
            "signature": self.signature,
            "rohlin": self.rohlin,
            "mod8_holds": self.mod8_holds,
            "characteristic_checks": [
                {"x": list(x), "square": sq, "congruent_mod8": ok} for x, sq, ok in self.characteristic_checks
            ],
        }


def smoothability_obstructions(q: SymForm) -> ObstructionReport:
    inv = _as_invariants(q)
    if inv.parity == "even":
        rohlin = "pass" if inv.signature % 16 == 0 else "fail"
    else:
        rohlin = "not-applicable"
    n = q.dim
    x0 = characteristic_mod2(q)
    probes = [x0]
    for i in range(n):
        for s in (2, -2):
            probes.append(tuple(v + s * (k == i) for k, v in enumerate(x0)))
    for i, j in itertools.combinations(range(n), 2):
        probes.append(tuple(v + 2 * (k in (i, j)) for k, v in enumerate(x0)))
    checks = []
    for x in probes:
        sq = int(q(x, x))
        checks.append((x, sq, (sq - inv.signature) % 8 == 0))
    return ObstructionReport(inv.parity, inv.signature, rohlin, tuple(checks))


# -- named forms

def e8_minus() -> SymForm:
    return SymForm(ExactMatrix(_E8_MINUS))


def hyperbolic() -> SymForm:
    return SymForm(ExactMatrix([[0, 1], [1, 0]]))


def diagonal_form(entries: Sequence[int]) -> SymForm:
    return SymForm(ExactMatrix.diagonal(list(entries)))


def blown_up_plane(n: int) -> SymForm:
    """Form of CP^2 # n(-CP^2): diag(1, -1, ..., -1)."""
    return diagonal_form([1] + [-1] * n)


_DIAG_RE = re.compile(r"^diag\((.*)\)$")
_ENTRY_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:\^\s*(\d+))?\s*$")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "(<":
            depth += 1
        elif ch in ")>":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def _named_summand(token: str) -> SymForm:
    t = token.strip()
    if t in ("E8-", "-E8"):
        return e8_minus()
    if t == "E8":
        return -e8_minus()
    if t == "H":
        return hyperbolic()
    if t.startswith("<") and t.endswith(">"):
        return diagonal_form([int(t[1:-1])])
    m = _DIAG_RE.match(t)
    if m:
        entries = []
        for item in m.group(1).split(","):
            em = _ENTRY_RE.match(item)
            if not em:
                raise InputError(f"bad diag entry {item!r}")
            entries += [int(em.group(1))] * int(em.group(2) or 1)
        return diagonal_form(entries)
    raise InputError(f"unknown named form {token!r}")


def parse_form(text: str) -> SymForm:
    """A JSON matrix literal, or named summands joined by '+':
    ``E8-``, ``E8``, ``H``, ``<k>``, ``diag(1,-1^7)``."""
    s = text.strip()
    if s.startswith("["):
        return SymForm(ExactMatrix.from_json(s))
    forms = [_named_summand(part) for part in _split_top(s.replace("⊕", "+"), "+")]
    out = forms[0]
    for f in forms[1:]:
        out = out.direct_sum(f)
    return out
