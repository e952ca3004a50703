"""Exact arithmetic: rationals, dense matrices, Smith normal form and sparse
multivariate polynomials over Q with resultants and rational root finding.

Rationals are ``fractions.Fraction``; nothing in this module touches floats.
"""
from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InputError, SingularMatrixError

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def to_rational(value) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to a Fraction. Floats are refused."""
    if isinstance(value, bool):
        raise InputError(f"boolean is not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise InputError(f"not a rational literal: {value!r}")
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise InputError(f"zero denominator in {value!r}")
        return Fraction(int(m.group(1)), den)
    raise InputError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def rational_json(q: Fraction):
    """Integers serialize as JSON ints, everything else as "p/q" strings."""
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else str(q)


# ---------------------------------------------------------------------------
# matrices


class ExactMatrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(to_rational(x) for x in row) for row in rows)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise InputError("matrix rows have different lengths")
            if ncols is not None and ncols != width:
                raise InputError("ncols does not match row length")
        else:
            width = ncols or 0
        self._rows = data
        self.nrows = len(data)
        self.ncols = width

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def zeros(cls, r: int, c: int) -> "ExactMatrix":
        return cls([[0] * c for _ in range(r)], ncols=c)

    @classmethod
    def diagonal(cls, entries: Sequence) -> "ExactMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def from_json(cls, obj) -> "ExactMatrix":
        """Build from a JSON text or an already decoded list of lists."""
        if isinstance(obj, str):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError as exc:
                raise InputError(f"matrix literal is not valid JSON: {exc}") from None
        if not isinstance(obj, list) or any(not isinstance(r, list) for r in obj):
            raise InputError("matrix literal must be an array of arrays")
        return cls(obj)

    def to_json(self) -> list:
        return [[rational_json(x) for x in row] for row in self._rows]

    @property
    def rows(self) -> tuple:
        return self._rows

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([self.col(j) for j in range(self.ncols)], ncols=self.nrows)

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_integer(self) -> bool:
        return all(x.denominator == 1 for row in self._rows for x in row)

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self._rows[i][j] == self._rows[j][i] for i in range(self.nrows) for j in range(i)
        )

    def _check_same_shape(self, other: "ExactMatrix"):
        if self.shape != other.shape:
            raise InputError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        return ExactMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)], ncols=self.ncols
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-a for a in r] for r in self._rows], ncols=self.ncols)

    def scale(self, c) -> "ExactMatrix":
        c = to_rational(c)
        return ExactMatrix([[c * a for a in r] for r in self._rows], ncols=self.ncols)

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.ncols != other.nrows:
                raise InputError(f"cannot multiply {self.shape} by {other.shape}")
            cols = [other.col(j) for j in range(other.ncols)]
            return ExactMatrix(
                [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self._rows],
                ncols=other.ncols,
            )
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise InputError("vector length does not match matrix")
        return tuple(sum((a * b for a, b in zip(r, vec)), Fraction(0)) for r in self._rows)

    def bilinear(self, x: Sequence, y: Sequence):
        """x^T M y. Entries of x and y may be anything that multiplies with Fractions."""
        total = 0
        for i, xi in enumerate(x):
            for j, yj in enumerate(y):
                mij = self._rows[i][j]
                if mij:
                    total = total + xi * mij * yj
        return total

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.to_json()!r})"

    def int_rows(self) -> list[list[int]]:
        if not self.is_integer():
            raise InputError("matrix has non-integer entries")
        return [[int(x) for x in r] for r in self._rows]


def block_diagonal(*blocks: ExactMatrix) -> ExactMatrix:
    n = sum(b.nrows for b in blocks)
    out = [[Fraction(0)] * n for _ in range(n)]
    k = 0
    for b in blocks:
        if not b.is_square():
            raise InputError("direct sum needs square blocks")
        for i in range(b.nrows):
            for j in range(b.ncols):
                out[k + i][k + j] = b[i, j]
        k += b.nrows
    return ExactMatrix(out, ncols=n)


def _bareiss(a: list[list], div) -> object:
    """Fraction-free determinant over an integral domain; ``div`` is exact division."""
    n = len(a)
    if n == 0:
        return 1
    a = [list(r) for r in a]
    sign = 1
    prev = None
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return a[k][k] * 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                v = row_i[j] * akk - aik * row_k[j]
                row_i[j] = v if prev is None else div(v, prev)
        prev = akk
    d = a[n - 1][n - 1]
    return d if sign == 1 else -d


def determinant(m: ExactMatrix) -> Fraction:
    if not m.is_square():
        raise InputError(f"determinant needs a square matrix, got {m.shape}")
    if m.is_integer():
        return Fraction(_bareiss(m.int_rows(), lambda a, b: a // b))
    # rational elimination
    a = [list(r) for r in m.rows]
    n = m.nrows
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            if a[i][k]:
                f = a[i][k] / a[k][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return det


def invert(m: ExactMatrix) -> ExactMatrix:
    if not m.is_square():
        raise InputError(f"only square matrices can be inverted, got {m.shape}")
    n = m.nrows
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m.rows)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return ExactMatrix([r[n:] for r in a], ncols=n)


def rank(m: ExactMatrix) -> int:
    a = [list(r) for r in m.rows]
    r = 0
    for c in range(m.ncols):
        piv = next((i for i in range(r, m.nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, m.nrows):
            if a[i][c]:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``left @ m @ right`` is diagonal with ``invariant_factors`` then zeros.

    The matrix is read as a presentation: rows are relations, columns are
    generators, so the presented group is Z^free_rank + sum of Z/d.
    """

    invariant_factors: tuple[int, ...]
    free_rank: int
    left_transform: ExactMatrix
    right_transform: ExactMatrix

    def diagonal(self, nrows: int, ncols: int) -> ExactMatrix:
        out = [[0] * ncols for _ in range(nrows)]
        for i, d in enumerate(self.invariant_factors):
            out[i][i] = d
        return ExactMatrix(out, ncols=ncols)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d != 1)


def smith_normal_form(m: ExactMatrix) -> SmithDecomposition:
    a = m.int_rows() if m.is_integer() else None
    if a is None:
        raise InputError("Smith normal form needs integer entries")
    r, c = m.nrows, m.ncols
    left = [[int(i == j) for j in range(r)] for i in range(r)]
    right = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        left[i], left[k] = left[k], left[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in right:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, f):
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x + f * y for x, y in zip(left[dst], left[src])]

    def add_col(dst, src, f):
        for row in a:
            row[dst] += f * row[src]
        for row in right:
            row[dst] += f * row[src]

    def smallest(cells):
        best = None
        for i, j in cells:
            v = abs(a[i][j])
            if v and (best is None or v < best[0]):
                best = (v, i, j)
        return best

    t = 0
    while t < min(r, c):
        found = smallest((i, j) for i in range(t, r) for j in range(t, c))
        if found is None:
            break
        _, i, j = found
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
            line = [(t, j) for j in range(t + 1, c)] + [(i, t) for i in range(t + 1, r)]
            found = smallest(line)
            if found is not None:
                _, i, j = found
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
        t += 1

    factors = tuple(a[i][i] for i in range(min(r, c)) if a[i][i])
    return SmithDecomposition(
        invariant_factors=factors,
        free_rank=c - len(factors),
        left_transform=ExactMatrix(left, ncols=r),
        right_transform=ExactMatrix(right, ncols=c),
    )


# ---------------------------------------------------------------------------
# polynomials


def _ordered(variables: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(variables)))


class MPoly:
    """Sparse polynomial over Q. Variables are kept in sorted order; terms map
    exponent tuples to nonzero Fractions."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Iterable[str] = (), terms: Mapping | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise InputError(f"repeated variable in {variables}")
        order = sorted(range(len(variables)), key=lambda k: variables[k])
        clean: dict[tuple, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != len(variables) or any(e < 0 for e in exps):
                raise InputError(f"bad exponent tuple {exps} for variables {variables}")
            coeff = to_rational(coeff)
            if coeff:
                key = tuple(exps[k] for k in order)
                clean[key] = clean.get(key, Fraction(0)) + coeff
                if not clean[key]:
                    del clean[key]
        self.variables = tuple(variables[k] for k in order)
        self.terms = clean

    @classmethod
    def _raw(cls, variables: tuple, terms: dict) -> "MPoly":
        p = object.__new__(cls)
        p.variables = variables
        p.terms = terms
        return p

    @classmethod
    def constant(cls, c, variables: Iterable[str] = ()) -> "MPoly":
        variables = _ordered(variables)
        c = to_rational(c)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def var(cls, name: str, variables: Iterable[str] = ()) -> "MPoly":
        variables = _ordered(list(variables) + [name])
        k = variables.index(name)
        return cls._raw(variables, {tuple(int(i == k) for i in range(len(variables))): Fraction(1)})

    @classmethod
    def parse(cls, text: str) -> "MPoly":
        return parse_poly(text)

    # -- variable bookkeeping
    def with_variables(self, variables: Iterable[str]) -> "MPoly":
        target = _ordered(variables)
        missing = set(self.variables) - set(target)
        if missing:
            live = {v for v in missing if self.degree(v) > 0}
            if live:
                raise InputError(f"cannot drop variables {sorted(live)} still in use")
        idx = [self.variables.index(v) if v in self.variables else None for v in target]
        terms = {tuple(e[k] if k is not None else 0 for k in idx): c for e, c in self.terms.items()}
        return MPoly._raw(target, terms)

    def used_variables(self) -> tuple[str, ...]:
        return tuple(v for k, v in enumerate(self.variables) if any(e[k] for e in self.terms))

    def trimmed(self) -> "MPoly":
        return self.with_variables(self.used_variables())

    def _align(self, other) -> tuple["MPoly", "MPoly"]:
        if not isinstance(other, MPoly):
            other = MPoly.constant(other, self.variables)
        if self.variables == other.variables:
            return self, other
        vs = _ordered(self.variables + other.variables)
        return self.with_variables(vs), other.with_variables(vs)

    # -- arithmetic
    def __add__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = MPoly.constant(other, self.variables)
        elif not isinstance(other, MPoly):
            return NotImplemented
        a, b = self._align(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return MPoly._raw(a.variables, terms)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        if not isinstance(other, (MPoly, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MPoly":
        return (-self) + other

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = Fraction(other)
            if not c:
                return MPoly._raw(self.variables, {})
            return MPoly._raw(self.variables, {e: c * v for e, v in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        a, b = self._align(other)
        terms: dict[tuple, Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MPoly._raw(a.variables, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if not other.is_constant():
                raise InputError("division by a non-constant polynomial")
            other = other.constant_value()
        c = to_rational(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (1 / c)

    def __pow__(self, k: int) -> "MPoly":
        if not isinstance(k, int) or k < 0:
            raise InputError(f"exponent must be a non-negative integer, got {k!r}")
        result = MPoly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = MPoly.constant(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self) -> int:
        t = self.trimmed()
        return hash((t.variables, frozenset(t.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- inspection
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InputError("polynomial is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def degree(self, var: str) -> int:
        """Degree in ``var``; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var not in self.variables:
            return 0
        k = self.variables.index(var)
        return max(e[k] for e in self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if len(degs) > 1:
            return False
        return degree is None or degs <= {degree}

    def leading_term(self) -> tuple[tuple, Fraction]:
        e = max(self.terms)
        return e, self.terms[e]

    def coefficients_in(self, var: str) -> list["MPoly"]:
        """[c0, c1, ...] with self = sum c_k var^k; the c_k live in the other variables."""
        if var not in self.variables:
            return [self]
        k = self.variables.index(var)
        rest = self.variables[:k] + self.variables[k + 1:]
        buckets: dict[int, dict] = {}
        for e, c in self.terms.items():
            buckets.setdefault(e[k], {})[e[:k] + e[k + 1:]] = c
        top = max(buckets, default=0)
        return [MPoly._raw(rest, buckets.get(d, {})) for d in range(top + 1)]

    def diff(self, var: str) -> "MPoly":
        if var not in self.variables:
            return MPoly._raw(self.variables, {})
        k = self.variables.index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[k]:
                terms[e[:k] + (e[k] - 1,) + e[k + 1:]] = c * e[k]
        return MPoly._raw(self.variables, terms)

    def subs(self, values: Mapping[str, object]) -> "MPoly":
        """Substitute Fractions or polynomials for variables."""
        values = {v: x for v, x in values.items() if v in self.variables}
        if not values:
            return self
        keep = [v for v in self.variables if v not in values]
        result = MPoly.constant(0, keep)
        idx = {v: self.variables.index(v) for v in self.variables}
        powers: dict[tuple[str, int], object] = {}

        def power(v, n):
            key = (v, n)
            if key not in powers:
                x = values[v]
                powers[key] = x ** n if isinstance(x, MPoly) else to_rational(x) ** n
            return powers[key]

        for e, c in self.terms.items():
            mono = {}
            factor = c
            for v in self.variables:
                n = e[idx[v]]
                if not n:
                    continue
                if v in values:
                    factor = factor * power(v, n)
                else:
                    mono[v] = n
            base = MPoly._raw(tuple(keep), {tuple(mono.get(v, 0) for v in keep): Fraction(1)})
            result = result + base * factor
        return result

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        missing = set(self.used_variables()) - set(point)
        if missing:
            raise InputError(f"no value for {sorted(missing)}")
        return self.subs(point).constant_value()

    def exact_div(self, other: "MPoly") -> "MPoly":
        """Quotient of an exact division; raises ArithmeticError if there is a remainder."""
        if isinstance(other, (int, Fraction)):
            return self / other
        a, b = self._align(other)
        if not b.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if b.is_constant():
            return a / b.constant_value()
        lead_e, lead_c = b.leading_term()
        rem = dict(a.terms)
        quot: dict[tuple, Fraction] = {}
        while rem:
            e = max(rem)
            d = tuple(x - y for x, y in zip(e, lead_e))
            if any(x < 0 for x in d):
                raise ArithmeticError("polynomial division is not exact")
            qc = rem[e] / lead_c
            quot[d] = qc
            for be, bc in b.terms.items():
                key = tuple(x + y for x, y in zip(d, be))
                v = rem.get(key, 0) - qc * bc
                if v:
                    rem[key] = v
                else:
                    rem.pop(key, None)
        return MPoly._raw(a.variables, quot)

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(0)
        nums = [c.numerator for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        return Fraction(math.gcd(*nums), math.lcm(*dens))

    def primitive(self) -> "MPoly":
        """Integer coefficients, gcd 1, positive leading coefficient."""
        if not self.terms:
            return self
        p = self / self.content()
        return -p if p.leading_term()[1] < 0 else p

    def monic(self) -> "MPoly":
        return self / self.leading_term()[1]

    # -- printing
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                v if n == 1 else f"{v}^{n}" for v, n in zip(self.variables, e) if n
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"MPoly({str(self)!r})"


# -- polynomial parser

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-z])|([-+*/^()]))")


class _PolyParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip() == "":
                    break
                raise InputError(f"unexpected character {text[pos]!r} at position {pos}")
            start = m.start(m.lastindex)
            kind = ("num", "var", "op")[m.lastindex - 1]
            self.tokens.append((kind, m.group(m.lastindex), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.take()
        if v != value:
            raise InputError(f"expected {value!r} at position {pos}")

    def parse(self) -> MPoly:
        if not self.tokens:
            raise InputError("empty polynomial")
        p = self.expr()
        kind, v, pos = self.peek()
        if kind is not None:
            raise InputError(f"unexpected {v!r} at position {pos}")
        return p

    def expr(self) -> MPoly:
        p = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MPoly:
        p = self.unary()
        while True:
            kind, v, pos = self.peek()
            if v == "*":
                self.take()
                p = p * self.unary()
            elif v == "/":
                self.take()
                q = self.unary()
                if not q.is_constant() or q.is_zero():
                    raise InputError(f"division by non-constant or zero at position {pos}")
                p = p / q.constant_value()
            elif kind == "var" or v == "(":
                p = p * self.unary()
            else:
                return p

    def unary(self) -> MPoly:
        v = self.peek()[1]
        if v == "-":
            self.take()
            return -self.unary()
        if v == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> MPoly:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, v, pos = self.take()
            if kind != "num":
                raise InputError(f"expected a non-negative integer exponent at position {pos}")
            base = base ** int(v)
        return base

    def atom(self) -> MPoly:
        kind, v, pos = self.take()
        if kind == "num":
            return MPoly.constant(int(v))
        if kind == "var":
            return MPoly.var(v)
        if v == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise InputError(f"unexpected {v or 'end of input'!r} at position {pos}")


def parse_poly(text: str, variables: Iterable[str] = ()) -> MPoly:
    """Parse e.g. ``-2*x^3*y + 4/27*z^3`` or ``(y+z/2)^3``; optionally embed into
    a fixed variable set."""
    p = _PolyParser(text).parse()
    if variables:
        p = p.with_variables(list(variables) + list(p.used_variables()))
    return p


# -- elimination


def sylvester_matrix(f: MPoly, g: MPoly, var: str) -> list[list[MPoly]]:
    fc = f.coefficients_in(var)[::-1]
    gc = g.coefficients_in(var)[::-1]
    m, n = len(fc) - 1, len(gc) - 1
    size = m + n
    zero = MPoly.constant(0, [v for v in f.variables if v != var])
    rows = []
    for i in range(n):
        rows.append([zero] * i + fc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + gc + [zero] * (size - n - 1 - i))
    return rows


def resultant(f: MPoly, g: MPoly, var: str) -> MPoly:
    """Sylvester resultant of f and g with respect to ``var``."""
    if not isinstance(f, MPoly) or not isinstance(g, MPoly):
        raise InputError("resultant needs polynomials")
    if f.is_zero() or g.is_zero():
        raise InputError("resultant of a zero polynomial")
    f, g = f._align(g)
    if var not in f.variables:
        raise InputError(f"variable {var!r} does not occur among {f.variables}")
    rest = tuple(v for v in f.variables if v != var)
    rows = sylvester_matrix(f, g, var)
    if not rows:
        return MPoly.constant(1, rest)
    if all(x.is_constant() for r in rows for x in r):
        return MPoly.constant(
            _bareiss([[x.constant_value() for x in r] for r in rows], lambda a, b: a / b), rest
        )
    return _bareiss(rows, lambda a, b: a.exact_div(b)).with_variables(rest)


# -- univariate helpers (dense Fraction lists, constant term first)


def _univariate(f: MPoly) -> tuple[str | None, list[Fraction]]:
    used = f.used_variables()
    if len(used) > 1:
        raise InputError(f"expected a univariate polynomial, got variables {used}")
    if f.is_zero():
        raise InputError("zero polynomial")
    if not used:
        return None, [f.constant_value()]
    var = used[0]
    return var, [c.constant_value() if c else Fraction(0) for c in f.trimmed().coefficients_in(var)]


def _from_dense(var: str | None, coeffs: Sequence[Fraction]) -> MPoly:
    if var is None:
        return MPoly.constant(coeffs[0] if coeffs else 0)
    return MPoly([var], {(k,): c for k, c in enumerate(coeffs) if c})


def _strip(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


def _udivmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    a = _strip(list(a))
    b = _strip(list(b))
    if not b:
        raise ZeroDivisionError("univariate division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for k, c in enumerate(b):
            a[k + shift] -= f * c
        _strip(a)
    return q, a


def _ugcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a = _strip(list(a))
    b = _strip(list(b))
    while b:
        _, r = _udivmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def _uderiv(a: Sequence[Fraction]) -> list[Fraction]:
    return [k * c for k, c in enumerate(a)][1:]


def poly_gcd(f: MPoly, g: MPoly) -> MPoly:
    """Monic gcd of two univariate polynomials in the same variable (or constants)."""
    vf, a = _univariate(f)
    vg, b = _univariate(g)
    if vf and vg and vf != vg:
        raise InputError("gcd of polynomials in different variables")
    return _from_dense(vf or vg, _ugcd(a, b))


def squarefree_part(f: MPoly) -> MPoly:
    """Monic product of the distinct irreducible factors of a univariate f."""
    var, a = _univariate(f)
    if len(a) == 1:
        return MPoly.constant(1)
    g = _ugcd(a, _uderiv(a))
    q, r = _udivmod(a, g)
    lead = q[-1]
    return _from_dense(var, [c / lead for c in q])


def poly_divide(f: MPoly, g: MPoly) -> tuple[MPoly, MPoly]:
    vf, a = _univariate(f)
    vg, b = _univariate(g)
    var = vf or vg
    q, r = _udivmod(a, b)
    return _from_dense(var, q), (_from_dense(var, r) if r else MPoly.constant(0))


# -- integer factorization for divisor enumeration


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| (deterministic: the rho seed is fixed)."""
    n = abs(n)
    if n == 0:
        raise InputError("cannot factor zero")
    out: dict[int, int] = {}
    for p in range(2, 1000):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        if n == 1:
            return out
    rng = random.Random(0x5EED)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_brent(m, rng)
        stack += [d, m // d]
    return dict(sorted(out.items()))


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, k in factorize(n).items():
        divs = [d * p ** i for d in divs for i in range(k + 1)]
    return sorted(divs)


def rational_roots(f: MPoly) -> set[Fraction]:
    """All rational roots of a nonzero univariate polynomial."""
    var, a = _univariate(f)
    roots: set[Fraction] = set()
    if len(a) == 1:
        return roots
    # square-free part keeps the candidate search small without losing roots
    g = _ugcd(a, _uderiv(a))
    a, _ = _udivmod(a, g)
    lcm = math.lcm(*(c.denominator for c in a))
    ints = [int(c * lcm) for c in a]
    if ints[0] == 0:
        roots.add(Fraction(0))
        while ints and ints[0] == 0:
            ints.pop(0)
    if len(ints) <= 1:
        return roots
    lead, const = ints[-1], ints[0]
    dens = divisors(lead)
    nums = divisors(const)

    def value(x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(ints):
            acc = acc * x + c
        return acc

    for p in nums:
        for q in dens:
            if math.gcd(p, q) != 1:
                continue
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if value(cand) == 0:
                    roots.add(cand)
    return roots
