"""Singular members of pencils of plane cubics, found exactly.

A pencil is t0*p0 + t1*p1. Singular points are solved chart by chart with
the ratio alpha = t0/t1 as an extra unknown: resultants eliminate the affine
coordinates, rational roots give candidates, and every candidate is checked by
substitution. Whatever is not rational is returned with its eliminant."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import InputError
from .exact import (
    MPoly,
    parse_poly,
    poly_divide,
    poly_gcd,
    rational_roots,
    resultant,
    squarefree_part,
    to_rational,
)

XYZ = ("x", "y", "z")
# each chart sets one coordinate to 1; order fixed for deterministic output
CHARTS = (("z", ("x", "y")), ("y", ("x", "z")), ("x", ("y", "z")))
ALPHA = "alpha"


@dataclass(frozen=True)
class PencilParam:
    t0: Fraction
    t1: Fraction

    def __post_init__(self):
        t0, t1 = to_rational(self.t0), to_rational(self.t1)
        if t0 == 0 and t1 == 0:
            raise InputError("[0:0] is not a point of the parameter line")
        if t1 != 0:
            t0, t1 = t0 / t1, Fraction(1)
        else:
            t0 = Fraction(1)
        object.__setattr__(self, "t0", t0)
        object.__setattr__(self, "t1", t1)

    @classmethod
    def parse(cls, text: str) -> "PencilParam":
        parts = text.strip().strip("[]").split(":")
        if len(parts) != 2:
            raise InputError(f"parameter must look like [t0:t1], got {text!r}")
        return cls(to_rational(parts[0]), to_rational(parts[1]))

    @property
    def is_endpoint(self) -> bool:
        return self.t0 == 0 or self.t1 == 0

    def __str__(self) -> str:
        return f"[{self.t0}:{self.t1}]"


@dataclass(frozen=True)
class ProjPoint:
    """Rational point of the projective plane. Stored with its last nonzero
    coordinate equal to 1; compared by the first-nonzero normalization."""

    coords: tuple[Fraction, Fraction, Fraction]

    def __post_init__(self):
        c = tuple(to_rational(v) for v in self.coords)
        if len(c) != 3 or not any(c):
            raise InputError(f"not a projective point: {self.coords!r}")
        last = next(v for v in reversed(c) if v)
        object.__setattr__(self, "coords", tuple(v / last for v in c))

    @classmethod
    def parse(cls, text: str) -> "ProjPoint":
        parts = text.strip().strip("[]").split(":")
        if len(parts) != 3:
            raise InputError(f"point must look like [x:y:z], got {text!r}")
        return cls(tuple(to_rational(p) for p in parts))

    def key(self) -> tuple[Fraction, ...]:
        first = next(v for v in self.coords if v)
        return tuple(v / first for v in self.coords)

    def __eq__(self, other) -> bool:
        return isinstance(other, ProjPoint) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def as_dict(self) -> dict:
        return dict(zip(XYZ, self.coords))

    def __str__(self) -> str:
        return "[" + ":".join(str(v) for v in self.coords) + "]"


def _cubic(p: MPoly, label: str) -> MPoly:
    if not isinstance(p, MPoly):
        p = parse_poly(p)
    extra = set(p.used_variables()) - set(XYZ)
    if extra:
        raise InputError(f"{label} uses variables {sorted(extra)}; only x, y, z are allowed")
    p = p.with_variables(XYZ)
    if p.is_zero() or not p.is_homogeneous(3):
        raise InputError(f"{label} must be a nonzero homogeneous cubic")
    return p


@dataclass(frozen=True)
class CubicPencil:
    p0: MPoly
    p1: MPoly

    def __post_init__(self):
        object.__setattr__(self, "p0", _cubic(self.p0, "p0"))
        object.__setattr__(self, "p1", _cubic(self.p1, "p1"))

    @classmethod
    def parse(cls, p0: str, p1: str) -> "CubicPencil":
        return cls(parse_poly(p0), parse_poly(p1))


def member(pencil: CubicPencil, param: PencilParam) -> MPoly:
    return pencil.p0 * param.t0 + pencil.p1 * param.t1


# -- exact zero-dimensional solving


def _tidy(polys) -> list[MPoly]:
    out: list[MPoly] = []
    for p in polys:
        if p.is_zero():
            continue
        p = p.primitive()
        if p not in out:
            out.append(p)
    return out


def eliminate(polys: Sequence[MPoly], var: str) -> list[MPoly]:
    """Polynomials free of ``var`` vanishing on the projection of the common zeros."""
    free = [p for p in polys if p.degree(var) <= 0]
    dep = [p for p in polys if p.degree(var) > 0]
    res = [resultant(f, g, var) for f, g in combinations(dep, 2)]
    return _tidy(free + [r.with_variables(set(r.variables) - {var}) for r in res])


def _univariate_eliminant(polys: Sequence[MPoly], var: str, others: Sequence[str]) -> MPoly | None:
    """gcd of the univariate consequences in ``var``, over two elimination orders.

    None means elimination produced no constraint at all."""
    found: list[MPoly] = []
    orders = [list(others)]
    if len(others) > 1:
        orders.append(list(others)[::-1])
    for order in orders:
        cur = list(polys)
        for v in order:
            cur = eliminate(cur, v)
        found += [p for p in cur if set(p.used_variables()) <= {var}]
    if not found:
        return None
    g = found[0]
    for p in found[1:]:
        g = poly_gcd(g, p)
    return g


@dataclass(frozen=True)
class Unresolved:
    """Part of a solution set that is not rational (or not zero dimensional)."""

    assignment: tuple[tuple[str, Fraction], ...]
    variable: str
    eliminant: MPoly | None  # None: no constraint could be derived

    def to_json(self) -> dict:
        return {
            "fixed": {k: str(v) for k, v in self.assignment},
            "variable": self.variable,
            "eliminant": None if self.eliminant is None else str(self.eliminant),
        }


def solve_rational(polys: Sequence[MPoly], order: Sequence[str]):
    """All rational common zeros of ``polys`` in the variables ``order``.

    Returns (solutions, unresolved). Solutions are dicts and satisfy every
    polynomial exactly."""
    polys = _tidy(polys)
    if any(p.is_constant() for p in polys):
        return [], []
    if not order:
        return [{}], []
    var, rest = order[0], list(order[1:])
    elim = _univariate_eliminant(polys, var, rest)
    if elim is None:
        return [], [Unresolved((), var, None)]
    if elim.is_constant():
        return [], []
    roots = sorted(rational_roots(elim))
    unresolved = []
    left = squarefree_part(elim)
    for r in roots:
        left, _ = poly_divide(left, MPoly.var(var) - r)
    if not left.is_constant():
        unresolved.append(Unresolved((), var, left.monic()))
    solutions = []
    for r in roots:
        sub = [p.subs({var: r}) for p in polys]
        sols, unres = solve_rational(sub, rest)
        for s in sols:
            s = {var: r, **s}
            if all(p.evaluate(s) == 0 for p in polys):
                solutions.append(s)
        unresolved += [Unresolved(((var, r),) + u.assignment, u.variable, u.eliminant) for u in unres]
    return solutions, unresolved


# -- single curves


def dehomogenize(f: MPoly, chart: str) -> MPoly:
    return f.subs({chart: Fraction(1)})


def has_multiple_component(f: MPoly) -> bool:
    """True when f has a repeated factor (its singular locus is a curve)."""
    for chart, (u, v) in CHARTS:
        g = dehomogenize(f, chart)
        for w in (u, v):
            if g.degree(w) > 0 and resultant(g, g.diff(w), w).is_zero():
                return True
    return False


def _homogenize(chart: str, uv: Sequence[str], sol: dict) -> ProjPoint:
    vals = {chart: Fraction(1), uv[0]: sol[uv[0]], uv[1]: sol[uv[1]]}
    return ProjPoint(tuple(vals[c] for c in XYZ))


def is_singular_at(f: MPoly, pt: ProjPoint) -> bool:
    vals = pt.as_dict()
    return f.evaluate(vals) == 0 and all(f.diff(c).evaluate(vals) == 0 for c in XYZ)


def singular_points(f: MPoly) -> tuple[list[ProjPoint], list[Unresolved]]:
    """Rational singular points of a reduced plane curve, over all three charts."""
    f = _cubic(f, "curve") if f.total_degree() == 3 else f.with_variables(XYZ)
    points: list[ProjPoint] = []
    unresolved: list[Unresolved] = []
    for chart, uv in CHARTS:
        g = dehomogenize(f, chart)
        sols, unres = solve_rational([g, g.diff(uv[0]), g.diff(uv[1])], list(uv))
        for s in sols:
            pt = _homogenize(chart, uv, s)
            if pt not in points:
                points.append(pt)
        unresolved += unres
    return points, unresolved


def classify_point(f: MPoly, pt: ProjPoint) -> str:
    """node, cusp or higher, from the local expansion at a singular point."""
    f = f.with_variables(XYZ)
    if not is_singular_at(f, pt):
        raise InputError(f"{pt} is not a singular point of {f}")
    chart = next(c for c in ("z", "y", "x") if pt.as_dict()[c] != 0)
    uv = [c for c in XYZ if c != chart]
    scale = pt.as_dict()[chart]
    base = {c: pt.as_dict()[c] / scale for c in XYZ}
    g = f.subs({chart: Fraction(1)})
    local = g.subs({w: MPoly.var(w) + base[w] for w in uv}).with_variables(uv)
    u, v = uv

    def part(deg):
        return {e: c for e, c in local.terms.items() if sum(e) == deg}

    q = part(2)
    a = q.get((2, 0), Fraction(0))
    b = q.get((1, 1), Fraction(0))
    c = q.get((0, 2), Fraction(0))
    if not q:
        return "higher"
    if b * b - 4 * a * c != 0:
        return "node"
    # q is k*L^2; L vanishes along the direction (-b, 2a), or (1, 0) when a = 0
    direction = (-b, 2 * a) if a != 0 else (Fraction(1), Fraction(0))
    cubic = sum((coef * direction[0] ** e[0] * direction[1] ** e[1] for e, coef in part(3).items()), Fraction(0))
    return "cusp" if cubic != 0 else "higher"


# -- pencils


@dataclass(frozen=True)
class SingularFiberReport:
    param: PencilParam | None
    member: MPoly | None
    kind: str  # "singular", "degenerate-member", "unresolved"
    points: tuple[ProjPoint, ...] = ()
    local_types: tuple[str, ...] = ()
    interior: bool = True
    eliminant: MPoly | None = None
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "param": None if self.param is None else str(self.param),
            "member": None if self.member is None else str(self.member),
            "kind": self.kind,
            "interior": self.interior,
            "points": [
                {"point": str(p), "type": t} for p, t in zip(self.points, self.local_types)
            ],
            "eliminant": None if self.eliminant is None else str(self.eliminant),
            "notes": list(self.notes),
        }


def analyze_member(f: MPoly, param: PencilParam | None = None, interior: bool = True) -> SingularFiberReport | None:
    """Report for one curve; None when it is smooth."""
    f = f.with_variables(XYZ)
    if has_multiple_component(f):
        return SingularFiberReport(param, f, "degenerate-member", (), ("degenerate-member",), interior)
    pts, unres = singular_points(f)
    if not pts and not unres:
        return None
    types = tuple(classify_point(f, p) for p in pts)
    notes = tuple(f"unresolved {u.variable}: {u.eliminant}" for u in unres)
    kind = "singular" if pts else "unresolved"
    return SingularFiberReport(param, f, kind, tuple(pts), types, interior, None, notes)


def singular_parameters(pencil: CubicPencil) -> list[SingularFiberReport]:
    """Singular members: interior parameters [alpha:1] first (sorted), then the
    endpoints [0:1] and [1:0], then anything left unresolved."""
    alpha = MPoly.var(ALPHA)
    family = pencil.p0 * alpha + pencil.p1
    params: set[Fraction] = set()
    pending: list[Unresolved] = []
    for chart, uv in CHARTS:
        g = dehomogenize(family, chart)
        sols, unres = solve_rational([g, g.diff(uv[0]), g.diff(uv[1])], [ALPHA, *uv])
        params |= {s[ALPHA] for s in sols}
        pending += unres
    reports = []
    for a in sorted(params - {Fraction(0)}):
        param = PencilParam(a, 1)
        rep = analyze_member(member(pencil, param), param, interior=True)
        if rep is not None:
            reports.append(rep)
    for param in (PencilParam(0, 1), PencilParam(1, 0)):
        rep = analyze_member(member(pencil, param), param, interior=False)
        if rep is not None:
            reports.append(rep)
    seen = set()
    for u in pending:
        fixed = dict(u.assignment)
        if u.variable == ALPHA:
            key = str(u.eliminant)
            if key in seen:
                continue
            seen.add(key)
            reports.append(SingularFiberReport(None, None, "unresolved", eliminant=u.eliminant,
                                               notes=("parameter is not rational",)))
        elif fixed.get(ALPHA) not in params | {Fraction(0)}:
            reports.append(SingularFiberReport(None, None, "unresolved", eliminant=u.eliminant,
                                               notes=(f"unresolved {u.variable} with {fixed}",)))
    return reports


def interior_parameters(reports: Sequence[SingularFiberReport]) -> list[PencilParam]:
    return [r.param for r in reports if r.param is not None and r.interior]


@dataclass(frozen=True)
class BasePointReport:
    count: int
    transverse: bool
    eliminant: MPoly
    points: tuple[ProjPoint, ...]
    multiplicity_at_infinity: int = 0
    notes: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "transverse": self.transverse,
            "eliminant": str(self.eliminant),
            "rational_points": [str(p) for p in self.points],
        }


def base_points_on_line(pencil: CubicPencil, line: MPoly) -> BasePointReport:
    """Distinct intersections of p1 with the line l when p0 = c*l^3."""
    if not isinstance(line, MPoly):
        line = parse_poly(line)
    line = line.with_variables(XYZ)
    if line.is_zero() or not line.is_homogeneous(1):
        raise InputError(f"{line} is not a linear form")
    cube = line ** 3
    ratio = pencil.p0.leading_term()[1] / cube.leading_term()[1]
    if pencil.p0 != cube * ratio:
        raise InputError(f"p0 = {pencil.p0} is not a multiple of ({line})^3")
    coeffs = {c: line.diff(c).constant_value() for c in XYZ}
    solved = next(c for c in XYZ if coeffs[c] != 0)
    w1, w2 = [c for c in XYZ if c != solved]
    expr = -(MPoly.var(w1) * coeffs[w1] + MPoly.var(w2) * coeffs[w2]) / coeffs[solved]
    restricted = pencil.p1.subs({solved: expr})
    if restricted.is_zero():
        raise InputError("the line is a component of p1, so the pencil has a fixed component")
    e = restricted.subs({w1: Fraction(1)}).subs({w2: MPoly.var("t")}).with_variables(["t"])
    deg = e.degree("t")
    at_infinity = 3 - deg
    sqf = squarefree_part(e) if deg > 0 else MPoly.constant(1)
    count = (sqf.degree("t") if deg > 0 else 0) + (1 if at_infinity else 0)
    transverse = (deg <= 0 or sqf.degree("t") == deg) and at_infinity <= 1

    def lift(vals):
        vals[solved] = expr.evaluate(vals) if expr.used_variables() else expr.constant_value()
        return ProjPoint(tuple(vals[c] for c in XYZ))

    points = [lift({w1: Fraction(1), w2: r}) for r in sorted(rational_roots(e))] if deg > 0 else []
    if at_infinity:
        points.append(lift({w1: Fraction(0), w2: Fraction(1)}))
    return BasePointReport(count, transverse, e.monic(), tuple(points), at_infinity)


# -- shipped pencils

E8_PENCIL = ("z^3", "z*y^2 - z*x^2 - x^3")
E6_PENCIL = ("(y + z/2)^3", "z*y^2 - z*x^2 - x^3")
SHIPPED_PENCILS = {"e8pencil": (E8_PENCIL, "z"), "e6pencil": (E6_PENCIL, "y + z/2")}


def shipped_pencil(name: str) -> tuple[CubicPencil, MPoly]:
    (p0, p1), line = SHIPPED_PENCILS[name]
    return CubicPencil.parse(p0, p1), parse_poly(line)
