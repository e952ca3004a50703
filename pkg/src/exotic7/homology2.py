"""Second homology of CP^2 # n(-CP^2) in the basis {h, e_1, ..., e_n}:
pairing, blow-ups, proper transforms, and replay of multiplicity ledgers."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .errors import InputError, LedgerError
from .exact import ExactMatrix, to_rational


@dataclass(frozen=True)
class Ambient:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise InputError(f"ambient blow-up count must be a non-negative integer, got {self.n!r}")

    @property
    def signature(self) -> int:
        return 1 - self.n

    @property
    def euler(self) -> int:
        return 3 + self.n


def _coeff(x):
    # symbolic coefficients (LinearForm) pass through untouched
    if isinstance(x, (int, Fraction, str)) and not isinstance(x, bool):
        return to_rational(x)
    return x


@dataclass(frozen=True)
class H2Class:
    ambient: Ambient
    h_coeff: object
    e_coeffs: tuple = ()

    def __post_init__(self):
        amb = self.ambient if isinstance(self.ambient, Ambient) else Ambient(self.ambient)
        object.__setattr__(self, "ambient", amb)
        object.__setattr__(self, "h_coeff", _coeff(self.h_coeff))
        es = tuple(_coeff(x) for x in self.e_coeffs)
        if len(es) != amb.n:
            raise InputError(f"class has {len(es)} exceptional coefficients, ambient has n={amb.n}")
        object.__setattr__(self, "e_coeffs", es)

    @classmethod
    def h(cls, n: int) -> "H2Class":
        return cls(Ambient(n), 1, (0,) * n)

    @classmethod
    def e(cls, i: int, n: int) -> "H2Class":
        if not 1 <= i <= n:
            raise InputError(f"e{i} does not exist in ambient n={n}")
        return cls(Ambient(n), 0, tuple(int(k == i) for k in range(1, n + 1)))

    @classmethod
    def zero(cls, n: int) -> "H2Class":
        return cls(Ambient(n), 0, (0,) * n)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "H2Class":
        return parse_class(text, n)

    def _check(self, other: "H2Class"):
        if not isinstance(other, H2Class):
            raise InputError(f"expected a homology class, got {type(other).__name__}")
        if self.ambient != other.ambient:
            raise InputError(f"ambient mismatch: n={self.ambient.n} vs n={other.ambient.n}")

    def __add__(self, other: "H2Class") -> "H2Class":
        self._check(other)
        return H2Class(
            self.ambient, self.h_coeff + other.h_coeff, tuple(a + b for a, b in zip(self.e_coeffs, other.e_coeffs))
        )

    def __sub__(self, other: "H2Class") -> "H2Class":
        return self + (-other)

    def __neg__(self) -> "H2Class":
        return H2Class(self.ambient, -self.h_coeff, tuple(-a for a in self.e_coeffs))

    def __mul__(self, c) -> "H2Class":
        c = _coeff(c)
        return H2Class(self.ambient, c * self.h_coeff, tuple(c * a for a in self.e_coeffs))

    __rmul__ = __mul__

    def dot(self, other: "H2Class"):
        return pair(self, other)

    @property
    def square(self):
        return pair(self, self)

    def is_integral(self) -> bool:
        return all(
            isinstance(c, Fraction) and c.denominator == 1 for c in (self.h_coeff,) + self.e_coeffs
        )

    def coefficient(self, name: str):
        if name == "h":
            return self.h_coeff
        m = re.fullmatch(r"e(\d+)", name)
        if not m or not 1 <= int(m.group(1)) <= self.ambient.n:
            raise InputError(f"no basis element {name!r} in ambient n={self.ambient.n}")
        return self.e_coeffs[int(m.group(1)) - 1]

    def __str__(self) -> str:
        parts = []
        for name, c in [("h", self.h_coeff)] + [(f"e{i}", c) for i, c in enumerate(self.e_coeffs, 1)]:
            if c == 0:
                continue
            if isinstance(c, Fraction):
                mag = abs(c)
                body = name if mag == 1 else f"{mag}{name}"
                sign = "-" if c < 0 else "+"
            else:
                body, sign = f"({c}){name}", "+"
            parts.append((sign, body))
        if not parts:
            return "0"
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def pair(x: H2Class, y: H2Class):
    """x.y = x_h y_h - sum x_ei y_ei."""
    x._check(y)
    total = x.h_coeff * y.h_coeff
    for a, b in zip(x.e_coeffs, y.e_coeffs):
        if a != 0 and b != 0:
            total = total - a * b
    return total


def blow_up(x: H2Class) -> H2Class:
    """Lift to the ambient with one more exceptional class; new coefficient 0."""
    return H2Class(Ambient(x.ambient.n + 1), x.h_coeff, x.e_coeffs + (Fraction(0),))


def proper_transform(x: H2Class, m: int) -> H2Class:
    """x - m e_new, where e_new is the last exceptional class of x's ambient."""
    if m < 0:
        raise InputError(f"multiplicity must be non-negative, got {m}")
    n = x.ambient.n
    if n == 0:
        raise InputError("proper transform needs a blown-up ambient")
    return x - H2Class.e(n, n) * m


def canonical_class(n: int) -> H2Class:
    return H2Class(Ambient(n), -3, (1,) * n)


def gram(classes: Sequence[H2Class]) -> ExactMatrix:
    classes = list(classes)
    for c in classes[1:]:
        classes[0]._check(c)
    return ExactMatrix([[pair(a, b) for b in classes] for a in classes], ncols=len(classes))


def wu_check(k: H2Class, sigma: int, chi: int) -> bool:
    return pair(k, k) == 3 * sigma + 2 * chi


# -- class literals: 3h - e1 - 2e10, 12h + e9 - 4(e1..e9) - 2(e10..e13)

_CLASS_TERM = re.compile(
    r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*(?:(h)|e(\d+)|\(\s*e(\d+)\s*\.\.\s*e(\d+)\s*\))\s*"
)


def parse_class(text: str, n: int | None = None) -> H2Class:
    """Parse a class literal. Without ``n`` the ambient is the largest index used."""
    if not text.strip():
        raise InputError("empty class literal")
    if text.strip() == "0":
        return H2Class.zero(n or 0)
    pos = 0
    acc: dict[int, Fraction] = {}
    first = True
    while pos < len(text):
        m = _CLASS_TERM.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"cannot parse class literal at position {pos}: {text[pos:]!r}")
        sign, coeff, h, single, lo, hi = m.groups()
        if sign is None and not first:
            raise InputError(f"missing + or - before position {m.start()}")
        c = to_rational(coeff) if coeff else Fraction(1)
        if sign == "-":
            c = -c
        if h:
            idx = [0]
        elif single:
            idx = [int(single)]
        else:
            a, b = int(lo), int(hi)
            if a > b:
                raise InputError(f"empty range e{a}..e{b}")
            idx = list(range(a, b + 1))
        if not h and min(idx) < 1:
            raise InputError("exceptional indices start at 1")
        for i in idx:
            acc[i] = acc.get(i, Fraction(0)) + c
        pos = m.end()
        first = False
    top = max((i for i in acc if i > 0), default=0)
    if n is None:
        n = top
    elif top > n:
        raise InputError(f"literal mentions e{top} but ambient is n={n}")
    return H2Class(Ambient(n), acc.get(0, 0), tuple(acc.get(i, 0) for i in range(1, n + 1)))


# -- ledgers


@dataclass(frozen=True)
class LedgerStep:
    """The state just after a blow-up, before the new exceptional multiplicity is known.

    ``components`` holds the proper transforms of the old fibre components with
    their multiplicities. ``new_exceptional_index`` is the index of e_new."""

    fiber_class: H2Class
    components: tuple[tuple[H2Class, int], ...]
    new_exceptional_index: int

    def __post_init__(self):
        for cls, mult in self.components:
            self.fiber_class._check(cls)
            if mult < 0:
                raise InputError("component multiplicities are non-negative")
        if self.new_exceptional_index != self.fiber_class.ambient.n:
            raise InputError("the new exceptional class must be the last one")


def exceptional_multiplicity(step: LedgerStep) -> int:
    """Solve sum mult_i class_i + m e_new = fiber_class for the integer m >= 0."""
    n = step.fiber_class.ambient.n
    total = H2Class.zero(n)
    for cls, mult in step.components:
        total = total + cls * mult
    rest = step.fiber_class - total
    # every coefficient except e_new must already balance
    if rest.h_coeff != 0 or any(c != 0 for c in rest.e_coeffs[:-1]):
        raise LedgerError(f"components do not account for the fibre class: residual {rest}")
    m = rest.e_coeffs[-1]
    if m.denominator != 1 or m < 0:
        raise LedgerError(f"new exceptional multiplicity would be {m}")
    return int(m)


@dataclass
class Component:
    name: str
    cls: H2Class
    mult: int


@dataclass(frozen=True)
class LedgerResult:
    name: str
    fiber_class: H2Class
    components: tuple  # of (name, H2Class, mult)
    multiplicities: tuple[int, ...]
    labels: Mapping[str, str] = field(default_factory=dict)

    def component(self, name: str) -> tuple[H2Class, int]:
        for nm, cls, mult in self.components:
            if nm == name:
                return cls, mult
        raise KeyError(name)

    def labelled(self, label: str) -> tuple[H2Class, int]:
        return self.component(self.labels[label])

    def fibre_components(self) -> list[tuple[str, H2Class, int]]:
        """Components with positive multiplicity (the singular fibre itself)."""
        return [c for c in self.components if c[2] > 0]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "fiber_class": str(self.fiber_class),
            "fiber_square": int(self.fiber_class.square),
            "exceptional_multiplicities": list(self.multiplicities),
            "components": [
                {"name": nm, "class": str(c), "multiplicity": m, "square": int(c.square)}
                for nm, c, m in self.components
            ],
            "labels": {k: str(self.labelled(k)[0]) for k in sorted(self.labels)},
        }


def replay_ledger(data: Mapping) -> LedgerResult:
    """Replay a blow-up ledger.

    Each step blows up a point and says which current components pass through
    it (with their multiplicity there) and the multiplicity of the generic
    member at the point. The exceptional multiplicity is solved, never given;
    an optional ``expect`` value is checked against it."""
    try:
        fibre = parse_class(data["fiber"], 0)
        comps = [
            Component(c["name"], parse_class(c["class"], 0), int(c["multiplicity"]))
            for c in data["components"]
        ]
        steps = data["steps"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed ledger: {exc}") from None
    check_balance(fibre, comps)
    mults = []
    for k, st in enumerate(steps, 1):
        through = st.get("through", {})
        unknown = set(through) - {c.name for c in comps}
        if unknown:
            raise LedgerError(f"step {k} passes through unknown components {sorted(unknown)}")
        fibre = proper_transform(blow_up(fibre), int(st.get("fiber_mult", 1)))
        for c in comps:
            c.cls = proper_transform(blow_up(c.cls), int(through.get(c.name, 0)))
        n = fibre.ambient.n
        step = LedgerStep(fibre, tuple((c.cls, c.mult) for c in comps), n)
        m = exceptional_multiplicity(step)
        if "expect" in st and int(st["expect"]) != m:
            raise LedgerError(f"step {k}: expected multiplicity {st['expect']}, solved {m}")
        name = st.get("name", f"e{n}")
        comps.append(Component(name, H2Class.e(n, n), m))
        check_balance(fibre, comps)
        mults.append(m)
    labels = dict(data.get("labels", {}))
    names = {c.name for c in comps}
    if not set(labels.values()) <= names:
        raise LedgerError("labels refer to unknown components")
    return LedgerResult(
        name=data.get("name", "ledger"),
        fiber_class=fibre,
        components=tuple((c.name, c.cls, c.mult) for c in comps),
        multiplicities=tuple(mults),
        labels=labels,
    )


def check_balance(fibre: H2Class, comps: Iterable[Component]):
    total = H2Class.zero(fibre.ambient.n)
    for c in comps:
        total = total + c.cls * c.mult
    if total != fibre:
        raise LedgerError(f"multiplicities do not sum to the fibre class: {total} vs {fibre}")


def load_ledger(name_or_path: str) -> dict:
    """Load a shipped ledger ("e8", "e6") or a JSON file path."""
    shipped = {"e8": "ledger_e8.json", "e6": "ledger_e6.json"}
    if name_or_path in shipped:
        text = resources.files("exotic7.data").joinpath(shipped[name_or_path]).read_text()
    else:
        try:
            with open(name_or_path) as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read ledger {name_or_path!r}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"ledger is not valid JSON: {exc}") from None
