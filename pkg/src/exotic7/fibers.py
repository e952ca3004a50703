"""Words in the Dehn twists a, b of the torus, their SL(2,Z) images, the
Kodaira fibre catalogue, and verification of monodromy factorizations."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping

from .errors import InputError


class WordSyntaxError(InputError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class SL2Mat:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise InputError(f"determinant is not 1: {self.rows()}")

    @classmethod
    def identity(cls) -> "SL2Mat":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_rows(cls, rows) -> "SL2Mat":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    def __matmul__(self, o: "SL2Mat") -> "SL2Mat":
        return SL2Mat(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> "SL2Mat":
        return SL2Mat(self.d, -self.b, -self.c, self.a)

    def __pow__(self, k: int) -> "SL2Mat":
        base = self if k >= 0 else self.inverse()
        out = SL2Mat.identity()
        k = abs(k)
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    @property
    def trace(self) -> int:
        return self.a + self.d

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]


GEN_A = SL2Mat(1, 1, 0, 1)
GEN_B = SL2Mat(1, 0, -1, 1)
_GEN = {"a": GEN_A, "b": GEN_B}


@dataclass(frozen=True)
class McgWord:
    """Sequence of syllables (generator, nonzero exponent), as written."""

    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        for g, e in self.letters:
            if g not in ("a", "b") or not isinstance(e, int) or e == 0:
                raise InputError(f"bad syllable {(g, e)!r}")

    @classmethod
    def parse(cls, text: str) -> "McgWord":
        return parse_word(text)

    def __mul__(self, other: "McgWord") -> "McgWord":
        return McgWord(self.letters + other.letters)

    def inverse(self) -> "McgWord":
        return McgWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def __pow__(self, k: int) -> "McgWord":
        base = self if k >= 0 else self.inverse()
        return McgWord(base.letters * abs(k))

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def __str__(self) -> str:
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.letters)


def _tokens(text: str):
    for m in re.finditer(r"\s*(?:(\^\s*-?\d+)|([abAB])|([()])|(\S))", text):
        yield m


def parse_word(text: str) -> McgWord:
    """Grammar: letters a, b (A, B are inverses), parentheses, integer powers
    ``x^k`` including negative ones. Whitespace, ``*`` and ``.`` are ignored."""
    stack: list[list[tuple[str, int]]] = [[]]
    opened: list[int] = []
    last: list[tuple[str, int]] | None = None  # syllables of the most recent atom
    for m in _tokens(text):
        power, letter, paren, other = m.groups()
        pos = m.start(m.lastindex)
        if other is not None:
            if other in "*.":
                last = None
                continue
            raise WordSyntaxError(f"unexpected character {other!r}", pos)
        if letter:
            syl = [(letter.lower(), -1 if letter.isupper() else 1)]
            stack[-1].extend(syl)
            last = syl
        elif paren == "(":
            stack.append([])
            opened.append(pos)
            last = None
        elif paren == ")":
            if len(stack) == 1:
                raise WordSyntaxError("unbalanced ')'", pos)
            group = stack.pop()
            opened.pop()
            stack[-1].extend(group)
            last = group
        else:
            if last is None:
                raise WordSyntaxError("power without a base", pos)
            k = int(power[1:].strip())
            body = stack[-1]
            del body[len(body) - len(last):]
            base = McgWord(tuple(last))
            repeated = list((base ** k).letters)
            if len(last) == 1 and k != 0:
                # a single letter keeps one syllable: a^-1, b^3
                g, e = last[0]
                repeated = [(g, e * k)]
            body.extend(repeated)
            last = None
    if len(stack) != 1:
        raise WordSyntaxError("unclosed '('", opened[-1])
    return McgWord(tuple(stack[0]))


def evaluate(w: McgWord) -> SL2Mat:
    out = SL2Mat.identity()
    for g, e in w.letters:
        out = out @ (_GEN[g] ** e)
    return out


def free_reduce(w: McgWord) -> McgWord:
    out: list[list] = []
    for g, e in w.letters:
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return McgWord(tuple((g, e) for g, e in out))


# -- Kodaira catalogue

_ALIASES = {
    "II*": "E8~", "Ẽ8": "E8~", "E8~": "E8~", "E8": "E8~",
    "III*": "E7~", "Ẽ7": "E7~", "E7~": "E7~", "E7": "E7~",
    "IV*": "E6~", "Ẽ6": "E6~", "E6~": "E6~", "E6": "E6~",
    "II": "II", "III": "III", "IV": "IV",
}


@dataclass(frozen=True)
class FiberType:
    kind: str  # I, I*, II, III, IV, E8~, E7~, E6~
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("I", "I*", "II", "III", "IV", "E8~", "E7~", "E6~"):
            raise InputError(f"unknown fibre kind {self.kind!r}")
        if self.n < 0 or (self.kind not in ("I", "I*") and self.n):
            raise InputError(f"bad index {self.n} for fibre kind {self.kind}")

    @classmethod
    def parse(cls, text: str) -> "FiberType":
        t = text.strip().replace(" ", "")
        if t in _ALIASES:
            return cls(_ALIASES[t])
        m = re.fullmatch(r"I_?(\d+)", t)
        if m:
            return cls("I", int(m.group(1)))
        m = re.fullmatch(r"I\*_?(\d+)|I_?(\d+)\*", t)
        if m:
            return cls("I*", int(m.group(1) or m.group(2)))
        raise InputError(f"unknown fibre type {text!r}")

    @property
    def euler(self) -> int:
        return {
            "I": self.n, "I*": self.n + 6, "II": 2, "III": 3, "IV": 4,
            "E8~": 10, "E7~": 9, "E6~": 8,
        }[self.kind]

    @property
    def monodromy_word(self) -> McgWord:
        text = {
            "I": f"a^{self.n}" if self.n else "",
            "I*": f"(ab)^3 a^{self.n}" if self.n else "(ab)^3",
            "II": "ba",
            "III": "aba",
            "IV": "(ba)^2",
            "E8~": "(ba)^5",
            "E7~": "(ba)^4 b",
            "E6~": "(ba)^4",
        }[self.kind]
        return parse_word(text)

    @property
    def monodromy(self) -> SL2Mat:
        return evaluate(self.monodromy_word)

    def __str__(self) -> str:
        if self.kind == "I":
            return f"I{self.n}"
        if self.kind == "I*":
            return f"I*{self.n}"
        return self.kind


# matrices as tabulated for each fibre; checked against the words in the tests
MONODROMY_TABLE = {
    "I1": [[1, 1], [0, 1]],
    "II": [[1, 1], [-1, 0]],
    "III": [[0, 1], [-1, 0]],
    "IV": [[0, 1], [-1, -1]],
    "I*0": [[-1, 0], [0, -1]],
    "E8~": [[0, -1], [1, 1]],
    "E7~": [[0, -1], [1, 0]],
    "E6~": [[-1, -1], [1, 0]],
}


def euler_budget(config: Iterable[FiberType]) -> tuple[int, bool]:
    """Total Euler characteristic, and whether it is the 12 of E(1)."""
    total = sum(f.euler for f in config)
    return total, total == 12


def parse_config(text: str) -> list[FiberType]:
    """``E6~, I1x4`` style multiset."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        m = re.fullmatch(r"(.+?)\s*[x×]\s*(\d+)", item)
        name, count = (m.group(1), int(m.group(2))) if m else (item, 1)
        out += [FiberType.parse(name)] * count
    return out


# -- conjugacy


def conjugates(w: SL2Mat, m: SL2Mat) -> SL2Mat:
    return w @ m @ w.inverse()


def search_conjugator(source: SL2Mat, target: SL2Mat, bound: int = 6) -> McgWord | None:
    """Shortest word w (breadth first, letters a, A, b, B) with
    w source w^-1 = target, up to ``bound`` letters."""
    if source.trace != target.trace:
        return None
    steps = (("a", 1), ("a", -1), ("b", 1), ("b", -1))
    frontier = [((), SL2Mat.identity())]
    seen = {SL2Mat.identity()}
    for depth in range(bound + 1):
        for letters, mat in frontier:
            if conjugates(mat, source) == target:
                return free_reduce(McgWord(letters))
        if depth == bound:
            break
        nxt = []
        for letters, mat in frontier:
            for g, e in steps:
                if letters and letters[-1] == (g, -e):
                    continue
                m2 = mat @ (_GEN[g] ** e)
                if m2 in seen:
                    continue
                seen.add(m2)
                nxt.append((letters + ((g, e),), m2))
        frontier = nxt
    return None


@dataclass(frozen=True)
class Factor:
    word: McgWord
    claimed_type: FiberType
    witness: McgWord | None = None


@dataclass(frozen=True)
class Factorization:
    factors: tuple[Factor, ...]
    name: str = ""

    @classmethod
    def from_json(cls, obj: Mapping) -> "Factorization":
        try:
            factors = tuple(
                Factor(
                    parse_word(f["word"]),
                    FiberType.parse(f["type"]),
                    parse_word(f["witness"]) if f.get("witness") is not None else None,
                )
                for f in obj["factors"]
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed factorization: {exc}") from None
        return cls(factors, obj.get("name", ""))


@dataclass(frozen=True)
class FactorCheck:
    word: str
    claimed: str
    status: str  # "verified", "fail", "unknown"
    method: str  # "witness", "search", "trace"
    witness: str | None
    note: str = ""


@dataclass(frozen=True)
class FactorizationReport:
    product_is_identity: bool
    product: SL2Mat
    conjugacy: bool | None  # None when some factor is undecided
    factor_checks: tuple[FactorCheck, ...]
    euler_total: int
    euler_ok: bool
    caveat: str = field(
        default="checks necessary conditions only; a fibration realizing the factorization is not constructed"
    )

    @property
    def passed(self) -> bool:
        return self.product_is_identity and self.conjugacy is True and self.euler_ok

    def to_json(self) -> dict:
        return {
            "product_is_identity": self.product_is_identity,
            "product": self.product.rows(),
            "conjugacy": "unknown" if self.conjugacy is None else self.conjugacy,
            "factors": [
                {
                    "word": c.word, "claimed": c.claimed, "status": c.status,
                    "method": c.method, "witness": c.witness, "note": c.note,
                }
                for c in self.factor_checks
            ],
            "euler_total": self.euler_total,
            "euler_ok": self.euler_ok,
            "passed": self.passed,
            "caveat": self.caveat,
        }


def _check_factor(f: Factor, bound: int) -> FactorCheck:
    m = evaluate(f.word)
    target = f.claimed_type.monodromy
    base = dict(word=str(f.word), claimed=str(f.claimed_type))
    if m.trace != target.trace:
        return FactorCheck(**base, status="fail", method="trace", witness=None,
                           note=f"trace {m.trace} differs from {target.trace}")
    note = ""
    if f.witness is not None:
        if conjugates(evaluate(f.witness), m) == target:
            return FactorCheck(**base, status="verified", method="witness", witness=str(f.witness))
        note = f"supplied witness {f.witness} does not conjugate; searched instead"
    w = search_conjugator(m, target, bound)
    if w is not None:
        return FactorCheck(**base, status="verified", method="search", witness=str(w), note=note)
    return FactorCheck(**base, status="unknown", method="search", witness=None,
                       note=(note + "; " if note else "") + f"no conjugator up to length {bound}")


def verify_factorization(f: Factorization, search_bound: int = 6) -> FactorizationReport:
    product = SL2Mat.identity()
    for fac in f.factors:
        product = product @ evaluate(fac.word)
    checks = tuple(_check_factor(fac, search_bound) for fac in f.factors)
    statuses = {c.status for c in checks}
    if "fail" in statuses:
        conj = False
    elif "unknown" in statuses:
        conj = None
    else:
        conj = True
    total, ok = euler_budget(fac.claimed_type for fac in f.factors)
    return FactorizationReport(
        product_is_identity=product == SL2Mat.identity(),
        product=product,
        conjugacy=conj,
        factor_checks=checks,
        euler_total=total,
        euler_ok=ok,
    )


SHIPPED_FACTORIZATIONS = {
    "e6_fishtails": "factorization_e6.json",
    "i6_fishtails": "factorization_i6.json",
}


def load_factorization(name_or_path: str) -> Factorization:
    if name_or_path in SHIPPED_FACTORIZATIONS:
        text = resources.files("exotic7.data").joinpath(SHIPPED_FACTORIZATIONS[name_or_path]).read_text()
    else:
        try:
            with open(name_or_path) as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read factorization {name_or_path!r}: {exc}") from None
    try:
        return Factorization.from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise InputError(f"factorization is not valid JSON: {exc}") from None
