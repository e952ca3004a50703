"""Rational blowdown of the C_7 configuration inside E(1) # 4(-CP^2).

The classes u1..u6 are built from the E6~ ledger, the dual pairing is the
inverse Gram matrix, and the canonical class of the blown-down manifold is
paired with a symbolic symplectic class. Positivity of that pairing on the
admissible region is certified by an explicit non-negative combination."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InputError
from .exact import ExactMatrix, invert, to_rational
from .forms import FormInvariants, _definiteness
from .homology2 import (
    H2Class,
    blow_up,
    canonical_class,
    gram,
    load_ledger,
    pair,
    proper_transform,
    replay_ledger,
)
from .plumbing import build_cp

N_BLOWUPS = 13
SYMBOLS = ("a",) + tuple(f"b{i}" for i in range(1, N_BLOWUPS + 1))


class LinearForm:
    """Rational linear combination of named symbols."""

    __slots__ = ("symbols", "coeffs")

    def __init__(self, symbols: Sequence[str], coeffs: Sequence):
        if len(symbols) != len(coeffs):
            raise InputError("one coefficient per symbol")
        self.symbols = tuple(symbols)
        self.coeffs = tuple(to_rational(c) for c in coeffs)

    @classmethod
    def symbol(cls, name: str, symbols: Sequence[str] = SYMBOLS) -> "LinearForm":
        if name not in symbols:
            raise InputError(f"unknown symbol {name!r}")
        return cls(symbols, [int(s == name) for s in symbols])

    @classmethod
    def zero(cls, symbols: Sequence[str] = SYMBOLS) -> "LinearForm":
        return cls(symbols, [0] * len(symbols))

    @classmethod
    def from_dict(cls, coeffs: Mapping[str, object], symbols: Sequence[str] = SYMBOLS) -> "LinearForm":
        unknown = set(coeffs) - set(symbols)
        if unknown:
            raise InputError(f"unknown symbols {sorted(unknown)}")
        return cls(symbols, [coeffs.get(s, 0) for s in symbols])

    def _check(self, other: "LinearForm"):
        if self.symbols != other.symbols:
            raise InputError("linear forms over different symbols")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if not isinstance(other, LinearForm):
            return NotImplemented
        self._check(other)
        return LinearForm(self.symbols, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return LinearForm(self.symbols, [-a for a in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if isinstance(c, LinearForm):
            raise TypeError("product of two linear forms is not linear")
        c = to_rational(c)
        return LinearForm(self.symbols, [c * a for a in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and other == 0:
            return not any(self.coeffs)
        return isinstance(other, LinearForm) and self.symbols == other.symbols and self.coeffs == other.coeffs

    def __ne__(self, other) -> bool:
        return not self == other

    def __hash__(self) -> int:
        return hash((self.symbols, self.coeffs))

    def coefficient(self, name: str) -> Fraction:
        return self.coeffs[self.symbols.index(name)]

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        return sum((c * to_rational(values[s]) for s, c in zip(self.symbols, self.coeffs) if c), Fraction(0))

    def __str__(self) -> str:
        parts = []
        for s, c in zip(self.symbols, self.coeffs):
            if not c:
                continue
            mag = abs(c)
            body = s if mag == 1 else f"{mag}*{s}"
            parts.append(("-" if c < 0 else "+", body))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return out + "".join(f" {sg} {b}" for sg, b in parts[1:])

    def __repr__(self) -> str:
        return f"LinearForm({str(self)!r})"


def omega_class(n: int = N_BLOWUPS) -> H2Class:
    """[omega] = a h - b1 e1 - ... - bn en with symbolic a, b_i."""
    syms = ("a",) + tuple(f"b{i}" for i in range(1, n + 1))
    return H2Class(n, LinearForm.symbol("a", syms), tuple(-LinearForm.symbol(f"b{i}", syms) for i in range(1, n + 1)))


@dataclass(frozen=True)
class C7Embedding:
    classes: tuple[H2Class, ...]
    P: ExactMatrix
    T: ExactMatrix


def double_point_sphere() -> H2Class:
    """[S]: four fibres, each made embedded by blowing up its double point
    (f - 2e_k for k = 10..13), resolved together with the section e9."""
    ledger = replay_ledger(load_ledger("e6"))
    f = ledger.fiber_class
    fibres = []
    for k in range(4):
        f = blow_up(f)
        fibres = [blow_up(x) for x in fibres]
        fibres.append(proper_transform(f, 2))
    e9 = H2Class.e(9, N_BLOWUPS)
    total = e9
    for x in fibres:
        total = total + x
    return total


def build_c7_embedding() -> C7Embedding:
    ledger = replay_ledger(load_ledger("e6"))
    lifted = []
    for label in ("S1", "S2", "S3", "S4", "S5"):
        cls, _ = ledger.labelled(label)
        while cls.ambient.n < N_BLOWUPS:
            cls = blow_up(cls)
        lifted.append(cls)
    s = double_point_sphere()
    classes = tuple(lifted) + (s,)
    P = gram(classes)
    return C7Embedding(classes, P, invert(P))


def restrict(x: H2Class, emb: C7Embedding) -> tuple:
    """Coefficients of x restricted to the configuration, in the dual basis."""
    return tuple(pair(x, u) for u in emb.classes)


def pair_in_config(x: Sequence, y: Sequence, emb: C7Embedding):
    if len(x) != emb.T.nrows or len(y) != emb.T.nrows:
        raise InputError("dual-basis vectors must have one entry per sphere")
    return emb.T.bilinear(x, y)


def blowdown_pairing(k: H2Class, omega: H2Class, emb: C7Embedding):
    """K_p.[omega_p] = K.[omega] - K|C . [omega|C]."""
    return pair(k, omega) - pair_in_config(restrict(k, emb), restrict(omega, emb), emb)


# -- positivity


@dataclass(frozen=True)
class PositivityCertificate:
    """Weights on 3a - sum b (strict), on a - b1, b1 - b2, ..., and on each b_i."""

    lambda0: Fraction
    chain_weights: tuple[Fraction, ...]
    tail_weights: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "lambda0", to_rational(self.lambda0))
        object.__setattr__(self, "chain_weights", tuple(to_rational(w) for w in self.chain_weights))
        object.__setattr__(self, "tail_weights", tuple(to_rational(w) for w in self.tail_weights))

    def to_json(self) -> dict:
        return {
            "lambda0": str(self.lambda0),
            "chain_weights": [str(w) for w in self.chain_weights],
            "tail_weights": [str(w) for w in self.tail_weights],
        }


def constraint_forms(symbols: Sequence[str] = SYMBOLS):
    """(strict form, chain differences, tails) of the admissible region."""
    a = LinearForm.symbol(symbols[0], symbols)
    bs = [LinearForm.symbol(s, symbols) for s in symbols[1:]]
    strict = a * 3 - sum(bs, LinearForm.zero(symbols))
    chain = [a - bs[0]] + [bs[i] - bs[i + 1] for i in range(len(bs) - 1)]
    return strict, chain, bs


def certificate_combination(cert: PositivityCertificate, symbols: Sequence[str] = SYMBOLS) -> LinearForm:
    strict, chain, tails = constraint_forms(symbols)
    if len(cert.chain_weights) != len(chain) or len(cert.tail_weights) != len(tails):
        raise InputError("certificate has the wrong number of weights")
    total = strict * cert.lambda0
    for w, form in zip(cert.chain_weights, chain):
        total = total + form * w
    for w, form in zip(cert.tail_weights, tails):
        total = total + form * w
    return total


def verify_certificate(form: LinearForm, cert: PositivityCertificate) -> bool:
    """True iff ``form`` equals the certificate's non-negative combination."""
    if form.symbols[:1] != ("a",) or any(not s.startswith("b") for s in form.symbols[1:]):
        raise InputError(f"unexpected symbols {form.symbols}")
    if cert.lambda0 <= 0 or any(w < 0 for w in cert.chain_weights + cert.tail_weights):
        return False
    try:
        combo = certificate_combination(cert, form.symbols)
    except InputError:
        return False
    return combo == form


def find_certificate(form: LinearForm) -> PositivityCertificate | None:
    """A certificate using only the strict form, the b-chain and the last tail.

    Put lambda0 = coefficient of a / 3; the remainder sum c_i b_i is then a
    non-negative combination of b_i - b_{i+1} and b_n exactly when all its
    prefix sums are non-negative."""
    lam = form.coefficient("a") / 3
    if lam <= 0:
        return None
    strict, _, _ = constraint_forms(form.symbols)
    rest = form - strict * lam
    cs = rest.coeffs[1:]
    prefix, sums = Fraction(0), []
    for c in cs:
        prefix += c
        sums.append(prefix)
    if any(s < 0 for s in sums):
        return None
    n = len(cs)
    chain = (Fraction(0),) + tuple(sums[:-1])
    tails = (Fraction(0),) * (n - 1) + (sums[-1],)
    return PositivityCertificate(lam, chain, tails)


def shipped_certificate() -> PositivityCertificate:
    """Weights read off the inequality chain used for the C_7 blowdown."""
    chain = [Fraction(0)] * N_BLOWUPS
    chain[2] = Fraction(2, 7)  # b2 - b3
    tails = [Fraction(0)] * N_BLOWUPS
    for i, w in {5: 2, 6: 1, 8: 1, 9: 2, 10: 13, 11: 13, 12: 13, 13: 13}.items():
        tails[i - 1] = Fraction(w, 7)
    return PositivityCertificate(Fraction(18, 7), tuple(chain), tuple(tails))


# -- bookkeeping


def blowdown_bookkeeping(before: FormInvariants, p: int) -> FormInvariants:
    """Invariants after replacing C_p (p-1 negative spheres) by a rational ball."""
    if p < 2:
        raise InputError("p must be at least 2")
    # the chain is required to leave some of the negative part behind
    if before.b2_minus <= p - 1:
        raise InputError(f"b2_minus = {before.b2_minus} is too small to remove C_{p}")
    bp, bm = before.b2_plus, before.b2_minus - (p - 1)
    sig = bp - bm
    # a smooth closed simply connected realization with an even form has 8 | sigma
    parity = "odd" if sig % 8 else "undetermined"
    return FormInvariants(bp + bm, sig, bp, bm, parity, _definiteness(bp + bm, sig), (-1) ** bm)


@dataclass(frozen=True)
class ParkReport:
    embedding: C7Embedding
    k_restriction: tuple
    omega_restriction: tuple
    k_dot_omega: LinearForm
    config_pairing: LinearForm
    functional: LinearForm
    certificate: PositivityCertificate
    certificate_ok: bool
    before: FormInvariants
    after: FormInvariants


def park_report() -> ParkReport:
    emb = build_c7_embedding()
    k = canonical_class(N_BLOWUPS)
    om = omega_class(N_BLOWUPS)
    kr, wr = restrict(k, emb), restrict(om, emb)
    kw = pair(k, om)
    cfg = pair_in_config(kr, wr, emb)
    functional = kw - cfg
    cert = shipped_certificate()
    before = FormInvariants.from_counts(1, N_BLOWUPS, "odd")
    return ParkReport(
        embedding=emb,
        k_restriction=kr,
        omega_restriction=wr,
        k_dot_omega=kw,
        config_pairing=cfg,
        functional=functional,
        certificate=cert,
        certificate_ok=verify_certificate(functional, cert),
        before=before,
        after=blowdown_bookkeeping(before, 7),
    )


def chain_matches_cp(emb: C7Embedding) -> bool:
    return emb.P == build_cp(7).configuration_gram


def x7_invariants() -> FormInvariants:
    return blowdown_bookkeeping(FormInvariants.from_counts(1, N_BLOWUPS, "odd"), 7)

