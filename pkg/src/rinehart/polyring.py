"""Multivariate polynomials over Q with Groebner basis machinery.

Monomials are exponent tuples, polynomials are {monomial: Fraction}
dicts bound to a ring context.  The Buchberger loop uses the normal
pair-selection strategy plus the coprimality and chain criteria, and
always returns the reduced basis (monic generators, no term divisible
by another leading term), so bases are canonical for a given order.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

Q = Fraction
Monomial = tuple  # exponent tuple, one slot per ring variable


class PolyParseError(ValueError):
    """Parse failure, carrying the offending position."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.pos = pos


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_degree(a: Monomial) -> int:
    return sum(a)


class MonomialOrder:
    """Term order: one of grevlex (default), lex, grlex.

    `precedence` lists variable indices from most to least significant;
    by default the textual declaration order.  `key` returns a tuple
    that compares the way the order does (larger key = larger monomial).
    """

    KINDS = ("grevlex", "lex", "grlex")

    def __init__(self, kind: str = "grevlex", precedence: Optional[Sequence[int]] = None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown order {kind!r}")
        self.kind = kind
        self.precedence = tuple(precedence) if precedence is not None else None

    def _permute(self, m: Monomial) -> Monomial:
        if self.precedence is None:
            return m
        return tuple(m[i] for i in self.precedence)

    def key(self, m: Monomial):
        p = self._permute(m)
        if self.kind == "lex":
            return p
        if self.kind == "grlex":
            return (sum(p), p)
        # grevlex: by degree, then negated reversed exponents
        return (sum(p), tuple(-e for e in reversed(p)))

    def greater(self, a: Monomial, b: Monomial) -> bool:
        return self.key(a) > self.key(b)

    def __eq__(self, other):
        return (isinstance(other, MonomialOrder) and self.kind == other.kind
                and self.precedence == other.precedence)

    def __repr__(self):
        return f"MonomialOrder({self.kind!r})"


_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_INT = re.compile(r"[0-9]+")


class PolyRing:
    """Q[x1..xn] with a fixed variable tuple and monomial order."""

    def __init__(self, variables: Sequence[str], order: Union[str, MonomialOrder] = "grevlex"):
        vs = tuple(variables)
        if len(set(vs)) != len(vs):
            raise ValueError("duplicate variable names")
        for v in vs:
            if not _IDENT.fullmatch(v):
                raise ValueError(f"bad variable name {v!r}")
        self.vars = vs
        self.order = order if isinstance(order, MonomialOrder) else MonomialOrder(order)
        self._index = {v: i for i, v in enumerate(vs)}

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = Q(c)
        if c == 0:
            return self.zero()
        return Polynomial(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "Polynomial":
        if name not in self._index:
            raise KeyError(name)
        e = [0] * self.nvars
        e[self._index[name]] = 1
        return Polynomial(self, {tuple(e): Q(1)})

    def gens(self) -> list["Polynomial"]:
        return [self.var(v) for v in self.vars]

    def from_terms(self, terms: dict) -> "Polynomial":
        return Polynomial(self, {tuple(m): Q(c) for m, c in terms.items() if Q(c) != 0})

    def monomial(self, exps: Sequence[int]) -> "Polynomial":
        return Polynomial(self, {tuple(exps): Q(1)})

    def monomials_up_to(self, degree: int) -> list[Monomial]:
        """All exponent tuples of total degree <= degree, sorted ascending."""
        out = []
        n = self.nvars
        if n == 0:
            return [()]
        for total in range(degree + 1):
            for c in itertools.combinations_with_replacement(range(n), total):
                e = [0] * n
                for i in c:
                    e[i] += 1
                out.append(tuple(e))
        out.sort(key=lambda m: (mono_degree(m), self.order.key(m)))
        return out

    def parse(self, text: str) -> "Polynomial":
        return _Parser(self, text).parse()

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.vars == other.vars
                and self.order == other.order)

    def __repr__(self):
        return f"PolyRing({list(self.vars)}, {self.order.kind})"


class Polynomial:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms  # already normalized: no zero coefficients

    # -- basic structure ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self, reverse: bool = True) -> list[tuple[Monomial, Fraction]]:
        key = self.ring.order.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=reverse)

    def lm(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        key = self.ring.order.key
        return max(self.terms, key=key)

    def lc(self) -> Fraction:
        return self.terms[self.lm()]

    def lt(self) -> tuple[Monomial, Fraction]:
        m = self.lm()
        return m, self.terms[m]

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(mono_degree(m) for m in self.terms)

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        c = self.lc()
        if c == 1:
            return self
        return Polynomial(self.ring, {m: v / c for m, v in self.terms.items()})

    def is_constant(self) -> bool:
        return all(mono_degree(m) == 0 for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.ring.nvars, Q(0))

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise ValueError("mixed rings")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, Q(0)) + c
            if v == 0:
                out.pop(m, None)
            else:
                out[m] = v
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Q(other)
            if c == 0:
                return self.ring.zero()
            return Polynomial(self.ring, {m: v * c for m, v in self.terms.items()})
        self._check(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                v = out.get(m, Q(0)) + c1 * c2
                if v == 0:
                    out.pop(m, None)
                else:
                    out[m] = v
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def mul_term(self, mono: Monomial, coeff: Fraction) -> "Polynomial":
        if coeff == 0:
            return self.ring.zero()
        return Polynomial(self.ring,
                          {mono_mul(m, mono): c * coeff for m, c in self.terms.items()})

    def diff(self, var: Union[str, int]) -> "Polynomial":
        i = self.ring._index[var] if isinstance(var, str) else var
        out: dict = {}
        for m, c in self.terms.items():
            if m[i] == 0:
                continue
            dm = list(m)
            e = dm[i]
            dm[i] -= 1
            out[tuple(dm)] = out.get(tuple(dm), Q(0)) + c * e
        return Polynomial(self.ring, {m: c for m, c in out.items() if c != 0})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        return isinstance(other, Polynomial) and self.ring == other.ring \
            and self.terms == other.terms

    def key(self):
        """Hashable canonical form (for dict keys / dedup in tests)."""
        return tuple(sorted(self.terms.items()))

    # -- printing ---------------------------------------------------------

    def _mono_str(self, m: Monomial) -> str:
        parts = []
        for name, e in zip(self.ring.vars, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            mono = self._mono_str(m)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if i == 0:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(pieces)

    def __repr__(self):
        return f"<poly {self}>"


class _Parser:
    """Recursive descent for the input grammar.

    Coefficients are integers or a/b fractions, `*` is optional between
    juxtaposed factors, `^` takes a positive integer, identifiers must
    be declared ring variables.
    """

    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text
        self.pos = 0

    def parse(self) -> Polynomial:
        p = self._expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise PolyParseError("trailing input", self.text, self.pos)
        return p

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expr(self) -> Polynomial:
        p = self._term()
        while True:
            ch = self._peek()
            if ch == "+":
                self.pos += 1
                p = p + self._term()
            elif ch == "-":
                self.pos += 1
                p = p - self._term()
            else:
                return p

    def _term(self) -> Polynomial:
        sign = 1
        while self._peek() == "-":
            self.pos += 1
            sign = -sign
        p = self._factor()
        while True:
            ch = self._peek()
            if ch == "*":
                self.pos += 1
                p = p * self._factor()
            elif ch and (ch.isalnum() or ch in "(_"):
                p = p * self._factor()  # juxtaposition
            else:
                break
        return p * sign

    def _factor(self) -> Polynomial:
        base = self._atom()
        if self._peek() == "^":
            self.pos += 1
            self._skip_ws()
            m = _INT.match(self.text, self.pos)
            if not m or int(m.group()) < 1:
                raise PolyParseError("expected positive integer exponent",
                                     self.text, self.pos)
            self.pos = m.end()
            return base ** int(m.group())
        return base

    def _atom(self) -> Polynomial:
        self._skip_ws()
        if self.pos >= len(self.text):
            raise PolyParseError("unexpected end of input", self.text, self.pos)
        ch = self.text[self.pos]
        if ch == "(":
            self.pos += 1
            p = self._expr()
            if self._peek() != ")":
                raise PolyParseError("expected ')'", self.text, self.pos)
            self.pos += 1
            return p
        m = _INT.match(self.text, self.pos)
        if m:
            num = int(m.group())
            self.pos = m.end()
            if self._peek() == "/":
                save = self.pos
                self.pos += 1
                self._skip_ws()
                d = _INT.match(self.text, self.pos)
                if not d:
                    raise PolyParseError("expected denominator", self.text, save)
                self.pos = d.end()
                return self.ring.constant(Q(num, int(d.group())))
            return self.ring.constant(num)
        m = _IDENT.match(self.text, self.pos)
        if m:
            name = m.group()
            if name not in self.ring._index:
                raise PolyParseError(
                    f"unknown variable {name!r} (ring has {', '.join(self.ring.vars) or 'no variables'})",
                    self.text, self.pos)
            self.pos = m.end()
            return self.ring.var(name)
        raise PolyParseError(f"unexpected character {ch!r}", self.text, self.pos)


# -- division and Buchberger -----------------------------------------------


def divmod_poly(f: Polynomial, divisors: Sequence[Polynomial]):
    """Multivariate division: f = sum q_i g_i + r.

    Divisors are tried in the given order; no term of r is divisible by
    any leading monomial of the divisors.
    """
    ring = f.ring
    quots = [ring.zero() for _ in divisors]
    r = ring.zero()
    p = f
    lead = [(g.lm(), g.lc()) for g in divisors]
    while not p.is_zero():
        m, c = p.lt()
        for i, g in enumerate(divisors):
            gm, gc = lead[i]
            if mono_divides(gm, m):
                qm = mono_div(m, gm)
                qc = c / gc
                quots[i] = quots[i] + ring.from_terms({qm: qc})
                p = p - g.mul_term(qm, qc)
                break
        else:
            r = r + ring.from_terms({m: c})
            p = p - ring.from_terms({m: c})
    return quots, r


def normal_form(f: Polynomial, basis: Sequence[Polynomial]) -> Polynomial:
    if isinstance(basis, GroebnerBasis):
        basis = basis.gens
    live = [g for g in basis if not g.is_zero()]
    if not live:
        return f
    _, r = divmod_poly(f, live)
    return r


def spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    fm, fc = f.lt()
    gm, gc = g.lt()
    l = mono_lcm(fm, gm)
    return f.mul_term(mono_div(l, fm), 1 / fc) - g.mul_term(mono_div(l, gm), 1 / gc)


def _interreduce(gens: list[Polynomial]) -> list[Polynomial]:
    gens = [g.monic() for g in gens if not g.is_zero()]
    changed = True
    while changed:
        changed = False
        for i in range(len(gens)):
            others = gens[:i] + gens[i + 1:]
            if not others:
                continue
            r = normal_form(gens[i], others)
            if r.is_zero():
                gens.pop(i)
                changed = True
                break
            r = r.monic()
            if r != gens[i]:
                gens[i] = r
                changed = True
                break
    key = gens[0].ring.order.key if gens else None
    gens.sort(key=lambda g: key(g.lm()), reverse=True)
    return gens


def buchberger(generators: Sequence[Polynomial]) -> list[Polynomial]:
    """Reduced Groebner basis of the ideal spanned by `generators`.

    Normal selection strategy (smallest lcm first), with the coprime
    and chain criteria to drop useless pairs.
    """
    gens = [g.monic() for g in generators if not g.is_zero()]
    if not gens:
        return []
    ring = gens[0].ring
    key = ring.order.key
    basis = list(gens)
    pairs = {(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))}
    done: set[tuple[int, int]] = set()

    def lcm_of(i, j):
        return mono_lcm(basis[i].lm(), basis[j].lm())

    while pairs:
        i, j = min(pairs, key=lambda p: (key(lcm_of(*p)), p))
        pairs.discard((i, j))
        done.add((i, j))
        li, lj = basis[i].lm(), basis[j].lm()
        l = mono_lcm(li, lj)
        if l == mono_mul(li, lj):
            continue  # coprime leading monomials
        chain = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if mono_divides(basis[k].lm(), l):
                pik = (min(i, k), max(i, k))
                pjk = (min(j, k), max(j, k))
                if pik in done and pjk in done:
                    chain = True
                    break
        if chain:
            continue
        r = normal_form(spoly(basis[i], basis[j]), basis)
        if r.is_zero():
            continue
        r = r.monic()
        basis.append(r)
        new = len(basis) - 1
        for k in range(new):
            pairs.add((k, new))
    return _interreduce(basis)


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Groebner basis together with its order."""

    ring: PolyRing
    gens: tuple

    @classmethod
    def of(cls, generators: Sequence[Polynomial], ring: Optional[PolyRing] = None):
        gens = list(generators)
        if ring is None:
            if not gens:
                raise ValueError("need a ring for the empty basis")
            ring = gens[0].ring
        return cls(ring, tuple(buchberger(gens)))

    def nf(self, f: Polynomial) -> Polynomial:
        return normal_form(f, self.gens)

    def contains(self, f: Polynomial) -> bool:
        return self.nf(f).is_zero()

    def verify(self) -> bool:
        """Post-hoc check: monic, mutually reduced, S-polynomials to zero."""
        gens = self.gens
        for g in gens:
            if g.is_zero() or g.lc() != 1:
                return False
        for i, g in enumerate(gens):
            others = gens[:i] + gens[i + 1:]
            for m in g.terms:
                if any(mono_divides(h.lm(), m) for h in others):
                    return False
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if not normal_form(spoly(gens[i], gens[j]), gens).is_zero():
                    return False
        return True

    def __iter__(self):
        return iter(self.gens)

    def __len__(self):
        return len(self.gens)


def ideal_member(f: Polynomial, basis) -> bool:
    return normal_form(f, basis).is_zero()


# -- quotient rings ----------------------------------------------------------


class QuotientRing:
    """Q[vars]/I with normal forms against the reduced basis of I.

    An empty ideal list gives the polynomial ring itself.
    """

    def __init__(self, ring_or_vars, ideal: Sequence = (),
                 order: Union[str, MonomialOrder] = "grevlex"):
        if isinstance(ring_or_vars, PolyRing):
            self.ring = ring_or_vars
        else:
            self.ring = PolyRing(ring_or_vars, order)
        gens = [self.ring.parse(g) if isinstance(g, str) else g for g in ideal]
        self.ideal_gens = tuple(gens)
        self.gb = GroebnerBasis(self.ring, tuple(buchberger(gens)))

    @property
    def vars(self):
        return self.ring.vars

    def nf(self, f: Polynomial) -> Polynomial:
        return self.gb.nf(f)

    def element(self, value) -> "RingElement":
        if isinstance(value, RingElement):
            if value.parent is not self:
                return RingElement(self, self.nf(value.poly))
            return value
        if isinstance(value, str):
            value = self.ring.parse(value)
        elif isinstance(value, (int, Fraction)):
            value = self.ring.constant(value)
        return RingElement(self, self.nf(value))

    def zero(self) -> "RingElement":
        return RingElement(self, self.ring.zero())

    def one(self) -> "RingElement":
        return RingElement(self, self.ring.one())

    def standard_monomials(self, degree: int) -> list[Monomial]:
        """Monomials of degree <= degree not divisible by any basis LT."""
        leads = [g.lm() for g in self.gb.gens]
        out = [m for m in self.ring.monomials_up_to(degree)
               if not any(mono_divides(lt, m) for lt in leads)]
        return out

    def is_finite_dimensional(self) -> bool:
        leads = [g.lm() for g in self.gb.gens]
        n = self.ring.nvars
        for i in range(n):
            if not any(mono_degree(lt) == lt[i] and lt[i] > 0 for lt in leads):
                return False
        return True

    def __eq__(self, other):
        return (isinstance(other, QuotientRing) and self.ring == other.ring
                and set(g.key() for g in self.gb.gens)
                == set(g.key() for g in other.gb.gens))

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.ideal_gens) or "0"
        return f"QuotientRing(Q[{', '.join(self.vars)}]/({gens}))"


class RingElement:
    """An element of a QuotientRing, stored as its normal form."""

    __slots__ = ("parent", "poly")

    def __init__(self, parent: QuotientRing, nf_poly: Polynomial):
        self.parent = parent
        self.poly = nf_poly

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            return other
        return self.parent.element(other)

    def __add__(self, other):
        o = self._coerce(other)
        return RingElement(self.parent, self.parent.nf(self.poly + o.poly))

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.parent, -self.poly)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + self._coerce(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RingElement(self.parent, self.poly * other)
        o = self._coerce(other)
        return RingElement(self.parent, self.parent.nf(self.poly * o.poly))

    __rmul__ = __mul__

    def __pow__(self, n):
        out = self.parent.one()
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def degree(self) -> int:
        return self.poly.total_degree()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, str, Polynomial)):
            other = self.parent.element(other)
        return isinstance(other, RingElement) and self.parent == other.parent \
            and self.poly == other.poly

    def __str__(self):
        return str(self.poly)

    def __repr__(self):
        return f"<{self.poly} mod ({', '.join(str(g) for g in self.parent.ideal_gens)})>"
