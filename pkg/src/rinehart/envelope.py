"""Order-truncated universal enveloping algebroids and their duals.

The enveloping algebra of a free Lie-Rinehart algebra is handled
entirely through its PBW basis: elements are left-coefficient sums
sum f_alpha e^alpha with weakly increasing words, and every product is
rewritten by e_i f -> f e_i + a(e_i)(f) and e_j e_i -> e_i e_j -
[e_j, e_i].  The full algebra is infinite dimensional, so everything
carries an order bound N and products that would exceed it raise
OrderOverflowError rather than silently truncating.

On top of the algebra sit the Koszul complex U (x) wedge L with its
two-term boundary, the symmetrization and antisymmetrization maps
between the symmetric/tensor pictures, the dual jet algebra on symbols
w_1..w_r with its Grothendieck connection, and the reduced cobar
complex of either coalgebra.

The symmetrization map is the UNSIGNED average over permutations; a
signed version would vanish on squares and could not be bijective.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

from .derham import wedge_insert
from .lierinehart import LieRinehartAlgebra, LieRinehartError, LRModule, \
    ce_differential, connection_flatness
from .qlinalg import QMatrix, image_basis, kernel_basis, \
    restrict_to_coordinates, subquotient_dim
from .polyring import Polynomial, Q, RingElement


class OrderOverflowError(ValueError):
    """A product or word left the order-N truncation."""


def exponents_up_to(rank: int, order: int) -> list[tuple]:
    """All multi-exponents alpha with |alpha| <= order, sorted by
    (|alpha|, alpha)."""
    out = []
    for total in range(order + 1):
        for alpha in _compositions(rank, total):
            out.append(alpha)
    return out


def _compositions(rank: int, total: int):
    if rank == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for rest in _compositions(rank - 1, total - head):
            yield (head,) + rest


def _word_of(alpha: tuple) -> tuple:
    word = ()
    for i, a in enumerate(alpha):
        word += (i,) * a
    return word


def _exponent_of(word: tuple, rank: int) -> tuple:
    alpha = [0] * rank
    for k in word:
        alpha[k] += 1
    return tuple(alpha)


class TruncatedEnveloping:
    """U(L) up to filtration order N, as a free module on PBW monomials."""

    def __init__(self, L: LieRinehartAlgebra, N: int):
        if N < 0:
            raise ValueError("order must be nonnegative")
        self.L = L
        self.N = N
        self.base = L.base
        self.rank = L.rank

    # -- word rewriting ---------------------------------------------------

    def _word_times_scalar(self, word: tuple, f) -> dict:
        """u*f as {word: coefficient}, moving f to the left."""
        f = self.base.element(f)
        if f.is_zero():
            return {}
        if not word:
            return {word: f}
        head, last = word[:-1], word[-1]
        out = {}
        for w, c in self._word_times_scalar(head, f).items():
            key = w + (last,)
            out[key] = out.get(key, self.base.zero()) + c
        g = self.L.anchor_apply(last, f)
        if not g.is_zero():
            for w, c in self._word_times_scalar(head, g).items():
                out[w] = out.get(w, self.base.zero()) + c
        return {w: c for w, c in out.items() if not c.is_zero()}

    def _normalize_word(self, word: tuple) -> dict:
        """Rewrite to weakly increasing words: {word: coefficient}."""
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                k, l = word[i], word[i + 1]
                u, v = word[:i], word[i + 2:]
                out = {}
                for w, c in self._normalize_word(u + (l, k) + v).items():
                    out[w] = out.get(w, self.base.zero()) + c
                for m, cm in enumerate(self.L.bracket_coeffs(k, l)):
                    if cm.is_zero():
                        continue
                    for w1, c1 in self._word_times_scalar(u, cm).items():
                        for w2, c2 in self._normalize_word(w1 + (m,) + v).items():
                            out[w2] = out.get(w2, self.base.zero()) + c1 * c2
                return {w: c for w, c in out.items() if not c.is_zero()}
        return {word: self.base.one()}

    # -- element constructors ---------------------------------------------

    def element(self, terms: dict) -> "UEAElement":
        clean = {}
        for alpha, c in terms.items():
            alpha = tuple(alpha)
            if len(alpha) != self.rank:
                raise ValueError("exponent length must equal the rank")
            if sum(alpha) > self.N:
                raise OrderOverflowError(
                    f"exponent {alpha} exceeds order {self.N}")
            ce = self.base.element(c)
            if not ce.is_zero():
                clean[alpha] = ce
        return UEAElement(self, clean)

    def zero(self) -> "UEAElement":
        return UEAElement(self, {})

    def one(self) -> "UEAElement":
        return self.element({(0,) * self.rank: 1})

    def generator(self, i: int) -> "UEAElement":
        alpha = tuple(1 if j == i else 0 for j in range(self.rank))
        return self.element({alpha: 1})

    def monomial(self, alpha: tuple) -> "UEAElement":
        return self.element({tuple(alpha): 1})

    def basis_exponents(self, order: Optional[int] = None) -> list[tuple]:
        return exponents_up_to(self.rank, self.N if order is None else order)

    def from_word(self, word: Sequence) -> "UEAElement":
        """Normal form of a word of generator indices and ring elements."""
        letters = sum(1 for x in word if isinstance(x, int))
        if letters > self.N:
            raise OrderOverflowError(
                f"word has filtration degree {letters} > order {self.N}")
        state = {(): self.base.one()}
        for item in word:
            new: dict = {}
            if isinstance(item, int):
                if not 0 <= item < self.rank:
                    raise ValueError(f"no generator {item}")
                for w, c in state.items():
                    new[w + (item,)] = c
            else:
                f = self.base.element(item)
                for w, c in state.items():
                    for w2, c2 in self._word_times_scalar(w, f).items():
                        new[w2] = new.get(w2, self.base.zero()) + c * c2
            state = new
        terms: dict = {}
        for w, c in state.items():
            for w2, c2 in self._normalize_word(w).items():
                alpha = _exponent_of(w2, self.rank)
                terms[alpha] = terms.get(alpha, self.base.zero()) + c * c2
        return self.element(terms)

    # -- algebra and coalgebra structure ------------------------------------

    def product(self, u: "UEAElement", v: "UEAElement") -> "UEAElement":
        if u.order() + v.order() > self.N:
            raise OrderOverflowError(
                f"product order {u.order()}+{v.order()} exceeds {self.N}")
        terms: dict = {}
        for alpha, f in u.terms.items():
            wa = _word_of(alpha)
            for beta, g in v.terms.items():
                for w, c in self._word_times_scalar(wa, g).items():
                    for w2, c2 in self._normalize_word(w + _word_of(beta)).items():
                        key = _exponent_of(w2, self.rank)
                        terms[key] = terms.get(key, self.base.zero()) + f * c * c2
        return self.element(terms)

    def coproduct(self, u: "UEAElement") -> "TensorElement":
        """Delta(u) in U (x) U with all coefficients on the left leg."""
        zero2 = ((0,) * self.rank, (0,) * self.rank)
        out = TensorElement(self, 2, {})
        for alpha, f in u.terms.items():
            t = TensorElement(self, 2, {zero2: f})
            for i, a in enumerate(alpha):
                prim = TensorElement(self, 2, {
                    (_exponent_of((i,), self.rank), (0,) * self.rank): self.base.one(),
                    ((0,) * self.rank, _exponent_of((i,), self.rank)): self.base.one(),
                })
                for _ in range(a):
                    t = t.mul(prim)
            out = out.add(t)
        return out

    def counit(self, u: "UEAElement") -> RingElement:
        return u.terms.get((0,) * self.rank, self.base.zero())


class UEAElement:
    """sum f_alpha e^alpha with weakly increasing PBW monomials."""

    __slots__ = ("env", "terms")

    def __init__(self, env: TruncatedEnveloping, terms: dict):
        self.env = env
        self.terms = terms

    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def add(self, other: "UEAElement") -> "UEAElement":
        terms = dict(self.terms)
        for a, c in other.terms.items():
            s = terms.get(a, self.env.base.zero()) + c
            if s.is_zero():
                terms.pop(a, None)
            else:
                terms[a] = s
        return UEAElement(self.env, terms)

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.add(other.scale(-1))

    def scale(self, c) -> "UEAElement":
        ce = self.env.base.element(c)
        return self.env.element({a: ce * f for a, f in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Polynomial, RingElement, str)):
            return self.scale(other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, UEAElement):
            return self.env.product(self, other)
        return self.scale(other)

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other):
        return (isinstance(other, UEAElement) and self.env is other.env
                and self.terms.keys() == other.terms.keys()
                and all(self.terms[a] == other.terms[a] for a in self.terms))

    def __str__(self):
        return _render_terms(self.terms, _pbw_symbol)

    def __repr__(self):
        return f"<U: {self}>"


def _pbw_symbol(alpha: tuple) -> str:
    parts = []
    for i, a in enumerate(alpha):
        if a == 1:
            parts.append(f"e{i + 1}")
        elif a > 1:
            parts.append(f"e{i + 1}^{a}")
    return "*".join(parts)


def _flat_weight(key) -> int:
    return sum(_flat_weight(x) if isinstance(x, tuple) else x for x in key)


def _render_terms(terms: dict, symbol_fn) -> str:
    if not terms:
        return "0"
    pieces = []
    for alpha in sorted(terms, key=lambda a: (_flat_weight(a), a)):
        c = terms[alpha]
        poly = c.poly if isinstance(c, RingElement) else c
        sym = symbol_fn(alpha)
        neg = False
        if not sym:
            body = str(poly)
            if len(poly.terms) == 1 and poly.lc() < 0:
                body, neg = str(-poly), True
        elif poly == poly.ring.one():
            body = sym
        elif poly == -poly.ring.one():
            body, neg = sym, True
        elif len(poly.terms) == 1:
            if poly.lc() < 0:
                body, neg = f"{-poly}*{sym}", True
            else:
                body = f"{poly}*{sym}"
        else:
            body = f"({poly})*{sym}"
        if not pieces:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(pieces)


class TensorElement:
    """Left-coefficient tensor over the base ring: coefficients always
    sit in front of the first leg, each leg a pure PBW monomial."""

    __slots__ = ("env", "legs", "terms")

    def __init__(self, env: TruncatedEnveloping, legs: int, terms: dict):
        self.env = env
        self.legs = legs
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    def add(self, other: "TensorElement") -> "TensorElement":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k, self.env.base.zero()) + c
            if s.is_zero():
                terms.pop(k, None)
            else:
                terms[k] = s
        return TensorElement(self.env, self.legs, terms)

    def scale(self, c) -> "TensorElement":
        ce = self.env.base.element(c)
        return TensorElement(self.env, self.legs,
                             {k: ce * v for k, v in self.terms.items()})

    def mul(self, other: "TensorElement") -> "TensorElement":
        """Legwise product (two-leg tensors)."""
        if self.legs != 2 or other.legs != 2:
            raise ValueError("tensor product implemented for two legs")
        env = self.env
        out = TensorElement(env, 2, {})
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                left = env.product(env.element({a1: c1}),
                                   env.element({a2: c2}))
                right = env.product(env.monomial(b1), env.monomial(b2))
                for beta, h in right.terms.items():
                    shifted = env.product(left, env.element(
                        {(0,) * env.rank: h}))
                    for alpha, g in shifted.terms.items():
                        key = (alpha, beta)
                        cur = out.terms.get(key, env.base.zero()) + g
                        if cur.is_zero():
                            out.terms.pop(key, None)
                        else:
                            out.terms[key] = cur
        return out

    def expand_leg(self, i: int) -> "TensorElement":
        """Apply the coproduct to leg i (0-based), pushing the new
        coefficients back to the far left.

        Crossing a leg rewrites it: m*h = sum c'*m' inside U, so the
        legs to the left of i may change in the process."""
        env = self.env
        zero_exp = (0,) * env.rank
        out = TensorElement(env, self.legs + 1, {})
        for key, c in self.terms.items():
            inner = env.coproduct(env.monomial(key[i]))
            for (b, g), h in inner.terms.items():
                # states: processed legs j..i-1 with the coefficient
                # still traveling left
                states = {(): h}
                for j in range(i - 1, -1, -1):
                    new_states: dict = {}
                    for legs_right, coeff in states.items():
                        prod = env.product(env.monomial(key[j]), env.element(
                            {zero_exp: coeff}))
                        for mj, c2 in prod.terms.items():
                            k2 = (mj,) + legs_right
                            cur = new_states.get(k2, env.base.zero()) + c2
                            if cur.is_zero():
                                new_states.pop(k2, None)
                            else:
                                new_states[k2] = cur
                    states = new_states
                for legs_left, coeff in states.items():
                    new_key = legs_left + (b, g) + key[i + 1:]
                    cur = out.terms.get(new_key, env.base.zero()) + c * coeff
                    if cur.is_zero():
                        out.terms.pop(new_key, None)
                    else:
                        out.terms[new_key] = cur
        return out

    def __eq__(self, other):
        return (isinstance(other, TensorElement) and self.legs == other.legs
                and self.terms.keys() == other.terms.keys()
                and all(self.terms[k] == other.terms[k] for k in self.terms))

    def __str__(self):
        def sym(key):
            return " (x) ".join(_pbw_symbol(a) or "1" for a in key)
        return _render_terms(self.terms, sym)

    def __repr__(self):
        return f"<tensor: {self}>"


def tensor_pair(u: UEAElement, v: UEAElement) -> TensorElement:
    """u (x) v over the base ring: the right leg's coefficients cross
    the left leg by right multiplication inside U."""
    env = u.env
    out = TensorElement(env, 2, {})
    for b, d in v.terms.items():
        shifted = env.product(u, env.element({(0,) * env.rank: d}))
        for a, c in shifted.terms.items():
            key = (a, b)
            cur = out.terms.get(key, env.base.zero()) + c
            if cur.is_zero():
                out.terms.pop(key, None)
            else:
                out.terms[key] = cur
    return out


# -- operation-level wrappers -------------------------------------------------


def uea_normal_form(env: TruncatedEnveloping, word: Sequence) -> UEAElement:
    """PBW normal form of a word of generator indices and ring elements."""
    return env.from_word(word)


def uea_product(u: UEAElement, v: UEAElement) -> UEAElement:
    return u.env.product(u, v)


def coproduct(u: UEAElement) -> TensorElement:
    return u.env.coproduct(u)


def counit(u: UEAElement) -> RingElement:
    return u.env.counit(u)


def pbw_symmetrize(env: TruncatedEnveloping, sym_terms: dict) -> UEAElement:
    """Unsigned symmetrization S(L) -> U(L): each monomial becomes the
    average of all arrangements of its letters."""
    out = env.zero()
    for alpha, c in sym_terms.items():
        alpha = tuple(alpha)
        if sum(alpha) > env.N:
            raise OrderOverflowError(
                f"symmetric term {alpha} exceeds order {env.N}")
        word = _word_of(alpha)
        acc = env.zero()
        for perm in itertools.permutations(word):
            acc = acc.add(env.from_word(list(perm)))
        out = out.add(acc.scale(Q(1, factorial(len(word)))).scale(c))
    return out


def _perm_sign(seq) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def alt_map(env: TruncatedEnveloping, wedge) -> TensorElement:
    """Signed average wedge^p L -> U tensor p."""
    if isinstance(wedge, tuple):
        wedge = {wedge: 1}
    sizes = {len(k) for k in wedge}
    if len(sizes) != 1:
        raise ValueError("wedge element must be homogeneous")
    p = sizes.pop()
    if p > env.N:
        raise OrderOverflowError(f"tensor degree {p} exceeds order {env.N}")
    out = TensorElement(env, p, {})
    for subset, c in wedge.items():
        ce = env.base.element(c) * Q(1, factorial(p))
        for perm in itertools.permutations(range(p)):
            key = tuple(_exponent_of((subset[perm[t]],), env.rank)
                        for t in range(p))
            coeff = ce * _perm_sign(perm)
            cur = out.terms.get(key, env.base.zero()) + coeff
            if cur.is_zero():
                out.terms.pop(key, None)
            else:
                out.terms[key] = cur
    return out


def proj_map(t: TensorElement) -> dict:
    """Factorwise degree-1 projection followed by wedging."""
    env = t.env
    out: dict = {}
    for key, c in t.terms.items():
        letters = []
        ok = True
        for alpha in key:
            if sum(alpha) != 1:
                ok = False
                break
            letters.append(alpha.index(1))
        if not ok or len(set(letters)) != len(letters):
            continue
        sign = _perm_sign(letters)
        subset = tuple(sorted(letters))
        cur = out.get(subset, env.base.zero()) + sign * c
        if cur.is_zero():
            out.pop(subset, None)
        else:
            out[subset] = cur
    return out


# -- the Koszul complex -------------------------------------------------------


class KoszulComplex:
    """U_{<=N-p} (x) wedge^p L with the two-term Rinehart boundary."""

    def __init__(self, L: LieRinehartAlgebra, N: int):
        self.L = L
        self.N = N
        self.env = TruncatedEnveloping(L, N)
        self.rank = L.rank

    def chain_basis(self, p: int) -> list[tuple]:
        """(exponent, subset) pairs spanning U_{<=N-p} (x) wedge^p."""
        if p < 0 or p > self.rank or self.N - p < 0:
            return []
        out = []
        for alpha in exponents_up_to(self.rank, self.N - p):
            for K in itertools.combinations(range(self.rank), p):
                out.append((alpha, K))
        out.sort(key=lambda t: (sum(t[0]), t[0], t[1]))
        return out

    def boundary(self, chain: dict, p: int) -> dict:
        """The boundary of sum c * (e^alpha (x) e_K), p >= 1."""
        if p < 1:
            raise ValueError("boundary needs wedge degree >= 1")
        env = self.env
        base = self.L.base
        out: dict = {}

        def put(key, val):
            cur = out.get(key, base.zero()) + val
            if cur.is_zero():
                out.pop(key, None)
            else:
                out[key] = cur

        for (alpha, K), c in chain.items():
            u = env.element({tuple(alpha): c})
            for idx, k in enumerate(K):
                rest = K[:idx] + K[idx + 1:]
                sign = (-1) ** idx
                prod = env.product(u, env.generator(k))
                for beta, f in prod.terms.items():
                    put((beta, rest), sign * f)
            for ai, aj in itertools.combinations(range(len(K)), 2):
                rest = tuple(x for t, x in enumerate(K) if t not in (ai, aj))
                sign = (-1) ** (ai + aj)
                for m, cm in enumerate(self.L.bracket_coeffs(K[ai], K[aj])):
                    if cm.is_zero():
                        continue
                    ins = wedge_insert(m, rest)
                    if ins is None:
                        continue
                    wsign, K2 = ins
                    prod = env.product(u, env.element(
                        {(0,) * self.rank: cm}))
                    for beta, f in prod.terms.items():
                        put((beta, K2), sign * wsign * f)
        return out


def koszul_differential(kz: KoszulComplex, chain: dict, p: int) -> dict:
    return kz.boundary(chain, p)


@dataclass(frozen=True)
class KoszulReport:
    rank: int
    N: int
    faithful_bound: int
    d_squared_zero: bool
    eps_composite_zero: bool
    h0_isomorphic_to_base: bool
    homology: Optional[tuple]  # per-degree dicts, None when base infinite-dim
    witnesses: tuple

    @property
    def ok(self) -> bool:
        return (self.d_squared_zero and self.eps_composite_zero
                and self.h0_isomorphic_to_base)

    def as_dict(self):
        return {
            "rank": self.rank,
            "order": self.N,
            "faithful_bound": self.faithful_bound,
            "d_squared_zero": self.d_squared_zero,
            "eps_composite_zero": self.eps_composite_zero,
            "h0_isomorphic_to_base": self.h0_isomorphic_to_base,
            "homology": None if self.homology is None else list(self.homology),
            "witnesses": list(self.witnesses),
        }


def _finite_standard_monomials(base) -> list:
    if not base.is_finite_dimensional():
        raise ValueError("base ring is not finite dimensional over Q")
    d = 0
    while len(base.standard_monomials(d)) != len(base.standard_monomials(d + 1)):
        d += 1
    return base.standard_monomials(d)


def koszul_checks(L: LieRinehartAlgebra, N: int,
                  degrees: Optional[Sequence[int]] = None) -> KoszulReport:
    """d^2 = 0, counit kills boundaries, H_0 = base, and (for a
    finite-dimensional base) homology dims with their faithful-range
    counterparts (filtration <= N - rank).  `degrees` restricts which
    homology degrees are tabulated; the structural checks always run."""
    kz = KoszulComplex(L, N)
    env = kz.env
    base = L.base
    r = L.rank
    witnesses = []

    d2 = True
    for p in range(2, r + 1):
        for alpha, K in kz.chain_basis(p):
            b2 = kz.boundary(kz.boundary({(alpha, K): 1}, p), p - 1)
            if b2:
                d2 = False
                witnesses.append(f"d^2 != 0 on e^{alpha} (x) wedge {K}")
    eps0 = True
    for alpha, K in kz.chain_basis(1):
        b = kz.boundary({(alpha, K): 1}, 1)
        val = b.get(((0,) * r, ()), base.zero())
        if not val.is_zero():
            eps0 = False
            witnesses.append(f"eps(d(e^{alpha} (x) e{K[0] + 1})) = {val}")

    h0 = eps0
    for alpha in exponents_up_to(r, N):
        if sum(alpha) == 0:
            continue
        k = max(i for i, a in enumerate(alpha) if a > 0)
        lower = tuple(a - (1 if i == k else 0) for i, a in enumerate(alpha))
        prod = env.product(env.monomial(lower), env.generator(k))
        if prod != env.monomial(alpha):
            h0 = False
            witnesses.append(f"e^{alpha} is not a boundary")

    homology = None
    if base.is_finite_dimensional():
        stds = _finite_standard_monomials(base)
        labels = {}
        index = {}
        for p in range(r + 2):
            labs = [(m, alpha, K) for (alpha, K) in kz.chain_basis(p)
                    for m in stds]
            labs.sort(key=lambda t: (sum(t[1]), t[1], t[2], t[0]))
            labels[p] = labs
            index[p] = {lab: i for i, lab in enumerate(labs)}

        def matrix(p):
            M = QMatrix(len(labels[p - 1]), len(labels[p]))
            for col, (m, alpha, K) in enumerate(labels[p]):
                chain = {(alpha, K): base.element(base.ring.monomial(m))}
                for (beta, K2), f in kz.boundary(chain, p).items():
                    for m2, c in f.poly.terms.items():
                        M[index[p - 1][(m2, beta, K2)], col] += c
            return M

        entries = []
        bound = N - r
        wanted = range(r + 1) if degrees is None else sorted(set(degrees))
        for p in wanted:
            if not 0 <= p <= r:
                raise ValueError(f"homology degree {p} out of range")
            if p == 0:
                z = kernel_basis(QMatrix(0, len(labels[0])))
            else:
                z = kernel_basis(matrix(p))
            if p < r:
                w = image_basis(matrix(p + 1))
            else:
                w = image_basis(QMatrix(len(labels[p]), 0))
            dim, _ = subquotient_dim(z, w)
            faithful = [i for i, (m, alpha, K) in enumerate(labels[p])
                        if sum(alpha) + p <= bound]
            zf = restrict_to_coordinates(z, faithful)
            wf = restrict_to_coordinates(w, faithful)
            dim_f, _ = subquotient_dim(zf, wf)
            entries.append({"degree": p, "dim": dim, "faithful_dim": dim_f})
        homology = tuple(entries)

    return KoszulReport(r, N, N - r, d2, eps0, h0, homology, tuple(witnesses))


def hom_complex_compare(L: LieRinehartAlgebra, E: LRModule, p: int):
    """Check that Hom off the Koszul resolution gives exactly the CE
    differential in degree p.  Both differentials obey the same Leibniz
    rule in the cochain argument, so generator cochains decide it.

    Returns (True, None) or (False, witness)."""
    if not 0 <= p <= L.rank:
        raise ValueError("degree out of range")
    flat = connection_flatness(L, E)
    if not flat.flat:
        raise LieRinehartError("coefficients must be flat")
    if p == L.rank:
        return True, None
    kz = KoszulComplex(L, p + 1)
    r = L.rank
    zero_exp = (0,) * r
    Ering = E.coefficients
    for K in itertools.combinations(range(r), p):
        for t in range(E.rank):
            vec = tuple(Ering.one() if s == t else Ering.zero()
                        for s in range(E.rank))
            omega = {K: vec}
            ce = ce_differential(L, E, p, omega)
            for J in itertools.combinations(range(r), p + 1):
                b = kz.boundary({(zero_exp, J): 1}, p + 1)
                val = list(E.zero_vec())
                for (beta, M), f in b.items():
                    if M != K:
                        continue
                    fe = Ering.element(f.poly)
                    if sum(beta) == 0:
                        val = [a + fe * x for a, x in zip(val, vec)]
                    elif sum(beta) == 1:
                        nab = E.nabla(beta.index(1), vec)
                        val = [a + fe * x for a, x in zip(val, nab)]
                    else:
                        raise AssertionError("unexpected order in boundary")
                want = ce.get(J, E.zero_vec())
                if tuple(val) != tuple(want):
                    return False, {"source": (K, t), "wedge": J,
                                   "koszul": tuple(str(x) for x in val),
                                   "ce": tuple(str(x) for x in want)}
    return True, None


def reduced_koszul_differential(L: LieRinehartAlgebra, p: int) -> list:
    """Counit reduction of the symmetric-side Koszul boundary on
    wedge^p L: rows indexed by source subsets, columns by target
    subsets.  The claim under test is that every entry is zero; a
    nonzero matrix is the falsification witness."""
    if p < 1:
        raise ValueError("need wedge degree >= 1")
    r = L.rank
    n = L.base.ring.nvars
    zero = L.base.ring.zero()
    abelian = LieRinehartAlgebra(L.base, r, [[zero] * n for _ in range(r)])
    kz = KoszulComplex(abelian, p)
    targets = list(itertools.combinations(range(r), p - 1))
    matrix = []
    for K in itertools.combinations(range(r), p):
        b = kz.boundary({((0,) * r, K): 1}, p)
        row = [L.base.zero()] * len(targets)
        for (beta, K2), f in b.items():
            if beta == (0,) * r:
                row[targets.index(K2)] = row[targets.index(K2)] + f
        matrix.append(row)
    return matrix


# -- jets ---------------------------------------------------------------------


class TruncatedJet:
    """R-linear functional on U_{<=order}, tabulated on PBW monomials."""

    __slots__ = ("env", "coeffs", "order")

    def __init__(self, env: TruncatedEnveloping, coeffs: dict,
                 order: Optional[int] = None):
        self.env = env
        self.order = env.N if order is None else order
        clean = {}
        for alpha, c in coeffs.items():
            alpha = tuple(alpha)
            if sum(alpha) > self.order:
                raise OrderOverflowError(
                    f"jet coefficient {alpha} beyond order {self.order}")
            ce = env.base.element(c)
            if not ce.is_zero():
                clean[alpha] = ce
        self.coeffs = clean

    def evaluate(self, u: UEAElement) -> RingElement:
        if u.order() > self.order:
            raise OrderOverflowError("element exceeds the jet's order")
        acc = self.env.base.zero()
        for alpha, f in u.terms.items():
            c = self.coeffs.get(alpha)
            if c is not None:
                acc = acc + f * c
        return acc

    def add(self, other: "TruncatedJet") -> "TruncatedJet":
        order = min(self.order, other.order)
        coeffs = {a: c for a, c in self.coeffs.items() if sum(a) <= order}
        for a, c in other.coeffs.items():
            if sum(a) > order:
                continue
            s = coeffs.get(a, self.env.base.zero()) + c
            if s.is_zero():
                coeffs.pop(a, None)
            else:
                coeffs[a] = s
        return TruncatedJet(self.env, coeffs, order)

    def scale(self, c) -> "TruncatedJet":
        ce = self.env.base.element(c)
        return TruncatedJet(self.env,
                            {a: ce * v for a, v in self.coeffs.items()},
                            self.order)

    def __sub__(self, other):
        return self.add(other.scale(-1))

    def __eq__(self, other):
        return (isinstance(other, TruncatedJet) and self.order == other.order
                and self.coeffs.keys() == other.coeffs.keys()
                and all(self.coeffs[a] == other.coeffs[a]
                        for a in self.coeffs))

    def __str__(self):
        return _render_terms(self.coeffs, _jet_symbol)

    def __repr__(self):
        return f"<jet(order {self.order}): {self}>"


def _jet_symbol(alpha: tuple) -> str:
    parts = []
    for i, a in enumerate(alpha):
        if a == 1:
            parts.append(f"w{i + 1}")
        elif a > 1:
            parts.append(f"w{i + 1}^{a}")
    return "*".join(parts)


def jet_counit(env: TruncatedEnveloping,
               order: Optional[int] = None) -> TruncatedJet:
    """The unit of the jet algebra: picks the order-zero coefficient."""
    return TruncatedJet(env, {(0,) * env.rank: 1}, order)


def jet_symbol(env: TruncatedEnveloping, i: int) -> TruncatedJet:
    alpha = tuple(1 if j == i else 0 for j in range(env.rank))
    return TruncatedJet(env, {alpha: 1})


def jet_product(phi: TruncatedJet, psi: TruncatedJet) -> TruncatedJet:
    """Convolution against the coproduct of U."""
    env = phi.env
    if env is not psi.env:
        raise ValueError("jets over different envelopes")
    order = min(phi.order, psi.order)
    base = env.base
    coeffs = {}
    for alpha in exponents_up_to(env.rank, order):
        t = env.coproduct(env.monomial(alpha))
        acc = base.zero()
        for (beta, gamma), h in t.terms.items():
            a = phi.coeffs.get(beta)
            b = psi.coeffs.get(gamma)
            if a is not None and b is not None:
                acc = acc + h * a * b
        coeffs[alpha] = acc
    return TruncatedJet(env, coeffs, order)


def jet_from_symbols(env: TruncatedEnveloping,
                     poly: Polynomial) -> TruncatedJet:
    """Algebra map from polynomials in w_1..w_r: each w_i goes to the
    dual of e_i and monomials multiply by convolution."""
    if poly.ring.nvars != env.rank:
        raise ValueError("symbol polynomial must have one variable per "
                         "generator")
    out = TruncatedJet(env, {})
    for exps, c in poly.terms.items():
        if sum(exps) > env.N:
            raise OrderOverflowError(
                f"symbol monomial {exps} exceeds order {env.N}")
        t = jet_counit(env).scale(c)
        for i, a in enumerate(exps):
            for _ in range(a):
                t = jet_product(t, jet_symbol(env, i))
        out = out.add(t)
    return out


def grothendieck_connection(L: LieRinehartAlgebra, phi: TruncatedJet,
                            i: int) -> TruncatedJet:
    """(nabla_i phi)(u) = a(e_i)(phi(u)) - phi(e_i u), one order lower."""
    env = phi.env
    if env.L is not L:
        raise ValueError("jet does not belong to this algebra")
    if phi.order < 1:
        raise OrderOverflowError("connection needs order >= 1")
    coeffs = {}
    for alpha in exponents_up_to(env.rank, phi.order - 1):
        u = env.monomial(alpha)
        moved = phi.evaluate(env.product(env.generator(i), u))
        own = phi.coeffs.get(alpha)
        lead = L.anchor_apply(i, own) if own is not None else env.base.zero()
        coeffs[alpha] = lead - moved
    return TruncatedJet(env, coeffs, phi.order - 1)


# -- the reduced cobar complex ------------------------------------------------


class FiniteCoalgebra:
    """The coalgebra underlying U or its jet dual, restricted to the
    situations where the cobar complex is an honest finite Q-complex:
    finite-dimensional base and zero anchor (central coefficients)."""

    def __init__(self, env: TruncatedEnveloping, kind: str):
        if kind not in ("enveloping", "jets"):
            raise ValueError(f"unknown coalgebra kind {kind!r}")
        if not env.base.is_finite_dimensional():
            raise ValueError("cobar needs a finite-dimensional base ring")
        for row in env.L.anchor:
            for entry in row:
                if not entry.is_zero():
                    raise ValueError("cobar needs a zero anchor")
        self.env = env
        self.kind = kind

    @classmethod
    def of_enveloping(cls, env: TruncatedEnveloping) -> "FiniteCoalgebra":
        return cls(env, "enveloping")

    @classmethod
    def of_jets(cls, env: TruncatedEnveloping) -> "FiniteCoalgebra":
        return cls(env, "jets")

    def reduced_exponents(self) -> list[tuple]:
        return [a for a in self.env.basis_exponents() if sum(a) > 0]

    def reduced_coproduct(self, alpha: tuple) -> dict:
        """Delta-bar on the basis element indexed by alpha, as
        {(beta, gamma): coefficient} with both legs nonzero."""
        env = self.env
        zero = (0,) * env.rank
        if self.kind == "enveloping":
            t = env.coproduct(env.monomial(alpha))
            return {k: v for k, v in t.terms.items()
                    if k[0] != zero and k[1] != zero}
        out = {}
        total = sum(alpha)
        for beta in exponents_up_to(env.rank, total - 1):
            if sum(beta) == 0:
                continue
            for gamma in exponents_up_to(env.rank, total - sum(beta)):
                if sum(gamma) == 0:
                    continue
                prod = env.product(env.monomial(beta), env.monomial(gamma))
                c = prod.terms.get(tuple(alpha))
                if c is not None:
                    out[(beta, gamma)] = c
        return out


@dataclass(frozen=True)
class CobarReport:
    kind: str
    N: int
    tensor_degree_max: int
    dims: tuple
    degrees: tuple  # per-degree dicts with dim and faithful flag

    def as_dict(self):
        return {
            "kind": self.kind,
            "order": self.N,
            "tensor_degree_max": self.tensor_degree_max,
            "dims": list(self.dims),
            "degrees": [dict(d) for d in self.degrees],
        }


def cobar_truncated_cohomology(A: FiniteCoalgebra,
                               tensor_degree_max: int = 3,
                               order: Optional[int] = None,
                               degrees: Optional[Sequence[int]] = None
                               ) -> CobarReport:
    """Cohomology of the reduced cobar complex of A in tensor degrees
    0..tensor_degree_max-1.  `order` lowers the truncation below the
    coalgebra's own bound; `degrees` restricts which cohomology degrees
    are reported."""
    if tensor_degree_max < 1:
        raise ValueError("need at least tensor degree 1")
    env = A.env
    base = env.base
    N = env.N if order is None else order
    if N > env.N:
        raise OrderOverflowError(
            f"requested order {N} exceeds the coalgebra's bound {env.N}")
    stds = _finite_standard_monomials(base)
    red = A.reduced_exponents()
    rc = {alpha: A.reduced_coproduct(alpha) for alpha in red}

    def tensor_labels(n):
        if n == 0:
            return [(m, ()) for m in stds]
        out = []

        def rec(prefix, remaining):
            if len(prefix) == n:
                for m in stds:
                    out.append((m, tuple(prefix)))
                return
            for a in red:
                if sum(a) <= remaining:
                    rec(prefix + [a], remaining - sum(a))
        rec([], N)
        out.sort(key=lambda t: (sum(sum(a) for a in t[1]), t[1], t[0]))
        return out

    labels = {n: tensor_labels(n) for n in range(tensor_degree_max + 1)}
    index = {n: {lab: i for i, lab in enumerate(labels[n])}
             for n in labels}

    def matrix(n):
        """d: C^n -> C^{n+1}."""
        M = QMatrix(len(labels[n + 1]), len(labels[n]))
        for col, (m, alphas) in enumerate(labels[n]):
            for i, alpha in enumerate(alphas):
                sign = (-1) ** i
                for (beta, gamma), h in rc[alpha].items():
                    coeff = base.element(base.ring.monomial(m)) * h
                    key_tail = alphas[:i] + (beta, gamma) + alphas[i + 1:]
                    for m2, c in coeff.poly.terms.items():
                        M[index[n + 1][(m2, key_tail)], col] += sign * c
        return M

    wanted = (set(range(tensor_degree_max)) if degrees is None
              else set(degrees))
    if not wanted <= set(range(tensor_degree_max)):
        raise ValueError("cohomology degree out of range")
    entries = []
    dims = []
    prev = None
    for n in range(tensor_degree_max):
        d_n = matrix(n)
        if n in wanted:
            z = kernel_basis(d_n)
            w = image_basis(prev) if prev is not None else image_basis(
                QMatrix(len(labels[0]), 0))
            dim, _ = subquotient_dim(z, w)
            dims.append(dim)
            entries.append({"degree": n, "dim": dim, "faithful": n <= N})
        prev = d_n
    return CobarReport(A.kind, N, tensor_degree_max, tuple(dims),
                       tuple(entries))
