"""Groebner bases and syzygies for free modules over a polynomial ring.

Vectors are tuples of Polynomial, all over the same ring.  Orders
extend the ring's monomial order position-over-term: positions are
ranked by an explicit priority list and compared before monomials, so
the two dominance conventions below differ only in which coordinate of
a vector is allowed to be a leading position.

Syzygies are computed by lifted elimination: each input vector is
extended with a cofactor unit vector, the extended block is given
strictly lower priority, and the basis elements whose original block
vanished are exactly a basis of the syzygy module.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence, Union

from .polyring import (
    Monomial,
    PolyRing,
    Polynomial,
    Q,
    mono_div,
    mono_divides,
    mono_lcm,
)

Vector = tuple  # tuple[Polynomial, ...]


class FreeModuleOrder:
    """Position-over-term order on R^n.

    `priority` lists component indices from most to least significant.
    A term in a higher-priority position beats any term in a lower one;
    ties fall back to the ring's monomial order.
    """

    def __init__(self, ring: PolyRing, ncomps: int, priority: Sequence[int]):
        if sorted(priority) != list(range(ncomps)):
            raise ValueError("priority must be a permutation of the positions")
        self.ring = ring
        self.ncomps = ncomps
        self.priority = tuple(priority)
        self._rank = {p: i for i, p in enumerate(self.priority)}

    @classmethod
    def first_dominant(cls, ring: PolyRing, ncomps: int) -> "FreeModuleOrder":
        return cls(ring, ncomps, range(ncomps))

    @classmethod
    def last_dominant(cls, ring: PolyRing, ncomps: int) -> "FreeModuleOrder":
        return cls(ring, ncomps, range(ncomps - 1, -1, -1))

    def term_key(self, pos: int, mono: Monomial):
        return (-self._rank[pos], self.ring.order.key(mono))

    def leading_term(self, v: Vector):
        """(position, monomial, coefficient) of the largest term, or None."""
        best = None
        for pos in self.priority:
            p = v[pos]
            if p.is_zero():
                continue
            return (pos, p.lm(), p.lc())
        return best


def zero_vector(ring: PolyRing, ncomps: int) -> Vector:
    return tuple(ring.zero() for _ in range(ncomps))


def vec_is_zero(v: Vector) -> bool:
    return all(p.is_zero() for p in v)


def vec_add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(v: Vector, c: Union[Polynomial, int, Fraction]) -> Vector:
    return tuple(p * c for p in v)


def vec_mul_term(v: Vector, mono: Monomial, coeff: Fraction) -> Vector:
    return tuple(p.mul_term(mono, coeff) for p in v)


def vec_key(v: Vector):
    return tuple(p.key() for p in v)


def vec_str(v: Vector) -> str:
    return "(" + ", ".join(str(p) for p in v) + ")"


def _monic_vector(v: Vector, morder: FreeModuleOrder) -> Vector:
    lt = morder.leading_term(v)
    if lt is None:
        return v
    _, _, c = lt
    if c == 1:
        return v
    return vec_scale(v, 1 / c)


def module_normal_form(v: Vector, basis: Sequence[Vector],
                       morder: FreeModuleOrder) -> Vector:
    """Fully reduce v: no remaining term divisible by a basis leading term."""
    live = [(g, morder.leading_term(g)) for g in basis if not vec_is_zero(g)]
    ring = morder.ring
    rem = zero_vector(ring, morder.ncomps)
    p = v
    while not vec_is_zero(p):
        pos, mono, coeff = morder.leading_term(p)
        for g, (gpos, gmono, gcoeff) in live:
            if gpos == pos and mono_divides(gmono, mono):
                p = vec_sub(p, vec_mul_term(g, mono_div(mono, gmono), coeff / gcoeff))
                break
        else:
            t = ring.from_terms({mono: coeff})
            rem = tuple(r + t if k == pos else r for k, r in enumerate(rem))
            p = tuple(q - t if k == pos else q for k, q in enumerate(p))
    return rem


def module_spoly(f: Vector, g: Vector,
                 morder: FreeModuleOrder) -> Optional[Vector]:
    """S-vector, or None when the leading positions differ."""
    fpos, fm, fc = morder.leading_term(f)
    gpos, gm, gc = morder.leading_term(g)
    if fpos != gpos:
        return None
    l = mono_lcm(fm, gm)
    return vec_sub(vec_mul_term(f, mono_div(l, fm), 1 / fc),
                   vec_mul_term(g, mono_div(l, gm), 1 / gc))


def _interreduce_vectors(gens: list[Vector], morder: FreeModuleOrder) -> list[Vector]:
    gens = [_monic_vector(g, morder) for g in gens if not vec_is_zero(g)]
    changed = True
    while changed:
        changed = False
        for i in range(len(gens)):
            others = gens[:i] + gens[i + 1:]
            if not others:
                continue
            r = module_normal_form(gens[i], others, morder)
            if vec_is_zero(r):
                gens.pop(i)
                changed = True
                break
            r = _monic_vector(r, morder)
            if vec_key(r) != vec_key(gens[i]):
                gens[i] = r
                changed = True
                break
    gens.sort(key=lambda g: morder.term_key(*morder.leading_term(g)[:2]),
              reverse=True)
    return gens


def module_buchberger(vectors: Sequence[Vector],
                      morder: FreeModuleOrder) -> list[Vector]:
    """Reduced Groebner basis of the submodule spanned by `vectors`.

    Plain Buchberger loop; pairs whose leading positions differ never
    produce an S-vector, and no monomial criteria are applied (they are
    not valid for modules without extra bookkeeping).
    """
    basis = [_monic_vector(v, morder) for v in vectors if not vec_is_zero(v)]
    if not basis:
        return []
    pairs = {(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))}

    def pair_weight(p):
        i, j = p
        fi = morder.leading_term(basis[i])
        fj = morder.leading_term(basis[j])
        if fi[0] != fj[0]:
            return (1, (0,), p)  # never expanded, rank them last
        return (0, morder.term_key(fi[0], mono_lcm(fi[1], fj[1])), p)

    while pairs:
        i, j = min(pairs, key=pair_weight)
        pairs.discard((i, j))
        s = module_spoly(basis[i], basis[j], morder)
        if s is None:
            continue
        r = module_normal_form(s, basis, morder)
        if vec_is_zero(r):
            continue
        basis.append(_monic_vector(r, morder))
        new = len(basis) - 1
        for k in range(new):
            pairs.add((k, new))
    return _interreduce_vectors(basis, morder)


def module_member(v: Vector, gb: Sequence[Vector],
                  morder: FreeModuleOrder) -> bool:
    return vec_is_zero(module_normal_form(v, gb, morder))


def standard_labels(gb: Sequence[Vector], morder: FreeModuleOrder,
                    degree: int) -> list[tuple[int, Monomial]]:
    """(position, monomial) pairs of degree <= degree outside the leading
    term submodule, sorted by position then monomial order."""
    ring = morder.ring
    leads = [morder.leading_term(g) for g in gb if not vec_is_zero(g)]
    out = []
    for pos in range(morder.ncomps):
        for m in ring.monomials_up_to(degree):
            if any(lp == pos and mono_divides(lm, m) for lp, lm, _ in leads):
                continue
            out.append((pos, m))
    return out


def _as_vector(x, ring: PolyRing) -> Vector:
    if isinstance(x, Polynomial):
        return (x,)
    return tuple(x)


def module_syzygies(vectors: Sequence, ring: Optional[PolyRing] = None) -> list[Vector]:
    """Generators of the syzygy module {c in R^k : sum c_i v_i = 0}.

    Accepts ring elements (treated as vectors of rank 1) or tuples of
    equal rank.  The result is the reduced basis under the
    first-position-dominant order on the cofactor block, so the
    canonical syzygy of (y, x) comes out as (x, -y).
    """
    if not vectors:
        return []
    vecs = [x if isinstance(x, tuple) else None for x in vectors]
    if ring is None:
        sample = vectors[0]
        ring = sample.ring if isinstance(sample, Polynomial) else sample[0].ring
    vecs = [_as_vector(x, ring) for x in vectors]
    rank = len(vecs[0])
    if any(len(v) != rank for v in vecs):
        raise ValueError("mixed vector ranks")
    k = len(vecs)
    lifted = []
    for i, v in enumerate(vecs):
        unit = [ring.zero()] * k
        unit[i] = ring.one()
        lifted.append(tuple(v) + tuple(unit))
    morder = FreeModuleOrder.first_dominant(ring, rank + k)
    gb = module_buchberger(lifted, morder)
    cof_order = FreeModuleOrder.first_dominant(ring, k)
    syz = [g[rank:] for g in gb if all(p.is_zero() for p in g[:rank])]
    return _interreduce_vectors(syz, cof_order)


def syzygy_basis(polys: Sequence[Polynomial]) -> list[Vector]:
    """Syzygies of a tuple of ring elements."""
    return module_syzygies(list(polys))
