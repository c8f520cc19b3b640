"""Free-module Groebner bases and syzygy computations."""

import itertools
import random
from fractions import Fraction as Q

from rinehart.polyring import PolyRing, normal_form
from rinehart.modules import (
    FreeModuleOrder,
    module_buchberger,
    module_member,
    module_normal_form,
    module_syzygies,
    standard_labels,
    syzygy_basis,
    vec_is_zero,
    vec_str,
)


def _ring():
    return PolyRing(["x", "y"])


def test_leading_term_respects_priority():
    r = _ring()
    v = (r.parse("y"), r.parse("x"))
    first = FreeModuleOrder.first_dominant(r, 2)
    last = FreeModuleOrder.last_dominant(r, 2)
    assert first.leading_term(v) == (0, (0, 1), Q(1))
    assert last.leading_term(v) == (1, (1, 0), Q(1))


def test_module_normal_form_reduces_fully():
    r = _ring()
    morder = FreeModuleOrder.first_dominant(r, 2)
    g = (r.parse("x"), r.parse("-y"))
    v = (r.parse("x^2"), r.zero())
    nf = module_normal_form(v, [g], morder)
    assert nf == (r.zero(), r.parse("x*y"))


def test_syzygy_of_pair_is_cross_vector():
    r = _ring()
    syz = module_syzygies([r.parse("y"), r.parse("x")])
    assert [vec_str(s) for s in syz] == ["(x, -y)"]


def test_syzygies_with_unit_entry():
    r = _ring()
    syz = module_syzygies([r.parse("x"), r.parse("y"), r.one()])
    rendered = [vec_str(s) for s in syz]
    assert rendered == ["(1, 0, -x)", "(0, 1, -y)"]
    for s in syz:
        total = s[0] * r.parse("x") + s[1] * r.parse("y") + s[2]
        assert total.is_zero()


def test_syzygy_members_annihilate():
    r = _ring()
    f = [r.parse("x^2 - y"), r.parse("x*y"), r.parse("y^2 + x")]
    for s in module_syzygies(f):
        acc = r.zero()
        for c, g in zip(s, f):
            acc = acc + c * g
        assert acc.is_zero()


def _all_syzygies_up_to_degree(r, f, degree):
    """Every (c_1..c_k) with deg c_i <= degree and sum c_i f_i = 0,
    found by exact linear algebra over the coefficient unknowns."""
    from rinehart.qlinalg import QMatrix, kernel_basis

    monos = r.monomials_up_to(degree)
    k = len(f)
    cols = k * len(monos)
    target_monos = sorted({mm for g in f for m in monos
                           for mm in (tuple(a + b for a, b in zip(m, gm))
                                      for gm in g.terms)})
    row_of = {m: i for i, m in enumerate(target_monos)}
    mat = QMatrix(len(target_monos), cols)
    for i, g in enumerate(f):
        for jm, m in enumerate(monos):
            shifted = g.mul_term(m, Q(1))
            for mm, c in shifted.terms.items():
                mat[row_of[mm], i * len(monos) + jm] += c
    out = []
    for vec in kernel_basis(mat).basis:
        comps = []
        for i in range(k):
            chunk = vec[i * len(monos):(i + 1) * len(monos)]
            comps.append(r.from_terms(dict(zip(monos, chunk))))
        out.append(tuple(comps))
    return out


def test_syzygy_completeness_against_bruteforce():
    # Every syzygy with entries of degree <= 2, enumerated exactly,
    # must reduce to zero against the computed basis.
    r = _ring()
    f = [r.parse("y"), r.parse("x")]
    syz = module_syzygies(f)
    morder = FreeModuleOrder.first_dominant(r, 2)
    gb = module_buchberger(syz, morder)
    found = _all_syzygies_up_to_degree(r, f, 2)
    assert len(found) >= 3  # (x,-y) times 1, x, y at least
    for cand in found:
        acc = sum((c * g for c, g in zip(cand, f)), r.zero())
        assert acc.is_zero()
        assert module_member(cand, gb, morder)


def test_relation_basis_with_quotient_rows_hyperbola():
    # Relations of the Kaehler module of Q[x,y]/(xy - 1): the single
    # differential relation plus the ideal acting on each generator.
    r = _ring()
    rel = [
        (r.parse("y"), r.parse("x")),
        (r.parse("x*y - 1"), r.zero()),
        (r.zero(), r.parse("x*y - 1")),
    ]
    morder = FreeModuleOrder.last_dominant(r, 2)
    gb = module_buchberger(rel, morder)
    assert [vec_str(g) for g in gb] == ["(y^2, 1)", "(x*y - 1, 0)"]
    labels = standard_labels(gb, morder, 3)
    # surviving labels live entirely in the first slot: x^a, y^b towers
    assert all(pos == 0 for pos, _ in labels)
    assert {m for _, m in labels} == {(0, 0), (1, 0), (2, 0), (3, 0),
                                      (0, 1), (0, 2), (0, 3)}


def test_relation_basis_node_curve():
    r = _ring()
    rel = [
        (r.parse("y"), r.parse("x")),
        (r.parse("x*y"), r.zero()),
        (r.zero(), r.parse("x*y")),
    ]
    morder = FreeModuleOrder.last_dominant(r, 2)
    gb = module_buchberger(rel, morder)
    assert [vec_str(g) for g in gb] == ["(y, x)", "(x*y, 0)", "(y^2, 0)"]
    labels = standard_labels(gb, morder, 2)
    assert set(labels) == {
        (0, (0, 0)), (0, (1, 0)), (0, (2, 0)), (0, (0, 1)),
        (1, (0, 0)), (1, (0, 1)), (1, (0, 2)),
    }


def test_module_buchberger_spolys_reduce():
    r = _ring()
    rng = random.Random(20240816)
    monos = [(i, j) for i in range(3) for j in range(3)]

    def rand_vec():
        return tuple(
            r.from_terms({m: Q(rng.randrange(-2, 3)) for m in rng.sample(monos, 3)})
            for _ in range(2))

    for _ in range(25):
        vecs = [v for v in (rand_vec() for _ in range(3)) if not vec_is_zero(v)]
        if not vecs:
            continue
        morder = FreeModuleOrder.first_dominant(r, 2)
        gb = module_buchberger(vecs, morder)
        for v in vecs:
            assert module_member(v, gb, morder)
        from rinehart.modules import module_spoly

        for a, b in itertools.combinations(gb, 2):
            s = module_spoly(a, b, morder)
            if s is not None:
                assert vec_is_zero(module_normal_form(s, gb, morder))


def test_syzygy_basis_alias():
    r = _ring()
    assert syzygy_basis([r.parse("y"), r.parse("x")]) == module_syzygies(
        [r.parse("y"), r.parse("x")])
