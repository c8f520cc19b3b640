"""End-to-end acceptance suite.

One test per criterion; each prints a single [acceptance] line on
success (visible with -s or -rA).  All assertions are exact: every
quantity here is rational arithmetic, so there are no tolerances.
"""

import itertools
import random
from fractions import Fraction as Q

from rinehart.derham import (
    de_rham_cohomology,
    exterior_power_presentation,
    kaehler_presentation,
)
from rinehart.envelope import (
    FiniteCoalgebra,
    TruncatedEnveloping,
    alt_map,
    cobar_truncated_cohomology,
    hom_complex_compare,
    koszul_checks,
    proj_map,
    reduced_koszul_differential,
    tensor_pair,
    pbw_symmetrize,
    exponents_up_to,
    TensorElement,
)
from rinehart.lierinehart import (
    LRModule,
    LieRinehartAlgebra,
    ce_cohomology,
    log_derivations,
)
from rinehart.modules import (
    FreeModuleOrder,
    module_buchberger,
    module_member,
    module_syzygies,
)
from rinehart.polyring import GroebnerBasis, PolyRing, QuotientRing, \
    divmod_poly, mono_divides
from rinehart.qlinalg import QMatrix, image_basis, kernel_basis


def _ok(n: int, text: str) -> None:
    print(f"[acceptance] criterion {n}: PASS - {text}")


def plane():
    return PolyRing(["x", "y"])


def hyperbola_ring():
    return QuotientRing(["x", "y"], ["x*y - 1"])


def torus_algebra():
    base = QuotientRing(["x", "y"], [])
    return LieRinehartAlgebra(base, 2, [["x", "0"], ["0", "y"]])


def hyperbola_log_algebra():
    base = QuotientRing(["x", "y"], [])
    return LieRinehartAlgebra(base, 1, [["x", "-y"]])


def solvable_pair():
    base = QuotientRing([], [])
    return LieRinehartAlgebra(base, 2, [[], []], {(0, 1): ("0", "1")})


def abelian(rank):
    base = QuotientRing([], [])
    return LieRinehartAlgebra(base, rank, [[] for _ in range(rank)])


# -- criterion 1 ---------------------------------------------------------------


def test_criterion_01_hyperbola_de_rham():
    rep = de_rham_cohomology(hyperbola_ring(), d_max=8, window=3)
    dims = rep.dims()
    assert dims[:2] == (1, 1)
    assert all(d == 0 for d in dims[2:])
    assert rep.all_stabilized()
    _ok(1, f"de Rham of Q[x,y]/(xy-1) has dims {dims}, stabilized")


# -- criterion 2 ---------------------------------------------------------------


def test_criterion_02_hyperbola_two_forms_vanish():
    om1 = kaehler_presentation(hyperbola_ring())
    om2 = exterior_power_presentation(om1, 2)
    assert om2.is_zero_module()
    for bound in range(9):
        assert om2.standard_labels(bound) == []
    _ok(2, "Omega^2 of the hyperbola is zero in every slice to degree 8")


# -- criterion 3 ---------------------------------------------------------------


def test_criterion_03_log_derivation_bases():
    R = plane()
    hyp = log_derivations(R.parse("x*y - 1"))
    assert hyp.rank == 1
    gen = hyp.derivation_basis[0]
    assert [str(c) for c in gen] == ["x", "-y"]

    ncd = log_derivations(R.parse("x*y"))
    assert ncd.rank == 2
    assert [[str(c) for c in v] for v in ncd.derivation_basis] \
        == [["x", "0"], ["0", "y"]]
    assert ncd.certificate == "saito"
    det = ncd.saito_determinant
    q, r = divmod_poly(det, [R.parse("x*y")])
    assert r.is_zero() and q[0].is_constant() and not q[0].is_zero()
    _ok(3, "T(-log(xy-1)) = <x dx - y dy>, T(-log xy) = <x dx, y dy>, "
           "Saito det = unit * xy")


# -- criterion 4 ---------------------------------------------------------------


def test_criterion_04_hyperbola_log_de_rham():
    # The coefficients live on the curve itself; over the full plane
    # the weight towers grow without bound and the window correctly
    # refuses to stabilize (see the regression half below).
    L = hyperbola_log_algebra()
    E = LRModule(L, hyperbola_ring())
    rep = ce_cohomology(L, E, d_max=8, window=3)
    assert rep.dims() == (1, 1)
    assert rep.all_stabilized()

    towers = ce_cohomology(L, LRModule.trivial(L), d_max=8, window=3)
    zero_deg = towers.by_degree(0)
    assert not zero_deg.stabilized
    assert zero_deg.level_dims == (3, 4, 4, 5)
    _ok(4, "log de Rham of the hyperbola has dims (1, 1); the "
           "polynomial-coefficient tower is reported unstable")


# -- criteria 5 and 6 ----------------------------------------------------------


def test_criterion_05_torus_cohomology():
    T = torus_algebra()
    rep = ce_cohomology(T, LRModule.trivial(T), d_max=10, window=3)
    assert rep.dims() == (1, 2, 1)
    assert rep.all_stabilized()
    _ok(5, "CE of <x dx, y dy> with polynomial coefficients has dims "
           "(1, 2, 1)")


def test_criterion_06_torus_cohomology_on_the_divisor():
    T = torus_algebra()
    E = LRModule(T, QuotientRing(["x", "y"], ["x*y"]))
    rep = ce_cohomology(T, E, d_max=10, window=3)
    assert rep.dims() == (1, 2, 1)
    assert rep.all_stabilized()
    _ok(6, "CE of <x dx, y dy> with coefficients on xy = 0 has dims "
           "(1, 2, 1)")


# -- criterion 7 ---------------------------------------------------------------


def test_criterion_07_hom_complex_matches_ce():
    cases = []
    A = abelian(2)
    cases.append((A, LRModule.trivial(A), "abelian rank 2"))
    T = torus_algebra()
    cases.append((T, LRModule.trivial(T), "torus, polynomial coefficients"))
    cases.append((T, LRModule(T, QuotientRing(["x", "y"], ["x*y"])),
                  "torus, divisor coefficients"))
    S = solvable_pair()
    cases.append((S, LRModule.trivial(S), "solvable pair"))
    for L, E, name in cases:
        for p in range(L.rank + 1):
            ok, witness = hom_complex_compare(L, E, p)
            assert ok, (name, p, witness)
    _ok(7, "Hom off the Koszul resolution equals the CE differential "
           "for all four algebra/coefficient pairs")


# -- criterion 8 ---------------------------------------------------------------


def _theta_is_coalgebra_morphism(env, bound):
    from math import comb
    for alpha in exponents_up_to(env.rank, bound):
        lhs = env.coproduct(pbw_symmetrize(env, {alpha: 1}))
        rhs = TensorElement(env, 2, {})
        for beta in exponents_up_to(env.rank, sum(alpha)):
            if any(b > a for a, b in zip(alpha, beta)):
                continue
            gamma = tuple(a - b for a, b in zip(alpha, beta))
            coeff = 1
            for a, b in zip(alpha, beta):
                coeff *= comb(a, b)
            piece = tensor_pair(pbw_symmetrize(env, {beta: 1}),
                                pbw_symmetrize(env, {gamma: 1}))
            rhs = rhs.add(piece.scale(coeff))
        if lhs != rhs:
            return False
    return True


def test_criterion_08_hkr_chain_level_suite():
    suite = [abelian(2), solvable_pair(), torus_algebra(),
             hyperbola_log_algebra(), abelian(3)]
    for L in suite:
        env = TruncatedEnveloping(L, 3)
        for p in range(1, min(L.rank, 3) + 1):
            for subset in itertools.combinations(range(L.rank), p):
                back = proj_map(alt_map(env, subset))
                assert set(back) == {subset}
                assert back[subset] == L.base.one()
        assert _theta_is_coalgebra_morphism(env, 3)
        for p in range(1, L.rank + 1):
            m = reduced_koszul_differential(L, p)
            assert all(e.is_zero() for row in m for e in row)
        rep = koszul_checks(L, 3, degrees=[])
        assert rep.d_squared_zero and rep.eps_composite_zero
    _ok(8, "P o Alt = id, theta is a coalgebra morphism to order 3, "
           "the reduced boundary vanishes, and d^2 = 0 on all five "
           "suite algebras")


# -- criterion 9 ---------------------------------------------------------------


def test_criterion_09_cobar_of_the_enveloping_algebra():
    L = abelian(1)
    A = FiniteCoalgebra.of_enveloping(TruncatedEnveloping(L, 2))
    rep = cobar_truncated_cohomology(A, 2)
    assert rep.dims == (1, 1)  # = dims of the exterior algebra on one e
    assert all(d["faithful"] for d in rep.degrees)
    _ok(9, "cobar of U(abelian rank 1) has dims (1, 1) in the faithful "
           "range n <= 2")


# -- criterion 10 --------------------------------------------------------------


def test_criterion_10_dual_hkr_at_desk_scale():
    for rank, expected in ((1, (1, 1)), (2, (1, 2, 1))):
        L = abelian(rank)
        A = FiniteCoalgebra.of_jets(TruncatedEnveloping(L, 4))
        cobar = cobar_truncated_cohomology(A, 3)
        ce = ce_cohomology(L, LRModule.trivial(L), d_max=8, window=3)
        assert ce.dims() == expected
        assert cobar.dims[:rank + 1] == expected
        assert all(d == 0 for d in cobar.dims[rank + 1:])
    _ok(10, "jet cobar dims equal CE dims: (1, 1) at rank 1 and "
            "(1, 2, 1) at rank 2")


# -- criterion 11 --------------------------------------------------------------


def _random_poly(rng, ring, max_degree, max_terms=4):
    monos = ring.monomials_up_to(max_degree)
    terms = {}
    for _ in range(rng.randrange(1, max_terms + 1)):
        m = rng.choice(monos)
        c = rng.randrange(-3, 4)
        if c:
            terms[m] = terms.get(m, 0) + c
    return ring.from_terms(terms)


def test_criterion_11_randomized_kernel_correctness():
    rng = random.Random(20240821)
    ring = plane()

    verified = 0
    while verified < 100:
        gens = [_random_poly(rng, ring, 3) for _ in range(rng.randrange(2, 4))]
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            continue
        gb = GroebnerBasis.of(gens, ring)
        assert gb.verify()
        for g in gens:
            assert gb.contains(g)
        verified += 1

    for _ in range(100):
        f = _random_poly(rng, ring, 4)
        divisors = [g for g in (_random_poly(rng, ring, 2) for _ in range(3))
                    if not g.is_zero()]
        if not divisors:
            continue
        quots, rem = divmod_poly(f, divisors)
        recombined = rem
        for q, g in zip(quots, divisors):
            recombined = recombined + q * g
        assert recombined == f
        assert all(not mono_divides(g.lm(), m)
                   for g in divisors for m in rem.terms)

    for _ in range(100):
        rows, cols = rng.randrange(1, 6), rng.randrange(1, 6)
        m = QMatrix(rows, cols)
        for _ in range(rng.randrange(0, rows * cols + 1)):
            m[rng.randrange(rows), rng.randrange(cols)] = Q(
                rng.randrange(-4, 5))
        assert image_basis(m).dim + kernel_basis(m).dim == cols

    checked = 0
    while checked < 100:
        polys = [_random_poly(rng, ring, 2, max_terms=3) for _ in range(3)]
        polys = [p for p in polys if not p.is_zero()]
        if len(polys) < 2:
            continue
        syz = module_syzygies(polys)
        morder = FreeModuleOrder.first_dominant(ring, len(polys))
        sgb = module_buchberger(syz, morder) if syz else []
        for cand in _brute_syzygies(polys, 2):
            assert syz, "brute force found a syzygy the kernel missed"
            assert module_member(cand, sgb, morder)
        checked += 1

    _ok(11, "Buchberger post-hoc, division, rank-nullity, and syzygy "
            "completeness hold on 100 randomized instances per family")


def _brute_syzygies(polys, degree):
    """All syzygies with cofactor degree <= `degree`, by linear algebra."""
    ring = polys[0].ring
    monos = ring.monomials_up_to(degree)
    cols = [(i, m) for i in range(len(polys)) for m in monos]
    row_index = {}
    triplets = []
    for c, (i, m) in enumerate(cols):
        shifted = ring.monomial(m) * polys[i]
        for mono, coeff in shifted.terms.items():
            r = row_index.setdefault(mono, len(row_index))
            triplets.append((r, c, coeff))
    matrix = QMatrix(len(row_index), len(cols))
    for r, c, coeff in triplets:
        matrix[r, c] += coeff
    out = []
    for vec in kernel_basis(matrix).basis:
        cofactors = [ring.zero() for _ in polys]
        for c, val in enumerate(vec):
            if val:
                i, m = cols[c]
                cofactors[i] = cofactors[i] + ring.from_terms({m: val})
        out.append(tuple(cofactors))
    return out


# -- criterion 12 --------------------------------------------------------------


def test_criterion_12_naive_kaehler_route_for_the_node():
    # The Kahler-differential route through the singular point of xy = 0
    # does NOT see the two circle classes; its value is frozen here as a
    # derived oracle so any behavioral drift is caught.  The (1, 2, 1)
    # answer for the node complement comes from the logarithmic route of
    # criteria 5 and 6.
    rep = de_rham_cohomology(QuotientRing(["x", "y"], ["x*y"]),
                             d_max=8, window=3)
    assert rep.dims() == (1, 0, 0)
    assert rep.all_stabilized()
    again = de_rham_cohomology(QuotientRing(["x", "y"], ["x*y"]),
                               d_max=8, window=3)
    assert again.as_dict() == rep.as_dict()
    _ok(12, "naive Kahler route for the node reproduces the frozen "
            "oracle (1, 0, 0); divergence from (1, 2, 1) is documented")
