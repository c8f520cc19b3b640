"""Free Lie-Rinehart algebras, their Chevalley-Eilenberg cohomology,
and logarithmic derivation modules of principal divisors.

An algebra is a free module S^r with an anchor matrix (row i is the
derivation a(e_i) written in the coordinate basis) and structure
functions c_ij^k stored for i < j.  Coefficients live in S or in a
quotient S/J preserved by every anchor derivation, with a connection
given by one matrix per generator; the Chevalley-Eilenberg complex is
Hom(wedge^p L, E) with the standard two-sum differential, fed through
the shared truncation-window engine.

Logarithmic derivations of a divisor f are read off the syzygies of
(grad f, f).  When the annihilator syzygies together with the trivial
f-multiples already generate everything, the annihilator is the basis
(that is the situation the free log algebroids here arise from);
otherwise exactly n generators certified by Saito's determinant
criterion are accepted, and anything else fails loudly.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .cohomology import CohomologyReport, FilteredComplex, truncated_cohomology
from .derham import wedge_insert
from .modules import (
    FreeModuleOrder,
    module_buchberger,
    module_syzygies,
    vec_is_zero,
    vec_str,
)
from .polyring import (
    GroebnerBasis,
    PolyRing,
    Polynomial,
    Q,
    QuotientRing,
    RingElement,
    mono_div,
    mono_divides,
    mono_degree,
)


class LieRinehartError(ValueError):
    pass


class NotCertifiedFreeError(LieRinehartError):
    """The derivation module could not be certified free; carries the
    raw generator vectors for inspection."""

    def __init__(self, message: str, generators):
        super().__init__(message)
        self.generators = tuple(generators)


def derivation_text(vec: Sequence[Polynomial], ring: PolyRing) -> str:
    pieces = []
    for name, c in zip(ring.vars, vec):
        if c.is_zero():
            continue
        sym = f"∂{name}"
        neg = False
        if c == ring.one():
            body = sym
        elif c == -ring.one():
            body = sym
            neg = True
        elif len(c.terms) == 1 and c.lc() < 0:
            body = f"{-c}*{sym}"
            neg = True
        else:
            txt = str(c)
            body = f"({txt})*{sym}" if " " in txt else f"{txt}*{sym}"
        if not pieces:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(pieces) if pieces else "0"


class LieRinehartAlgebra:
    """Free rank-r Lie-Rinehart algebra over a (quotient) coordinate ring.

    anchor[i][j] is a(e_i)(x_j); bracket holds c_ij^k for i < j with
    [e_i, e_j] = sum_k c_ij^k e_k.  Antisymmetry is built into storage.
    """

    def __init__(self, base: QuotientRing, rank: int, anchor, bracket=None):
        self.base = base
        self.rank = rank
        n = base.ring.nvars
        if len(anchor) != rank or any(len(row) != n for row in anchor):
            raise LieRinehartError("anchor must be rank x nvars")
        self.anchor = tuple(tuple(base.element(v) for v in row)
                            for row in anchor)
        cleaned = {}
        for (i, j), coeffs in (bracket or {}).items():
            if not (0 <= i < j < rank):
                raise LieRinehartError(f"bracket key ({i},{j}) must have i < j")
            vals = tuple(base.element(c) for c in coeffs)
            if len(vals) != rank:
                raise LieRinehartError("bracket entry length must equal rank")
            if any(not v.is_zero() for v in vals):
                cleaned[(i, j)] = vals
        self.bracket = cleaned

    # derivation data -----------------------------------------------------

    def anchor_apply(self, i: int, g: Union[Polynomial, RingElement]) -> RingElement:
        """a(e_i) applied to a ring element."""
        p = g.poly if isinstance(g, RingElement) else g
        ring = self.base.ring
        acc = ring.zero()
        for j in range(ring.nvars):
            acc = acc + self.anchor[i][j].poly * p.diff(j)
        return self.base.element(acc)

    def anchor_apply_vec(self, coeffs: Sequence, g) -> RingElement:
        acc = self.base.zero()
        for i, c in enumerate(coeffs):
            if not c.is_zero():
                acc = acc + c * self.anchor_apply(i, g)
        return acc

    def bracket_coeffs(self, i: int, j: int) -> tuple:
        """[e_i, e_j] as a coefficient tuple, any i, j."""
        zero = tuple(self.base.zero() for _ in range(self.rank))
        if i == j:
            return zero
        if i < j:
            return self.bracket.get((i, j), zero)
        return tuple(-c for c in self.bracket_coeffs(j, i))

    def generator(self, i: int) -> tuple:
        return tuple(self.base.one() if k == i else self.base.zero()
                     for k in range(self.rank))

    def bracket_vec(self, u: Sequence, v: Sequence) -> tuple:
        """[u, v] for arbitrary coefficient vectors, via the Leibniz rule."""
        out = [self.base.zero() for _ in range(self.rank)]
        for i, ui in enumerate(u):
            if ui.is_zero():
                continue
            for j, vj in enumerate(v):
                if vj.is_zero():
                    continue
                for k, c in enumerate(self.bracket_coeffs(i, j)):
                    out[k] = out[k] + ui * vj * c
        for j, vj in enumerate(v):
            out[j] = out[j] + self.anchor_apply_vec(u, vj)
        for i, ui in enumerate(u):
            out[i] = out[i] - self.anchor_apply_vec(v, ui)
        return tuple(out)

    def __repr__(self):
        return (f"LieRinehartAlgebra(rank={self.rank}, "
                f"base={self.base!r})")


@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    jacobi_ok: bool
    anchor_compatible: bool
    leibniz_ok: bool
    witnesses: tuple

    def as_dict(self):
        return {
            "ok": self.ok,
            "jacobi_ok": self.jacobi_ok,
            "anchor_compatible": self.anchor_compatible,
            "leibniz_ok": self.leibniz_ok,
            "witnesses": list(self.witnesses),
        }


def lr_check_axioms(L: LieRinehartAlgebra) -> AxiomReport:
    """Jacobi on generator triples, anchor-bracket compatibility on the
    variables, and a seeded Leibniz spot-check on f*e_j inputs."""
    witnesses = []
    jacobi_ok = True
    for i, j, k in itertools.combinations(range(L.rank), 3):
        ei, ej, ek = (L.generator(t) for t in (i, j, k))
        total = [L.base.zero()] * L.rank
        for a, b, c in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
            term = L.bracket_vec(L.bracket_vec(a, b), c)
            total = [x + y for x, y in zip(total, term)]
        if any(not t.is_zero() for t in total):
            jacobi_ok = False
            witnesses.append(
                f"jacobi fails on (e{i + 1},e{j + 1},e{k + 1}): "
                + vec_str(tuple(t.poly for t in total)))
    anchor_ok = True
    ring = L.base.ring
    for i, j in itertools.combinations(range(L.rank), 2):
        coeffs = L.bracket_coeffs(i, j)
        for v, name in enumerate(ring.vars):
            xv = L.base.element(ring.var(name))
            lhs = L.base.zero()
            for k, c in enumerate(coeffs):
                if not c.is_zero():
                    lhs = lhs + c * L.anchor_apply(k, xv)
            rhs = (L.anchor_apply(i, L.anchor_apply(j, xv))
                   - L.anchor_apply(j, L.anchor_apply(i, xv)))
            if lhs != rhs:
                anchor_ok = False
                witnesses.append(
                    f"anchor incompatible on (e{i + 1},e{j + 1}) at {name}: "
                    f"{lhs} vs {rhs}")
    leibniz_ok = True
    rng = random.Random(20240818)
    monos = ring.monomials_up_to(2)
    for _ in range(6):
        if L.rank == 0:
            break
        i = rng.randrange(L.rank)
        j = rng.randrange(L.rank)
        f = L.base.element(ring.from_terms(
            {m: Q(rng.randrange(-2, 3)) for m in rng.sample(monos, min(3, len(monos)))}))
        fv = tuple(f if t == j else L.base.zero() for t in range(L.rank))
        lhs = L.bracket_vec(L.generator(i), fv)
        expect = [f * c for c in L.bracket_coeffs(i, j)]
        expect[j] = expect[j] + L.anchor_apply(i, f)
        if list(lhs) != expect:
            leibniz_ok = False
            witnesses.append(f"leibniz fails on (e{i + 1}, f*e{j + 1}) with f={f}")
    ok = jacobi_ok and anchor_ok and leibniz_ok
    return AxiomReport(ok, jacobi_ok, anchor_ok, leibniz_ok, tuple(witnesses))


class LRModule:
    """Coefficients for CE cohomology: a free module over S or S/J with
    a connection matrix per algebra generator.

    J-preservation by every anchor derivation is verified here;
    flatness is a separate check (connection_flatness)."""

    def __init__(self, L: LieRinehartAlgebra, coefficients: QuotientRing,
                 rank: int = 1, connections: Optional[Sequence] = None):
        if coefficients.ring.vars != L.base.ring.vars:
            raise LieRinehartError(
                "coefficient ring must share the algebra's variables")
        self.L = L
        self.coefficients = coefficients
        self.rank = rank
        if connections is None:
            zero = coefficients.zero()
            connections = [
                tuple(tuple(zero for _ in range(rank)) for _ in range(rank))
                for _ in range(L.rank)]
        if len(connections) != L.rank:
            raise LieRinehartError("one connection matrix per generator")
        self.connections = tuple(
            tuple(tuple(coefficients.element(x) for x in row) for row in mat)
            for mat in connections)
        for mat in self.connections:
            if len(mat) != rank or any(len(row) != rank for row in mat):
                raise LieRinehartError("connection matrices must be rank x rank")
        for g in coefficients.ideal_gens:
            for i in range(L.rank):
                image = L.anchor_apply(i, g)  # computed in L.base
                if not coefficients.nf(image.poly).is_zero():
                    raise LieRinehartError(
                        f"ideal not preserved: a(e{i + 1})({g}) = {image} "
                        "is not in the coefficient ideal")

    def zero_vec(self) -> tuple:
        return tuple(self.coefficients.zero() for _ in range(self.rank))

    def nabla(self, i: int, vec: Sequence) -> tuple:
        """Covariant action of e_i: entrywise anchor derivative plus A_i."""
        E = self.coefficients
        derived = [E.element(self.L.anchor_apply(i, v.poly).poly) for v in vec]
        mat = self.connections[i]
        out = []
        for row in range(self.rank):
            acc = derived[row]
            for col in range(self.rank):
                acc = acc + mat[row][col] * vec[col]
            out.append(acc)
        return tuple(out)

    @classmethod
    def trivial(cls, L: LieRinehartAlgebra,
                coefficients: Optional[QuotientRing] = None) -> "LRModule":
        return cls(L, coefficients or L.base, 1, None)


@dataclass(frozen=True)
class FlatnessReport:
    flat: bool
    witness: Optional[tuple]  # (i, j, curvature matrix as strings)

    def as_dict(self):
        return {
            "flat": self.flat,
            "witness": None if self.witness is None else {
                "pair": [self.witness[0] + 1, self.witness[1] + 1],
                "curvature": [[str(x) for x in row] for row in self.witness[2]],
            },
        }


def connection_flatness(L: LieRinehartAlgebra, E: LRModule) -> FlatnessReport:
    """Curvature a(e_i)(A_j) - a(e_j)(A_i) + [A_i,A_j] - sum c_ij^k A_k."""
    R = E.coefficients
    m = E.rank

    def mat_mul(A, B):
        return tuple(tuple(
            sum((A[r][t] * B[t][c] for t in range(m)), R.zero())
            for c in range(m)) for r in range(m))

    def mat_sub(A, B):
        return tuple(tuple(A[r][c] - B[r][c] for c in range(m))
                     for r in range(m))

    def mat_anchor(i, A):
        return tuple(tuple(R.element(L.anchor_apply(i, A[r][c].poly).poly)
                           for c in range(m)) for r in range(m))

    for i, j in itertools.combinations(range(L.rank), 2):
        Ai, Aj = E.connections[i], E.connections[j]
        curv = mat_sub(mat_anchor(i, Aj), mat_anchor(j, Ai))
        curv = [list(row) for row in curv]
        comm = mat_sub(mat_mul(Ai, Aj), mat_mul(Aj, Ai))
        for r in range(m):
            for c in range(m):
                curv[r][c] = curv[r][c] + comm[r][c]
        for k, ck in enumerate(L.bracket_coeffs(i, j)):
            if ck.is_zero():
                continue
            ck_E = R.element(ck.poly)
            for r in range(m):
                for c in range(m):
                    curv[r][c] = curv[r][c] - ck_E * E.connections[k][r][c]
        if any(not curv[r][c].is_zero() for r in range(m) for c in range(m)):
            return FlatnessReport(False, (i, j, tuple(
                tuple(x for x in row) for row in curv)))
    return FlatnessReport(True, None)


def _as_value_vec(E: LRModule, value) -> tuple:
    if isinstance(value, (tuple, list)):
        return tuple(E.coefficients.element(v) for v in value)
    return tuple(E.coefficients.element(value) if t == 0
                 else E.coefficients.zero() for t in range(E.rank))


def ce_differential(L: LieRinehartAlgebra, E: LRModule, p: int,
                    omega: dict) -> dict:
    """One step of the Chevalley-Eilenberg differential.

    omega maps sorted p-subsets of generator indices to coefficient
    vectors (missing subsets read as zero); the result is the same
    encoding in degree p+1."""
    r = L.rank
    omega = {tuple(k): _as_value_vec(E, v) for k, v in omega.items()}
    zero = E.zero_vec()
    out = {}
    for J in itertools.combinations(range(r), p + 1):
        val = list(zero)
        for idx, ji in enumerate(J):
            rest = J[:idx] + J[idx + 1:]
            w = omega.get(rest, zero)
            term = E.nabla(ji, w)
            sign = (-1) ** idx
            val = [a + sign * b for a, b in zip(val, term)]
        for a, b in itertools.combinations(range(len(J)), 2):
            ja, jb = J[a], J[b]
            rest = tuple(x for t, x in enumerate(J) if t not in (a, b))
            acc = list(zero)
            for k, c in enumerate(L.bracket_coeffs(ja, jb)):
                if c.is_zero():
                    continue
                ins = wedge_insert(k, rest)
                if ins is None:
                    continue
                wsign, merged = ins
                w = omega.get(merged, zero)
                c_E = E.coefficients.element(c.poly)
                acc = [x + wsign * c_E * y for x, y in zip(acc, w)]
            sign = (-1) ** (a + b)
            val = [x + sign * y for x, y in zip(val, acc)]
        if any(not x.is_zero() for x in val):
            out[J] = tuple(val)
    return out


def _dual_name(subset) -> str:
    if not subset:
        return "1"
    return "∧".join(f"ε{i + 1}" for i in subset)


def ce_cohomology(L: LieRinehartAlgebra, E: LRModule, d_max: int = 10,
                  window: int = 3) -> CohomologyReport:
    """Window cohomology of Hom(wedge^p L, E) with the CE differential."""
    if not (d_max > window >= 2):
        raise ValueError("need d_max > window >= 2")
    axioms = lr_check_axioms(L)
    if not axioms.ok:
        raise LieRinehartError("algebra axioms fail: "
                               + "; ".join(axioms.witnesses))
    flat = connection_flatness(L, E)
    if not flat.flat:
        i, j, _ = flat.witness
        raise LieRinehartError(f"connection is not flat on pair "
                               f"(e{i + 1},e{j + 1})")
    r = L.rank
    m = E.rank
    Ering = E.coefficients

    # label = (monomial, generator subset, component)
    def labels_fn(p, bound):
        if p > r or bound < p:
            return []
        out = []
        for subset in itertools.combinations(range(r), p):
            for mono in Ering.standard_monomials(bound - p):
                for comp in range(m):
                    out.append((mono, subset, comp))
        out.sort(key=lambda l: (mono_degree(l[0]) + len(l[1]), l[1], l[2],
                                Ering.ring.order.key(l[0])))
        return out

    diff_cache = {}

    def diff_fn(p, label):
        if p >= r:
            return {}
        key = (p, label)
        if key in diff_cache:
            return diff_cache[key]
        mono, subset, comp = label
        vec = tuple(Ering.element(Ering.ring.monomial(mono)) if t == comp
                    else Ering.zero() for t in range(m))
        image = ce_differential(L, E, p, {subset: vec})
        out = {}
        for J, vals in image.items():
            for t, val in enumerate(vals):
                for mm, c in val.poly.terms.items():
                    out[(mm, J, t)] = c
        diff_cache[key] = out
        return out

    def degree_fn(label):
        mono, subset, _ = label
        return mono_degree(mono) + len(subset)

    def text_fn(label):
        mono, subset, comp = label
        mono_txt = str(Ering.ring.monomial(mono))
        dual = _dual_name(subset)
        if not subset:
            body = mono_txt
        elif mono_txt == "1":
            body = dual
        else:
            body = f"{mono_txt}*{dual}"
        if m > 1:
            body = f"{body}[{comp + 1}]"
        return body

    fc = FilteredComplex(f"CE(rank {r} over {Ering!r})", labels_fn, diff_fn,
                         degree_fn, text_fn)
    return truncated_cohomology(fc, list(range(r + 1)), d_max, window)


# -- logarithmic derivations -------------------------------------------------


def _poly_det(rows: Sequence[Sequence[Polynomial]], ring: PolyRing) -> Polynomial:
    n = len(rows)
    if n == 0:
        return ring.one()
    if n == 1:
        return rows[0][0]
    det = ring.zero()
    for j in range(n):
        entry = rows[0][j]
        if entry.is_zero():
            continue
        minor = [[row[c] for c in range(n) if c != j] for row in rows[1:]]
        det = det + entry * _poly_det(minor, ring) * ((-1) ** j)
    return det


def saito_check(gens: Sequence, f: Polynomial) -> bool:
    """Determinant criterion: det(coefficients) equals a unit times f."""
    ring = f.ring
    n = ring.nvars
    if len(gens) != n:
        raise LieRinehartError(
            f"Saito check needs exactly {n} derivations, got {len(gens)}")
    rows = [tuple(v) for v in gens]
    det = _poly_det(rows, ring)
    if det.is_zero():
        return False
    from .polyring import divmod_poly

    (q,), rem = divmod_poly(det, [f])
    return rem.is_zero() and q.is_constant() and not q.is_zero()


def _divide_in_basis(vec, basis, morder):
    """Write vec as a combination of basis vectors; the remainder must
    vanish or the basis is not closed."""
    ring = morder.ring
    quots = [ring.zero() for _ in basis]
    p = tuple(vec)
    leads = [morder.leading_term(b) for b in basis]
    while not vec_is_zero(p):
        pos, mono, coeff = morder.leading_term(p)
        for idx, (b, (bpos, bmono, bcoeff)) in enumerate(zip(basis, leads)):
            if bpos == pos and mono_divides(bmono, mono):
                q = ring.from_terms({mono_div(mono, bmono): coeff / bcoeff})
                quots[idx] = quots[idx] + q
                p = tuple(a - q * c for a, c in zip(p, b))
                break
        else:
            raise LieRinehartError(
                f"element {vec_str(p)} does not reduce in the given basis")
    return quots


def bracket_structure_constants(gens: Sequence, ring: PolyRing) -> dict:
    """c_ij^k with [D_i, D_j] = sum_k c_ij^k D_k, for derivations given
    as coefficient vectors; errors when a commutator leaves the span."""
    gens = [tuple(g) for g in gens]
    n = ring.nvars
    morder = FreeModuleOrder.first_dominant(ring, n)
    out = {}
    for i, j in itertools.combinations(range(len(gens)), 2):
        Di, Dj = gens[i], gens[j]

        def apply_d(D, g):
            acc = ring.zero()
            for u in range(n):
                acc = acc + D[u] * g.diff(u)
            return acc

        comm = tuple(apply_d(Di, Dj[l]) - apply_d(Dj, Di[l]) for l in range(n))
        coeffs = _divide_in_basis(comm, gens, morder)
        out[(i, j)] = tuple(coeffs)
    return out


def log_derivations(f: Polynomial) -> LieRinehartAlgebra:
    """Free basis of the derivations preserving the ideal (f).

    Syzygies of (grad f, f) give all log derivations; the f*d_i rows are
    added before extraction.  If the annihilator syzygies plus those
    trivial rows already span, the annihilator is the (smaller) basis.
    Otherwise the full module must have exactly n generators passing
    Saito's criterion, else NotCertifiedFreeError.
    """
    ring = f.ring
    n = ring.nvars
    if f.is_zero() or f.is_constant():
        raise LieRinehartError("divisor must be nonzero and nonunit")
    f = f.monic()
    grad = [f.diff(i) for i in range(n)]
    morder = FreeModuleOrder.first_dominant(ring, n)
    raw = module_syzygies(grad + [f])
    projections = [s[:n] for s in raw]
    trivial = [tuple(f if j == i else ring.zero() for j in range(n))
               for i in range(n)]
    g_log = module_buchberger(projections + trivial, morder)

    basis = None
    certificate = None
    ann = module_syzygies(grad) if n > 1 else []
    if ann:
        g_ann = module_buchberger(ann, morder)
        spanned = module_buchberger(list(g_ann) + trivial, morder)
        if [vec_str(v) for v in spanned] == [vec_str(v) for v in g_log] \
                and not module_syzygies(g_ann):
            basis = g_ann
            certificate = "annihilator"
    if basis is None:
        # The n generators with minimal leading terms; g_log is sorted
        # descending, so that is its tail (kept in the same order).
        candidates = g_log[-n:] if len(g_log) >= n else g_log
        if len(candidates) == n and saito_check(candidates, f):
            basis = candidates
            certificate = "saito"
        else:
            raise NotCertifiedFreeError(
                f"derivation module of {f} not certified free "
                f"({len(g_log)} generators for {n} variables)", g_log)

    fgb = GroebnerBasis.of([f])
    for D in basis:
        df = sum((c * g for c, g in zip(D, grad)), ring.zero())
        if not fgb.nf(df).is_zero():
            raise LieRinehartError(
                f"internal check failed: {vec_str(D)} does not preserve (f)")

    base = QuotientRing(ring, [])
    structure = bracket_structure_constants(basis, ring)
    bracket = {k: v for k, v in structure.items()
               if any(not c.is_zero() for c in v)}
    L = LieRinehartAlgebra(base, len(basis), [list(D) for D in basis], bracket)
    L.derivation_basis = tuple(basis)
    L.certificate = certificate
    L.divisor = f
    L.saito_determinant = _poly_det([list(D) for D in basis], ring) \
        if len(basis) == n else None
    return L
