"""Kaehler differentials and the algebraic de Rham complex of a
quotient ring, with degree-truncated cohomology.

The module of 1-forms of R = Q[x_1..x_n]/I is presented on the free
cover with basis dx_1..dx_n by the rows sum_i (df/dx_i) dx_i for each
ideal generator f together with the ideal acting on each cover basis
vector.  Exterior powers wedge those relations against lower wedges.
Every form is stored as the module normal form of its coordinate
vector, so coefficients are unique and a form is zero exactly when its
coordinates are.

Gradings count a label m * dx_K with total degree deg(m) + |K|, which
is what makes the differential degree-preserving on smooth examples
and lets the truncation act as an honest filtration elsewhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .cohomology import (
    CohomologyReport,
    ComplexError,
    FilteredComplex,
    truncated_cohomology,
)
from .modules import (
    FreeModuleOrder,
    module_buchberger,
    module_normal_form,
    vec_is_zero,
)
from .polyring import Polynomial, Q, QuotientRing, RingElement, mono_degree

Subset = tuple  # strictly increasing variable indices


def wedge_insert(i: int, subset: Subset) -> Optional[tuple]:
    """(sign, subset with i inserted), or None when i already occurs."""
    if i in subset:
        return None
    before = sum(1 for k in subset if k < i)
    merged = tuple(sorted(subset + (i,)))
    return (-1) ** before, merged


def _wedge_name(ring, subset: Subset) -> str:
    if not subset:
        return "1"
    return "∧".join("d" + ring.vars[i] for i in subset)


class PresentedModule:
    """An exterior power of the Kaehler module, as cover + relations.

    Generators are the p-subsets of the variables in lexicographic
    order; `relations` is the reduced module Groebner basis of the
    relation submodule over the ambient polynomial ring, computed for
    the last-position-dominant order so low wedges survive reduction.
    """

    def __init__(self, base: QuotientRing, degree: int,
                 subsets: Sequence[Subset], relation_rows: Sequence):
        self.base = base
        self.degree = degree
        self.subsets = tuple(subsets)
        self.rank = len(self.subsets)
        self._pos = {s: i for i, s in enumerate(self.subsets)}
        self.order = FreeModuleOrder.last_dominant(base.ring, max(self.rank, 1))
        rows = [r for r in relation_rows if not vec_is_zero(r)]
        self.relations = tuple(module_buchberger(rows, self.order)) \
            if self.rank else ()

    def generator_names(self) -> tuple:
        return tuple(_wedge_name(self.base.ring, s) for s in self.subsets)

    def normal_form(self, coords: Sequence[Polynomial]) -> tuple:
        if len(coords) != self.rank:
            raise ValueError("coordinate count does not match the cover rank")
        if self.rank == 0:
            return ()
        return module_normal_form(tuple(coords), self.relations, self.order)

    def is_zero_module(self) -> bool:
        if self.rank == 0:
            return True
        one = self.base.ring.one()
        return all(
            vec_is_zero(self.normal_form(
                tuple(one if j == i else self.base.ring.zero()
                      for j in range(self.rank))))
            for i in range(self.rank))

    def standard_labels(self, bound: int) -> list:
        """(monomial, subset) pairs with deg(m) + p <= bound, outside the
        leading-term submodule, ascending by total degree."""
        ring = self.base.ring
        if self.rank == 0 or bound < self.degree:
            return []
        leads = [self.order.leading_term(g) for g in self.relations]
        out = []
        for pos, subset in enumerate(self.subsets):
            for m in ring.monomials_up_to(bound - self.degree):
                if any(lp == pos and all(a <= b for a, b in zip(lm, m))
                       for lp, lm, _ in leads):
                    continue
                out.append((m, subset))
        out.sort(key=lambda l: (mono_degree(l[0]) + self.degree, l[1],
                                ring.order.key(l[0])))
        return out

    def form(self, coords) -> "FormElement":
        return FormElement(self, coords)

    def label_text(self, mono, subset: Subset) -> str:
        ring = self.base.ring
        mono_txt = str(ring.monomial(mono))
        wedge = _wedge_name(ring, subset)
        if self.degree == 0:
            return mono_txt
        if mono_txt == "1":
            return wedge
        return f"{mono_txt}*{wedge}"

    def __repr__(self):
        return (f"PresentedModule(p={self.degree}, rank={self.rank}, "
                f"base={self.base!r})")


class FormElement:
    """A p-form: normal-formed coordinates against the relation basis."""

    __slots__ = ("module", "coords")

    def __init__(self, module: PresentedModule, coords):
        ring = module.base.ring
        if isinstance(coords, dict):
            vec = [ring.zero()] * module.rank
            for subset, val in coords.items():
                vec[module._pos[tuple(subset)]] = _as_poly(ring, val)
            coords = vec
        else:
            coords = [_as_poly(ring, c) for c in coords]
        self.module = module
        self.coords = module.normal_form(tuple(coords))

    def is_zero(self) -> bool:
        return vec_is_zero(self.coords)

    def coefficients(self) -> tuple:
        """Coordinates as elements of the base ring."""
        return tuple(RingElement(self.module.base, c) for c in self.coords)

    def __add__(self, other: "FormElement") -> "FormElement":
        if other.module is not self.module:
            raise ValueError("forms live in different modules")
        return FormElement(self.module,
                           [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "FormElement") -> "FormElement":
        if other.module is not self.module:
            raise ValueError("forms live in different modules")
        return FormElement(self.module,
                           [a - b for a, b in zip(self.coords, other.coords)])

    def __mul__(self, scalar) -> "FormElement":
        s = _as_poly(self.module.base.ring, scalar)
        return FormElement(self.module, [c * s for c in self.coords])

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, FormElement) and self.module is other.module
                and self.coords == other.coords)

    def __str__(self):
        pieces = []
        for subset, c in zip(self.module.subsets, self.coords):
            if c.is_zero():
                continue
            wedge = _wedge_name(self.module.base.ring, subset)
            if self.module.degree == 0:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(wedge)
            elif c == -1:
                pieces.append(f"-{wedge}")
            else:
                body = str(c)
                if " " in body:
                    body = f"({body})"
                pieces.append(f"{body}*{wedge}")
        return " + ".join(pieces) if pieces else "0"

    def __repr__(self):
        return f"<form {self}>"


def _as_poly(ring, value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, RingElement):
        return value.poly
    if isinstance(value, str):
        return ring.parse(value)
    return ring.constant(value)


def kaehler_presentation(R: QuotientRing) -> PresentedModule:
    """Module of Kaehler differentials of R as a presented module."""
    ring = R.ring
    n = ring.nvars
    subsets = [(i,) for i in range(n)]
    rows = []
    for f in R.ideal_gens:
        rows.append(tuple(f.diff(i) for i in range(n)))
    for f in R.ideal_gens:
        for i in range(n):
            rows.append(tuple(f if j == i else ring.zero() for j in range(n)))
    return PresentedModule(R, 1, subsets, rows)


def exterior_power_presentation(M: PresentedModule, p: int) -> PresentedModule:
    """p-th exterior power of a presented module over the same cover."""
    if p < 0:
        raise ValueError("exterior degree must be nonnegative")
    R = M.base
    ring = R.ring
    if p == 0:
        return PresentedModule(R, 0, [()],
                               [(f,) for f in R.ideal_gens])
    base_indices = range(M.rank)
    subsets = [tuple(c) for c in itertools.combinations(base_indices, p)]
    # relabel wedge subsets through M's own generators (for the Kaehler
    # module these are the singleton variable subsets)
    def expand(subset_of_gens):
        out = []
        for g in subset_of_gens:
            out.extend(M.subsets[g])
        return tuple(out)

    gen_subsets = [expand(s) for s in subsets]
    rank = len(subsets)
    pos = {s: i for i, s in enumerate(subsets)}
    rows = []
    for rel in (M.relations if M.relations else ()):
        for lower in itertools.combinations(base_indices, p - 1):
            row = [ring.zero()] * rank
            hit = False
            for i in base_indices:
                c = rel[i]
                if c.is_zero():
                    continue
                ins = wedge_insert(i, lower)
                if ins is None:
                    continue
                sign, merged = ins
                row[pos[merged]] = row[pos[merged]] + c * sign
                hit = True
            if hit:
                rows.append(tuple(row))
    for f in R.ideal_gens:
        for j in range(rank):
            rows.append(tuple(f if k == j else ring.zero()
                              for k in range(rank)))
    out = PresentedModule(R, p, gen_subsets, rows)
    return out


class DeRhamComplex:
    """All exterior powers of the Kaehler module of one quotient ring,
    with the label-level differential, cached per degree."""

    def __init__(self, R: QuotientRing):
        self.base = R
        self.omega1 = kaehler_presentation(R)
        self._modules = {1: self.omega1}
        self._diff_cache = {}

    def module(self, p: int) -> PresentedModule:
        if p not in self._modules:
            self._modules[p] = exterior_power_presentation(self.omega1, p)
        return self._modules[p]

    @property
    def top_degree(self) -> int:
        return self.base.ring.nvars

    def differential(self, omega: FormElement) -> FormElement:
        """Exterior derivative, with the stored normal form as the lift."""
        p = omega.module.degree
        target = self.module(p + 1)
        ring = self.base.ring
        out = [ring.zero()] * target.rank
        tpos = target._pos
        for subset, coeff in zip(omega.module.subsets, omega.coords):
            if coeff.is_zero():
                continue
            for i in range(ring.nvars):
                dc = coeff.diff(i)
                if dc.is_zero():
                    continue
                ins = wedge_insert(i, subset)
                if ins is None:
                    continue
                sign, merged = ins
                out[tpos[merged]] = out[tpos[merged]] + dc * sign
        return FormElement(target, out)

    def diff_label(self, p: int, label) -> dict:
        """Differential of a basis label (mono, subset) as a label dict."""
        key = (p, label)
        if key in self._diff_cache:
            return self._diff_cache[key]
        mono, subset = label
        src = self.module(p)
        form = FormElement(src, {subset: src.base.ring.monomial(mono)})
        image = self.differential(form)
        out = {}
        for sub, c in zip(image.module.subsets, image.coords):
            for m, v in c.terms.items():
                out[(m, sub)] = v
        self._diff_cache[key] = out
        return out


def de_rham_differential(omega: FormElement) -> FormElement:
    """Standalone exterior derivative of a form element."""
    return DeRhamComplex(omega.module.base).differential(omega)


@dataclass(frozen=True)
class TruncatedComplex:
    """Explicit truncated de Rham data: per-degree label bases and the
    differential matrices into the (possibly larger) next-level basis."""

    base: QuotientRing
    d_max: int
    degrees: tuple
    bases: dict      # p -> list of (monomial, subset) labels
    targets: dict    # p -> list of labels indexing the rows of matrices[p]
    matrices: dict   # p -> QMatrix of the differential out of degree p

    def basis_size(self, p: int) -> int:
        return len(self.bases.get(p, []))


def truncated_de_rham_complex(R: QuotientRing, d_max: int) -> TruncatedComplex:
    """Assemble explicit bases and differential matrices up to d_max.

    Verifies d∘d = 0 exactly on every basis label before returning.
    """
    from .qlinalg import QMatrix

    if d_max < 1:
        raise ValueError("d_max must be at least 1")
    cx = DeRhamComplex(R)
    n = cx.top_degree
    degrees = tuple(range(n + 1))
    bases = {p: cx.module(p).standard_labels(d_max) for p in degrees}
    targets = {}
    matrices = {}
    for p in degrees:
        images = [cx.diff_label(p, lab) for lab in bases[p]]
        bound = d_max
        for img in images:
            for (m, sub) in img:
                bound = max(bound, mono_degree(m) + len(sub))
        tgt = cx.module(p + 1).standard_labels(bound) if p + 1 <= n else []
        index = {lab: i for i, lab in enumerate(tgt)}
        mat = QMatrix(len(tgt), len(bases[p]))
        for j, img in enumerate(images):
            for lab, c in img.items():
                mat[index[lab], j] = c
        targets[p] = tgt
        matrices[p] = mat
    for p in degrees:
        for lab in bases[p]:
            acc: dict = {}
            for mid, c in cx.diff_label(p, lab).items():
                for tgt_lab, c2 in cx.diff_label(p + 1, mid).items():
                    v = acc.get(tgt_lab, Q(0)) + c * c2
                    if v == 0:
                        acc.pop(tgt_lab, None)
                    else:
                        acc[tgt_lab] = v
            if acc:
                raise ComplexError(f"d∘d != 0 on label {lab} in degree {p}")
    return TruncatedComplex(R, d_max, degrees, bases, targets, matrices)


def de_rham_cohomology(R: QuotientRing, d_max: int = 10,
                       window: int = 3) -> CohomologyReport:
    """Window cohomology of the algebraic de Rham complex of R."""
    if not (d_max > window >= 2):
        raise ValueError("need d_max > window >= 2")
    cx = DeRhamComplex(R)
    n = cx.top_degree

    def labels_fn(p, bound):
        if p > n:
            return []
        return cx.module(p).standard_labels(bound)

    def diff_fn(p, label):
        if p >= n:
            return {}
        return cx.diff_label(p, label)

    def degree_fn(label):
        mono, subset = label
        return mono_degree(mono) + len(subset)

    def text_fn(label):
        mono, subset = label
        # any module of the right exterior degree renders identically
        return cx.module(len(subset)).label_text(mono, subset)

    fc = FilteredComplex(f"deRham({R!r})", labels_fn, diff_fn, degree_fn,
                         text_fn)
    return truncated_cohomology(fc, list(range(n + 1)), d_max, window)
