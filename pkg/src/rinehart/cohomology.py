"""Truncation-window cohomology engine.

A truncated complex presents, for each cochain degree p, a basis of
labels filtered by an internal degree, plus the differential of each
label as an exact rational combination of degree p+1 labels.  Because
the truncation is a filtration and not a quotient, the differential is
never clipped: kernels are taken over sources of internal degree <= t
with targets in an enlarged ambient space, and images are intersected
back into the <= t window.

For a window of truncations t_0 < ... < t_w the engine reports, per
cochain degree:

  * level dims   h(t) = dim Z(t) - dim W(t),
  * comparison ranks of the maps H(t_i) -> H(t_{i+1}),
  * the persistent dimension, the rank of H(t_0) -> H(t_w),
  * a stabilized flag: level dims and comparison ranks are each
    constant across the window,
  * representatives of the persistent classes, reduced against W(t_w).

Artifacts of the cutoff (towers that die under the comparison maps)
are filtered out by the persistent rank, so a stable complex reports
its true Betti numbers once the window is past the interesting degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .qlinalg import (
    Q,
    QMatrix,
    Subspace,
    kernel_basis,
    restrict_to_coordinates,
    subquotient_dim,
    sum_subspaces,
)


class ComplexError(ValueError):
    """The presented data is not a complex (d*d != 0 or bad filtration)."""


@dataclass(frozen=True)
class DegreeReport:
    """Cohomology data for one cochain degree over the window."""

    degree: int
    truncations: tuple
    level_dims: tuple
    comparison_ranks: tuple
    dim: int
    stabilized: bool
    representatives: tuple

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "truncations": list(self.truncations),
            "level_dims": list(self.level_dims),
            "comparison_ranks": list(self.comparison_ranks),
            "dim": self.dim,
            "stabilized": self.stabilized,
            "representatives": list(self.representatives),
        }


@dataclass(frozen=True)
class CohomologyReport:
    name: str
    d_max: int
    window: int
    degrees: tuple  # of DegreeReport, ascending cochain degree

    def dims(self) -> tuple:
        return tuple(d.dim for d in self.degrees)

    def all_stabilized(self) -> bool:
        return all(d.stabilized for d in self.degrees)

    def by_degree(self, p: int) -> DegreeReport:
        for d in self.degrees:
            if d.degree == p:
                return d
        raise KeyError(p)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "d_max": self.d_max,
            "window": self.window,
            "dims": list(self.dims()),
            "stabilized": self.all_stabilized(),
            "degrees": [d.as_dict() for d in self.degrees],
        }


class FilteredComplex:
    """A cochain complex presented by label callbacks.

    labels_fn(p, bound): every degree-p basis label of internal degree
        <= bound, sorted ascending by internal degree (deterministic tie
        order); [] for p < 0 or an empty level.
    diff_fn(p, label): the differential of a degree-p label as a dict
        {degree p+1 label: Fraction}.  Must be defined for every label
        the engine discovers, without clipping.
    degree_fn(label): the internal degree of a label.
    text_fn(label): rendering used for representatives.
    """

    def __init__(self, name: str,
                 labels_fn: Callable[[int, int], list],
                 diff_fn: Callable[[int, object], dict],
                 degree_fn: Callable[[object], int],
                 text_fn: Callable[[object], str] = str):
        self.name = name
        self.labels_fn = labels_fn
        self.diff_fn = diff_fn
        self.degree_fn = degree_fn
        self.text_fn = text_fn

    def labels(self, p: int, bound: int) -> list:
        if p < 0:
            return []
        out = self.labels_fn(p, bound)
        degs = [self.degree_fn(l) for l in out]
        if degs != sorted(degs):
            raise ComplexError(f"labels of degree {p} not sorted by internal degree")
        if any(d > bound for d in degs):
            raise ComplexError(f"label above bound in degree {p}")
        return out

    def diff(self, p: int, label) -> dict:
        img = self.diff_fn(p, label)
        return {k: Q(v) for k, v in img.items() if Q(v) != 0}


def render_combination(vec: Sequence[Fraction], labels: Sequence,
                       text_fn: Callable[[object], str]) -> str:
    """Format sum(vec[i] * labels[i]) the way polynomials print."""
    pieces = []
    for c, lab in zip(vec, labels):
        if c == 0:
            continue
        text = text_fn(lab)
        mag = abs(c)
        body = text if mag == 1 else f"{mag}*{text}"
        if not pieces:
            pieces.append(body if c > 0 else f"-{body}")
        else:
            pieces.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(pieces) if pieces else "0"


class _Level:
    """Ambient data for one cochain degree: labels, index, prefix sizes."""

    def __init__(self, labels: list, degree_fn):
        self.labels = labels
        self.index = {}
        for i, l in enumerate(labels):
            if l in self.index:
                raise ComplexError(f"duplicate label {l!r}")
            self.index[l] = i
        self._degrees = [degree_fn(l) for l in labels]

    @property
    def dim(self):
        return len(self.labels)

    def prefix(self, bound: int) -> int:
        """Number of labels of internal degree <= bound."""
        n = 0
        for d in self._degrees:
            if d > bound:
                break
            n += 1
        return n

    def included(self, bound: int) -> list:
        return list(range(self.prefix(bound)))


def _check_d_squared(cx: FilteredComplex, p: int, sources: list) -> None:
    for lab in sources:
        acc: dict = {}
        for mid, c in cx.diff(p, lab).items():
            for tgt, c2 in cx.diff(p + 1, mid).items():
                v = acc.get(tgt, Q(0)) + c * c2
                if v == 0:
                    acc.pop(tgt, None)
                else:
                    acc[tgt] = v
        if acc:
            raise ComplexError(
                f"d*d != 0 on {cx.text_fn(lab)} in degree {p}: "
                f"residue on {sorted(str(cx.text_fn(t)) for t in acc)}")


def _image_matrix(cx: FilteredComplex, p: int, sources: list,
                  target: _Level) -> QMatrix:
    """Matrix of d^p: columns are source labels, rows the target ambient."""
    m = QMatrix(target.dim, len(sources))
    for j, lab in enumerate(sources):
        for tgt, c in cx.diff(p, lab).items():
            if tgt not in target.index:
                raise ComplexError(
                    f"differential left the ambient window: {cx.text_fn(tgt)}")
            m[target.index[tgt], j] = c
    return m


def _pad(vec, total: int) -> tuple:
    return tuple(vec) + (Q(0),) * (total - len(vec))


def truncated_cohomology(cx: FilteredComplex, degrees: Sequence[int],
                         d_max: int, window: int) -> CohomologyReport:
    """Window cohomology of `cx` in the given cochain degrees.

    Truncations run t = d_max-window, ..., d_max.  Raises ComplexError
    if the data is not a complex or the filtration is not respected.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    if d_max <= window:
        raise ValueError("d_max must exceed the window size")
    degrees = sorted(set(degrees))
    truncations = list(range(d_max - window, d_max + 1))
    t_top = truncations[-1]

    # sources per cochain degree, up to the largest truncation
    need = set(degrees) | {p - 1 for p in degrees} | {p + 1 for p in degrees}
    sources = {p: cx.labels(p, t_top) for p in need if p >= 0}
    for p in range(min(degrees), max(degrees) + 1):
        _check_d_squared(cx, p, sources.get(p, []))

    # ambient level for degree p: window labels plus whatever the
    # incoming differential produces above the cutoff
    levels: dict[int, _Level] = {}
    for p in set(degrees) | {p + 1 for p in degrees}:
        if p < 0:
            continue
        bound = t_top
        for lab in sources.get(p - 1, []):
            for tgt in cx.diff(p - 1, lab):
                bound = max(bound, cx.degree_fn(tgt))
        levels[p] = _Level(cx.labels(p, bound), cx.degree_fn)

    reports = []
    for p in degrees:
        amb = levels[p]
        target = levels[p + 1]
        src_here = sources.get(p, [])
        src_below = sources.get(p - 1, [])
        d_here = _image_matrix(cx, p, src_here, target)
        d_below = _image_matrix(cx, p - 1, src_below, amb) if src_below \
            else QMatrix(amb.dim, 0)

        z_spaces = []
        w_spaces = []
        for t in truncations:
            ncols = amb.prefix(t)
            sub = QMatrix(target.dim, ncols)
            for (r, c), v in d_here.entries.items():
                if c < ncols:
                    sub[r, c] = v
            ker = kernel_basis(sub)
            z = Subspace.from_vectors([_pad(v, amb.dim) for v in ker.basis],
                                      amb.dim)
            nbelow = len([l for l in src_below if cx.degree_fn(l) <= t])
            img_vecs = []
            for c in range(nbelow):
                img_vecs.append(tuple(d_below.entries.get((r, c), Q(0))
                                      for r in range(amb.dim)))
            img = Subspace.from_vectors(img_vecs, amb.dim)
            w = restrict_to_coordinates(img, amb.included(t))
            for b in w.basis:
                if not z.contains(b):
                    raise ComplexError(
                        f"boundary not closed in degree {p} at t={t}")
            z_spaces.append(z)
            w_spaces.append(w)

        level_dims = tuple(z.dim - w.dim
                           for z, w in zip(z_spaces, w_spaces))
        for a, b in zip(truncations, truncations[1:]):
            ia, ib = truncations.index(a), truncations.index(b)
            for v in z_spaces[ia].basis:
                if not z_spaces[ib].contains(v):
                    raise ComplexError(f"Z({a}) not inside Z({b}) in degree {p}")
            for v in w_spaces[ia].basis:
                if not w_spaces[ib].contains(v):
                    raise ComplexError(f"W({a}) not inside W({b}) in degree {p}")

        ranks = []
        for i in range(len(truncations) - 1):
            num = sum_subspaces(z_spaces[i], w_spaces[i + 1])
            ranks.append(num.dim - w_spaces[i + 1].dim)
        long_num = sum_subspaces(z_spaces[0], w_spaces[-1])
        dim, reps = subquotient_dim(long_num, w_spaces[-1])
        stabilized = len(set(level_dims)) == 1 and len(set(ranks)) <= 1
        rep_texts = tuple(render_combination(v, amb.labels, cx.text_fn)
                          for v in reps)
        reports.append(DegreeReport(
            degree=p,
            truncations=tuple(truncations),
            level_dims=level_dims,
            comparison_ranks=tuple(ranks),
            dim=dim,
            stabilized=stabilized,
            representatives=rep_texts,
        ))
    return CohomologyReport(cx.name, d_max, window, tuple(reports))
