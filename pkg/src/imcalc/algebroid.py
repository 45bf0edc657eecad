"""Lie algebroids in polynomial charts, their prolongations, and checkers.

A Lie algebroid over a chart is encoded by its rank, a frame of section
names, an anchor matrix (one polynomial row per frame section, one column per
chart coordinate) and an antisymmetric table of structure functions.  The
axiom checker, the two direct-sum prolongation constructions (tangent side
over the k-fold tangent chart, cotangent side over the k-fold dual chart) and
the fiberwise-linear morphism-to-the-line checker all operate on this one
representation, so the same `check_morphism_to_line` serves both main
equivalence oracles.

Structure functions are stored sparsely for pairs a < b only; brackets of
frame sections in either order are served with the sign folded in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import AlgebroidError, AxiomError
from .forms import (
    VectorField,
    _acc,
    _merge_sorted,
    graded_bracket,
    sort_indices,
)
from .poly import Chart, ChartError, Coord, Polynomial, ROLE_DUAL, ROLE_TANGENT


@dataclass(frozen=True)
class Violation:
    """One failed condition: tag, witness indices/names, nonzero residual."""

    condition: str
    witness: tuple
    residual: Polynomial
    caveat: str | None = None


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a condition battery; passed iff there are no violations."""

    passed: bool
    violations: tuple = ()
    notes: tuple = ()

    @classmethod
    def collect(cls, violations: Iterable[Violation], notes: Iterable[str] = ()) -> "CheckReport":
        vs = tuple(violations)
        return cls(passed=not vs, violations=vs, notes=tuple(notes))


class LieAlgebroid:
    """Anchored bracket data on a chart.

    `anchor[a][j]` is the coefficient of the j-th chart coordinate direction
    in the image of frame section a; `structure[(a, b)][c]` (a < b) is the
    coefficient of frame section c in the bracket of frame sections a and b.
    Unless `unchecked=True`, construction runs `check_axioms` and refuses data
    that is not a Lie algebroid; unchecked values still work with every
    checker and prolongation (the frame-level computations never assume the
    axioms), which is how deliberately broken fixtures are exercised.
    """

    __slots__ = ("base_chart", "rank", "frame_names", "anchor", "structure",
                 "checked", "_anchor_sparse")

    def __init__(self, base_chart: Chart, rank: int, frame_names: Sequence[str],
                 anchor: Sequence[Sequence[Polynomial]],
                 structure: Mapping, unchecked: bool = False,
                 _inherit_checked: bool | None = None):
        frame_names = tuple(frame_names)
        if len(frame_names) != rank or len(set(frame_names)) != rank:
            raise AlgebroidError("need rank-many distinct frame names")
        if len(anchor) != rank:
            raise AlgebroidError("anchor needs one row per frame section")
        rows = []
        for row in anchor:
            row = tuple(row)
            if len(row) != base_chart.dim:
                raise AlgebroidError("anchor rows need one entry per chart coordinate")
            for p in row:
                if p.chart != base_chart:
                    raise ChartError("anchor entries must live on the base chart")
            rows.append(row)
        table: dict = {}
        for (a, b), entries in structure.items():
            if not (0 <= a < rank and 0 <= b < rank):
                raise AlgebroidError(f"structure indices {(a, b)} out of range")
            if a >= b:
                raise AlgebroidError("structure table must be given for pairs a < b")
            row: dict = {}
            for c, p in entries.items():
                if not 0 <= c < rank:
                    raise AlgebroidError(f"structure target index {c} out of range")
                if p.chart != base_chart:
                    raise ChartError("structure functions must live on the base chart")
                if not p.is_zero():
                    row[c] = p
            if row:
                table[(a, b)] = row
        object.__setattr__(self, "base_chart", base_chart)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "frame_names", frame_names)
        object.__setattr__(self, "anchor", tuple(rows))
        object.__setattr__(self, "structure", table)
        object.__setattr__(self, "_anchor_sparse", tuple(
            tuple((base_chart.names[j], p) for j, p in enumerate(row) if not p.is_zero())
            for row in rows
        ))
        if _inherit_checked is not None:
            # prolongations of validated algebroids inherit the flag; the
            # closure property is covered by the test suite rather than
            # re-verified on every construction
            object.__setattr__(self, "checked", _inherit_checked)
        elif unchecked:
            object.__setattr__(self, "checked", False)
        else:
            report = check_axioms(self)
            if not report.passed:
                raise AxiomError(report)
            object.__setattr__(self, "checked", True)

    def __setattr__(self, *_):
        raise AttributeError("LieAlgebroid is immutable")

    def __eq__(self, other):
        if not isinstance(other, LieAlgebroid):
            return NotImplemented
        return (self.base_chart == other.base_chart and self.rank == other.rank
                and self.frame_names == other.frame_names and self.anchor == other.anchor
                and self.structure == other.structure)

    def __hash__(self):
        return hash((self.base_chart, self.rank, self.frame_names))

    def frame_index(self, name: str) -> int:
        try:
            return self.frame_names.index(name)
        except ValueError:
            raise AlgebroidError(f"unknown frame section {name!r}") from None

    def bracket_frame_row(self, a: int, b: int):
        """[e_a, e_b] as (index, coefficient) pairs, any argument order."""
        if a == b:
            return ()
        if a < b:
            return tuple(self.structure.get((a, b), {}).items())
        return tuple((c, -p) for c, p in self.structure.get((b, a), {}).items())

    def structure_coeff(self, a: int, b: int, c: int) -> Polynomial:
        for d, p in self.bracket_frame_row(a, b):
            if d == c:
                return p
        return Polynomial.zero(self.base_chart)

    def anchor_field(self, a: int) -> VectorField:
        return VectorField.from_components(self.base_chart, list(self.anchor[a]))

    def anchor_derivation(self, a: int, f: Polynomial) -> Polynomial:
        """Directional derivative of a scalar along the anchor of frame a."""
        out = Polynomial.zero(self.base_chart)
        for name, comp in self._anchor_sparse[a]:
            out = out + comp * f.diff(name)
        return out

    def __repr__(self):
        return (f"LieAlgebroid(rank {self.rank} over {self.base_chart.name!r}, "
                f"frame {list(self.frame_names)})")


class Section:
    """Element of a wedge power of the section module, in frame components.

    Degree 0 is a scalar (component at the empty tuple), degree 1 a plain
    section u = u^a e_a, degree p an antisymmetric table over strictly
    increasing frame index tuples.
    """

    __slots__ = ("algebroid", "degree", "comps")

    def __init__(self, algebroid: LieAlgebroid, degree: int, comps: Mapping | None = None):
        table: dict = {}
        if comps:
            for idx, p in comps.items():
                idx = tuple(idx)
                if len(idx) != degree or any(not 0 <= i < algebroid.rank for i in idx):
                    raise AlgebroidError(f"bad component index {idx} for degree {degree}")
                if any(a >= b for a, b in zip(idx, idx[1:])):
                    raise AlgebroidError(f"component index {idx} is not strictly increasing")
                if p.chart != algebroid.base_chart:
                    raise ChartError("section components must live on the base chart")
                if not p.is_zero():
                    table[idx] = p
        object.__setattr__(self, "algebroid", algebroid)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "comps", table)

    def __setattr__(self, *_):
        raise AttributeError("Section is immutable")

    @classmethod
    def zero(cls, algebroid: LieAlgebroid, degree: int) -> "Section":
        return cls(algebroid, degree)

    @classmethod
    def function(cls, algebroid: LieAlgebroid, poly: Polynomial) -> "Section":
        return cls(algebroid, 0, {(): poly})

    @classmethod
    def frame(cls, algebroid: LieAlgebroid, a: int) -> "Section":
        one = Polynomial.const(algebroid.base_chart, 1)
        return cls(algebroid, 1, {(a,): one})

    @classmethod
    def from_components(cls, algebroid: LieAlgebroid, comps: Sequence[Polynomial]) -> "Section":
        if len(comps) != algebroid.rank:
            raise AlgebroidError("need one component per frame section")
        return cls(algebroid, 1, {(a,): p for a, p in enumerate(comps) if not p.is_zero()})

    @classmethod
    def from_terms(cls, algebroid: LieAlgebroid, degree: int, items: Iterable) -> "Section":
        table: dict = {}
        for idx, poly in items:
            srt = sort_indices(tuple(idx))
            if srt is None:
                continue
            key, sign = srt
            _acc(table, key, poly if sign == 1 else -poly)
        return cls(algebroid, degree, table)

    def component(self, idx) -> Polynomial:
        srt = sort_indices(tuple(idx))
        if srt is None:
            return Polynomial.zero(self.algebroid.base_chart)
        key, sign = srt
        p = self.comps.get(key)
        if p is None:
            return Polynomial.zero(self.algebroid.base_chart)
        return p if sign == 1 else -p

    def scalar(self) -> Polynomial:
        if self.degree != 0:
            raise AlgebroidError("scalar() only in degree 0")
        return self.comps.get((), Polynomial.zero(self.algebroid.base_chart))

    def _mate(self, other: "Section") -> None:
        if self.algebroid is not other.algebroid and self.algebroid != other.algebroid:
            raise AlgebroidError("sections belong to different algebroids")

    def __add__(self, other: "Section") -> "Section":
        self._mate(other)
        if self.degree != other.degree:
            raise AlgebroidError("degree mismatch in sum")
        table = dict(self.comps)
        for k, p in other.comps.items():
            _acc(table, k, p)
        return Section(self.algebroid, self.degree, table)

    def __neg__(self) -> "Section":
        return Section(self.algebroid, self.degree, {k: -p for k, p in self.comps.items()})

    def __sub__(self, other: "Section") -> "Section":
        return self + (-other)

    def scale(self, factor) -> "Section":
        return Section(self.algebroid, self.degree,
                       {k: p * factor for k, p in self.comps.items()})

    def wedge(self, other: "Section") -> "Section":
        self._mate(other)
        table: dict = {}
        for i1, p1 in self.comps.items():
            for i2, p2 in other.comps.items():
                merged = _merge_sorted(i1, i2)
                if merged is None:
                    continue
                key, sign = merged
                _acc(table, key, p1 * p2 if sign == 1 else -(p1 * p2))
        return Section(self.algebroid, self.degree + other.degree, table)

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other):
        if not isinstance(other, Section):
            return NotImplemented
        return (self.algebroid == other.algebroid and self.degree == other.degree
                and self.comps == other.comps)

    def __hash__(self):
        return hash((self.degree, frozenset(self.comps)))

    def __str__(self):
        if not self.comps:
            return "0"
        names = self.algebroid.frame_names
        pieces = []
        for idx in sorted(self.comps):
            tag = "^".join(names[i] for i in idx)
            pieces.append(f"({self.comps[idx]}) {tag}" if tag else f"({self.comps[idx]})")
        return " + ".join(pieces)

    __repr__ = __str__


def bracket_sections(algebroid: LieAlgebroid, u: Section, v: Section) -> Section:
    """Bracket of two degree-1 sections by the explicit Leibniz formula.

    [u, v]^c = u^a v^b C_ab^c + u^a rho_a(v^c) - v^b rho_b(u^c).  The wedge
    extension of arbitrary degrees lives in `section_bracket`; the two agree
    on degree 1 (tested), giving an internal dual route for the bracket.
    """
    if u.degree != 1 or v.degree != 1:
        raise AlgebroidError("bracket_sections needs degree-1 sections")
    u._mate(v)
    out: dict = {}
    for (a,), ua in u.comps.items():
        for (b,), vb in v.comps.items():
            for c, w in algebroid.bracket_frame_row(a, b):
                _acc(out, (c,), ua * vb * w)
        for (c,), vc in v.comps.items():
            _acc(out, (c,), ua * algebroid.anchor_derivation(a, vc))
    for (b,), vb in v.comps.items():
        for (c,), uc in u.comps.items():
            _acc(out, (c,), -(vb * algebroid.anchor_derivation(b, uc)))
    return Section(algebroid, 1, out)


def section_bracket(u: Section, v: Section) -> Section:
    """Gerstenhaber bracket on wedge powers of sections.

    Extends the frame bracket and the anchor action on scalars by graded
    antisymmetry and the graded Leibniz rule; on two degree-1 sections it
    reduces to `bracket_sections`, on (section, scalar) to the anchor
    derivative.
    """
    u._mate(v)
    algebroid = u.algebroid
    table = graded_bracket(u.comps, u.degree, v.comps, v.degree,
                           algebroid.bracket_frame_row, algebroid.anchor_derivation)
    return Section(algebroid, max(u.degree + v.degree - 1, 0), table)


def anchor_apply(algebroid: LieAlgebroid, u: Section) -> VectorField:
    """Image of a degree-1 section under the anchor, as a chart vector field."""
    if u.degree != 1:
        raise AlgebroidError("anchor_apply needs a degree-1 section")
    comps = [Polynomial.zero(algebroid.base_chart) for _ in range(algebroid.base_chart.dim)]
    for (a,), ua in u.comps.items():
        for j, p in enumerate(algebroid.anchor[a]):
            comps[j] = comps[j] + ua * p
    return VectorField.from_components(algebroid.base_chart, comps)


def check_axioms(algebroid: LieAlgebroid) -> CheckReport:
    """Verify anchor-bracket compatibility and the Jacobi identity on frames.

    Anchor condition, for every frame pair a < b and chart coordinate:
    the commutator of anchor images minus the anchor image of the bracket
    vanishes identically.  Jacobi: the cyclic sum of [e_a, [e_b, e_c]]
    vanishes in every frame component for a < b < c.  Jacobi on frame triples
    suffices: general sections follow via the Leibniz identity.
    """
    violations = []
    chart = algebroid.base_chart
    r = algebroid.rank
    for a in range(r):
        for b in range(a + 1, r):
            row = dict(algebroid.bracket_frame_row(a, b))
            for j, name in enumerate(chart.names):
                res = (algebroid.anchor_derivation(a, algebroid.anchor[b][j])
                       - algebroid.anchor_derivation(b, algebroid.anchor[a][j]))
                for c, w in row.items():
                    res = res - w * algebroid.anchor[c][j]
                if not res.is_zero():
                    violations.append(Violation("AXIOM_ANCHOR", (a + 1, b + 1, name), res))
    for a in range(r):
        for b in range(a + 1, r):
            for c in range(b + 1, r):
                acc: dict = {}
                for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                    # [e_x, [e_y, e_z]] with [e_y, e_z] = sum_d w_d e_d
                    for d, w in algebroid.bracket_frame_row(y, z):
                        dw = algebroid.anchor_derivation(x, w)
                        if not dw.is_zero():
                            acc[d] = acc.get(d, Polynomial.zero(chart)) + dw
                        for e, w2 in algebroid.bracket_frame_row(x, d):
                            acc[e] = acc.get(e, Polynomial.zero(chart)) + w * w2
                for e in sorted(acc):
                    if not acc[e].is_zero():
                        violations.append(
                            Violation("AXIOM_JACOBI", (a + 1, b + 1, c + 1, e + 1), acc[e]))
    return CheckReport.collect(violations)


@dataclass(frozen=True)
class FiberFunctional:
    """Fiberwise-linear map to the line, stored by its frame values.

    The values are polynomials on the base chart of the (typically
    prolongation) algebroid; linearity over base functions determines the
    functional on every section from these.
    """

    algebroid: LieAlgebroid
    values: Mapping

    def __post_init__(self):
        missing = [n for n in self.algebroid.frame_names if n not in self.values]
        extra = [n for n in self.values if n not in self.algebroid.frame_names]
        if missing or extra:
            raise AlgebroidError(
                f"functional must cover the frame exactly (missing {missing}, extra {extra})")
        for name, p in self.values.items():
            if p.chart != self.algebroid.base_chart:
                raise ChartError(f"value for {name!r} lives on the wrong chart")
        object.__setattr__(self, "values", dict(self.values))

    def value(self, a: int) -> Polynomial:
        return self.values[self.algebroid.frame_names[a]]


def check_morphism_to_line(algebroid: LieAlgebroid, functional: FiberFunctional) -> CheckReport:
    """Check the Lie-algebroid-morphism condition of a fiberwise-linear map.

    For each unordered frame pair (U, V) the residual is
    F([U, V]) - rho(U) F(V) + rho(V) F(U), with F extended to the bracket by
    linearity over the frame coefficients.  Vanishing on frame pairs settles
    the condition for all sections: expanding sections in the frame, the
    derivative terms produced by the Leibniz rule on either side cancel.
    """
    if functional.algebroid != algebroid:
        raise AlgebroidError("functional is attached to a different algebroid")
    violations = []
    r = algebroid.rank
    for i in range(r):
        fi = functional.value(i)
        for j in range(i + 1, r):
            fj = functional.value(j)
            res = (-algebroid.anchor_derivation(i, fj)
                   + algebroid.anchor_derivation(j, fi))
            for c, w in algebroid.bracket_frame_row(i, j):
                res = res + w * functional.value(c)
            if not res.is_zero():
                violations.append(Violation(
                    "MORPHISM",
                    (algebroid.frame_names[i], algebroid.frame_names[j]),
                    res))
    return CheckReport.collect(violations)


# ---------------------------------------------------------------------------
# prolongations
# ---------------------------------------------------------------------------

def tangent_copy_name(coord: str, n: int) -> str:
    return f"{coord}_dot{n}"


def dual_copy_name(n: int, d: int) -> str:
    return f"xi{n}_{d}"


def core_frame_name(frame: str, n: int) -> str:
    return f"{frame}_hat{n}"


def linear_frame_name(frame: str) -> str:
    return f"T{frame}"


def dual_core_frame_name(coord: str, n: int) -> str:
    return f"d{coord}_hat{n}"


def dual_linear_frame_name(frame: str) -> str:
    return f"{frame}_L"


def tangent_sum_chart(base: Chart, k: int) -> Chart:
    """Chart of the k-fold tangent sum: base coordinates plus k dotted copies."""
    extra = [Coord(tangent_copy_name(c.name, n), ROLE_TANGENT, n)
             for n in range(1, k + 1) for c in base.coords]
    return Chart(f"{base.name}|T{k}", base.coords + tuple(extra))


def dual_sum_chart(base: Chart, rank: int, k: int) -> Chart:
    """Chart of the k-fold dual sum: base coordinates plus k dual-fiber copies."""
    extra = [Coord(dual_copy_name(n, d + 1), ROLE_DUAL, n)
             for n in range(1, k + 1) for d in range(rank)]
    return Chart(f"{base.name}|T*{k}", base.coords + tuple(extra))


def tangent_prolongation(algebroid: LieAlgebroid, k: int) -> LieAlgebroid:
    """The induced algebroid on the k-fold tangent sum of the total space.

    Frame: core sections (one per frame section and copy, ordered by (copy,
    section)) followed by the diagonal linear ones.  Anchor: cores push the
    anchor into the matching dotted copy; linear sections keep the base part
    and pick up the dotted derivative correction in every copy.  Brackets:
    cores commute, linear-core reproduces the structure functions on cores,
    linear-linear adds the dotted derivative of the structure functions.
    """
    if k < 1:
        raise AlgebroidError("prolongation degree k must be >= 1")
    base = algebroid.base_chart
    chart = tangent_sum_chart(base, k)
    r = algebroid.rank
    n_base = base.dim
    zero = Polynomial.zero(chart)

    frame = [core_frame_name(name, n)
             for n in range(1, k + 1) for name in algebroid.frame_names]
    frame += [linear_frame_name(name) for name in algebroid.frame_names]

    def core_idx(a: int, n: int) -> int:
        return (n - 1) * r + a

    def lin_idx(a: int) -> int:
        return k * r + a

    anchor_prom = [[p.promote(chart) for p in row] for row in algebroid.anchor]
    dotted = [[Polynomial.variable(chart, tangent_copy_name(base.names[i], n))
               for i in range(n_base)] for n in range(1, k + 1)]

    rows = []
    for n in range(1, k + 1):
        for a in range(r):
            row = [zero] * chart.dim
            for j in range(n_base):
                row[chart.index(tangent_copy_name(base.names[j], n))] = anchor_prom[a][j]
            rows.append(row)
    for a in range(r):
        row = [zero] * chart.dim
        for j in range(n_base):
            row[j] = anchor_prom[a][j]
        for n in range(1, k + 1):
            for j in range(n_base):
                w = zero
                for i in range(n_base):
                    dpart = algebroid.anchor[a][j].diff(base.names[i])
                    if not dpart.is_zero():
                        w = w + dotted[n - 1][i] * dpart.promote(chart)
                if not w.is_zero():
                    col = chart.index(tangent_copy_name(base.names[j], n))
                    row[col] = row[col] + w
        rows.append(row)

    structure: dict = {}
    for a in range(r):
        for b in range(r):
            crow = algebroid.bracket_frame_row(a, b)
            if not crow:
                continue
            # [T e_a, core e_(b, m)] = C_ab^d core e_(d, m)
            for m in range(1, k + 1):
                i, j = core_idx(b, m), lin_idx(a)
                # cores precede linear sections, so store [core, linear] = -[linear, core]
                entries = structure.setdefault((i, j), {})
                for d, w in crow:
                    tgt = core_idx(d, m)
                    entries[tgt] = entries.get(tgt, zero) - w.promote(chart)
    for a in range(r):
        for b in range(a + 1, r):
            crow = algebroid.bracket_frame_row(a, b)
            if not crow:
                continue
            entries = structure.setdefault((lin_idx(a), lin_idx(b)), {})
            for d, w in crow:
                entries[lin_idx(d)] = entries.get(lin_idx(d), zero) + w.promote(chart)
                for n in range(1, k + 1):
                    corr = zero
                    for i in range(n_base):
                        dw = w.diff(base.names[i])
                        if not dw.is_zero():
                            corr = corr + dotted[n - 1][i] * dw.promote(chart)
                    if not corr.is_zero():
                        key = core_idx(d, n)
                        entries[key] = entries.get(key, zero) + corr

    return LieAlgebroid(chart, (k + 1) * r, frame, rows, _clean_structure(structure),
                        _inherit_checked=algebroid.checked)


def cotangent_prolongation(algebroid: LieAlgebroid, k: int) -> LieAlgebroid:
    """The induced algebroid on the k-fold cotangent sum of the total space.

    Frame: core sections (one per base coordinate and copy, ordered by (copy,
    coordinate)) followed by the diagonal linear ones.  The anchor routes the
    columns of the base anchor into the dual copies for cores and acts by the
    coadjoint-type expression on linear sections.
    """
    if k < 1:
        raise AlgebroidError("prolongation degree k must be >= 1")
    base = algebroid.base_chart
    r = algebroid.rank
    n_base = base.dim
    chart = dual_sum_chart(base, r, k)
    zero = Polynomial.zero(chart)

    frame = [dual_core_frame_name(base.names[i], n)
             for n in range(1, k + 1) for i in range(n_base)]
    frame += [dual_linear_frame_name(name) for name in algebroid.frame_names]

    def core_idx(i: int, n: int) -> int:
        return (n - 1) * n_base + i

    def lin_idx(a: int) -> int:
        return k * n_base + a

    xi = [[Polynomial.variable(chart, dual_copy_name(n, d + 1))
           for d in range(r)] for n in range(1, k + 1)]

    rows = []
    for n in range(1, k + 1):
        for i in range(n_base):
            row = [zero] * chart.dim
            for d in range(r):
                p = algebroid.anchor[d][i]
                if not p.is_zero():
                    row[chart.index(dual_copy_name(n, d + 1))] = p.promote(chart)
            rows.append(row)
    for a in range(r):
        row = [zero] * chart.dim
        for j in range(n_base):
            row[j] = algebroid.anchor[a][j].promote(chart)
        for n in range(1, k + 1):
            for b in range(r):
                w = zero
                for c, coeff in algebroid.bracket_frame_row(a, b):
                    w = w + coeff.promote(chart) * xi[n - 1][c]
                if not w.is_zero():
                    row[chart.index(dual_copy_name(n, b + 1))] = w
        rows.append(row)

    structure: dict = {}
    for a in range(r):
        # [linear e_a, core dx_(j, m)] = d(rho_a^j)/dx^i core dx_(i, m)
        for j in range(n_base):
            coeffs = [algebroid.anchor[a][j].diff(base.names[i]) for i in range(n_base)]
            if all(c.is_zero() for c in coeffs):
                continue
            for m in range(1, k + 1):
                key = (core_idx(j, m), lin_idx(a))
                entries = structure.setdefault(key, {})
                for i, c in enumerate(coeffs):
                    if not c.is_zero():
                        tgt = core_idx(i, m)
                        entries[tgt] = entries.get(tgt, zero) - c.promote(chart)
    for a in range(r):
        for b in range(a + 1, r):
            crow = algebroid.bracket_frame_row(a, b)
            if not crow:
                continue
            entries = structure.setdefault((lin_idx(a), lin_idx(b)), {})
            for d, w in crow:
                entries[lin_idx(d)] = entries.get(lin_idx(d), zero) + w.promote(chart)
                for i in range(n_base):
                    dw = w.diff(base.names[i])
                    if dw.is_zero():
                        continue
                    for n in range(1, k + 1):
                        tgt = core_idx(i, n)
                        entries[tgt] = entries.get(tgt, zero) - dw.promote(chart) * xi[n - 1][d]

    return LieAlgebroid(chart, k * n_base + r, frame, rows, _clean_structure(structure),
                        _inherit_checked=algebroid.checked)


def _clean_structure(structure: dict) -> dict:
    out = {}
    for key, entries in structure.items():
        row = {c: p for c, p in entries.items() if not p.is_zero()}
        if row:
            out[key] = row
    return out
