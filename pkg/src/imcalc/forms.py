"""Differential forms and multivector fields with exact polynomial coefficients.

Both kinds of object are stored the same way: a degree-k alternating tensor on
a chart is a map from strictly increasing k-tuples of coordinate indices to
Polynomial coefficients.  Degrees exceeding the chart dimension are legal and
simply have an empty table (identically zero); intermediate expressions in the
operator identities legitimately produce them.

The module provides wedge, exterior derivative, (iterated) contraction, Lie
derivative, and the Schouten bracket.  The Schouten bracket is one instance of
a generic graded bracket engine (`graded_bracket`) that extends a frame-level
bracket and a derivation action on coefficients by

    [u, v ^ w] = [u, v] ^ w + (-1)^((p-1) q) v ^ [u, w]
    [u, v]     = -(-1)^((p-1)(q-1)) [v, u]

to arbitrary wedge degrees; the algebroid layer reuses the engine for the
Gerstenhaber bracket on wedge powers of sections.
"""

from __future__ import annotations

from itertools import permutations
from typing import Callable, Iterable, Mapping, Sequence

from .poly import Chart, ChartError, Polynomial


def sort_indices(indices: Sequence[int]):
    """Sort a tuple of indices; return (sorted_tuple, sign) or None if repeated."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return None
    sign = 1
    # insertion sort; chart degrees are tiny
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return tuple(idx), sign


def _merge_sorted(t1, t2):
    """Merge two strictly increasing tuples; (merged, sign) or None on overlap."""
    merged = t1 + t2
    return sort_indices(merged)


def _acc(table: dict, key, poly: Polynomial) -> None:
    if poly.is_zero():
        return
    cur = table.get(key)
    s = poly if cur is None else cur + poly
    if s.is_zero():
        table.pop(key, None)
    else:
        table[key] = s


class Alternating:
    """Shared canonical storage for forms and multivectors."""

    __slots__ = ("chart", "degree", "coeffs")

    def __init__(self, chart: Chart, degree: int, coeffs=None):
        if degree < 0:
            raise ValueError("degree must be non-negative")
        table = {}
        if coeffs:
            for idx, poly in coeffs.items():
                idx = tuple(idx)
                if len(idx) != degree:
                    raise ValueError(f"index tuple {idx} has wrong length for degree {degree}")
                if any(i < 0 or i >= chart.dim for i in idx):
                    raise ChartError(f"index tuple {idx} outside chart {chart.name!r}")
                if any(a >= b for a, b in zip(idx, idx[1:])):
                    raise ValueError(f"index tuple {idx} is not strictly increasing")
                if poly.chart != chart:
                    raise ChartError("coefficient lives on the wrong chart")
                if not poly.is_zero():
                    _acc(table, idx, poly)
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", table)

    def __setattr__(self, *_):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def from_terms(cls, chart: Chart, degree: int, items: Iterable):
        """Build from (index_tuple, Polynomial) pairs in any index order."""
        table: dict = {}
        for idx, poly in items:
            srt = sort_indices(tuple(idx))
            if srt is None:
                continue
            key, sign = srt
            _acc(table, key, poly if sign == 1 else -poly)
        out = cls.__new__(cls)
        object.__setattr__(out, "chart", chart)
        object.__setattr__(out, "degree", degree)
        object.__setattr__(out, "coeffs", table)
        return out

    def _like(self, coeffs: dict):
        out = type(self).__new__(type(self))
        object.__setattr__(out, "chart", self.chart)
        object.__setattr__(out, "degree", self.degree)
        object.__setattr__(out, "coeffs", coeffs)
        return out

    def _check_mate(self, other):
        # forms combine with forms, multivectors with multivectors; a
        # VectorField is just a degree-1 multivector here
        if not isinstance(other, Alternating) or self._family() is not other._family():
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartError("chart mismatch")

    def _family(self):
        return DifferentialForm if isinstance(self, DifferentialForm) else Multivector

    def __add__(self, other):
        self._check_mate(other)
        if other.degree != self.degree:
            raise ValueError("degree mismatch in sum")
        table = dict(self.coeffs)
        for k, p in other.coeffs.items():
            _acc(table, k, p)
        return self._like(table)

    def __neg__(self):
        return self._like({k: -p for k, p in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        """Multiply every coefficient by a Polynomial or rational."""
        if isinstance(factor, Polynomial) and factor.chart != self.chart:
            raise ChartError("scale factor lives on the wrong chart")
        table: dict = {}
        for k, p in self.coeffs.items():
            _acc(table, k, p * factor)
        return self._like(table)

    def coeff(self, idx) -> Polynomial:
        srt = sort_indices(tuple(idx))
        if srt is None:
            return Polynomial.zero(self.chart)
        key, sign = srt
        p = self.coeffs.get(key)
        if p is None:
            return Polynomial.zero(self.chart)
        return p if sign == 1 else -p

    def is_zero(self) -> bool:
        return not self.coeffs

    def promote(self, new_chart: Chart):
        """Reinterpret on a larger chart (indices remapped by coordinate name)."""
        remap = [new_chart.index(c.name) for c in self.chart.coords]
        out = type(self).__new__(type(self))
        table: dict = {}
        for idx, p in self.coeffs.items():
            key, sign = sort_indices(tuple(remap[i] for i in idx))
            q = p.promote(new_chart)
            _acc(table, key, q if sign == 1 else -q)
        object.__setattr__(out, "chart", new_chart)
        object.__setattr__(out, "degree", self.degree)
        object.__setattr__(out, "coeffs", table)
        return out

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (
            self.chart == other.chart
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.chart, self.degree, frozenset(self.coeffs)))

    def __str__(self):
        if not self.coeffs:
            return "0"
        glyph = self._GLYPH
        pieces = []
        for idx in sorted(self.coeffs):
            names = "^".join(glyph.format(self.chart.names[i]) for i in idx)
            pieces.append(f"({self.coeffs[idx]}) {names}" if names else f"({self.coeffs[idx]})")
        return " + ".join(pieces)

    def __repr__(self):
        return f"{type(self).__name__}(deg {self.degree} on {self.chart.name!r}: {self})"


class DifferentialForm(Alternating):
    _GLYPH = "d{}"

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "DifferentialForm":
        return cls(chart, degree)

    @classmethod
    def function(cls, poly: Polynomial) -> "DifferentialForm":
        return cls(poly.chart, 0, {(): poly})

    def scalar(self) -> Polynomial:
        """The underlying Polynomial of a degree-0 form."""
        if self.degree != 0:
            raise ValueError("scalar() is only defined in degree 0")
        return self.coeffs.get((), Polynomial.zero(self.chart))


class Multivector(Alternating):
    _GLYPH = "@{}"

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "Multivector":
        return cls(chart, degree)

    def scalar(self) -> Polynomial:
        if self.degree != 0:
            raise ValueError("scalar() is only defined in degree 0")
        return self.coeffs.get((), Polynomial.zero(self.chart))


class VectorField(Multivector):
    """Degree-1 multivector; components indexed by chart coordinate."""

    def __init__(self, chart: Chart, coeffs=None):
        super().__init__(chart, 1, coeffs)

    @classmethod
    def from_components(cls, chart: Chart, comps: Sequence[Polynomial]) -> "VectorField":
        if len(comps) != chart.dim:
            raise ChartError("need one component per chart coordinate")
        return cls(chart, {(i,): p for i, p in enumerate(comps) if not p.is_zero()})

    @classmethod
    def coordinate(cls, chart: Chart, name: str) -> "VectorField":
        return cls(chart, {(chart.index(name),): Polynomial.const(chart, 1)})

    def component(self, i: int) -> Polynomial:
        return self.coeffs.get((i,), Polynomial.zero(self.chart))

    def apply(self, f: Polynomial) -> Polynomial:
        """Directional derivative of a scalar."""
        if f.chart != self.chart:
            raise ChartError("chart mismatch")
        out = Polynomial.zero(self.chart)
        for (i,), comp in self.coeffs.items():
            out = out + comp * f.diff(self.chart.names[i])
        return out


def as_vector_field(mv: Multivector) -> VectorField:
    """View a degree-1 multivector as a VectorField."""
    if mv.degree != 1:
        raise ValueError("only degree-1 multivectors are vector fields")
    out = VectorField.__new__(VectorField)
    object.__setattr__(out, "chart", mv.chart)
    object.__setattr__(out, "degree", 1)
    object.__setattr__(out, "coeffs", dict(mv.coeffs))
    return out


def wedge(a, b):
    """Wedge product of two forms or two multivectors on one chart."""
    if type(a) is VectorField:
        a = Multivector(a.chart, 1, a.coeffs)
    if type(b) is VectorField:
        b = Multivector(b.chart, 1, b.coeffs)
    a._check_mate(b)
    table: dict = {}
    for i1, p1 in a.coeffs.items():
        for i2, p2 in b.coeffs.items():
            merged = _merge_sorted(i1, i2)
            if merged is None:
                continue
            key, sign = merged
            _acc(table, key, p1 * p2 if sign == 1 else -(p1 * p2))
    out = type(a).__new__(type(a))
    object.__setattr__(out, "chart", a.chart)
    object.__setattr__(out, "degree", a.degree + b.degree)
    object.__setattr__(out, "coeffs", table)
    return out


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    """de Rham differential; satisfies d(d(a)) = 0."""
    table: dict = {}
    chart = a.chart
    for idx, p in a.coeffs.items():
        for j, name in enumerate(chart.names):
            dp = p.diff(name)
            if dp.is_zero():
                continue
            merged = _merge_sorted((j,), idx)
            if merged is None:
                continue
            key, sign = merged
            _acc(table, key, dp if sign == 1 else -dp)
    out = DifferentialForm.__new__(DifferentialForm)
    object.__setattr__(out, "chart", chart)
    object.__setattr__(out, "degree", a.degree + 1)
    object.__setattr__(out, "coeffs", table)
    return out


def _contract_table(components: dict, table: dict, degree: int) -> dict:
    """Contract {index: Polynomial} components into an alternating table."""
    out: dict = {}
    for idx, p in table.items():
        for pos, i in enumerate(idx):
            comp = components.get(i)
            if comp is None:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            term = comp * p
            _acc(out, rest, term if pos % 2 == 0 else -term)
    return out


def contract(x: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Interior product i_x a."""
    if x.chart != a.chart:
        raise ChartError("chart mismatch")
    if a.degree == 0:
        return DifferentialForm(a.chart, 0)
    comps = {i: p for (i,), p in x.coeffs.items()}
    table = _contract_table(comps, a.coeffs, a.degree)
    out = DifferentialForm.__new__(DifferentialForm)
    object.__setattr__(out, "chart", a.chart)
    object.__setattr__(out, "degree", a.degree - 1)
    object.__setattr__(out, "coeffs", table)
    return out


def contract_covector(alpha: DifferentialForm, p: Multivector) -> Multivector:
    """Interior product of a 1-form into a multivector, i_alpha p."""
    if alpha.chart != p.chart:
        raise ChartError("chart mismatch")
    if alpha.degree != 1:
        raise ValueError("contract_covector needs a 1-form")
    if p.degree == 0:
        return Multivector(p.chart, 0)
    comps = {i: q for (i,), q in alpha.coeffs.items()}
    table = _contract_table(comps, p.coeffs, p.degree)
    out = Multivector.__new__(Multivector)
    object.__setattr__(out, "chart", p.chart)
    object.__setattr__(out, "degree", p.degree - 1)
    object.__setattr__(out, "coeffs", table)
    return out


def iterated_contract(fields: Sequence[VectorField], a: DifferentialForm,
                      m: int | None = None, r: int = 1) -> DifferentialForm:
    """The operator i_{U_m} ... i_{U_r} (U_r applied first); 1-based slice bounds."""
    if m is None:
        m = len(fields)
    if r < 1 or m > len(fields):
        raise ValueError("contraction slice out of range")
    for l in range(r, m + 1):
        a = contract(fields[l - 1], a)
    return a


def evaluate_form(a: DifferentialForm, vectors: Sequence[VectorField]) -> Polynomial:
    """Full contraction a(U_1, ..., U_k) as a Polynomial (i_{U_k}...i_{U_1} a)."""
    if len(vectors) != a.degree:
        raise ValueError("need exactly degree-many vectors")
    result = iterated_contract(list(vectors), a)
    return result.scalar()


def evaluate_multivector(p: Multivector, covectors: Sequence[DifferentialForm]) -> Polynomial:
    """Full contraction p(a_1, ..., a_k) as a Polynomial (i_{a_k}...i_{a_1} p)."""
    if len(covectors) != p.degree:
        raise ValueError("need exactly degree-many covectors")
    for alpha in covectors:
        p = contract_covector(alpha, p)
    return p.scalar()


def det_of_components(vectors: Sequence[Mapping], idx, target: Chart) -> Polynomial:
    """Determinant of the matrix vectors[s][idx[t]] of Polynomial components.

    `vectors` maps coordinate positions to components; missing entries count
    as zero.  Used to contract forms/multivectors against explicit vector or
    covector tuples.
    """
    k = len(idx)
    if k == 0:
        return Polynomial.const(target, 1)
    total = Polynomial.zero(target)
    for perm in permutations(range(k)):
        inversions = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        term = None
        for row, col in enumerate(perm):
            comp = vectors[row].get(idx[col])
            if comp is None or comp.is_zero():
                term = None
                break
            term = comp if term is None else term * comp
        if term is None:
            continue
        total = total + term if inversions % 2 == 0 else total - term
    return total


def lie_derivative(x: VectorField, a):
    """Lie derivative along a vector field.

    Forms use the Cartan magic formula L_x = i_x d + d i_x (flows would leave
    the polynomial setting); multivectors use the Schouten bracket [x, .].
    """
    if isinstance(a, DifferentialForm):
        if x.chart != a.chart:
            raise ChartError("chart mismatch")
        out = contract(x, exterior_derivative(a))
        if a.degree > 0:
            out = out + exterior_derivative(contract(x, a))
        return out
    if isinstance(a, Multivector):
        return schouten(x, a)
    raise TypeError("lie_derivative expects a DifferentialForm or Multivector")


# ---------------------------------------------------------------------------
# generic graded bracket engine
# ---------------------------------------------------------------------------

FrameBracket = Callable[[int, int], Iterable]  # (a, b) -> iterable of (c, Polynomial)
CoeffAction = Callable[[int, Polynomial], Polynomial]  # (a, f) -> derivative of f


def _wedge_left(index: int, table: dict) -> dict:
    """e_index ^ table."""
    out: dict = {}
    for key, p in table.items():
        merged = _merge_sorted((index,), key)
        if merged is None:
            continue
        k2, sign = merged
        _acc(out, k2, p if sign == 1 else -p)
    return out


def _wedge_right(table: dict, rest) -> dict:
    """table ^ e_rest."""
    out: dict = {}
    for key, p in table.items():
        merged = _merge_sorted(key, tuple(rest))
        if merged is None:
            continue
        k2, sign = merged
        _acc(out, k2, p if sign == 1 else -p)
    return out


def _wedge_act(s_tuple, f: Polynomial, act: CoeffAction) -> dict:
    """[e_S, f] = sum_j (-1)^(q-j) act(s_j, f) e_{S minus s_j}  (1-based j)."""
    q = len(s_tuple)
    out: dict = {}
    for j, s in enumerate(s_tuple, start=1):
        df = act(s, f)
        if df.is_zero():
            continue
        rest = s_tuple[:j - 1] + s_tuple[j:]
        _acc(out, rest, df if (q - j) % 2 == 0 else -df)
    return out


def _bracket_pure(t_tuple, v_table: dict, q: int, fb: FrameBracket, act: CoeffAction) -> dict:
    """[e_T, V] where V is a degree-q table with Polynomial coefficients."""
    p = len(t_tuple)
    if p == 0:
        return {}
    if p == 1:
        a = t_tuple[0]
        out: dict = {}
        for s_tuple, g in v_table.items():
            if q == 0:
                _acc(out, (), act(a, g))
                continue
            _acc(out, s_tuple, act(a, g))
            for pos, s in enumerate(s_tuple):
                for c, w in fb(a, s):
                    coeff = g * w
                    if coeff.is_zero():
                        continue
                    srt = sort_indices(s_tuple[:pos] + (c,) + s_tuple[pos + 1:])
                    if srt is None:
                        continue
                    key, sign = srt
                    _acc(out, key, coeff if sign == 1 else -coeff)
        return out
    head, rest = t_tuple[0], t_tuple[1:]
    part1 = _wedge_left(head, _bracket_pure(rest, v_table, q, fb, act))
    part2 = _wedge_right(_bracket_pure((head,), v_table, q, fb, act), rest)
    sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
    out = part1
    for key, poly in part2.items():
        _acc(out, key, poly if sign == 1 else -poly)
    return out


def graded_bracket(p_table: dict, p: int, q_table: dict, q: int,
                   fb: FrameBracket, act: CoeffAction) -> dict:
    """Bracket of two alternating tables under the graded Leibniz extension.

    Base cases are the frame bracket `fb` on single indices and the derivation
    `act` of coefficients; the result table has degree p + q - 1 (empty when
    that is negative, i.e. for two degree-0 inputs).
    """
    out: dict = {}
    sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
    for t_tuple, f in p_table.items():
        # [f e_T, Q] = f [e_T, Q] - (-1)^((p-1)(q-1)) [Q, f] ^ e_T
        for key, poly in _bracket_pure(t_tuple, q_table, q, fb, act).items():
            _acc(out, key, f * poly)
        q_on_f: dict = {}
        for s_tuple, g in q_table.items():
            for key, poly in _wedge_act(s_tuple, f, act).items():
                _acc(q_on_f, key, g * poly)
        for key, poly in _wedge_right(q_on_f, t_tuple).items():
            _acc(out, key, -poly if sign == 1 else poly)
    return out


def schouten(p: Multivector, q: Multivector) -> Multivector:
    """Schouten bracket of multivector fields on a chart.

    Extends the Jacobi-Lie bracket of vector fields and the directional
    derivative on functions; the sign convention is graded antisymmetry
    [u,v] = -(-1)^((p-1)(q-1))[v,u] with the graded Leibniz rule
    [u, v^w] = [u,v]^w + (-1)^((p-1)q) v^[u,w].
    """
    if p.chart != q.chart:
        raise ChartError("chart mismatch")
    chart = p.chart
    names = chart.names

    def fb(a: int, b: int):
        return ()

    def act(a: int, f: Polynomial) -> Polynomial:
        return f.diff(names[a])

    table = graded_bracket(p.coeffs, p.degree, q.coeffs, q.degree, fb, act)
    degree = max(p.degree + q.degree - 1, 0)
    out = Multivector.__new__(Multivector)
    object.__setattr__(out, "chart", chart)
    object.__setattr__(out, "degree", degree)
    object.__setattr__(out, "coeffs", table)
    return out
