"""The D-module attached to a foliation and its endomorphism complex.

For commuting generators ``v_1..v_r`` the module ``M = D / D.I`` has the
Koszul resolution, so ``RHom(M, M)`` is the Koszul complex of the commuting
maps ``[P] -> [v_j P]`` on ``M``.  Everything here is computed inside finite
Bernstein-filtration pieces ``F_l`` (total degree in ``x`` and ``d``) with
exact linear algebra; the truncated dimensions are evidence, while the class
of ``1`` (degree 0) and a common zero of the coefficients (top degree) are
exact certificates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from . import linalg
from .foliation import FoliationPresentation, rank_profile
from .groebner import groebner_basis, is_unit_ideal, krull_dimension
from .poly import LEX, Poly, monomials_up_to
from .scalars import GaussianRational
from .weyl import WeylOp, principal_symbol, symbol_variables, weyl_commutator

log = logging.getLogger(__name__)


class HypothesisError(ValueError):
    """The generators do not commute or their symbols are not a regular sequence."""


@dataclass(frozen=True)
class HypothesisReport:
    pairwise_commuting: bool
    failing_pair: Optional[tuple]
    commutator: Optional[WeylOp]
    symbols: tuple
    symbols_regular_sequence: bool
    symbol_ideal_dimension: int
    # regularity in D follows from regularity of the symbols; it is not tested directly
    regular_in_d_assumed: bool

    @property
    def passed(self) -> bool:
        return self.pairwise_commuting and self.symbols_regular_sequence


@dataclass(frozen=True)
class CharVariety:
    generators: tuple
    dimension: int
    codimension: int
    rank: int

    @property
    def codimension_matches_rank(self) -> bool:
        return self.codimension == self.rank


@dataclass
class KoszulEvidence:
    """``dims[p][d]``: cohomology at position p with total-degree cap d."""

    symbols: tuple
    degree_cap: int
    dims: list
    homogeneous: bool

    def exact_below_top(self) -> bool:
        r = len(self.symbols)
        return all(all(v == 0 for v in self.dims[p]) for p in range(r))


@dataclass
class TruncatedCohomologyReport:
    levels: list
    dims: list  # dims[k][index into levels]
    window: int
    lookahead: int
    stabilized: list = field(default_factory=list)
    constant: list = field(default_factory=list)
    d_squared_zero: bool = True

    def nonzero_stable(self, k: int) -> bool:
        return self.stabilized[k] and self.dims[k][-1] > 0

    def zero_stable(self, k: int) -> bool:
        return self.stabilized[k] and self.dims[k][-1] == 0


@dataclass(frozen=True)
class Witness:
    """A common zero of every coefficient, so 1 is not in sum(v_j D + D v_j)."""

    exists: bool
    point: Optional[tuple] = None

    @property
    def rational(self) -> bool:
        return self.point is not None


@dataclass
class DIrrReport:
    d_irr_sequence: list  # [(k, evidence)]
    d_irr: int
    geometric_irr: int
    d_irr_equals_irr: bool
    cohomology: Optional[TruncatedCohomologyReport] = None
    witness: Optional[Witness] = None

    @property
    def degrees(self):
        return [k for k, _ in self.d_irr_sequence]


# --- hypotheses and the characteristic variety ------------------------------

def symbols_of(F: FoliationPresentation) -> list:
    return [principal_symbol(op) for op in F.operators()]


def check_hypotheses(F: FoliationPresentation) -> HypothesisReport:
    ops = F.operators()
    failing, comm = None, None
    for i, j in combinations(range(len(ops)), 2):
        c = weyl_commutator(ops[i], ops[j])
        if c:
            failing, comm = (i, j), c
            break
    syms = symbols_of(F)
    ambient = symbol_variables(F.ambient)
    dim = krull_dimension(syms, ambient)
    regular = dim == 2 * F.n - F.r
    return HypothesisReport(
        pairwise_commuting=failing is None,
        failing_pair=failing,
        commutator=comm,
        symbols=tuple(syms),
        symbols_regular_sequence=regular,
        symbol_ideal_dimension=dim,
        regular_in_d_assumed=regular,
    )


def _require(F: FoliationPresentation) -> HypothesisReport:
    report = check_hypotheses(F)
    if not report.pairwise_commuting:
        raise HypothesisError(
            f"generators {report.failing_pair} do not commute: commutator {report.commutator}"
        )
    if not report.symbols_regular_sequence:
        raise HypothesisError(
            f"symbols are not a regular sequence (dimension {report.symbol_ideal_dimension}, "
            f"expected {2 * F.n - F.r})"
        )
    return report


def characteristic_variety(F: FoliationPresentation) -> CharVariety:
    report = _require(F)
    dim = report.symbol_ideal_dimension
    return CharVariety(report.symbols, dim, 2 * F.n - dim, rank_profile(F).rk)


# --- Koszul complex of the symbols ------------------------------------------

def _sign(S, j) -> int:
    return -1 if sum(1 for s in S if s < j) % 2 else 1


def koszul_cohomology(symbols, degree_cap: int) -> KoszulEvidence:
    """Cohomology of the cochain Koszul complex of ``symbols`` in degree-capped pieces.

    Component ``S`` holds polynomials of degree at most ``d + sum(deg s_j, j in S)``,
    so every differential maps caps to caps.  For homogeneous symbols this is
    the exact graded cohomology summed over degrees up to ``d``.
    """
    symbols = list(symbols)
    if not symbols:
        raise ValueError("need at least one element")
    r = len(symbols)
    variables = symbols[0].vars
    nv = len(variables)
    degs = [s.total_degree() for s in symbols]
    homogeneous = all(s.is_homogeneous() for s in symbols)
    top = degree_cap + sum(degs)
    monos = monomials_up_to(nv, top)
    index = {m: i for i, m in enumerate(monos)}
    size_at = {}
    for i, m in enumerate(monos):
        size_at[sum(m)] = i + 1

    def size(deg):
        return size_at.get(min(deg, top), 0) if deg >= 0 else 0

    subsets = [list(combinations(range(r), p)) for p in range(r + 1)]

    def layout(p, d):
        offs, total = {}, 0
        for S in subsets[p]:
            offs[S] = total
            total += size(d + sum(degs[j] for j in S))
        return offs, total

    def differential(p, d):
        """Rows: images of the basis of component p (at cap d) in component p+1."""
        src, _ = layout(p, d)
        dst, ncols = layout(p + 1, d)
        rows = []
        for S in subsets[p]:
            n_src = size(d + sum(degs[j] for j in S))
            for mi in range(n_src):
                m = monos[mi]
                row = {}
                for j in range(r):
                    if j in S:
                        continue
                    T = tuple(sorted(S + (j,)))
                    sgn = _sign(S, j)
                    for sm, c in symbols[j].terms.items():
                        col = dst[T] + index[tuple(a + b for a, b in zip(m, sm))]
                        row[col] = row.get(col, GaussianRational(0)) + (c if sgn > 0 else -c)
                rows.append({k: v for k, v in row.items() if v})
        return rows, ncols

    dims = [[0] * (degree_cap + 1) for _ in range(r + 1)]
    for d in range(degree_cap + 1):
        ranks = {}
        for p in range(r):
            rows, ncols = differential(p, d)
            ranks[p] = linalg.rank(rows, ncols)
        for p in range(r + 1):
            _, n_p = layout(p, d)
            rank_out = ranks.get(p, 0)
            rank_in = ranks.get(p - 1, 0)
            dims[p][d] = n_p - rank_out - rank_in
    return KoszulEvidence(tuple(symbols), degree_cap, dims, homogeneous)


def koszul_graded_exactness(F: FoliationPresentation, degree_cap: int = 4) -> KoszulEvidence:
    report = _require(F)
    return koszul_cohomology(report.symbols, degree_cap)


# --- truncated endomorphism complex -----------------------------------------

class _FilteredPieces:
    """Bernstein pieces and the products needed to realise the Koszul complex."""

    def __init__(self, ops):
        self.ops = ops
        self.n = ops[0].nvars
        self.vars = ops[0].vars
        self.b = [op.bernstein_degree() for op in ops]
        self.monos = []
        self.index = {}
        self.sizes = []
        self._left = [dict() for _ in ops]
        self._right = [dict() for _ in ops]

    def ensure(self, level):
        if level < len(self.sizes):
            return
        self.monos = monomials_up_to(2 * self.n, level)
        self.index = {m: i for i, m in enumerate(self.monos)}
        self.sizes = [0] * (level + 1)
        for i, m in enumerate(self.monos):
            self.sizes[sum(m)] = i + 1
        for lvl in range(1, level + 1):
            self.sizes[lvl] = max(self.sizes[lvl], self.sizes[lvl - 1])

    def size(self, level):
        if level < 0:
            return 0
        self.ensure(level)
        return self.sizes[level]

    def op_of(self, i):
        m = self.monos[i]
        return WeylOp._raw(self.vars, {(m[: self.n], m[self.n:]): GaussianRational(1)})

    def _row(self, op):
        need = op.bernstein_degree()
        self.ensure(need)
        return {self.index[a + b]: c for (a, b), c in op.terms.items()}

    def left(self, j, i):
        """Coordinates of ``v_j * mono_i``."""
        hit = self._left[j].get(i)
        if hit is None:
            hit = self._row(self.ops[j] * self.op_of(i))
            self._left[j][i] = hit
        return hit

    def right(self, j, i):
        """Coordinates of ``mono_i * v_j``."""
        hit = self._right[j].get(i)
        if hit is None:
            hit = self._row(self.op_of(i) * self.ops[j])
            self._right[j][i] = hit
        return hit


class _LevelComplex:
    """The complex at ambient level L with blocks ``S -> F_{L + b(S)}``."""

    def __init__(self, pieces: _FilteredPieces, L: int):
        self.P = pieces
        self.L = L
        r = len(pieces.ops)
        self.r = r
        self.subsets = [list(combinations(range(r), p)) for p in range(r + 1)]
        self.offsets = []
        self.totals = []
        for p in range(r + 1):
            offs, total = {}, 0
            for S in self.subsets[p]:
                offs[S] = total
                total += pieces.size(L + self.shift(S))
            self.offsets.append(offs)
            self.totals.append(total)

    def shift(self, S):
        return sum(self.P.b[j] for j in S)

    def block_size(self, S, level=None):
        base = self.L if level is None else level
        return self.P.size(base + self.shift(S))

    def ideal_rows(self, p):
        """Spanning rows of the truncated left ideal in every block of position p."""
        rows = []
        for S in self.subsets[p]:
            off = self.offsets[p][S]
            top = self.L + self.shift(S)
            for i, bi in enumerate(self.P.b):
                for mi in range(self.P.size(top - bi)):
                    rows.append({off + c: v for c, v in self.P.right(i, mi).items()})
        return rows

    def low_columns(self, p, m):
        """Column indices of the level-m sub-blocks at position p."""
        cols = []
        for S in self.subsets[p]:
            off = self.offsets[p][S]
            cols.extend(range(off, off + self.block_size(S, m)))
        return cols

    def differential_rows(self, p, m=None):
        """Images of basis vectors of position p (restricted to level m if given)."""
        rows = []
        for S in self.subsets[p]:
            count = self.block_size(S, m)
            for mi in range(count):
                row = {}
                for j in range(self.r):
                    if j in S:
                        continue
                    T = tuple(sorted(S + (j,)))
                    off = self.offsets[p + 1][T]
                    neg = _sign(S, j) < 0
                    for c, v in self.P.left(j, mi).items():
                        key = off + c
                        row[key] = row.get(key, GaussianRational(0)) + (-v if neg else v)
                rows.append({k: v for k, v in row.items() if v})
        return rows


def _drop_columns(rows, columns):
    cols = set(columns)
    return [{c: v for c, v in row.items() if c not in cols} for row in rows]


def _d_squared_zero(cx: _LevelComplex) -> bool:
    for p in range(cx.r - 1):
        first = cx.differential_rows(p)
        second = cx.differential_rows(p + 1)
        if any(linalg.matmul_sparse(first, second)):
            return False
    return True


def _dims_at_level(pieces, m, lookahead):
    """Truncated cohomology dimensions at every position for filtration level m."""
    cx = _LevelComplex(pieces, m + lookahead)
    r = cx.r
    ideal = [cx.ideal_rows(p) for p in range(r + 1)]
    rank_ideal = [linalg.rank(ideal[p], cx.totals[p]) for p in range(r + 1)]
    dims = []
    for p in range(r + 1):
        ncols = cx.totals[p]
        low = cx.low_columns(p, m)
        rank_low_ideal = len(low) + linalg.rank(_drop_columns(ideal[p], low), ncols)
        dim_v = rank_low_ideal - rank_ideal[p]
        if p < r:
            image_low = cx.differential_rows(p, m)
            rank_dv = linalg.rank(image_low + ideal[p + 1], cx.totals[p + 1]) - rank_ideal[p + 1]
        else:
            rank_dv = 0
        dim_z = dim_v - rank_dv
        if p > 0:
            boundary = cx.differential_rows(p - 1) + ideal[p]
            rank_bj = linalg.rank(boundary, ncols)
            rank_all = len(low) + linalg.rank(_drop_columns(boundary, low), ncols)
            dim_b = rank_low_ideal + rank_bj - rank_all - rank_ideal[p]
        else:
            dim_b = 0
        dims.append(dim_z - dim_b)
    return dims, cx


def truncated_endo_cohomology(
    F: FoliationPresentation,
    m_max: int = 6,
    window: int = 3,
    lookahead: Optional[int] = None,
    check_d_squared: bool = True,
) -> TruncatedCohomologyReport:
    """Filtration-truncated dimensions of ``H^k RHom(M, M)`` for levels ``0..m_max``.

    ``lookahead`` extra levels are used when deciding whether a level-m class
    is a coboundary or a cocycle; the default is ``2 * max b_j``.
    """
    _require(F)
    ops = F.operators()
    b_max = max(op.bernstein_degree() for op in ops)
    if m_max < b_max:
        raise ValueError(f"m_max={m_max} is below the largest generator degree {b_max}")
    if lookahead is None:
        lookahead = 2 * b_max
    pieces = _FilteredPieces(ops)
    levels = list(range(m_max + 1))
    table = [[] for _ in range(F.r + 1)]
    d2 = True
    for m in levels:
        dims, cx = _dims_at_level(pieces, m, lookahead)
        for k, v in enumerate(dims):
            table[k].append(v)
        if check_d_squared:
            d2 = d2 and _d_squared_zero(cx)
        log.debug("level %d: %s", m, dims)
    stabilized, constant = [], []
    for row in table:
        tail = row[-window:]
        enough = len(row) >= window
        stabilized.append(enough and len({v > 0 for v in tail}) == 1)
        constant.append(enough and len(set(tail)) == 1)
    return TruncatedCohomologyReport(levels, table, window, lookahead, stabilized, constant, d2)


@dataclass
class IdealizerPiece:
    """Representatives of the level-m part of the endomorphism ring ``H^0``."""

    level: int
    representatives: list
    _reducer: object = field(repr=False, default=None)

    def __len__(self):
        return len(self.representatives)

    def contains(self, P: WeylOp) -> bool:
        return self._reducer(P)


def _reducer_from_rows(rows, ncols, order):
    """Normal form modulo ``span(rows)`` with pivots on the columns earliest in ``order``."""
    pos = {c: k for k, c in enumerate(order)}
    permuted = [{pos[c]: v for c, v in row.items()} for row in rows]
    reduced, pivots = linalg.rref(permuted, ncols)
    back = [{order[c]: v for c, v in row.items()} for row in reduced]
    piv = [order[p] for p in pivots]

    def nf(vec):
        out = dict(vec)
        for row, p in zip(back, piv):
            f = out.get(p)
            if f:
                for c, v in row.items():
                    nv = out.get(c, GaussianRational(0)) - f * v
                    if nv:
                        out[c] = nv
                    else:
                        out.pop(c, None)
        return out

    return nf


def idealizer_truncated(F: FoliationPresentation, m: int, lookahead: Optional[int] = None) -> IdealizerPiece:
    """Classes ``[P]``, ``P`` in ``F_m``, with every ``v_j P`` in the truncated left ideal."""
    _require(F)
    ops = F.operators()
    if lookahead is None:
        lookahead = 2 * max(op.bernstein_degree() for op in ops)
    pieces = _FilteredPieces(ops)
    cx = _LevelComplex(pieces, m + lookahead)
    n0 = cx.totals[0]
    n1 = cx.totals[1]
    # pivots on high monomials, so normal forms keep low-degree representatives
    nf1 = _reducer_from_rows(cx.ideal_rows(1), n1, list(range(n1 - 1, -1, -1)))
    nf0 = _reducer_from_rows(cx.ideal_rows(0), n0, list(range(n0 - 1, -1, -1)))
    low = cx.low_columns(0, m)
    images = [nf1(row) for row in cx.differential_rows(0, m)]
    # kernel of the reduced differential on the level-m coordinates
    eq_rows = {}
    for i, img in enumerate(images):
        for c, v in img.items():
            eq_rows.setdefault(c, {})[i] = v
    kernel = linalg.nullspace(list(eq_rows.values()), len(low))
    classes = [nf0({low[i]: v for i, v in vec.items()}) for vec in kernel]
    order = list(range(n0 - 1, -1, -1))
    pos = {c: k for k, c in enumerate(order)}
    reduced, _ = linalg.rref([{pos[c]: v for c, v in cl.items()} for cl in classes if cl], n0)
    reps_vecs = [{order[c]: v for c, v in row.items()} for row in reduced]
    reps_vecs.sort(key=lambda vec: max(vec))
    reps = [_vector_to_op(pieces, vec) for vec in reps_vecs]

    def contains(P: WeylOp) -> bool:
        if P.bernstein_degree() > m + lookahead:
            return False
        vec = nf0(pieces._row(P))
        if not vec:
            return True
        return linalg.in_span(vec, reps_vecs, n0)

    return IdealizerPiece(m, reps, contains)


def _vector_to_op(pieces, vec) -> WeylOp:
    n = pieces.n
    terms = {}
    for c, v in vec.items():
        mono = pieces.monos[c]
        terms[(mono[:n], mono[n:])] = v
    return WeylOp(pieces.vars, terms)


# --- exact certificates -----------------------------------------------------

def _gaussian_roots(p: Poly, index: int):
    """Roots in Q(i) of a polynomial that only involves variable ``index``."""
    import sympy

    t = sympy.Symbol("t")
    expr = 0
    for m, c in p.terms.items():
        coeff = sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
            c.im.numerator, c.im.denominator
        )
        expr += coeff * t ** m[index]
    roots = []
    for factor, _ in sympy.factor_list(expr, t, gaussian=True)[1]:
        fp = sympy.Poly(factor, t)
        if fp.degree() == 1:
            a, b = fp.all_coeffs()
            root = sympy.nsimplify(-b / a)
            re, im = sympy.re(root), sympy.im(root)
            roots.append(GaussianRational(
                _to_fraction(re), _to_fraction(im)
            ))
    roots.sort(key=lambda z: (abs(z.re) + abs(z.im), z.re, z.im))
    return roots


def _to_fraction(q):
    from fractions import Fraction

    q = q if hasattr(q, "p") else __import__("sympy").Rational(q)
    return Fraction(int(q.p), int(q.q))


_FREE_CANDIDATES = [0, 1, -1, 2, -2, 3, -3]


def rational_point(gens, variables, depth: int = 0) -> Optional[list]:
    """A point of V(gens) with coordinates in Q(i), or None if the search fails."""
    variables = tuple(variables)
    n = len(variables)
    gens = [g for g in gens if g]
    if is_unit_ideal(gens, variables):
        return None
    if not gens:
        return [GaussianRational(0)] * n
    return _solve(gens, variables, n - 1, {})


def _solve(gens, variables, idx, fixed):
    if idx < 0:
        return [fixed[i] for i in range(len(variables))]
    gb = groebner_basis(gens, LEX, variables)
    if gb.is_unit():
        return None
    univariate = [
        g for g in gb.basis
        if all(all(e == 0 for k, e in enumerate(m) if k != idx) for m in g.terms) and not g.is_constant()
    ]
    if univariate:
        candidates = _gaussian_roots(univariate[-1], idx)
    else:
        candidates = [GaussianRational(c) for c in _FREE_CANDIDATES]
    for value in candidates:
        sub = [g.substitute(idx, value) for g in gb.basis]
        sub = [g for g in sub if g]
        if sub and is_unit_ideal(sub, variables):
            continue
        point = _solve(sub, variables, idx - 1, {**fixed, idx: value}) if sub else _fill(variables, idx - 1, {**fixed, idx: value})
        if point is not None:
            return point
    return None


def _fill(variables, idx, fixed):
    out = dict(fixed)
    for i in range(idx + 1):
        out[i] = GaussianRational(0)
    return [out[i] for i in range(len(variables))]


def top_cohomology_witness(F: FoliationPresentation) -> Witness:
    """A common zero of all generators certifies the top cohomology is nonzero."""
    coeffs = F.all_coefficients()
    if is_unit_ideal(coeffs, F.ambient):
        return Witness(False)
    point = rational_point(coeffs, F.ambient)
    return Witness(True, tuple(point) if point is not None else None)


# --- the D-irregularity ----------------------------------------------------

def d_irregularity(
    F: FoliationPresentation,
    m_max: int = 6,
    window: int = 3,
    lookahead: Optional[int] = None,
    cohomology: Optional[TruncatedCohomologyReport] = None,
) -> DIrrReport:
    _require(F)
    if cohomology is None:
        cohomology = truncated_endo_cohomology(F, m_max, window, lookahead)
    witness = top_cohomology_witness(F)
    r = F.r
    sequence = []
    for k in range(r + 1):
        if k == 0:
            # generators kill constants, so 1 is never in D.I
            sequence.append((0, "identity class"))
        elif k == r and witness.exists:
            sequence.append((k, "common zero of the generators"))
        elif cohomology.nonzero_stable(k):
            sequence.append((k, "stabilized nonzero truncation"))
    d_irr = max(k for k, _ in sequence)
    geometric = rank_profile(F).irr
    return DIrrReport(sequence, d_irr, geometric, d_irr == geometric, cohomology, witness)


# --- first integrals -------------------------------------------------------

def first_integrals(F: FoliationPresentation, max_degree: int = 3) -> list:
    """Basis of the polynomials of degree <= max_degree killed by every generator."""
    n = F.n
    monos = monomials_up_to(n, max_degree)
    equations = {}
    for col, m in enumerate(monos):
        f = Poly.monomial(F.ambient, m)
        for j, v in enumerate(F.generators):
            for om, c in v.apply(f).terms.items():
                equations.setdefault((j, om), {})[col] = c
    kernel = linalg.nullspace(list(equations.values()), len(monos))
    out = [Poly(F.ambient, {monos[c]: v for c, v in vec.items()}) for vec in kernel]
    out.sort(key=lambda p: (p.total_degree(), [(-sum(m),) + tuple(-e for e in m) for m in p.terms]))
    return out
