"""Polynomial vector fields, the modules they generate and their rank geometry."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from . import linalg
from .groebner import ModuleBasis, PolyVector, is_unit_ideal, krull_dimension, syzygies
from .poly import Poly, parse_poly
from .weyl import WeylOp, parse_operator


class VectorFieldError(ValueError):
    """An operator that is not a vector field (order > 1 or a zeroth-order part)."""


@dataclass(frozen=True)
class VectorField:
    """``sum_i coefficients[i] * d_i``."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        if not coeffs:
            raise ValueError("a vector field needs at least one coefficient")
        if any(c.vars != coeffs[0].vars for c in coeffs):
            raise ValueError("coefficients live in different ambients")
        if len(coeffs) != coeffs[0].nvars:
            raise ValueError("one coefficient per ambient variable is required")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def vars(self):
        return self.coefficients[0].vars

    @property
    def n(self):
        return len(self.coefficients)

    def is_zero(self):
        return all(c.is_zero() for c in self.coefficients)

    def apply(self, f: Poly) -> Poly:
        out = Poly.zero(self.vars)
        for i, a in enumerate(self.coefficients):
            if a:
                out = out + a * f.diff(i)
        return out

    def to_weyl(self) -> WeylOp:
        return WeylOp.from_vector_field(self.coefficients)

    def vector(self) -> PolyVector:
        return PolyVector(self.coefficients)

    def vanishes_at(self, point) -> bool:
        return all(c.evaluate(point).is_zero() for c in self.coefficients)

    @classmethod
    def from_weyl(cls, op: WeylOp) -> "VectorField":
        if op.order() > 1:
            raise VectorFieldError(f"operator of order {op.order()} is not a vector field")
        if op.order_part(0):
            raise VectorFieldError("operator has a nonzero zeroth-order (constant) term")
        n = op.nvars
        return cls(tuple(op.coefficient_of_d(tuple(int(j == i) for j in range(n))) for i in range(n)))

    @classmethod
    def parse(cls, text: str, variables: Sequence[str]) -> "VectorField":
        return cls.from_weyl(parse_operator(text, variables))

    def __str__(self):
        return str(self.to_weyl())


@dataclass(frozen=True)
class FoliationPresentation:
    """A finite list of vector fields generating a submodule of the tangent sheaf."""

    ambient: tuple
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "ambient", tuple(self.ambient))
        object.__setattr__(self, "generators", tuple(self.generators))
        if not self.generators:
            raise ValueError("a foliation presentation needs at least one generator")
        for v in self.generators:
            if v.vars != self.ambient:
                raise ValueError("generator ambient differs from the presentation ambient")
            if v.is_zero():
                raise ValueError("zero generators are not allowed")

    @classmethod
    def parse(cls, variables: Sequence[str], fields: Sequence[str]) -> "FoliationPresentation":
        variables = tuple(variables)
        return cls(variables, tuple(VectorField.parse(f, variables) for f in fields))

    @property
    def n(self) -> int:
        return len(self.ambient)

    @property
    def r(self) -> int:
        return len(self.generators)

    def matrix(self):
        """The r x n coefficient matrix, one row per generator."""
        return [list(v.coefficients) for v in self.generators]

    def operators(self):
        return [v.to_weyl() for v in self.generators]

    def vectors(self):
        return [v.vector() for v in self.generators]

    def all_coefficients(self):
        return [c for v in self.generators for c in v.coefficients if c]

    def __str__(self):
        return "{" + ", ".join(str(v) for v in self.generators) + "}"


@dataclass(frozen=True)
class OneFormModule:
    """Covectors ``sum_i w_i dx_i``, stored as their coefficient vectors."""

    ambient: tuple
    generators: tuple

    def pair(self, k: int, v: VectorField) -> Poly:
        return self.generators[k].dot(v.vector())

    def __len__(self):
        return len(self.generators)


@dataclass(frozen=True)
class RankProfile:
    rk: int
    cork: int
    irr: int


@dataclass(frozen=True)
class Stratum:
    """``X_j = V(vanishing_ideal) minus V(nonvanishing_ideal)``."""

    j: int
    vanishing_ideal: tuple
    nonvanishing_ideal: tuple
    closure_dimension: int
    nonempty: bool


@dataclass(frozen=True)
class LieClosureReport:
    closed: bool
    failing_pair: Optional[tuple] = None
    bracket: Optional[VectorField] = None


@dataclass(frozen=True)
class IntegrabilityReport:
    """``pairings[k][i][j]`` is the exterior derivative of form k on fields i, j."""

    forms: OneFormModule
    pairings: list = field(default_factory=list)
    all_zero: bool = True


class PoissonError(ValueError):
    pass


# --- brackets and closure --------------------------------------------------

def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    if v.vars != w.vars:
        raise ValueError(f"ambient mismatch: {v.vars} vs {w.vars}")
    n = v.n
    coeffs = []
    for k in range(n):
        c = Poly.zero(v.vars)
        for i in range(n):
            if v.coefficients[i]:
                c = c + v.coefficients[i] * w.coefficients[k].diff(i)
            if w.coefficients[i]:
                c = c - w.coefficients[i] * v.coefficients[k].diff(i)
        coeffs.append(c)
    return VectorField(tuple(coeffs))


def check_lie_subalgebra(F: FoliationPresentation) -> LieClosureReport:
    """Generator-pair test: [fv, gw] = fg[v,w] + f v(g) w - g w(f) v reduces to it."""
    module = ModuleBasis(F.vectors(), F.n, F.ambient)
    for i, j in combinations(range(F.r), 2):
        b = lie_bracket(F.generators[i], F.generators[j])
        if not module.contains(b.vector()):
            return LieClosureReport(False, (i, j), b)
    return LieClosureReport(True)


# --- orthogonals ---------------------------------------------------------

def orthogonal_complement(F: FoliationPresentation) -> OneFormModule:
    """All covectors killing every generator: the kernel of the transposed matrix."""
    M = F.matrix()
    columns = [PolyVector([row[i] for row in M]) for i in range(F.n)]
    return OneFormModule(F.ambient, tuple(syzygies(columns)))


def _annihilated_fields(forms: OneFormModule, n: int, variables) -> list:
    if not forms.generators:
        return [
            PolyVector([Poly.constant(variables, int(i == k)) for i in range(n)])
            for k in range(n)
        ]
    columns = [PolyVector([w[i] for w in forms.generators]) for i in range(n)]
    return syzygies(columns)


def double_orthogonal_check(F: FoliationPresentation) -> bool:
    """Does the module of F equal the fields annihilated by its orthogonal?"""
    perp = orthogonal_complement(F)
    double = _annihilated_fields(perp, F.n, F.ambient)
    mod_F = ModuleBasis(F.vectors(), F.n, F.ambient)
    mod_double = ModuleBasis(double, F.n, F.ambient)
    return all(mod_double.contains(v) for v in F.vectors()) and all(
        mod_F.contains(v) for v in double
    )


def exterior_derivative_pairing(omega: PolyVector, v: VectorField, w: VectorField) -> Poly:
    """d(omega)(v, w) = v<omega,w> - w<omega,v> - <omega,[v,w]>."""
    return (
        v.apply(omega.dot(w.vector()))
        - w.apply(omega.dot(v.vector()))
        - omega.dot(lie_bracket(v, w).vector())
    )


def dual_integrability_check(F: FoliationPresentation, forms: Optional[OneFormModule] = None) -> IntegrabilityReport:
    if forms is None:
        forms = orthogonal_complement(F)
    gens = F.generators
    pairings = []
    all_zero = True
    for omega in forms.generators:
        table = []
        for v in gens:
            row = []
            for w in gens:
                p = exterior_derivative_pairing(omega, v, w)
                all_zero = all_zero and p.is_zero()
                row.append(p)
            table.append(row)
        pairings.append(table)
    return IntegrabilityReport(forms, pairings, all_zero)


# --- ranks, minors, strata ----------------------------------------------

def _bareiss(M):
    """Fraction-free elimination; returns (rank, sign, last pivot, echelon)."""
    M = [list(row) for row in M]
    rows = len(M)
    cols = len(M[0]) if M else 0
    if rows == 0 or cols == 0:
        return 0, 1, None, M
    variables = M[0][0].vars
    prev = Poly.constant(variables, 1)
    sign = 1
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if M[i][c]), None)
        if p is None:
            continue
        if p != r:
            M[r], M[p] = M[p], M[r]
            sign = -sign
        piv = M[r][c]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                num = piv * M[i][j] - M[i][c] * M[r][j]
                M[i][j] = num.exact_div(prev) if not prev.is_constant() else num / prev.constant_coefficient()
            M[i][c] = Poly.zero(variables)
        prev = piv
        r += 1
    return r, sign, prev, M


def generic_rank(M) -> int:
    """Rank over the field of rational functions."""
    return _bareiss(M)[0]


def determinant(M) -> Poly:
    n = len(M)
    if n == 0:
        raise ValueError("determinant of an empty matrix needs an ambient")
    rank_, sign, last, _ = _bareiss(M)
    if rank_ < n:
        return Poly.zero(M[0][0].vars)
    return last if sign == 1 else -last


def minors(M, size: int, variables) -> list:
    """Distinct nonzero ``size x size`` minors (size 0 gives the unit minor)."""
    if size == 0:
        return [Poly.constant(variables, 1)]
    rows, cols = len(M), len(M[0]) if M else 0
    out = []
    seen = set()
    for rs in combinations(range(rows), size):
        for cs in combinations(range(cols), size):
            d = determinant([[M[i][j] for j in cs] for i in rs])
            if d and d not in seen and -d not in seen:
                seen.add(d)
                out.append(d)
    return out


def rank_profile(F: FoliationPresentation) -> RankProfile:
    M = F.matrix()
    rk = generic_rank(M)
    cork = rk
    for t in range(rk):
        if not is_unit_ideal(minors(M, t + 1, F.ambient), F.ambient):
            cork = t
            break
    return RankProfile(rk, cork, rk - cork)


def _nonempty_difference(vanishing, nonvanishing, variables) -> bool:
    """Is V(vanishing) minus V(nonvanishing) nonempty?  (Rabinowitsch trick.)"""
    if vanishing and is_unit_ideal(vanishing, variables):
        return False
    t = "_t"
    while t in variables:
        t += "_"
    ext = tuple(variables) + (t,)
    tv = Poly.variable(ext, t)
    van = [p.extend(ext) for p in vanishing]
    for g in nonvanishing:
        if not is_unit_ideal(van + [Poly.constant(ext, 1) - tv * g.extend(ext)], ext):
            return True
    return False


def strata(F: FoliationPresentation, profile: Optional[RankProfile] = None) -> list:
    if profile is None:
        profile = rank_profile(F)
    M = F.matrix()
    out = []
    for j in range(profile.irr + 1):
        vanishing = minors(M, profile.rk - j + 1, F.ambient)
        nonvanishing = minors(M, profile.rk - j, F.ambient)
        dim = krull_dimension(vanishing, F.ambient) if vanishing else F.n
        nonempty = _nonempty_difference(vanishing, nonvanishing, F.ambient)
        out.append(Stratum(j, tuple(vanishing), tuple(nonvanishing), dim, nonempty))
    return out


def evaluate_fiber(F: FoliationPresentation, point) -> int:
    """Dimension of the span of the generators at a point."""
    if len(point) != F.n:
        raise ValueError(f"point has {len(point)} coordinates, ambient has {F.n}")
    rows = []
    for v in F.generators:
        row = {}
        for i, a in enumerate(v.coefficients):
            val = a.evaluate(point)
            if val:
                row[i] = val
        rows.append(row)
    return linalg.rank(rows, F.n)


# --- Poisson structures --------------------------------------------------

def hamiltonian_foliation(poisson, variables: Sequence[str]) -> FoliationPresentation:
    """Hamiltonian fields ``v_k = sum_j P[k][j] d_j`` of the coordinate functions."""
    variables = tuple(variables)
    n = len(variables)
    P = [[p if isinstance(p, Poly) else parse_poly(str(p), variables) for p in row] for row in poisson]
    if len(P) != n or any(len(row) != n for row in P):
        raise PoissonError(f"Poisson matrix must be {n} x {n}")
    for i in range(n):
        for j in range(i, n):
            if P[i][j] + P[j][i]:
                raise PoissonError(f"Poisson matrix is not antisymmetric at ({i}, {j})")

    def hamiltonian(i, f):
        out = Poly.zero(variables)
        for b in range(n):
            if P[i][b]:
                out = out + P[i][b] * f.diff(b)
        return out

    for i, j, k in combinations(range(n), 3):
        jac = hamiltonian(i, P[j][k]) + hamiltonian(j, P[k][i]) + hamiltonian(k, P[i][j])
        if jac:
            raise PoissonError(f"Jacobi identity fails on coordinates ({i}, {j}, {k})")
    gens = [VectorField(tuple(P[k])) for k in range(n)]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise PoissonError("zero Poisson structure has no Hamiltonian fields")
    return FoliationPresentation(variables, tuple(gens))

