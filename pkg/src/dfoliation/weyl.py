"""The Weyl algebra A_n over Q(i) in normally ordered form.

An operator is a dict ``{(alpha, beta): c}`` standing for
``sum c * x^alpha * d^beta`` with every ``x`` written left of every ``d``.
"""

from __future__ import annotations

from itertools import product
from math import comb, perm
from typing import Sequence

from .parsing import parse_expression
from .poly import Poly, format_terms, monomials_up_to
from .scalars import ONE, ZERO, GaussianRational


def _leibniz_coefficients(b, c):
    """Terms of ``d^b * x^c`` as ``[(k, coeff)]`` meaning ``coeff * x^(c-k) d^(b-k)``."""
    ranges = [range(min(bi, ci) + 1) for bi, ci in zip(b, c)]
    out = []
    for k in product(*ranges):
        coeff = 1
        for bi, ci, ki in zip(b, c, k):
            coeff *= comb(bi, ki) * perm(ci, ki)
        out.append((k, coeff))
    return out


_LEIBNIZ_CACHE: dict = {}


def _leibniz(b, c):
    key = (b, c)
    hit = _LEIBNIZ_CACHE.get(key)
    if hit is None:
        hit = _leibniz_coefficients(b, c)
        if len(_LEIBNIZ_CACHE) < 200_000:
            _LEIBNIZ_CACHE[key] = hit
    return hit


class WeylOp:
    """A differential operator with polynomial coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms=None):
        self.vars = tuple(variables)
        n = len(self.vars)
        clean = {}
        for (a, b), c in (terms or {}).items():
            c = GaussianRational.coerce(c)
            if c:
                a, b = tuple(a), tuple(b)
                if len(a) != n or len(b) != n:
                    raise ValueError("multi-index length does not match ambient")
                clean[(a, b)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, variables, terms):
        op = cls.__new__(cls)
        op.vars = variables
        op.terms = terms
        op._hash = None
        return op

    @classmethod
    def zero(cls, variables):
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, variables, c):
        variables = tuple(variables)
        c = GaussianRational.coerce(c)
        z = (0,) * len(variables)
        return cls._raw(variables, {(z, z): c} if c else {})

    @classmethod
    def x(cls, variables, index):
        variables = tuple(variables)
        n = len(variables)
        return cls._raw(variables, {(tuple(int(j == index) for j in range(n)), (0,) * n): ONE})

    @classmethod
    def d(cls, variables, index):
        variables = tuple(variables)
        n = len(variables)
        return cls._raw(variables, {((0,) * n, tuple(int(j == index) for j in range(n))): ONE})

    @classmethod
    def monomial(cls, variables, alpha, beta, c=ONE):
        return cls(variables, {(tuple(alpha), tuple(beta)): c})

    @classmethod
    def from_poly(cls, p: Poly) -> "WeylOp":
        z = (0,) * p.nvars
        return cls._raw(p.vars, {(m, z): c for m, c in p.terms.items()})

    @classmethod
    def from_vector_field(cls, coefficients: Sequence[Poly]) -> "WeylOp":
        """``sum_i a_i d_i`` from the list of coefficients ``a_i``."""
        variables = coefficients[0].vars
        n = len(variables)
        terms = {}
        for i, a in enumerate(coefficients):
            beta = tuple(int(j == i) for j in range(n))
            for m, c in a.terms.items():
                terms[(m, beta)] = c
        return cls._raw(variables, terms)

    # queries
    @property
    def nvars(self):
        return len(self.vars)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def order(self) -> int:
        """Largest total d-degree; -1 for zero."""
        return max((sum(b) for _, b in self.terms), default=-1)

    def bernstein_degree(self) -> int:
        """Largest total degree in x and d together; -1 for zero."""
        return max((sum(a) + sum(b) for a, b in self.terms), default=-1)

    def order_part(self, k: int) -> "WeylOp":
        return WeylOp._raw(self.vars, {t: c for t, c in self.terms.items() if sum(t[1]) == k})

    def coefficient_of_d(self, beta) -> Poly:
        """The polynomial multiplying ``d^beta``."""
        beta = tuple(beta)
        return Poly(self.vars, {a: c for (a, b), c in self.terms.items() if b == beta})

    def _check(self, other):
        if self.vars != other.vars:
            raise ValueError(f"ambient mismatch: {self.vars} vs {other.vars}")

    def _lift(self, other):
        if isinstance(other, WeylOp):
            self._check(other)
            return other
        if isinstance(other, Poly):
            return WeylOp.from_poly(other)
        return WeylOp.constant(self.vars, other)

    # arithmetic
    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for t, c in other.terms.items():
            s = terms.get(t)
            if s is None:
                terms[t] = c
            else:
                s = s + c
                if s:
                    terms[t] = s
                else:
                    del terms[t]
        return WeylOp._raw(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return WeylOp._raw(self.vars, {t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = GaussianRational.coerce(c)
        if not c:
            return WeylOp.zero(self.vars)
        return WeylOp._raw(self.vars, {t: v * c for t, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, (WeylOp, Poly)):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        other = self._lift(other)
        acc = {}
        for (a, b), c1 in self.terms.items():
            for (cc, d), c2 in other.terms.items():
                c12 = c1 * c2
                for k, coeff in _leibniz(b, cc):
                    alpha = tuple(ai + ci - ki for ai, ci, ki in zip(a, cc, k))
                    beta = tuple(bi + di - ki for bi, di, ki in zip(b, d, k))
                    key = (alpha, beta)
                    val = c12 * coeff if coeff != 1 else c12
                    s = acc.get(key)
                    acc[key] = val if s is None else s + val
        return WeylOp._raw(self.vars, {t: c for t, c in acc.items() if c})

    def __rmul__(self, other):
        if isinstance(other, Poly):
            return WeylOp.from_poly(other) * self
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a natural number")
        result = WeylOp.constant(self.vars, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, WeylOp):
            return self.vars == other.vars and self.terms == other.terms
        try:
            other = WeylOp.constant(self.vars, GaussianRational.coerce(other))
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self):
        def key(t):
            a, b = t[0]
            return (sum(a) + sum(b), sum(b), b, a)

        return sorted(self.terms.items(), key=key, reverse=True)

    def __str__(self):
        names = self.vars

        def render(t):
            a, b = t
            parts = []
            for name, e in zip(names, a):
                if e:
                    parts.append(name if e == 1 else f"{name}^{e}")
            for name, e in zip(names, b):
                if e:
                    parts.append(f"d{name}" if e == 1 else f"d{name}^{e}")
            return "*".join(parts)

        return format_terms(self.sorted_terms(), render)

    def __repr__(self):
        return f"WeylOp({str(self)!r}, vars={self.vars})"


def weyl_mul(P: WeylOp, Q: WeylOp) -> WeylOp:
    return P * Q


def weyl_commutator(P: WeylOp, Q: WeylOp) -> WeylOp:
    return P * Q - Q * P


def symbol_variables(variables: Sequence[str]) -> tuple:
    """Coordinates ``(x_1..x_n, xi_1..xi_n)`` on the cotangent bundle."""
    return tuple(variables) + tuple(f"xi_{v}" for v in variables)


def principal_symbol(P: WeylOp) -> Poly:
    """Top-order part of ``P`` with each ``d_i`` replaced by ``xi_i``."""
    if P.is_zero():
        raise ValueError("the zero operator has no principal symbol")
    k = P.order()
    terms = {a + b: c for (a, b), c in P.terms.items() if sum(b) == k}
    return Poly(symbol_variables(P.vars), terms)


def weyl_apply(P: WeylOp, f: Poly) -> Poly:
    """Act on a polynomial: ``x_i`` multiplies, ``d_i`` differentiates."""
    if P.vars != f.vars:
        raise ValueError(f"ambient mismatch: {P.vars} vs {f.vars}")
    acc = {}
    for (a, b), c in P.terms.items():
        for m, fc in f.terms.items():
            if any(mi < bi for mi, bi in zip(m, b)):
                continue
            coeff = 1
            for mi, bi in zip(m, b):
                coeff *= perm(mi, bi)
            mono = tuple(mi - bi + ai for mi, bi, ai in zip(m, b, a))
            val = c * fc * coeff
            acc[mono] = acc.get(mono, ZERO) + val
    return Poly(f.vars, acc)


def bernstein_basis(n: int, level: int) -> list:
    """All normally ordered monomials ``x^alpha d^beta`` of total degree <= ``level``.

    Returned as ``(alpha, beta)`` pairs in graded order; there are C(2n+level, 2n).
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    return [(m[:n], m[n:]) for m in monomials_up_to(2 * n, level)]


def parse_operator(text: str, variables: Sequence[str]) -> WeylOp:
    """Parse an operator; ``d<var>`` denotes the partial derivative in ``<var>``.

    Products are taken in the written order, so ``dx*x`` is ``x*dx + 1``.
    """
    variables = tuple(variables)
    table = {}
    for i, v in enumerate(variables):
        table[v] = WeylOp.x(variables, i)
    for i, v in enumerate(variables):
        name = f"d{v}"
        if name in table:
            raise ValueError(f"variable name {name!r} collides with a derivative token")
        table[name] = WeylOp.d(variables, i)
    return parse_expression(text, resolve=table.get, scalar=lambda c: WeylOp.constant(variables, c))
