"""Sparse multivariate polynomials over Q(i) and monomial orders."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .parsing import parse_expression
from .scalars import ONE, ZERO, GaussianRational, format_scalar

Monomial = tuple  # exponent vector, one entry per ambient variable


def monomial_degree(m: Monomial) -> int:
    return sum(m)


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    """True when ``a`` divides ``b``."""
    return all(x <= y for x, y in zip(a, b))


def monomial_quotient(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _grevlex_key(m):
    return (sum(m), tuple(-e for e in reversed(m)))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order; ``key`` maps exponent vectors to comparable tuples.

    ``kind`` is ``"lex"``, ``"grevlex"`` or ``"block"``.  The block order
    compares the first ``k`` exponents by grevlex, then the rest by grevlex,
    which makes it an elimination order for the first ``k`` variables.
    """

    kind: str = "grevlex"
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and self.k < 0:
            raise ValueError("block size must be non-negative")

    def key(self, m: Monomial):
        if self.kind == "lex":
            return m
        if self.kind == "grevlex":
            return _grevlex_key(m)
        return (_grevlex_key(m[: self.k]), _grevlex_key(m[self.k:]))

    def __str__(self):
        return f"block({self.k})" if self.kind == "block" else self.kind


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


def elimination_order(k: int) -> MonomialOrder:
    return MonomialOrder("block", k)


def compare_monomials(order: MonomialOrder, m1: Monomial, m2: Monomial) -> int:
    """Return -1, 0 or 1 as ``m1`` is smaller, equal or greater than ``m2``."""
    if len(m1) != len(m2):
        raise ValueError("monomials live in different ambients")
    k1, k2 = order.key(tuple(m1)), order.key(tuple(m2))
    return (k1 > k2) - (k1 < k2)


class AmbientMismatch(ValueError):
    pass


class Poly:
    """An immutable sparse polynomial ``{exponents: coefficient}`` in named variables."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms=None):
        self.vars = tuple(variables)
        clean = {}
        if terms:
            n = len(self.vars)
            for mono, c in terms.items():
                c = GaussianRational.coerce(c)
                if c:
                    mono = tuple(mono)
                    if len(mono) != n:
                        raise ValueError("exponent vector length does not match ambient")
                    clean[mono] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, variables, terms):
        p = cls.__new__(cls)
        p.vars = variables
        p.terms = terms
        p._hash = None
        return p

    # constructors
    @classmethod
    def zero(cls, variables):
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, variables, c):
        variables = tuple(variables)
        c = GaussianRational.coerce(c)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def variable(cls, variables, name_or_index):
        variables = tuple(variables)
        idx = variables.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        mono = tuple(1 if j == idx else 0 for j in range(len(variables)))
        return cls._raw(variables, {mono: ONE})

    @classmethod
    def monomial(cls, variables, mono, c=ONE):
        return cls(variables, {tuple(mono): c})

    # basic queries
    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_coefficient(self) -> GaussianRational:
        return self.terms.get((0,) * self.nvars, ZERO)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def coefficient(self, mono) -> GaussianRational:
        return self.terms.get(tuple(mono), ZERO)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def support(self):
        return list(self.terms)

    def leading_monomial(self, order: MonomialOrder) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=order.key)

    def leading_coefficient(self, order: MonomialOrder) -> GaussianRational:
        return self.terms[self.leading_monomial(order)]

    def sorted_terms(self, order: MonomialOrder = GREVLEX):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def _check(self, other: "Poly"):
        if self.vars != other.vars:
            raise AmbientMismatch(f"ambient mismatch: {self.vars} vs {other.vars}")

    def _lift(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.constant(self.vars, other)

    # arithmetic
    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m)
            if s is None:
                terms[m] = c
            else:
                s = s + c
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return Poly._raw(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.vars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Poly":
        c = GaussianRational.coerce(c)
        if not c:
            return Poly.zero(self.vars)
        return Poly._raw(self.vars, {m: v * c for m, v in self.terms.items()})

    def mul_term(self, mono: Monomial, c: GaussianRational) -> "Poly":
        """Multiply by the single term ``c * x^mono``."""
        if not c:
            return Poly.zero(self.vars)
        return Poly._raw(
            self.vars,
            {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in self.terms.items()},
        )

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = terms.get(m)
                terms[m] = c1 * c2 if s is None else s + c1 * c2
        return Poly._raw(self.vars, {m: c for m, c in terms.items() if c})

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a natural number")
        result = Poly.constant(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, c):
        return self.scale(GaussianRational.coerce(c).inverse())

    def diff(self, var) -> "Poly":
        """Formal partial derivative with respect to a variable index or name."""
        idx = self.vars.index(var) if isinstance(var, str) else var
        if not 0 <= idx < self.nvars:
            raise IndexError(f"variable index {idx} out of range")
        terms = {}
        for m, c in self.terms.items():
            e = m[idx]
            if e:
                terms[m[:idx] + (e - 1,) + m[idx + 1:]] = c * e
        return Poly._raw(self.vars, terms)

    def evaluate(self, point) -> GaussianRational:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, ambient has {self.nvars}")
        pt = [GaussianRational.coerce(a) for a in point]
        total = ZERO
        for m, c in self.terms.items():
            val = c
            for a, e in zip(pt, m):
                if e:
                    val = val * a ** e
            total = total + val
        return total

    def substitute(self, index: int, value) -> "Poly":
        """Set variable ``index`` to a scalar, keeping the ambient."""
        value = GaussianRational.coerce(value)
        terms = {}
        for m, c in self.terms.items():
            e = m[index]
            mono = m[:index] + (0,) + m[index + 1:]
            coeff = c * value ** e if e else c
            s = terms.get(mono)
            terms[mono] = coeff if s is None else s + coeff
        return Poly._raw(self.vars, {m: c for m, c in terms.items() if c})

    def extend(self, new_vars: Sequence[str]) -> "Poly":
        """Embed into a larger ambient that has the current variables as a prefix."""
        new_vars = tuple(new_vars)
        if new_vars[: self.nvars] != self.vars:
            raise AmbientMismatch("new ambient must start with the current variables")
        pad = (0,) * (len(new_vars) - self.nvars)
        return Poly._raw(new_vars, {m + pad: c for m, c in self.terms.items()})

    def monic(self, order: MonomialOrder) -> "Poly":
        return self.scale(self.leading_coefficient(order).inverse())

    def divmod_single(self, g: "Poly", order: MonomialOrder = GREVLEX):
        """Multivariate division by one polynomial: ``self = q*g + r``."""
        self._check(g)
        lm = g.leading_monomial(order)
        lc_inv = g.terms[lm].inverse()
        q, r = {}, {}
        p = dict(self.terms)
        while p:
            m = max(p, key=order.key)
            c = p[m]
            if monomial_divides(lm, m):
                qm = monomial_quotient(m, lm)
                qc = c * lc_inv
                q[qm] = q.get(qm, ZERO) + qc
                for gm, gc in g.terms.items():
                    t = tuple(a + b for a, b in zip(gm, qm))
                    v = p.get(t, ZERO) - qc * gc
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
            else:
                r[m] = c
                del p[m]
        return Poly(self.vars, q), Poly._raw(self.vars, r)

    def exact_div(self, g: "Poly") -> "Poly":
        q, r = self.divmod_single(g)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    # comparison / printing
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.vars == other.vars and self.terms == other.terms
        try:
            c = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * self.nvars: c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({str(self)!r}, vars={self.vars})"

    def __str__(self):
        return format_terms(self.sorted_terms(GREVLEX), lambda m: format_monomial(self.vars, m))


def format_monomial(names: Sequence[str], mono) -> str:
    parts = []
    for name, e in zip(names, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_terms(items, render_monomial) -> str:
    """Render ``[(monomial, coefficient), ...]`` in the expression grammar."""
    if not items:
        return "0"
    out = []
    for idx, (mono, c) in enumerate(items):
        body = render_monomial(mono)
        if c.im and c.re:
            coeff, negative = format_scalar(c), False
        elif c.im:
            negative = c.im < 0
            coeff = format_scalar(GaussianRational(0, abs(c.im)))
        else:
            negative = c.re < 0
            coeff = format_scalar(GaussianRational(abs(c.re)))
        if not body:
            text = coeff
        elif coeff == "1":
            text = body
        else:
            text = f"{coeff}*{body}"
        if idx == 0:
            out.append(f"-{text}" if negative else text)
        else:
            out.append(f" - {text}" if negative else f" + {text}")
    return "".join(out)


def parse_poly(text: str, variables: Sequence[str]) -> Poly:
    """Parse an expression over the declared variables."""
    variables = tuple(variables)
    cache = {v: Poly.variable(variables, v) for v in variables}
    return parse_expression(
        text,
        resolve=cache.get,
        scalar=lambda c: Poly.constant(variables, c),
    )


def polys(variables: Sequence[str], *texts: str) -> list:
    return [parse_poly(t, variables) for t in texts]


def monomials_up_to(nvars: int, degree: int) -> list:
    """All exponent vectors of total degree at most ``degree``, grevlex ascending."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            prefix.append(e)
            rec(prefix, remaining - e, slots - 1)
            prefix.pop()

    rec([], degree, nvars)
    out.sort(key=_grevlex_key)
    return out

