"""Buchberger's algorithm over Q(i) for ideals and free-module submodules.

Ideals and submodules share one engine.  A module element is a dict keyed by
``(position, exponents)``; ideals use position 0 only.  Modules are ordered
position-over-term with lower positions dominating.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .poly import GREVLEX, MonomialOrder, Poly, monomial_divides
from .scalars import ONE, ZERO


class PolyVector(tuple):
    """A fixed-length vector of polynomials over one ambient."""

    def __new__(cls, entries):
        entries = tuple(entries)
        if not entries:
            raise ValueError("PolyVector needs at least one entry")
        vars_ = entries[0].vars
        if any(e.vars != vars_ for e in entries):
            raise ValueError("PolyVector entries must share an ambient")
        return super().__new__(cls, entries)

    @property
    def vars(self):
        return self[0].vars

    @property
    def rank(self):
        return len(self)

    def is_zero(self):
        return all(e.is_zero() for e in self)

    def __add__(self, other):
        return PolyVector(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return PolyVector(a - b for a, b in zip(self, other))

    def __neg__(self):
        return PolyVector(-a for a in self)

    def scale(self, p):
        return PolyVector(p * a for a in self)

    def dot(self, other):
        total = Poly.zero(self.vars)
        for a, b in zip(self, other):
            total = total + a * b
        return total

    def __str__(self):
        return "(" + ", ".join(str(e) for e in self) + ")"

    def __repr__(self):
        return f"PolyVector{str(self)}"


# --- internal dict-vector engine -------------------------------------------

def _key(order):
    okey = order.key
    return lambda t: (-t[0], okey(t[1]))


def _lead(vec, key):
    return max(vec, key=key)


def _vec_from_polys(entries, offset=0):
    out = {}
    for pos, p in enumerate(entries):
        for m, c in p.terms.items():
            out[(pos + offset, m)] = c
    return out


def _vec_to_polys(vec, variables, size, offset=0):
    buckets = [dict() for _ in range(size)]
    for (pos, m), c in vec.items():
        buckets[pos - offset][m] = c
    return [Poly(variables, b) for b in buckets]


def _axpy(target, c, shift, src):
    """target -= c * x^shift * src, in place."""
    for (pos, m), v in src.items():
        t = (pos, tuple(a + b for a, b in zip(m, shift)))
        nv = target.get(t, ZERO) - c * v
        if nv:
            target[t] = nv
        else:
            target.pop(t, None)


def _reduce(vec, basis, leads, key, full=True):
    """Normal form of ``vec`` against ``basis`` (monic elements with leads)."""
    vec = dict(vec)
    rem = {}
    while vec:
        t = _lead(vec, key)
        c = vec[t]
        pos, m = t
        for b, (bpos, bm) in zip(basis, leads):
            if bpos == pos and monomial_divides(bm, m):
                shift = tuple(x - y for x, y in zip(m, bm))
                _axpy(vec, c, shift, b)
                break
        else:
            if not full:
                rem.update(vec)
                return rem
            rem[t] = c
            del vec[t]
    return rem


def _monic(vec, key):
    lc = vec[_lead(vec, key)]
    if lc == ONE:
        return vec
    inv = lc.inverse()
    return {t: c * inv for t, c in vec.items()}


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _buchberger(vectors, order, is_ideal):
    key = _key(order)
    okey = order.key
    basis, leads = [], []
    pairs = []

    def add(h):
        hpos, hm = _lead(h, key)
        idx = len(basis)
        basis.append(h)
        leads.append((hpos, hm))
        # Gebauer-Moeller update
        cands = []
        for g in alive:
            gpos, gm = leads[g]
            if gpos != hpos:
                continue
            cands.append((g, _lcm(gm, hm), not any(x and y for x, y in zip(gm, hm))))
        kept = []
        for i, (g, l, coprime) in enumerate(cands):
            if is_ideal and coprime:
                kept.append((g, l, coprime))
                continue
            dominated = False
            for j, (g2, l2, cp2) in enumerate(cands):
                if j == i:
                    continue
                if monomial_divides(l2, l) and (l2 != l or j < i):
                    dominated = True
                    break
            if not dominated:
                kept.append((g, l, coprime))
        survivors = []
        for (a, b, l) in pairs:
            apos, am = leads[a]
            if apos == hpos and monomial_divides(hm, l) and _lcm(am, hm) != l and _lcm(leads[b][1], hm) != l:
                continue
            survivors.append((a, b, l))
        pairs[:] = survivors
        for g, l, coprime in kept:
            if is_ideal and coprime:
                continue
            pairs.append((g, idx, l))
        for g in list(alive):
            if leads[g][0] == hpos and monomial_divides(hm, leads[g][1]):
                alive.remove(g)
        alive.append(idx)

    alive = []
    for v in vectors:
        if not v:
            continue
        active = [basis[g] for g in alive]
        active_leads = [leads[g] for g in alive]
        r = _reduce(v, active, active_leads, key)
        if r:
            add(_monic(r, key))
    while pairs:
        pairs.sort(key=lambda p: okey(p[2]))
        a, b, l = pairs.pop(0)
        fa, fb = basis[a], basis[b]
        (_, ma), (_, mb) = leads[a], leads[b]
        s = {}
        sa = tuple(x - y for x, y in zip(l, ma))
        sb = tuple(x - y for x, y in zip(l, mb))
        for (pos, m), c in fa.items():
            s[(pos, tuple(x + y for x, y in zip(m, sa)))] = c
        _axpy(s, ONE, sb, fb)
        if not s:
            continue
        active = [basis[g] for g in alive]
        active_leads = [leads[g] for g in alive]
        r = _reduce(s, active, active_leads, key)
        if r:
            add(_monic(r, key))

    # interreduce to the reduced basis
    final = [basis[g] for g in alive]
    final.sort(key=lambda v: key(_lead(v, key)))
    reduced = []
    for idx, f in enumerate(final):
        others = final[:idx] + final[idx + 1:]
        r = _reduce(f, others, [_lead(o, key) for o in others], key)
        if r:
            reduced.append(_monic(r, key))
    reduced.sort(key=lambda v: key(_lead(v, key)), reverse=True)
    return reduced


# --- ideals ------------------------------------------------------------------

@dataclass(frozen=True)
class ReducedGB:
    basis: tuple
    order: MonomialOrder
    ambient: tuple

    def leading_monomials(self):
        return [g.leading_monomial(self.order) for g in self.basis]

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def is_zero(self) -> bool:
        return not self.basis

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)


def _ambient_of(gens, ambient):
    if ambient is not None:
        return tuple(ambient)
    if not gens:
        raise ValueError("empty generator list needs an explicit ambient")
    return gens[0].vars


def groebner_basis(gens: Sequence[Poly], order: MonomialOrder = GREVLEX, ambient=None) -> ReducedGB:
    """Reduced Gröbner basis of the ideal generated by ``gens``."""
    gens = list(gens)
    ambient = _ambient_of(gens, ambient)
    for g in gens:
        if g.vars != ambient:
            raise ValueError("generators live in different ambients")
    vecs = [_vec_from_polys([g]) for g in gens if g]
    # normal strategy prefers small inputs first
    vecs.sort(key=lambda v: _key(order)(_lead(v, _key(order))))
    raw = _buchberger(vecs, order, is_ideal=True)
    basis = tuple(_vec_to_polys(v, ambient, 1)[0] for v in raw)
    return ReducedGB(basis, order, ambient)


def normal_form(p: Poly, gb: ReducedGB) -> Poly:
    if p.vars != gb.ambient:
        raise ValueError("polynomial and basis live in different ambients")
    key = _key(gb.order)
    vecs = [_vec_from_polys([g]) for g in gb.basis]
    r = _reduce(_vec_from_polys([p]), vecs, [_lead(v, key) for v in vecs], key)
    return _vec_to_polys(r, p.vars, 1)[0]


def ideal_membership(p: Poly, gens: Sequence[Poly]) -> bool:
    if p.is_zero():
        return True
    return normal_form(p, groebner_basis(gens, ambient=p.vars)).is_zero()


def is_unit_ideal(gens: Sequence[Poly], ambient=None) -> bool:
    """Nullstellensatz test: the variety of ``gens`` over C is empty."""
    if not any(g for g in gens):
        return False
    return groebner_basis(gens, ambient=ambient).is_unit()


def monomial_ideal_dimension(leads: Sequence[tuple], nvars: int) -> int:
    """Largest set of variables containing the support of no given monomial."""
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in leads]
    if any(not s for s in supports):
        return -1
    for size in range(nvars, -1, -1):
        for subset in combinations(range(nvars), size):
            sset = set(subset)
            if not any(s <= sset for s in supports):
                return size
    return -1  # unreachable: the empty set always qualifies


def krull_dimension(gens: Sequence[Poly], ambient=None) -> int:
    """Dimension of the affine variety; -1 for the unit ideal."""
    gb = groebner_basis(gens, GREVLEX, ambient)
    return monomial_ideal_dimension(gb.leading_monomials(), len(gb.ambient))


# --- modules -----------------------------------------------------------------

def _module_gb(vectors: Sequence[PolyVector], order: MonomialOrder):
    raw = [_vec_from_polys(v) for v in vectors]
    return _buchberger([r for r in raw if r], order, is_ideal=False)


def syzygies(vectors: Sequence[PolyVector], order: MonomialOrder = GREVLEX) -> list:
    """Generators of ``{a : sum_j a_j * vectors_j = 0}``."""
    vectors = list(vectors)
    if not vectors:
        return []
    variables = vectors[0].vars
    s, k = len(vectors[0]), len(vectors)
    one = Poly.constant(variables, 1)
    zero = Poly.zero(variables)
    rows = []
    for j, v in enumerate(vectors):
        if len(v) != s:
            raise ValueError("vectors have different ranks")
        rows.append(_vec_from_polys(list(v) + [one if t == j else zero for t in range(k)]))
    gb = _buchberger([r for r in rows if r], order, is_ideal=False)
    out = []
    for g in gb:
        if all(pos >= s for pos, _ in g):
            out.append(PolyVector(_vec_to_polys(g, variables, k, offset=s)))
    return out


def syzygy_module(gens: Sequence[Poly]) -> list:
    """Syzygies of a list of polynomials, as vectors of length ``len(gens)``."""
    return syzygies([PolyVector([g]) for g in gens])


class ModuleBasis:
    """Gröbner basis of a submodule of R^s, for membership tests."""

    def __init__(self, gens: Sequence[PolyVector], rank: int, variables, order: MonomialOrder = GREVLEX):
        self.rank = rank
        self.vars = tuple(variables)
        self.order = order
        for g in gens:
            if len(g) != rank:
                raise ValueError(f"generator of rank {len(g)} in a rank-{rank} module")
        self._key = _key(order)
        self.basis = _module_gb(gens, order)
        self._leads = [_lead(b, self._key) for b in self.basis]

    def reduce(self, v: PolyVector) -> PolyVector:
        if len(v) != self.rank:
            raise ValueError(f"vector of rank {len(v)} in a rank-{self.rank} module")
        r = _reduce(_vec_from_polys(v), self.basis, self._leads, self._key)
        return PolyVector(_vec_to_polys(r, self.vars, self.rank))

    def contains(self, v: PolyVector) -> bool:
        return self.reduce(v).is_zero()

    def generators(self) -> list:
        return [PolyVector(_vec_to_polys(b, self.vars, self.rank)) for b in self.basis]


def module_membership(v: PolyVector, gens: Sequence[PolyVector]) -> bool:
    if v.is_zero():
        return True
    return ModuleBasis(gens, len(v), v.vars).contains(v)
