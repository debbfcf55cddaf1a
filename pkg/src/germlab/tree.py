"""The Bruhat-Tits tree of SL2(Q_p) and its Moy-Prasad lattices.

A vertex is a homothety class of O-lattices in F^2.  Canonical coordinates:
(m, x) with x in F/p^m O labels the class of  O(e1 + x e2) + O(p^m e2),
with basis matrix  g_v = ((1, 0), (x, p^m)).  The base vertex is (0, 0).
The level-n lattice at v is  g_{v,n} = Ad(g_v)(p^n sl2(O)), realized by the
contains test  Ad(g_v^{-1}) X  in  p^n sl2(O).

These lattices drive three oracles: depth via fixed lattices, membership
tests for coset functions, and fixed-point counts that cross-check the
orbital-integral engine for lattice indicators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import BallTooSmall, InsufficientPrecision, NotRegular
from .padic import (INF, FieldConfig, PadicScalar, mod_pk, rational_sqrt,
                    val_p)
from .sl2 import GroupElement, Sl2Element, classify


@dataclass(frozen=True)
class TreeVertex:
    m: int
    x: Fraction

    def __repr__(self):
        return f"({self.m},{self.x})"


def make_vertex(cfg: FieldConfig, m: int, x) -> TreeVertex:
    """Canonicalize the coordinate x modulo p^m O."""
    return TreeVertex(m, mod_pk(Fraction(x), cfg.p, m))


BASE = TreeVertex(0, Fraction(0))


def basis_matrix(cfg: FieldConfig, v: TreeVertex) -> Tuple[Tuple[Fraction, ...], ...]:
    p = Fraction(cfg.p)
    return ((Fraction(1), Fraction(0)), (v.x, p**v.m))


def neighbors(cfg: FieldConfig, v: TreeVertex) -> List[TreeVertex]:
    """The q+1 adjacent vertices."""
    out = [make_vertex(cfg, v.m - 1, v.x)]
    step = Fraction(cfg.p) ** v.m
    for c in range(cfg.p):
        out.append(make_vertex(cfg, v.m + 1, v.x + c * step))
    return out


def ball(cfg: FieldConfig, v0: TreeVertex, R: int) -> List[TreeVertex]:
    """All vertices at distance <= R from v0, in a deterministic order."""
    if R < 0:
        raise ValueError("R must be nonnegative")
    seen = {v0}
    frontier = [v0]
    for _ in range(R):
        nxt = []
        for v in frontier:
            for w in neighbors(cfg, v):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return sorted(seen, key=lambda v: (v.m, v.x))


def distance(cfg: FieldConfig, v: TreeVertex, w: TreeVertex) -> int:
    """Tree distance via elementary divisors of g_v^{-1} g_w."""
    p = cfg.p
    # g_v^{-1} g_w = ((1, 0), ((x_w - x_v)/p^{m_v}, p^{m_w - m_v}))
    dm = w.m - v.m
    dx = w.x - v.x
    mins = min(0, dm, (val_p(dx, p) - v.m) if dx != 0 else INF)
    return int(dm - 2 * mins)


@dataclass(frozen=True)
class LatticeDescriptor:
    """g_{v,n} = Ad(g_v)(p^n sl2(O)) for a vertex v and level n."""

    cfg: FieldConfig
    vertex: TreeVertex
    level: int

    def _conjugated_entries(self, X: Sl2Element):
        """Entries of Ad(g_v^{-1}) X as PadicScalars."""
        cfg = self.cfg
        v = self.vertex
        x = PadicScalar.exact(cfg, v.x)
        pm = PadicScalar.exact(cfg, Fraction(cfg.p) ** v.m)
        # g = ((1,0),(x,pm)), g^{-1} = ((1,0),(-x/pm, 1/pm))
        a, b, c = X.a, X.b, X.c
        # M = g^{-1} X g
        a2 = a + b * x
        b2 = b * pm
        c2 = (c - x * a - x * a2) / pm
        return a2, b2, c2

    def min_level(self, X: Sl2Element):
        """Largest n with X in g_{v,n}; INF for X = 0."""
        a2, b2, c2 = self._conjugated_entries(X)
        return min(a2.valuation(), b2.valuation(), c2.valuation())

    def contains(self, X: Sl2Element) -> bool:
        return self.min_level(X) >= self.level

    def scaled(self, dlevel: int) -> "LatticeDescriptor":
        return LatticeDescriptor(self.cfg, self.vertex, self.level + dlevel)

    def __repr__(self):
        return f"g_[{self.vertex!r},{self.level}]"


def mp_lattice(cfg: FieldConfig, v: TreeVertex, n: int) -> LatticeDescriptor:
    return LatticeDescriptor(cfg, v, n)


def act(cfg: FieldConfig, g: GroupElement, v: TreeVertex) -> TreeVertex:
    """Canonical coordinates of g . v (class of g applied to the lattice)."""
    if not g.is_exact:
        raise InsufficientPrecision("tree action needs exact group entries")
    (g11, g12), (g21, g22) = g.exact_entries()
    (b11, b12), (b21, b22) = basis_matrix(cfg, v)
    # columns of M = g * g_v generate the image lattice
    c1 = (g11 * b11 + g12 * b21, g21 * b11 + g22 * b21)
    c2 = (g11 * b12 + g12 * b22, g21 * b12 + g22 * b22)
    p = cfg.p
    v1 = val_p(c1[0], p)
    v2 = val_p(c2[0], p)
    if v2 < v1:
        c1, c2 = c2, c1
        v1, v2 = v2, v1
    # clear the top entry of the second column, then scale column 1 to (1, x)
    if c2[0] != 0:
        t = c2[0] / c1[0]
        c2 = (Fraction(0), c2[1] - t * c1[1])
    xq = c1[1] / c1[0]
    delta = c2[1] / c1[0]
    return make_vertex(cfg, int(val_p(delta, p)), xq)


def depth_via_tree(cfg: FieldConfig, X: Sl2Element, R: int):
    """max over the R-ball of the largest n with X in g_{v,n}.

    A lower bound for the depth that stabilizes at floor(depth) for regular X
    once R is large enough; grows without bound along rays for nilpotent X.
    """
    if X.is_zero_elt():
        raise ValueError("depth_via_tree needs X != 0")
    best = -INF
    for v in ball(cfg, BASE, R):
        lev = LatticeDescriptor(cfg, v, 0).min_level(X)
        if lev > best:
            best = lev
    return best


def _apartment_vertices(cfg: FieldConfig, X: Sl2Element, k_range) -> List[TreeVertex]:
    """Vertices of the apartment of the split torus centralizing X."""
    a, b, c = X.exact_entries()
    s = a * a + b * c  # -det
    u = rational_sqrt(s)
    if u is None:
        raise NotRegular("split apartment needs a rational eigenvalue")
    # eigenvectors for +u and -u
    if b != 0:
        w_plus, w_minus = (b, u - a), (b, -u - a)
    elif c != 0:
        w_plus, w_minus = (u + a, c), (-u + a, c)
    else:
        w_plus, w_minus = (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))
    out = []
    p = cfg.p
    for k in k_range:
        col2 = (w_minus[0] * Fraction(p) ** k, w_minus[1] * Fraction(p) ** k)
        out.append(_lattice_class(cfg, (w_plus, col2)))
    return out


def _lattice_class(cfg: FieldConfig, cols) -> TreeVertex:
    """Canonical vertex of the lattice spanned by two column vectors."""
    c1, c2 = cols
    p = cfg.p
    v1 = val_p(c1[0], p)
    v2 = val_p(c2[0], p)
    if v2 < v1:
        c1, c2 = c2, c1
    if c2[0] != 0:
        t = c2[0] / c1[0]
        c2 = (Fraction(0), c2[1] - t * c1[1])
    xq = c1[1] / c1[0]
    delta = c2[1] / c1[0]
    return make_vertex(cfg, int(val_p(delta, p)), xq)


def tree_count_oracle(cfg: FieldConfig, X: Sl2Element, n: int, R: int,
                      center: TreeVertex = BASE) -> Fraction:
    """Fixed-vertex count backing the orbital integral of 1_{g_{center,n}}.

    Counts vertices v with X in g_{v,n} whose distance parity matches the
    center's; for split X the count runs over a width-2 window of apartment
    columns (a fundamental domain for the torus translations).  Equals
    ss_orbital(X, indicator) up to one calibration constant per torus type.
    """
    k = classify(X)
    if not k.is_regular:
        raise NotRegular("tree count oracle needs a regular semisimple element")
    want_parity = distance(cfg, BASE, center) % 2
    fixed = []
    for v in ball(cfg, BASE, R):
        if LatticeDescriptor(cfg, v, n).contains(X):
            fixed.append(v)
    if not k.is_split:
        for v in fixed:
            if distance(cfg, BASE, v) == R:
                raise BallTooSmall(f"fixed set reaches the R={R} boundary")
        return Fraction(sum(1 for v in fixed if distance(cfg, BASE, v) % 2 == want_parity))
    # split: project fixed vertices to the apartment and keep columns {0, 1}
    span = 2 * R + 2
    apt = _apartment_vertices(cfg, X, range(-span, span + 1))
    for j in (0, 1):
        if distance(cfg, BASE, apt[span + j]) >= R:
            raise BallTooSmall("fundamental-domain columns not inside the ball")
    count = 0
    for v in fixed:
        dists = [distance(cfg, v, av) for av in apt]
        dmin = min(dists)
        j = dists.index(dmin) - span  # apartment coordinate of the projection
        if j in (0, 1):
            if distance(cfg, BASE, v) == R:
                raise BallTooSmall(f"fixed set reaches the R={R} boundary")
            if distance(cfg, BASE, v) % 2 == want_parity:
                count += 1
    return Fraction(count)


def cartan(cfg: FieldConfig, M) -> Tuple[tuple, int, int]:
    """Cartan decomposition M = K1 diag(p^e, p^f) K2 over Q with K1, K2 in GL2(O).

    Returns (K1, e, f) with e <= f; only the left factor is needed to build
    adapted bases for lattice refinement.
    """
    p = cfg.p
    A = [[Fraction(M[0][0]), Fraction(M[0][1])], [Fraction(M[1][0]), Fraction(M[1][1])]]
    L = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]

    def lmul(L, B):  # L <- L @ B
        return [[L[0][0] * B[0][0] + L[0][1] * B[1][0], L[0][0] * B[0][1] + L[0][1] * B[1][1]],
                [L[1][0] * B[0][0] + L[1][1] * B[1][0], L[1][0] * B[0][1] + L[1][1] * B[1][1]]]

    vals = {(i, j): (val_p(A[i][j], p) if A[i][j] != 0 else INF)
            for i in range(2) for j in range(2)}
    (i0, j0) = min(vals, key=lambda ij: vals[ij])
    if i0 == 1:  # swap rows; A <- S A, L <- L S
        A = [A[1], A[0]]
        L = [[L[0][1], L[0][0]], [L[1][1], L[1][0]]]
    if j0 == 1:  # swap columns (right factor, not tracked)
        A = [[A[0][1], A[0][0]], [A[1][1], A[1][0]]]
    # clear below the pivot: A <- E(-t) A with E(t) = ((1,0),(t,1)); L <- L E(t)
    t = A[1][0] / A[0][0]
    A = [A[0], [A[1][0] - t * A[0][0], A[1][1] - t * A[0][1]]]
    L = lmul(L, [[Fraction(1), Fraction(0)], [t, Fraction(1)]])
    # clear right of the pivot (right factor, not tracked)
    s = A[0][1] / A[0][0]
    A = [[A[0][0], A[0][1] - s * A[0][0]], A[1]]
    d1, d2 = A[0][0], A[1][1]
    e, f = int(val_p(d1, p)), int(val_p(d2, p))
    # absorb units of the diagonal into L
    u1 = d1 / Fraction(p) ** e
    u2 = d2 / Fraction(p) ** f
    L = lmul(L, [[u1, Fraction(0)], [Fraction(0), u2]])
    if e > f:
        # swap both sides: L <- L S (and the untracked right factor)
        L = [[L[0][1], L[0][0]], [L[1][1], L[1][0]]]
        e, f = f, e
    return (tuple(tuple(r) for r in L), e, f)
