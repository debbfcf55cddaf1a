"""Locally constant compactly supported functions on sl2(F).

An LCFunction is a finite rational combination of indicators of cosets
Y + g_{v,n}.  Canonicalization refines every cell to the standard lattice
p^N sl2(O) at a common level N, producing disjoint product cells in the
(a, b, c) coordinates; that form drives exact evaluation, invariance
certificates and the stratified integration engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import OutsideDomain
from .padic import INF, FieldConfig, PadicScalar, mod_pk, val_p
from .sl2 import GroupElement, Sl2Element, cayley_inv
from .tree import (BASE, LatticeDescriptor, TreeVertex, basis_matrix, cartan,
                   distance, mp_lattice)

Rat = Fraction


@dataclass(frozen=True)
class CosetCell:
    """The coset center + g_{vertex, level}; membership is exactly decidable."""

    center: Sl2Element
    lattice: LatticeDescriptor

    @property
    def vertex(self) -> TreeVertex:
        return self.lattice.vertex

    @property
    def level(self) -> int:
        return self.lattice.level

    def contains(self, X: Sl2Element) -> bool:
        return self.lattice.contains(X - self.center)


def _ad_matrix_triples(cfg: FieldConfig, K) -> List[Tuple[Fraction, Fraction, Fraction]]:
    """Images of the basis H, E, F of sl2 under Ad(K), as (a, b, c) triples."""
    (k11, k12), (k21, k22) = K
    d = k11 * k22 - k12 * k21
    out = []
    for (a, b, c) in ((Fraction(1), Fraction(0), Fraction(0)),
                      (Fraction(0), Fraction(1), Fraction(0)),
                      (Fraction(0), Fraction(0), Fraction(1))):
        # K * ((a,b),(c,-a)) * K^{-1}, with K^{-1} = adj/det
        m11 = k11 * a + k12 * c
        m12 = k11 * b - k12 * a
        m21 = k21 * a + k22 * c
        m22 = k21 * b - k22 * a
        na = (m11 * k22 - m12 * k21) / d
        nb = (-m11 * k12 + m12 * k11) / d
        nc = (m21 * k22 - m22 * k21) / d
        out.append((na, nb, nc))
    return out


def _refine_cell(cfg: FieldConfig, coeff: Rat, cell: CosetCell, N: int):
    """Split one coset of g_{v,n} into cosets of the standard p^N sl2(O).

    Requires N >= n + d(v, base).  Yields (coeff, (alpha, beta, chi)) product
    cells; centers are reduced mod p^N entrywise.
    """
    p = cfg.p
    v, n = cell.vertex, cell.level
    a0, b0, c0 = cell.center.exact_entries()
    if v == BASE:
        dist = 0
        triples = [(Fraction(1), Fraction(0), Fraction(0)),
                   (Fraction(0), Fraction(1), Fraction(0)),
                   (Fraction(0), Fraction(0), Fraction(1))]
        e = f = 0
    else:
        K, e, f = cartan(cfg, basis_matrix(cfg, v))
        dist = f - e
        triples = _ad_matrix_triples(cfg, K)
    if N < n + dist:
        raise ValueError("refinement level too coarse for this cell")
    exps = (n, n - dist, n + dist)  # adapted levels for Ad(K1)(H, E, F)
    ranges = [p ** (N - ex) for ex in exps]
    pw = [Fraction(p) ** ex for ex in exps]
    for c1 in range(ranges[0]):
        for c2 in range(ranges[1]):
            for c3 in range(ranges[2]):
                da = c1 * pw[0] * triples[0][0] + c2 * pw[1] * triples[1][0] + c3 * pw[2] * triples[2][0]
                db = c1 * pw[0] * triples[0][1] + c2 * pw[1] * triples[1][1] + c3 * pw[2] * triples[2][1]
                dc = c1 * pw[0] * triples[0][2] + c2 * pw[1] * triples[1][2] + c3 * pw[2] * triples[2][2]
                alpha = mod_pk(a0 + da, p, N)
                beta = mod_pk(b0 + db, p, N)
                chi = mod_pk(c0 + dc, p, N)
                yield coeff, (alpha, beta, chi)


class LCFunction:
    """Finite rational combination of lattice-coset indicators on sl2(F)."""

    def __init__(self, cfg: FieldConfig, terms: Iterable[Tuple[Rat, CosetCell]]):
        self.cfg = cfg
        self.terms: Tuple[Tuple[Rat, CosetCell], ...] = tuple(
            (Fraction(c), cell) for c, cell in terms if c != 0)
        self._canonical: Optional[Dict[tuple, Fraction]] = None
        self._canonical_level: Optional[int] = None

    # -- structure ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def level(self) -> int:
        """Finest standard-lattice level: f is constant on cosets of p^N sl2(O)."""
        if self.is_zero:
            return 0
        return max(cell.level + distance(self.cfg, BASE, cell.vertex)
                   for _, cell in self.terms)

    def support_bound(self) -> int:
        """Smallest M with every cell inside p^{-M} sl2(O) (entrywise)."""
        if self.is_zero:
            return 0
        out = 0
        for _, cell in self.terms:
            d = distance(self.cfg, BASE, cell.vertex)
            ent = min((x.valuation() for x in
                       (cell.center.a, cell.center.b, cell.center.c)), default=INF)
            lat = cell.level - d
            lo = min(ent, lat)
            out = max(out, int(-lo) if lo is not INF and lo < 0 else 0)
        return out

    def __add__(self, other: "LCFunction") -> "LCFunction":
        return LCFunction(self.cfg, list(self.terms) + list(other.terms))

    def __sub__(self, other: "LCFunction") -> "LCFunction":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "LCFunction":
        s = Fraction(scalar)
        return LCFunction(self.cfg, [(s * c, cell) for c, cell in self.terms])

    def __neg__(self) -> "LCFunction":
        return (-1) * self

    # -- evaluation -------------------------------------------------------

    def evaluate(self, X: Sl2Element) -> Fraction:
        if self._canonical is not None and X.is_exact:
            # disjoint standard cells: a single dict lookup
            p = self.cfg.p
            N = self._canonical_level
            a, b, c = X.exact_entries()
            key = (mod_pk(a, p, N), mod_pk(b, p, N), mod_pk(c, p, N))
            return self._canonical.get(key, Fraction(0))
        total = Fraction(0)
        for c, cell in self.terms:
            if cell.contains(X):
                total += c
        return total

    def evaluate_rational(self, a, b, c) -> Fraction:
        X = Sl2Element.from_rationals(self.cfg, a, b, c)
        return self.evaluate(X)

    def at_zero(self) -> Fraction:
        return self.evaluate(Sl2Element.zero(self.cfg))

    # -- canonical form ----------------------------------------------------

    def canonical_cells(self, level: Optional[int] = None) -> Dict[tuple, Fraction]:
        """Disjoint refinement: map (alpha, beta, chi) -> coefficient.

        Cells are cosets of p^level sl2(O) with centers reduced mod p^level;
        evaluation agrees with the original term list everywhere.
        """
        N = self.level() if level is None else level
        if N < self.level():
            raise ValueError("refinement level coarser than the function's level")
        if self._canonical is not None and self._canonical_level == N:
            return self._canonical
        acc: Dict[tuple, Fraction] = {}
        for coeff, cell in self.terms:
            for cf, key in _refine_cell(self.cfg, coeff, cell, N):
                acc[key] = acc.get(key, Fraction(0)) + cf
        acc = {k: v for k, v in acc.items() if v != 0}
        if level is None:
            self._canonical = acc
            self._canonical_level = N
        return acc

    def canonicalize(self) -> "LCFunction":
        """Equivalent function written in disjoint standard cells."""
        N = self.level()
        cells = self.canonical_cells(N)
        lat = mp_lattice(self.cfg, BASE, N)
        terms = []
        for (al, be, ch), coeff in sorted(cells.items()):
            center = Sl2Element.from_rationals(self.cfg, al, be, ch)
            terms.append((coeff, CosetCell(center, lat)))
        out = LCFunction(self.cfg, terms)
        out._canonical = cells
        out._canonical_level = N
        return out

    def integration_cells(self) -> List[Tuple[Fraction, Tuple[Fraction, Fraction, Fraction], int]]:
        """Product cells (coeff, (alpha, beta, chi), cell_level) for the engine.

        Base-vertex cells pass through at their own level; off-base cells are
        refined just enough (level n + d) to become standard cosets.  The
        refinement count grows like q^(3 d(vertex, base)), so a budget guard
        rejects far-flung cells instead of hanging.
        """
        from .errors import GridTooLarge
        total = 0
        for _, cell in self.terms:
            d = distance(self.cfg, BASE, cell.vertex)
            total += self.cfg.p ** (3 * d)
        if total > 500_000:
            raise GridTooLarge(
                f"integration refinement needs {total} cells; move cells nearer "
                "the base vertex or reduce p")
        out = []
        p = self.cfg.p
        for coeff, cell in self.terms:
            if cell.vertex == BASE:
                n = cell.level
                a0, b0, c0 = cell.center.exact_entries()
                out.append((coeff, (mod_pk(a0, p, n), mod_pk(b0, p, n), mod_pk(c0, p, n)), n))
            else:
                n = cell.level + distance(self.cfg, BASE, cell.vertex)
                for cf, key in _refine_cell(self.cfg, coeff, cell, n):
                    out.append((cf, key, n))
        return out

    def equals(self, other: "LCFunction") -> bool:
        N = max(self.level(), other.level())
        return self.canonical_cells(N) == other.canonical_cells(N)

    # -- operations ---------------------------------------------------------

    def dilate(self, c) -> "LCFunction":
        """f_c with f_c(X) = f(cX): cells scale by c^{-1}, levels drop by val(c)."""
        c = c.exact_value() if isinstance(c, PadicScalar) else Fraction(c)
        if c == 0:
            raise ValueError("dilation scalar must be invertible")
        vc = int(val_p(c, self.cfg.p))
        terms = []
        for coeff, cell in self.terms:
            center = cell.center.scale(Fraction(1) / c)
            lat = cell.lattice.scaled(-vc)
            terms.append((coeff, CosetCell(center, lat)))
        return LCFunction(self.cfg, terms)

    def ad_pullback(self, g: GroupElement) -> "LCFunction":
        """f o Ad(g): cells move by Ad(g^{-1}) and vertices by the tree action."""
        from .sl2 import ad
        from .tree import act
        ginv = g.inverse()
        terms = []
        for coeff, cell in self.terms:
            center = ad(ginv, cell.center)
            vert = act(self.cfg, ginv, cell.vertex)
            terms.append((coeff, CosetCell(center, mp_lattice(self.cfg, vert, cell.level))))
        return LCFunction(self.cfg, terms)

    def proxy_depth(self) -> int:
        """Depth index r such that f lies in the level-(r+1) proxy family D_r.

        Each term 1_{Y + g_{x,n}} generates D_{n-1} at its own vertex, so a
        combination sits in D_r for r = max over terms of (level - 1).
        """
        if self.is_zero:
            return 0
        return max(0, max(cell.level for _, cell in self.terms) - 1)


def indicator(cfg: FieldConfig, cell: CosetCell) -> LCFunction:
    return LCFunction(cfg, [(Fraction(1), cell)])


def indicator_lattice(cfg: FieldConfig, v: TreeVertex, n: int,
                      center: Optional[Sl2Element] = None) -> LCFunction:
    center = Sl2Element.zero(cfg) if center is None else center
    return indicator(cfg, CosetCell(center, mp_lattice(cfg, v, n)))


def unit_ball(cfg: FieldConfig) -> LCFunction:
    """Indicator of sl2(O)."""
    return indicator_lattice(cfg, BASE, 0)


def depth_r_family(cfg: FieldConfig, r: int, centers: Sequence[Sl2Element],
                   points: Sequence[TreeVertex]) -> List[LCFunction]:
    """Indicators 1_{Y + g_{x, r+1}}: generators of the depth-r proxy space D_r.

    Each carries its invariance certificate (the lattice g_{x, r+1} itself);
    is_invariant_under re-verifies it.
    """
    out = []
    for Y in centers:
        for x in points:
            out.append(indicator_lattice(cfg, x, r + 1, center=Y))
    return out


def is_invariant_under(f: LCFunction, L: LatticeDescriptor) -> bool:
    """Exact decision of translation-invariance of f under the lattice L."""
    cfg = f.cfg
    N = max(f.level(), L.level + distance(cfg, BASE, L.vertex))
    base_cells = f.canonical_cells(N)
    # translate f by every representative of L / p^N sl2(O) and compare
    probe = indicator_lattice(cfg, L.vertex, L.level)
    for _, key in _refine_cell(cfg, Fraction(1), probe.terms[0][1], N):
        shifted: Dict[tuple, Fraction] = {}
        p = cfg.p
        for (al, be, ch), coeff in base_cells.items():
            nk = (mod_pk(al + key[0], p, N), mod_pk(be + key[1], p, N),
                  mod_pk(ch + key[2], p, N))
            shifted[nk] = shifted.get(nk, Fraction(0)) + coeff
        shifted = {k: v for k, v in shifted.items() if v != 0}
        if shifted != base_cells:
            return False
    return True


def h_combination(f: LCFunction, d: int) -> LCFunction:
    """q^d f - f_zeta with f_zeta = dilate(f, zeta^2); d in {0, 2}."""
    if d not in (0, 2):
        raise ValueError("d must be a nilpotent orbit dimension (0 or 2)")
    q = Fraction(f.cfg.q)
    return (q**d) * f - f.dilate(f.cfg.zeta ** 2)


class GroupSideFunction:
    """f composed with the inverse Cayley map, on topologically unipotent g."""

    def __init__(self, f: LCFunction):
        self.f = f

    def evaluate(self, g: GroupElement) -> Fraction:
        return self.f.evaluate(cayley_inv(g))


def phi_pullback_support(f: LCFunction) -> GroupSideFunction:
    """Wrap f for group-side use; requires support inside g_nil.

    A standard cell (Y, N) sits inside the topologically nilpotent set iff
    N >= 1, val(det Y) >= 1 and N + min(val 2a, val b, val c) >= 1; the
    perturbation analysis of det over the coset makes this exact.
    """
    cfg = f.cfg
    p = cfg.p
    N = f.level()
    for (al, be, ch), coeff in f.canonical_cells(N).items():
        det = -(al * al) - be * ch
        vdet = val_p(det, p)
        vlin = min(val_p(2 * al, p), val_p(be, p), val_p(ch, p))
        if N < 1 or vdet < 1 or (vlin is not INF and N + vlin < 1):
            raise OutsideDomain("support is not topologically nilpotent")
    return GroupSideFunction(f)


# -- JSON serialization -------------------------------------------------

def lcfunction_to_json(f: LCFunction) -> list:
    out = []
    for coeff, cell in f.terms:
        out.append({
            "coeff": str(coeff),
            "center": cell.center.matrix_str(),
            "vertex": f"({cell.vertex.m},{cell.vertex.x})",
            "level": cell.level,
        })
    return out


def lcfunction_from_json(cfg: FieldConfig, data: list) -> LCFunction:
    import re
    terms = []
    for item in data:
        coeff = Fraction(item["coeff"])
        mtext = item["center"]
        nums = re.findall(r"-?\d+(?:/\d+)?", mtext)
        a, b, c = Fraction(nums[0]), Fraction(nums[1]), Fraction(nums[2])
        m_str, x_str = item["vertex"].strip("()").split(",", 1)
        v = TreeVertex(int(m_str), mod_pk(Fraction(x_str), cfg.p, int(m_str)))
        center = Sl2Element.from_rationals(cfg, a, b, c)
        terms.append((coeff, CosetCell(center, mp_lattice(cfg, v, int(item["level"])))))
    return LCFunction(cfg, terms)
