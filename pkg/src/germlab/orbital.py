"""Exact semisimple and nilpotent orbital integrals on sl2(Q_p).

The adjoint orbit through a regular X with s := -det(X) is charted by
(a, b) -> ((a, b), ((s - a^2)/b, -a)) over b != 0, with invariant chart
measure da db/|b| (the Gelfand-Leray form of the determinant).  Nilpotent
orbits are the s = 0 fibers restricted to a square class of b.  Semisimple
integrals carry the extra factor q^floor(val(s)/2) = |u|_floor^{-1}, which
makes the substitution covariance  I_{c X}(f) = I_X(f_c)  an exact identity
of the engine for c = zeta^2 (and any even-valuation c).

A canonicalized function is a sum of product cells
a in alpha + p^N O,  b in beta + p^N O,  c in chi + p^N O.  For each cell the
b-integral collapses, per valuation stratum, to at most (q-1)/2 quadratic
congruence measures

    SQMEAS(alpha, N, theta, m) = meas{a in alpha + p^N O : val(a^2 - theta) >= m},

each of which is zero, one ball, or two Hensel-branch cosets.  Strata are
summed exactly up to a start index and the geometric tail is certified by
checking two extra stratum blocks against the predicted ratio; an unstable
tail raises instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import (GridTooLarge, InsufficientPrecision, NotRegular,
                     TailUnstable)
from .padic import (INF, FieldConfig, QuadExtDescriptor, SquareClass,
                    hensel_sqrt, leading_digit, legendre, mod_pk, val_p)
from .sl2 import (ALL_ORBITS, OrbitLabel, Sl2Element, ZERO_ORBIT, classify)
from .lcfunc import LCFunction


@dataclass(frozen=True)
class Normalization:
    """Measure conventions baked into every reported number."""

    cfg: FieldConfig

    def fingerprint(self) -> str:
        return (f"p={self.cfg.p};zeta=p;eps={self.cfg.eps};"
                "dg:vol(SL2(O))=1;dt:vol(T_compact)=1;"
                "ss:q^floor(val_u)*(da db/|b|) on -a^2-bc=detX (norm-coset cut);"
                "nil:Zero=delta_0,Regular(l)=da db/|b| on bc=-a^2,b in class l")


@dataclass
class IntegralResult:
    value: Fraction
    v0: int
    tail: str
    certificate: bool
    normalization: str

    def to_json(self) -> dict:
        return {"value": str(self.value), "v0": self.v0, "tail": self.tail,
                "certificate": self.certificate, "normalization": self.normalization}


class BClassRule:
    """Which b-strata and leading digits the orbit admits.

    allowed(v) returns 'all', 'none', or the required Legendre value (+1/-1)
    of the leading digit of b on the valuation-v stratum.
    """

    def __init__(self, kind: str, cfg: FieldConfig,
                 ext: Optional[QuadExtDescriptor] = None,
                 tag: Optional[bool] = None,
                 nil_class: Optional[SquareClass] = None):
        self.kind = kind
        self.cfg = cfg
        self.ext = ext
        self.tag = tag
        self.nil_class = nil_class

    @classmethod
    def split(cls, cfg) -> "BClassRule":
        return cls("split", cfg)

    @classmethod
    def elliptic(cls, cfg, ext: QuadExtDescriptor, tag: bool) -> "BClassRule":
        return cls("elliptic", cfg, ext=ext, tag=tag)

    @classmethod
    def nilpotent(cls, cfg, nil_class: SquareClass) -> "BClassRule":
        return cls("nil", cfg, nil_class=nil_class)

    def allowed(self, v: int):
        if self.kind == "split":
            return "all"
        if self.kind == "nil":
            if v % 2 != self.nil_class.parity:
                return "none"
            return self.nil_class.unit_legendre
        if not self.ext.ramified:
            return "all" if (v % 2 == 0) == self.tag else "none"
        need = self.ext.norm_unit_legendre(v, self.cfg)
        return need if self.tag else -need

    def digit_count(self, v: int) -> int:
        a = self.allowed(v)
        if a == "none":
            return 0
        if a == "all":
            return self.cfg.p - 1
        return (self.cfg.p - 1) // 2

    def digit_ok(self, v: int, d0: int) -> bool:
        a = self.allowed(v)
        if a == "none":
            return False
        if a == "all":
            return True
        return legendre(d0, self.cfg.p) == a


_SQMEAS_CACHE: Dict[tuple, Fraction] = {}


def _coset_meet(cfg: FieldConfig, c1: Fraction, k1: int, c2: Fraction, k2: int) -> Fraction:
    """Measure of (c1 + p^k1 O) intersect (c2 + p^k2 O)."""
    if k1 > k2:
        c1, k1, c2, k2 = c2, k2, c1, k1
    d = c1 - c2
    if d != 0 and val_p(d, cfg.p) < k1:
        return Fraction(0)
    return cfg.qpow(-k2)


def sqmeas(cfg: FieldConfig, alpha: Fraction, N: int, theta: Fraction, m: int) -> Fraction:
    """meas{a in alpha + p^N O : val(a^2 - theta) >= m} as an exact rational."""
    key = (cfg.p, alpha, N, theta, m)
    hit = _SQMEAS_CACHE.get(key)
    if hit is not None:
        return hit
    p = cfg.p
    t = val_p(theta, p)
    if t >= m:
        k = -((-m) // 2)  # ceil(m/2)
        out = _coset_meet(cfg, alpha, N, Fraction(0), k)
    elif t % 2 != 0:
        out = Fraction(0)
    else:
        tp = theta / Fraction(p) ** t
        d0 = leading_digit(tp, p)
        if legendre(d0, p) != 1:
            out = Fraction(0)
        else:
            K = int(m - t)
            u = (tp.numerator % p**K) * pow(tp.denominator, -1, p**K) % p**K
            rho = hensel_sqrt(u, p, K)
            half = t // 2
            center = Fraction(rho) * Fraction(p) ** half
            out = (_coset_meet(cfg, alpha, N, center, m - half)
                   + _coset_meet(cfg, alpha, N, -center, m - half))
    _SQMEAS_CACHE[key] = out
    return out


def _stratum_value(cfg: FieldConfig, s: Fraction, rule: BClassRule,
                   alpha: Fraction, beta: Fraction, chi: Fraction,
                   N: int, v: int) -> Fraction:
    """Exact contribution q^v * meas{(a,b): val b = v, cell conditions} of one stratum.

    Only called for cells whose b-coset is the full ball p^N O (val(beta) >= N),
    so strata run over v >= N.
    """
    p = cfg.p
    cnt = rule.digit_count(v)
    if cnt == 0:
        return Fraction(0)
    e = val_p(chi, p)
    if e >= N:  # c-condition reads s - a^2 in p^(N+v) O, independent of b
        vol_b = Fraction(cnt) * cfg.qpow(-v - 1)
        return cfg.qpow(v) * vol_b * sqmeas(cfg, alpha, N, s, N + v)
    # c-condition pins b to a coset of radius p^(N+v-e) around (s - a^2)/chi
    w = v + int(e)
    allowed = rule.allowed(v)
    lead_chi = leading_digit(chi, p)
    scale = cfg.qpow(int(e) - N)  # q^{v - T_v}
    if allowed == "all":
        meas = (sqmeas(cfg, alpha, N, s, w) - sqmeas(cfg, alpha, N, s, w + 1))
        return scale * meas
    total = Fraction(0)
    for d in range(1, p):
        # leading digit of b* = psi/chi must have Legendre value `allowed`
        if legendre(d * pow(lead_chi, -1, p) % p, p) != allowed:
            continue
        theta = s - Fraction(d) * Fraction(p) ** w
        total += sqmeas(cfg, alpha, N, theta, w + 1)
    return scale * total


def _bounded_cell_value(cfg: FieldConfig, s: Fraction, rule: BClassRule,
                        alpha: Fraction, beta: Fraction, chi: Fraction,
                        N: int) -> Fraction:
    """Cell with val(beta) < N: a single stratum at v = val(beta), no tail."""
    p = cfg.p
    w_b = int(val_p(beta, p))
    if not rule.digit_ok(w_b, leading_digit(beta, p)):
        return Fraction(0)
    e = val_p(chi, p)
    if e >= N:
        return cfg.qpow(w_b) * cfg.qpow(-N) * sqmeas(cfg, alpha, N, s, N + w_b)
    e = int(e)
    expo = w_b - max(N, N + w_b - e)
    m = N + min(e, w_b)
    return cfg.qpow(expo) * sqmeas(cfg, alpha, N, s - chi * beta, m)


def _cell_integral(cfg: FieldConfig, s: Fraction, rule: BClassRule,
                   cell: Tuple[Fraction, Fraction, Fraction], N: int,
                   M_hint: int) -> Tuple[Fraction, int, str]:
    """Exact integral of one product cell, with certified geometric tail."""
    alpha, beta, chi = cell
    p = cfg.p
    if val_p(beta, p) < N:
        return _bounded_cell_value(cfg, s, rule, alpha, beta, chi, N), N, "finite"
    vs = abs(int(val_p(s, p))) if s != 0 else 0
    v0 = N + vs + M_hint + 4
    for _attempt in range(3):
        exact = Fraction(0)
        for v in range(N, v0):
            exact += _stratum_value(cfg, s, rule, alpha, beta, chi, N, v)
        blocks = []
        for k in range(3):
            b = (_stratum_value(cfg, s, rule, alpha, beta, chi, N, v0 + 2 * k)
                 + _stratum_value(cfg, s, rule, alpha, beta, chi, N, v0 + 2 * k + 1))
            blocks.append(b)
        B0, B1, B2 = blocks
        if B0 == 0:
            if B1 == 0 and B2 == 0:
                return exact, v0, "0"
        else:
            ratio = B1 / B0
            if ratio in (Fraction(0), Fraction(1, p), Fraction(1, p * p)) and B2 == B1 * ratio:
                tail = B0 / (1 - ratio)
                return exact + tail, v0, f"geom ratio {ratio} from {B0}"
        v0 += 4
    raise TailUnstable("stratum blocks did not match a geometric pattern")


def _prepare_cells(f: LCFunction):
    cells = f.integration_cells()
    M = f.support_bound()
    return cells, M


def _engine(cfg: FieldConfig, s: Fraction, rule: BClassRule, f: LCFunction,
            prefactor: Fraction) -> IntegralResult:
    cells, M = _prepare_cells(f)
    total = Fraction(0)
    v0_max = 0
    tails = set()
    for coeff, key, n in cells:
        val, v0, tail = _cell_integral(cfg, s, rule, key, n, M)
        total += coeff * val
        v0_max = max(v0_max, v0)
        tails.add(tail)
    tail_desc = "finite" if tails <= {"finite", "0"} else "geometric"
    return IntegralResult(prefactor * total, v0_max, tail_desc, True,
                          Normalization(cfg).fingerprint())


def ss_orbital(X: Sl2Element, f: LCFunction) -> IntegralResult:
    """Orbital integral of f over the SL2(F)-orbit of a regular semisimple X."""
    cfg = X.cfg
    k = classify(X)
    if not k.is_regular:
        raise NotRegular("ss_orbital needs a regular semisimple element")
    if not X.is_exact:
        raise InsufficientPrecision("the engine needs exact rational entries")
    a, b, c = X.exact_entries()
    s = a * a + b * c  # -det
    if k.is_split:
        rule = BClassRule.split(cfg)
    else:
        rule = BClassRule.elliptic(cfg, k.torus, k.ss_tag)
    vs = int(val_p(s, cfg.p))
    prefactor = cfg.qpow(vs // 2)  # |u|^{-1}, floored to stay rational
    return _engine(cfg, s, rule, f, prefactor)


def nilpotent_orbital(label: OrbitLabel, f: LCFunction) -> IntegralResult:
    """I_Omega(f): point mass at 0 for the zero orbit, chart integral else."""
    cfg = f.cfg
    if label.kind == "zero":
        return IntegralResult(f.at_zero(), 0, "point", True,
                              Normalization(cfg).fingerprint())
    rule = BClassRule.nilpotent(cfg, label.cls)
    return _engine(cfg, Fraction(0), rule, f, Fraction(1))


def nilpotent_vector(f: LCFunction) -> Dict[OrbitLabel, Fraction]:
    """All five nilpotent orbital integrals of f (cached on the function)."""
    cached = getattr(f, "_nilvec", None)
    if cached is None:
        cached = {om: nilpotent_orbital(om, f).value for om in ALL_ORBITS}
        f._nilvec = cached
    return cached


# -- brute-force oracle ------------------------------------------------------


@dataclass
class OracleResult:
    value: Fraction            # exact value, or partial sum when bounded
    error_bound: Fraction      # 0 for exact enumeration
    exact: bool

    def agrees_with(self, engine_value: Fraction) -> bool:
        """Exact agreement, via the bounded-denominator argument when needed.

        When the enumeration is exact the test is equality.  Otherwise the
        remainder bound B satisfies |engine - partial| <= B and B is small
        enough that two distinct rationals with the partial sum's denominator
        cannot both lie within B of it, which forces equality of the exact
        values.
        """
        if self.exact:
            return engine_value == self.value
        gap = abs(engine_value - self.value)
        if gap > self.error_bound:
            return False
        den = engine_value.denominator * self.value.denominator
        return self.error_bound * den * den < 1


def _oracle_rule(target, f: LCFunction):
    cfg = f.cfg
    if isinstance(target, OrbitLabel):
        if target.kind == "zero":
            return None, None
        return Fraction(0), BClassRule.nilpotent(cfg, target.cls)
    k = classify(target)
    if not k.is_regular:
        raise NotRegular("oracle target must be regular or a nilpotent label")
    a, b, c = target.exact_entries()
    s = a * a + b * c
    rule = (BClassRule.split(cfg) if k.is_split
            else BClassRule.elliptic(cfg, k.torus, k.ss_tag))
    return s, rule


def _interval_ameas(cfg: FieldConfig, alpha: Fraction, N: int,
                    theta: Fraction, m: int) -> Fraction:
    """meas{a in alpha + p^N O : val(a^2 - theta) >= m} by coset subdivision.

    Pure interval logic: a coset (gamma, l) is fully inside when both the
    center value and every perturbation term reach valuation m, fully outside
    when the center value is pinned strictly below every perturbation, and is
    subdivided otherwise.  Terminates by level m + max(0, -val(gamma)).
    """
    p = cfg.p
    total = Fraction(0)
    stack = [(alpha, N)]
    while stack:
        gamma, l = stack.pop()
        phi = theta - gamma * gamma
        vphi = val_p(phi, p)
        lin = (l + val_p(2 * gamma, p)) if gamma != 0 else INF
        pert = min(lin, 2 * l)
        if vphi >= m and pert >= m:
            total += cfg.qpow(-l)
        elif vphi < m and vphi < pert:
            continue
        else:
            step = Fraction(p) ** l
            for i in range(p):
                stack.append((gamma + i * step, l + 1))
    return total


def brute_force_cell_oracle(target, f: LCFunction, refine: int = 1,
                            budget: int = 60_000) -> OracleResult:
    """Independent stratum-by-stratum evaluation of the chart integral.

    The b-plane is enumerated coset by coset per valuation stratum; the
    a-measure of each quadratic congruence is computed by raw interval
    subdivision (no Hensel branch analysis shared with the engine).  Elliptic
    targets terminate exactly; split and nilpotent targets extend the strata
    by an observed-block geometric tail when one is present, and otherwise
    return the partial sum with a rigorous remainder bound.
    """
    cfg = f.cfg
    p = cfg.p
    s, rule = _oracle_rule(target, f)
    if rule is None:  # zero orbit: direct membership sum at 0
        return OracleResult(f.at_zero(), Fraction(0), True)
    fc = f.canonicalize()
    N = fc.level()
    M = fc.support_bound()
    cells = fc.canonical_cells()
    by_beta: Dict[Fraction, list] = {}
    for (al, be, ch), coeff in cells.items():
        by_beta.setdefault(be, []).append((al, ch, coeff))
    vs = int(val_p(s, p)) if s != 0 else None
    if vs is not None and not classify(target).is_split:
        v_max = max(N, vs + 1 + M) + 1          # strata beyond are empty
        exact_mode = True
    else:
        v_max = N + (abs(vs) if vs is not None else 0) + M + 7 + 2 * refine
        exact_mode = False
    lo = -M
    n_b = max(1, N + M)  # b-digits: decides both b mod p^N and b*chi mod p^(N+v)
    if (p - 1) * p ** (n_b - 1) * (v_max - lo + 1) * max(1, len(cells)) > budget:
        raise GridTooLarge("b-coset enumeration exceeds the budget")
    prefactor = cfg.qpow(vs // 2) if vs is not None else Fraction(1)

    strata = {}
    for v in range(lo, v_max + 1):
        acc = Fraction(0)
        if rule.digit_count(v) != 0:
            vol_b = cfg.qpow(-(v + n_b))
            for ib in range(p ** (n_b - 1)):
                for d0 in range(1, p):
                    if not rule.digit_ok(v, d0):
                        continue
                    b = Fraction(d0 + p * ib) * Fraction(p) ** v
                    for al, ch, coeff in by_beta.get(mod_pk(b, p, N), ()):
                        # a-condition: val(s - a^2 - b*chi) >= N + v
                        am = _interval_ameas(cfg, al, N, s - b * ch, N + v)
                        if am:
                            acc += coeff * vol_b * am
        strata[v] = cfg.qpow(v) * acc
    partial = sum(strata.values(), Fraction(0))
    if exact_mode:
        return OracleResult(prefactor * partial, Fraction(0), True)
    # observed-block geometric extension over the last six strata
    v_star = v_max - 5
    B0 = strata[v_star] + strata[v_star + 1]
    B1 = strata[v_star + 2] + strata[v_star + 3]
    B2 = strata[v_star + 4] + strata[v_star + 5]
    head = sum(strata[v] for v in range(lo, v_star))
    if B0 == 0 and B1 == 0 and B2 == 0:
        return OracleResult(prefactor * head, Fraction(0), True)
    if B0 != 0:
        ratio = B1 / B0
        if ratio in (Fraction(0), Fraction(1, p), Fraction(1, p * p)) and B2 == B1 * ratio:
            return OracleResult(prefactor * (head + B0 / (1 - ratio)), Fraction(0), True)
    # rigorous remainder: meas_a <= 2 q^(-floor((N+v)/2)) and b-volume <= q^-v
    l1 = sum(abs(cf) for cf in cells.values())
    k0 = (N + v_max + 1) // 2
    bound = prefactor * 4 * l1 * cfg.qpow(-k0) * Fraction(p, p - 1)
    return OracleResult(prefactor * partial, bound, False)


def tree_oracle_cases(cfg: FieldConfig):
    """(name, X, level, R) cases for the fixed-point-count cross-check."""
    from .sl2 import Sl2Element, rep_elliptic
    p, e = cfg.p, cfg.eps
    cases = []
    for k, levels in ((0, (0, -1)), (1, (0, 1)), (2, (0, 1, 2))):
        X = Sl2Element.from_rationals(cfg, p**k, 0, 0)
        for n in levels:
            cases.append((f"split-d{k}-n{n}", X, n, (k - n) + 3))
    for k, levels in ((0, (0, -1)), (1, (0, 1))):
        X = rep_elliptic(cfg, e * p ** (2 * k), tag=True)
        for n in levels:
            cases.append((f"unram-d{k}-n{n}", X, n, (k - n) + 3))
    Xf = rep_elliptic(cfg, e * p**2, tag=False)
    cases.append(("unram-d1-F-n0", Xf, 0, 4))
    for j, levels in ((1, (0, -1)), (3, (0, 1))):
        for nm, s in ((f"ramPi-d{j}of2", Fraction(p) ** j),
                      (f"ramEpsPi-d{j}of2", Fraction(e) * Fraction(p) ** j)):
            X = rep_elliptic(cfg, s, tag=True)
            for n in levels:
                cases.append((f"{nm}-n{n}", X, n, (j + 1) // 2 - n + 3))
    return cases


def tree_oracle_compare(cfg: FieldConfig):
    """Engine vs fixed-point count: one calibration constant per torus type.

    Returns (rows, ok); the constant is frozen on the first case of each
    torus label and every later case of that label must reproduce it.
    """
    from .lcfunc import indicator_lattice
    from .tree import BASE, tree_count_oracle
    calib: Dict[str, Fraction] = {}
    rows = []
    ok = True
    for name, X, n, R in tree_oracle_cases(cfg):
        f = indicator_lattice(cfg, BASE, n)
        eng = ss_orbital(X, f).value
        cnt = tree_count_oracle(cfg, X, n, R)
        kind = classify(X).torus_kind()
        if cnt == 0:
            good = eng == 0
        elif kind not in calib:
            calib[kind] = eng / cnt
            good = True
        else:
            good = eng == calib[kind] * cnt
        ok = ok and good
        rows.append({"case": name, "torus": kind, "engine": str(eng),
                     "count": str(cnt), "pass": good})
    rows.append({"calibration": {k: str(v) for k, v in sorted(calib.items())}})
    return rows, ok
