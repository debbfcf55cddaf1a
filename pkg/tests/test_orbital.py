import random
from fractions import Fraction

import pytest

from germlab import (ALL_ORBITS, FieldConfig, NotRegular, REG_EPS, REG_EPSPI,
                     REG_ONE, REG_PI, Sl2Element, ZERO_ORBIT, ad,
                     brute_force_cell_oracle, indicator_lattice, make_vertex,
                     nilpotent_orbital, nilpotent_vector, random_sl2,
                     rep_elliptic, ss_orbital, unit_ball)
from germlab.lcfunc import h_combination
from germlab.orbital import tree_oracle_compare
from germlab.tree import BASE

CFG = FieldConfig(5)
CFG3 = FieldConfig(3)


def M(a, b, c, cfg=CFG):
    return Sl2Element.from_rationals(cfg, a, b, c)


def q(cfg):
    return Fraction(cfg.p)


class TestSplitAnchors:
    def test_unit_ball_at_depth0(self):
        res = ss_orbital(M(1, 0, 0), unit_ball(CFG))
        assert res.value == Fraction(6, 5)
        assert res.certificate

    def test_unit_ball_at_depth1(self):
        assert ss_orbital(M(5, 0, 0), unit_ball(CFG)).value == 6

    def test_p3(self):
        assert ss_orbital(M(1, 0, 0, CFG3), unit_ball(CFG3)).value == Fraction(4, 3)

    def test_not_regular(self):
        with pytest.raises(NotRegular):
            ss_orbital(M(0, 1, 0), unit_ball(CFG))


class TestNilpotentAnchors:
    def test_zero_orbit_point_mass(self):
        f = unit_ball(CFG)
        assert nilpotent_orbital(ZERO_ORBIT, f).value == 1
        assert nilpotent_orbital(ZERO_ORBIT, LCZero()).value == 0

    def test_unit_classes(self):
        f = unit_ball(CFG)
        assert nilpotent_orbital(REG_ONE, f).value == Fraction(1, 2)
        assert nilpotent_orbital(REG_EPS, f).value == Fraction(1, 2)

    def test_odd_classes_carry_the_chart_normalization(self):
        # with the fixed chart measure da db/|b| on {class(b) = lambda} the
        # odd-valuation classes integrate the unit ball to 1/(2q)
        f = unit_ball(CFG)
        assert nilpotent_orbital(REG_PI, f).value == Fraction(1, 10)
        assert nilpotent_orbital(REG_EPSPI, f).value == Fraction(1, 10)

    def test_vector_and_linearity(self):
        rng = random.Random(51)
        f = unit_ball(CFG)
        g = indicator_lattice(CFG, BASE, 1)
        for _ in range(50):
            a, b = Fraction(rng.randint(-4, 4)), Fraction(rng.randint(-4, 4))
            nv = nilpotent_vector(a * f + b * g)
            nf, ng = nilpotent_vector(f), nilpotent_vector(g)
            for om in ALL_ORBITS:
                assert nv[om] == a * nf[om] + b * ng[om]

    def test_dilated_example(self):
        f = unit_ball(CFG).dilate(CFG.zeta**2)
        assert nilpotent_orbital(REG_ONE, f).value == Fraction(25, 2)

    def test_h_combination_kills_everything_when_supported_off_zero(self):
        f = indicator_lattice(CFG, BASE, 1, center=M(0, 1, 0))
        assert f.evaluate(M(0, 0, 0)) == 0
        h = h_combination(f, 2)
        assert all(v == 0 for v in nilpotent_vector(h).values())


def LCZero():
    from germlab import LCFunction
    return LCFunction(CFG, [])


class TestScalingLaw:
    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_all_orbits_many_functions(self, p):
        cfg = FieldConfig(p)
        z2 = cfg.zeta**2
        fs = _function_zoo(cfg)
        assert len(fs) >= 10
        for _, f in fs:
            fz = f.dilate(z2)
            for om in ALL_ORBITS:
                lhs = nilpotent_orbital(om, fz).value
                rhs = cfg.qpow(om.dim) * nilpotent_orbital(om, f).value
                assert lhs == rhs


def _function_zoo(cfg):
    from germlab import rep_nilpotent
    out = [("ball", unit_ball(cfg)),
           ("lvl1", indicator_lattice(cfg, BASE, 1)),
           ("lvl2", indicator_lattice(cfg, BASE, 2)),
           ("dil", unit_ball(cfg).dilate(cfg.zeta**2)),
           ("x1", indicator_lattice(cfg, make_vertex(cfg, 1, 0), 1)),
           ("x-1", indicator_lattice(cfg, make_vertex(cfg, -1, 0), 1)),
           ("nOne", indicator_lattice(cfg, BASE, 2, center=rep_nilpotent(cfg, REG_ONE))),
           ("nPi", indicator_lattice(cfg, BASE, 2, center=rep_nilpotent(cfg, REG_PI))),
           ("comb", 2 * unit_ball(cfg) - 3 * indicator_lattice(cfg, BASE, 1)),
           ("hcomb", h_combination(indicator_lattice(cfg, BASE, 1), 2)),
           ("shift", indicator_lattice(cfg, BASE, 1,
                                       center=Sl2Element.from_rationals(cfg, 0, Fraction(1, cfg.p), 0))),
           ]
    return out


class TestCovariance:
    def test_substitution_identity_twenty_pairs(self):
        z2 = CFG.zeta**2
        Xs = [M(1, 0, 0), M(5, 0, 0), M(0, 1, 2), M(0, 1, 5), M(0, 1, 10),
              M(0, 2, 1), M(0, 1, 2 * 25), rep_elliptic(CFG, 5, tag=False)]
        fs = [f for _, f in _function_zoo(CFG)][:5]
        pairs = 0
        for X in Xs:
            for f in fs:
                lhs = ss_orbital(X.scale(z2), f).value
                rhs = ss_orbital(X, f.dilate(z2)).value
                assert lhs == rhs
                pairs += 1
        assert pairs >= 20

    def test_unit_scaling_covariance(self):
        for c in (Fraction(2), Fraction(3)):
            for X in (M(1, 0, 0), M(0, 1, 5)):
                lhs = ss_orbital(X.scale(c), unit_ball(CFG)).value
                rhs = ss_orbital(X, unit_ball(CFG).dilate(c)).value
                assert lhs == rhs

    def test_zeta4(self):
        X = M(0, 1, 2)
        f = unit_ball(CFG)
        z4 = CFG.zeta**4
        assert ss_orbital(X.scale(z4), f).value == ss_orbital(X, f.dilate(z4)).value


class TestAdInvariance:
    def test_engine_depends_on_class_only(self):
        rng = random.Random(52)
        f = unit_ball(CFG)
        for X in (M(5, 0, 0), M(0, 1, 5), M(0, 1, 2)):
            base = ss_orbital(X, f).value
            for _ in range(20):
                g = random_sl2(CFG, rng)
                assert ss_orbital(ad(g, X), f).value == base

    def test_pullback_identity_integral_conjugators(self):
        # SL2(O) conjugators keep cells near the base vertex
        from germlab import GroupElement
        f = unit_ball(CFG) + 2 * indicator_lattice(CFG, BASE, 1)
        ks = [GroupElement.from_rationals(CFG, [[1, 2], [0, 1]]),
              GroupElement.from_rationals(CFG, [[1, 0], [3, 1]]),
              GroupElement.from_rationals(CFG, [[2, 1], [1, 1]])]
        for X in (M(5, 0, 0), M(0, 1, 2)):
            for g in ks:
                lhs = ss_orbital(ad(g, X), f).value
                rhs = ss_orbital(X, f.ad_pullback(g)).value
                assert lhs == rhs

    def test_pullback_identity_deep_conjugator_p3(self):
        cfg = FieldConfig(3)
        f = unit_ball(cfg)
        g = random_sl2(cfg, random.Random(5), size_bound=1)
        X = Sl2Element.from_rationals(cfg, 3, 0, 0)
        assert ss_orbital(ad(g, X), f).value == ss_orbital(X, f.ad_pullback(g)).value


class TestOracleTriangle:
    def test_brute_force_agreement(self):
        cases = []
        for cfg in (CFG, CFG3):
            ball = unit_ball(cfg)
            f1 = indicator_lattice(cfg, BASE, 1)
            fn = indicator_lattice(cfg, BASE, 2,
                                   center=Sl2Element.from_rationals(cfg, 0, 1, 0))
            cases += [
                (Sl2Element.from_rationals(cfg, 1, 0, 0), ball),
                (Sl2Element.from_rationals(cfg, cfg.p, 0, 0), ball),
                (Sl2Element.from_rationals(cfg, 1, 0, 0), f1),
                (Sl2Element.from_rationals(cfg, cfg.p, 0, 0), f1),
                (rep_elliptic(cfg, cfg.eps, tag=True), ball),
                (rep_elliptic(cfg, cfg.p, tag=True), ball),
                (rep_elliptic(cfg, cfg.eps * cfg.p, tag=True), f1),
                (rep_elliptic(cfg, cfg.eps * cfg.p**2, tag=True), fn),
                (REG_ONE, ball), (REG_PI, ball), (REG_EPS, f1), (ZERO_ORBIT, fn),
            ]
        assert len(cases) >= 20
        for target, f in cases:
            if isinstance(target, Sl2Element):
                eng = ss_orbital(target, f).value
            else:
                eng = nilpotent_orbital(target, f).value
            o = brute_force_cell_oracle(target, f)
            assert o.agrees_with(eng), (target, eng, o.value, o.error_bound)

    def test_anchor_values(self):
        assert brute_force_cell_oracle(M(1, 0, 0), unit_ball(CFG)).value == Fraction(6, 5)
        assert brute_force_cell_oracle(M(5, 0, 0), unit_ball(CFG)).value == 6
        assert brute_force_cell_oracle(REG_ONE, unit_ball(CFG)).value == Fraction(1, 2)

    def test_refinement_stability(self):
        f = indicator_lattice(CFG, BASE, 1)
        for target in (M(1, 0, 0), REG_ONE, rep_elliptic(CFG, 2, tag=True)):
            a = brute_force_cell_oracle(target, f, refine=1)
            b = brute_force_cell_oracle(target, f, refine=2)
            assert a.value == b.value or abs(a.value - b.value) <= a.error_bound

    def test_tree_oracle_calibration(self):
        rows, ok = tree_oracle_compare(CFG)
        assert ok
        assert len(rows) - 1 >= 20


class TestCertificates:
    def test_result_fields(self):
        res = ss_orbital(M(0, 1, 2), unit_ball(CFG))
        assert res.certificate
        assert res.normalization.startswith("p=5")
        d = res.to_json()
        assert set(d) >= {"value", "v0", "tail", "certificate", "normalization"}
