import random
from fractions import Fraction

import pytest

from germlab import (CosetCell, FieldConfig, LCFunction, OutsideDomain,
                     Sl2Element, cayley, depth_r_family, h_combination,
                     indicator, indicator_lattice, is_invariant_under,
                     lcfunction_from_json, lcfunction_to_json, make_vertex,
                     mp_lattice, phi_pullback_support, random_sl2, unit_ball)
from germlab.tree import BASE

CFG = FieldConfig(5)


def M(a, b, c, cfg=CFG):
    return Sl2Element.from_rationals(cfg, a, b, c)


def rand_point(rng, span=2):
    def r():
        return Fraction(rng.randint(-100, 100), 5 ** rng.randint(0, span))
    return M(r(), r(), r())


class TestIndicatorEvaluate:
    def test_unit_ball_at_unit(self):
        f = unit_ball(CFG)
        assert f.evaluate(M(1, 0, 0)) == 1

    def test_level_one_excludes_unit(self):
        f = indicator_lattice(CFG, BASE, 1)
        assert f.evaluate(M(1, 0, 0)) == 0
        assert f.evaluate(M(5, 0, 0)) == 1

    def test_center_always_inside(self):
        rng = random.Random(41)
        vs = [BASE, make_vertex(CFG, 1, 0), make_vertex(CFG, -1, 0)]
        for _ in range(100):
            Y = rand_point(rng)
            cell = CosetCell(Y, mp_lattice(CFG, rng.choice(vs), rng.randint(-1, 2)))
            assert indicator(CFG, cell).evaluate(Y) == 1

    def test_linearity(self):
        rng = random.Random(42)
        f = unit_ball(CFG)
        g = indicator_lattice(CFG, BASE, 1)
        for _ in range(100):
            a, b = Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-5, 5))
            X = rand_point(rng)
            h = a * f + b * g
            assert h.evaluate(X) == a * f.evaluate(X) + b * g.evaluate(X)


class TestDilate:
    def test_unit_ball_scaling(self):
        f = unit_ball(CFG).dilate(CFG.zeta**2)
        # f(X) = 1 iff p^2 X integral iff X in p^-2 sl2(O)
        assert f.evaluate(M(Fraction(1, 25), 0, 0)) == 1
        assert f.evaluate(M(Fraction(1, 125), 0, 0)) == 0

    def test_involution(self):
        f = indicator_lattice(CFG, make_vertex(CFG, 1, 0), 1)
        g = f.dilate(Fraction(5)).dilate(Fraction(1, 5))
        assert f.equals(g)

    def test_double_dilate(self):
        f = unit_ball(CFG)
        assert f.dilate(CFG.zeta**2).dilate(CFG.zeta**2).equals(f.dilate(CFG.zeta**4))

    def test_evaluate_identity(self):
        rng = random.Random(43)
        f = indicator_lattice(CFG, BASE, 1) + 2 * unit_ball(CFG)
        for _ in range(100):
            c = Fraction(5) ** rng.randint(-2, 2) * rng.choice([1, 2, 3, 4])
            X = rand_point(rng)
            assert f.dilate(c).evaluate(X) == f.evaluate(X.scale(c))


class TestCanonicalize:
    def test_preserves_evaluation(self):
        rng = random.Random(44)
        f = (unit_ball(CFG) + 3 * indicator_lattice(CFG, make_vertex(CFG, 1, 0), 1)
             - indicator_lattice(CFG, BASE, 1))
        g = f.canonicalize()
        for _ in range(1000):
            X = rand_point(rng)
            assert f.evaluate(X) == g.evaluate(X)

    def test_disjoint_cells(self):
        f = unit_ball(CFG) + indicator_lattice(CFG, BASE, 1)
        cells = f.canonical_cells()
        # disjoint standard cells: keys unique by construction of the dict
        assert all(v != 0 for v in cells.values())
        g = f.canonicalize()
        assert len(g.terms) == len(cells)


class TestDepthFamilyInvariance:
    def test_family_members_certified(self):
        pts = [BASE, make_vertex(CFG, 1, 0)]
        fam = depth_r_family(CFG, 0, [Sl2Element.zero(CFG), M(0, 1, 0)], pts)
        assert len(fam) == 4
        for f in fam:
            cell = f.terms[0][1]
            assert is_invariant_under(f, cell.lattice)
            assert f.proxy_depth() == 0

    def test_indicator_invariance_levels(self):
        f1 = indicator_lattice(CFG, BASE, 1)
        assert is_invariant_under(f1, mp_lattice(CFG, BASE, 1))
        assert not is_invariant_under(f1, mp_lattice(CFG, BASE, 0))

    def test_invariance_survives_combinations(self):
        rng = random.Random(45)
        L = mp_lattice(CFG, BASE, 1)
        fam = depth_r_family(CFG, 0, [Sl2Element.zero(CFG), M(0, 1, 0), M(0, 2, 0)],
                             [BASE])
        for _ in range(50):
            f = None
            for g in fam:
                c = Fraction(rng.randint(-3, 3))
                f = c * g if f is None else f + c * g
            assert is_invariant_under(f, L)

    def test_dilate_shifts_level_down(self):
        f = depth_r_family(CFG, 2, [Sl2Element.zero(CFG)], [BASE])[0]
        g = f.dilate(CFG.zeta**2)
        assert g.terms[0][1].level == 1
        assert is_invariant_under(g, mp_lattice(CFG, BASE, 1))

    def test_unit_dilation_preserves_level(self):
        f = depth_r_family(CFG, 1, [Sl2Element.zero(CFG)], [BASE])[0]
        g = f.dilate(Fraction(2))
        assert g.terms[0][1].level == 2
        assert g.proxy_depth() == f.proxy_depth()

    def test_support_bound_recorded(self):
        fam = depth_r_family(CFG, 0, [M(0, Fraction(1, 5), 0)], [BASE])
        assert fam[0].support_bound() == 1


class TestHCombination:
    def test_at_zero(self):
        f = unit_ball(CFG)
        h = h_combination(f, 2)
        assert h.evaluate(M(0, 0, 0)) == (25 - 1) * f.evaluate(M(0, 0, 0))

    def test_structure(self):
        f = unit_ball(CFG)
        h = h_combination(f, 2)
        X = M(Fraction(1, 25), 0, 0)
        assert h.evaluate(X) == 25 * f.evaluate(X) - f.evaluate(X.scale(25))

    def test_rejects_bad_dim(self):
        with pytest.raises(ValueError):
            h_combination(unit_ball(CFG), 1)


class TestPhiPullback:
    def test_wrapper_evaluates_through_cayley(self):
        rng = random.Random(46)
        f = indicator_lattice(CFG, BASE, 1, center=M(0, 5, 0))
        w = phi_pullback_support(f)
        for _ in range(100):
            X = M(5 * rng.randint(-4, 4), 5 * rng.randint(-4, 4), 5 * rng.randint(1, 4))
            assert w.evaluate(cayley(X)) == f.evaluate(X)

    def test_identity_to_value_at_zero(self):
        from germlab import GroupElement
        f = indicator_lattice(CFG, BASE, 1)
        w = phi_pullback_support(f)
        assert w.evaluate(GroupElement.identity(CFG)) == f.evaluate(M(0, 0, 0))

    def test_rejects_unit_support(self):
        with pytest.raises(OutsideDomain):
            phi_pullback_support(unit_ball(CFG))


class TestAdPullback:
    def test_transforms_evaluation(self):
        from germlab import ad
        rng = random.Random(47)
        f = unit_ball(CFG) - 2 * indicator_lattice(CFG, make_vertex(CFG, 1, 0), 1)
        for _ in range(30):
            g = random_sl2(CFG, rng)
            fg = f.ad_pullback(g)
            for _ in range(10):
                X = rand_point(rng)
                assert fg.evaluate(X) == f.evaluate(ad(g, X))


class TestJson:
    def test_roundtrip(self):
        f = (indicator_lattice(CFG, BASE, 1)
             + Fraction(1, 2) * indicator_lattice(CFG, make_vertex(CFG, 1, 0), 1,
                                                  center=M(0, 1, 0)))
        data = lcfunction_to_json(f)
        g = lcfunction_from_json(CFG, data)
        assert f.equals(g)
        assert all(set(d) == {"coeff", "center", "vertex", "level"} for d in data)
