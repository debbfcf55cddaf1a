#!/usr/bin/env python3
"""Tour of exact Q_p arithmetic: precision tracking, square classes, norms.

Run:  python3 demos/demo_padic_arithmetic.py
"""

from fractions import Fraction

from germlab import (FieldConfig, InsufficientPrecision, PadicScalar,
                     QuadExtDescriptor, SquareClass, padic_sqrt,
                     scalar_from_rational, square_class)

cfg = FieldConfig(5)
print(f"Field: Q_{cfg.p}, uniformizer zeta = {cfg.zeta}, "
      f"nonsquare unit eps = {cfg.eps}, working digits = {cfg.precision}")

# Exact scalars remember their rational value, so cancellation is exact.
x = scalar_from_rational(7, 10, cfg)
print(f"\n7/10 in Q_5:  valuation {x.valuation()},  digits {x.digits(6)}")
print("serialized:", x.serialize())

y = x - x
print("x - x is exact zero:", y.is_zero)

# Approximate scalars carry a digit window; arithmetic never inflates it.
a = PadicScalar.approx(cfg, 0, 1, 3)           # 1 + O(5^3)
b = PadicScalar.exact(cfg, -1 + 5**3 * 2)      # -1 + 2*5^3
try:
    a + b
except InsufficientPrecision as e:
    print("adding 1+O(5^3) to -1+2*5^3:", e)

# Square classes: the four-element group F*/(F*)^2.
for v in (4, 2, 5, 10, -1):
    print(f"square class of {v}:", square_class(scalar_from_rational(v, 1, cfg)).value)

# Hensel square roots with a canonical branch.
r = padic_sqrt(scalar_from_rational(6, 1, cfg))
print("\nsqrt(6) in Q_5:", r.serialize())
print("check (sqrt 6)^2 agrees with 6:", (r * r).agrees_with(scalar_from_rational(6, 1, cfg)))

# Norm groups of the three quadratic extensions.
for cls in (SquareClass.EPS, SquareClass.PI, SquareClass.EPSPI):
    ext = QuadExtDescriptor(cls)
    tag = "unramified" if not ext.ramified else "ramified"
    verdicts = {v: ext.is_norm_rational(Fraction(v), cfg) for v in (2, 4, 5, 10)}
    print(f"norms from the {tag} extension (disc {cls.value}):", verdicts)
