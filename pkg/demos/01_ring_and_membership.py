"""Exact arithmetic in the power-law ring and the membership test.

The ring consists of finite sums c * t^p (1+t)^q on (0, infinity) (or
c * t^p (1-t)^q on (0, 1)) with rational exponents.  Every derivative,
product, and endpoint limit is computed exactly, which is what makes the
later operator calculations trustworthy.
"""

import math
from fractions import Fraction

from degcalc import RadialFunction, Weight, membership_order

F = Fraction


def main():
    f = RadialFunction.term(1, 2, -3) + RadialFunction.term(2, 1, -2)
    print("f          =", f.to_text())
    print("f'         =", f.derivative().to_text())
    print("f(1/t)     =", f.invert().to_text())
    print("f at 0     =", f.limit("zero"))
    print("f at inf   =", f.limit("far"))
    print()

    # Membership: f is smooth for the weight phi when every iterate
    # f, phi f', phi (phi f')', ... stays continuous up to both endpoints.
    phi = Weight.from_term(1, 1)   # the b-weight t
    for p in (F(1, 2), F(1, 4), F(-1, 2)):
        g = RadialFunction.term(1, p, -p)
        res = membership_order(g, phi, math.inf)
        print(f"t^{p}(1+t)^{-p} with phi = t:",
              "member" if res.is_member else
              f"fails at order {res.failure_order}")

    # A weight with a higher-order zero accepts fractional powers that the
    # b-weight also accepts, but degrades differently at infinity.
    phi2 = Weight(RadialFunction.term(1, 2, -1))
    g = RadialFunction.term(1, F(1, 3), F(-1, 3))
    print("t^{1/3}(1+t)^{-1/3} with phi = t^2/(1+t):",
          membership_order(g, phi2, math.inf).is_member)


if __name__ == "__main__":
    main()
