"""Flow groupoids, deformation charts, and the boundary cocycles.

Arrows (x, t) act by the time-t flow from the source point x; composition
requires the range of one arrow to match the source of the next.  The zeta
cocycles extend the scaling ratio rho(flowed point)/rho(point) continuously
to the boundary, where they become pure exponentials.
"""

import math
from fractions import Fraction

from degcalc import (Flow, GPhiElement, HPsiElement, RadialFunction, Weight,
                     gphi_compose, hpsi_action, hpsi_chart, zeta_cocycle)

F = Fraction


def main():
    fl = Flow(Weight.from_term(1, 1))
    g = GPhiElement(4.0, math.log(3))
    h = GPhiElement(2.0, math.log(2))
    print("h: 2 -> ", h.r(fl), ", g: 4 ->", g.r(fl))
    gh = gphi_compose(g, h, fl)
    print("g o h =", gh, " range", gh.r(fl))

    # zeta cocycles: interior quotient and its boundary extension
    el = GPhiElement(0.01, 0.5)
    print("zeta_0 near the origin:", zeta_cocycle(el, "zero", fl),
          " boundary value:", zeta_cocycle(GPhiElement(0.0, 0.5), "zero", fl),
          " (= e^{-1/2} =", math.exp(-0.5), ")")

    # a weight vanishing to higher order freezes the boundary
    fl2 = Flow(Weight(RadialFunction.term(1, 2, -1)))
    print("zeta_0 at the boundary for phi = t^2/(1+t):",
          zeta_cocycle(GPhiElement(0.0, 0.5), "zero", fl2))

    # angular deformation chart: interior arrows shrink onto tangent vectors
    psi = Weight.from_term(1, F(1, 2))
    for s in (0.5, 1e-2, 1e-4, 0.0):
        el = hpsi_chart(0.7, s, psi)
        kind = "tangent" if el.boundary else "interior"
        print(f"chart(w=0.7, s={s}): {kind}", el)

    # the flow acts on boundary tangents by exponential scaling
    tangent = HPsiElement.tangent(0.0, 1.0)
    moved = hpsi_action(1.0, tangent, fl, psi)
    print("flow for time 1 scales the tangent to", moved.v,
          " (= e^{-1/2})")


if __name__ == "__main__":
    main()
