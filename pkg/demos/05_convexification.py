"""Convexifying a pseudoconvex loss without moving its minimizer.

f(x) = ln(1+x^2) is concave for |x| > 1. The pointwise coefficient r(x) from
the bordered-Hessian minors tells how much gradient outer product must be
added to restore positive curvature; its maximum c over the sublevel set of
the start gives the exponential convexifier phi(y) = (e^{cy} - 1)/c, and the
transformed curvature f'' + c f'^2 is then nonnegative on the whole segment.
"""

import numpy as np

from newton_transforms import as_1d_loss, make_radial
from newton_transforms.convexify import (
    check_pseudoconvex,
    compact_constant,
    exp_convexifier,
    schaible_r,
    verify_convexified,
)

loss = as_1d_loss(make_radial("cauchy"))

report = check_pseudoconvex(loss, ([-3.0], [3.0]), n_samples=400)
print(f"pseudoconvexity certificate on [-3, 3]: {'clean' if report.ok else report.violations[:2]}")

for x in (0.5, 1.0, 1.5, 2.0):
    print(f"r({x:3.1f}) strict = {schaible_r(loss, [x], 'strict'):10.4f}   "
          f"general = {schaible_r(loss, [x], 'general'):8.4f}")

grid = np.arange(-2.0, 2.0 + 1e-9, 1e-3).reshape(-1, 1)
c = compact_constant(loss, [2.0], grid)
rep = verify_convexified(loss, exp_convexifier(c, 0.0), grid)
print(f"\ncompact-set constant on the f(2)-sublevel grid: c = {c:.4g}")
print(f"min transformed curvature over [-2, 2]: {rep.min_eig:.6f} (threshold {rep.threshold:.2e})")
print("every grid point is convex after the transform" if rep.passed else "FAILED")

# The counterexample |1+(x-1)^5| cannot be convexified by any monotone map:
# its gradient vanishes at x = 1 although the minimum sits at x = 0.
from newton_transforms import make_counterexample
from newton_transforms.transforms import make_table1

counter = make_counterexample()
cgrid = (np.arange(-0.5, 1.5, 1e-3) + 5e-4).reshape(-1, 1)
for t in (make_table1("exponential", a=1.0), make_table1("polynomial", r=3.0)):
    bad = verify_convexified(counter, t, cgrid)
    print(f"counterexample with {t.name}: min curvature {bad.min_eig:.4f} (stays negative)")
