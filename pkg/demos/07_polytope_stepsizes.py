"""Why stepsizes near p-1 are optimal for polytope feasibility penalties.

f_p(x) = sum_i (<a_i, x> - b_i)_+^p behaves like (f_2)^{p/2}, and for the
polynomial-norm model the Newton update is exactly x+ = (1 - alpha/(p-1)) x,
so alpha = p-1 converges in one step. The sweep below reproduces the
best fixed stepsizes on a seeded random instance (20 halfspaces in R^10).
"""

import numpy as np

from newton_transforms import make_polynorm, make_polytope_instance
from newton_transforms.newton import ConstantSchedule, NewtonConfig, run_newton
from newton_transforms.scans import best_fixed_stepsize

rng = np.random.default_rng(0)
M = rng.standard_normal((4, 4))
A = M @ M.T + 4 * np.eye(4)
print("polynomial-norm model: one damped step from a random start")
for p in (2, 3, 4, 5):
    loss = make_polynorm(A, p)
    x0 = rng.standard_normal(4)
    tr = run_newton(loss, ConstantSchedule(p - 1.0), x0, NewtonConfig(max_iters=1))
    print(f"  p = {p}: alpha = {p - 1} lands at ||x|| = {np.linalg.norm(tr.final_x):.2e}")

print("\nseeded polytope instance, alpha grid 0.10 : 4.50 : 0.05")
alphas = np.round(np.arange(0.1, 4.50001, 0.05), 10)
for p in (2, 3, 4, 5):
    loss, x0 = make_polytope_instance(p, seed=1)
    res = best_fixed_stepsize(loss, x0, alphas)
    print(f"  p = {p}: best alpha = {res.best_alpha:.2f}  ({res.best_iterations} iterations)")
