"""Grid experiments: sign-flip region maps, convergence-neighborhood maps,
and the fixed-stepsize sweep for the polytope feasibility observation.

Cells evaluate at grid nodes; per-cell failures are recorded as error cells,
never raised. Output ordering is by cell index, so identical configurations
produce byte-identical CSV files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DomainError, EvaluationError, InputError
from .linalg import dual_norm_sq, pinv_solve, symmetrize
from .newton import ConstantSchedule, NewtonConfig, run_newton
from .transforms import compose, scaling_factor

#: |scaling factor| at or below this is recorded as sign 0 and excluded from
#: cross-validation (the transformed Hessian is near-singular along grad f).
SIGN_TOL = 1e-12


@dataclass
class GridScan:
    """Rectangular grid of per-cell outcomes.

    kind is "sign" (scaling_sign meaningful) or "convergence" (converged /
    iterations / final_value meaningful). 1D grids carry y_range = None.
    """

    kind: str
    xs: np.ndarray
    ys: Optional[np.ndarray]
    scaling_sign: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray
    final_value: np.ndarray
    error: np.ndarray
    cross_check_mismatches: int = 0
    cross_check_cells: int = 0

    @property
    def shape(self):
        return self.scaling_sign.shape

    def write_csv(self, path):
        value_col = "scaling_sign" if self.kind == "sign" else "converged"
        ys = self.ys if self.ys is not None else np.array([0.0])
        with open(path, "w", newline="") as fh:
            fh.write(f"ix,iy,x,y,{value_col},iterations,final_value,error\n")
            for ix, x in enumerate(self.xs):
                for iy, y in enumerate(ys):
                    val = self.scaling_sign[ix, iy] if self.kind == "sign" else int(self.converged[ix, iy])
                    fh.write(
                        f"{ix},{iy},{format(float(x), '.17g')},{format(float(y), '.17g')},"
                        f"{val},{self.iterations[ix, iy]},{format(float(self.final_value[ix, iy]), '.17g')},"
                        f"{int(self.error[ix, iy])}\n"
                    )


def grid_axes(x_range, y_range=None):
    """(lo, hi, n) tuples to node arrays."""
    def axis(rng):
        lo, hi, n = rng
        if n < 1 or not (hi > lo):
            raise InputError(f"bad grid range {rng}")
        return np.linspace(lo, hi, int(n))

    return axis(x_range), None if y_range is None else axis(y_range)


def _empty(kind, xs, ys):
    shape = (len(xs), 1 if ys is None else len(ys))
    return GridScan(
        kind=kind,
        xs=xs,
        ys=ys,
        scaling_sign=np.zeros(shape, dtype=np.int8),
        converged=np.zeros(shape, dtype=bool),
        iterations=np.zeros(shape, dtype=np.int32),
        final_value=np.full(shape, np.nan),
        error=np.zeros(shape, dtype=bool),
    )


def _points(xs, ys):
    if ys is None:
        for ix, x in enumerate(xs):
            yield ix, 0, np.array([x])
    else:
        for ix, x in enumerate(xs):
            for iy, y in enumerate(ys):
                yield ix, iy, np.array([x, y])


def scan_sign_flip(loss, t, x_range, y_range=None, cfg=None, cross_check_fraction=0.01, seed=0):
    """Sign of the stepsize scaling factor per grid cell.

    A random ~1% of valid cells is cross-validated by comparing the sign of
    <Newton step on f, Newton step on phi(f)> from actual pseudoinverse
    solves; mismatches are counted on the result.
    """
    cfg = cfg or NewtonConfig()
    xs, ys = grid_axes(x_range, y_range)
    scan = _empty("sign", xs, ys)
    rng = np.random.default_rng(seed)
    check_cells = []

    for ix, iy, x in _points(xs, ys):
        try:
            f, g, H = loss.evaluate(x)
            H = symmetrize(H)
            q = dual_norm_sq(H, g, cfg.pinv_rel_tol).value
            s = scaling_factor(t, f, q)
        except (DomainError, EvaluationError):
            scan.error[ix, iy] = True
            continue
        scan.final_value[ix, iy] = f
        scan.scaling_sign[ix, iy] = 0 if abs(s) <= SIGN_TOL else (1 if s > 0 else -1)
        if abs(s) > 1e-6 and rng.uniform() < cross_check_fraction:
            check_cells.append((ix, iy, x, f, g, H, s))

    L = compose(loss, t)
    for ix, iy, x, f, g, H, s in check_cells:
        try:
            _, gL, HL = L.evaluate(x)
        except (DomainError, EvaluationError):
            continue
        step_f = pinv_solve(H, g, cfg.pinv_rel_tol)
        step_L = pinv_solve(symmetrize(HL), gL, cfg.pinv_rel_tol)
        scan.cross_check_cells += 1
        if np.sign(float(step_f @ step_L)) != np.sign(s):
            scan.cross_check_mismatches += 1
    return scan


def scan_convergence(loss, t, x_range, y_range=None, cfg=None, radius_tol=1e-6):
    """Unit-stepsize Newton run per cell (on phi(f) when a transform is given);
    a cell converged iff some iterate came within radius_tol of the base
    loss's known minimizer.

    Convergence here is purely distance-based, so the per-cell runs stop on
    iterate distance (xtol = radius_tol), not on gradient size: transformed
    losses can have vanishing gradients far outside the radius_tol ball.
    """
    if loss.minimizer is None:
        raise InputError("scan_convergence needs a loss with known minimizer")
    cfg = cfg or NewtonConfig()
    run_cfg = NewtonConfig(max_iters=cfg.max_iters, gtol=1e-300, xtol=radius_tol,
                           divergence_radius=cfg.divergence_radius, pinv_rel_tol=cfg.pinv_rel_tol)
    xs, ys = grid_axes(x_range, y_range)
    scan = _empty("convergence", xs, ys)
    driven = loss if t is None else compose(loss, t)
    xstar = np.asarray(loss.minimizer, dtype=float)

    for ix, iy, x in _points(xs, ys):
        tr = run_newton(driven, ConstantSchedule(1.0), x, run_cfg)
        dists = [np.linalg.norm(xk - xstar) for xk in tr.xs if np.all(np.isfinite(xk))]
        scan.converged[ix, iy] = bool(dists and min(dists) <= radius_tol)
        scan.iterations[ix, iy] = tr.iterations
        finite_vals = [v for v in tr.values if np.isfinite(v)]
        scan.final_value[ix, iy] = finite_vals[-1] if finite_vals else np.nan
        scan.error[ix, iy] = tr.termination == "domain_error"
    return scan


@dataclass
class SweepResult:
    best_alpha: float
    best_iterations: int
    rows: List[Tuple[float, int, float, bool]] = field(default_factory=list)  # alpha, iters, grad, converged

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("alpha,iterations,final_grad_norm,converged\n")
            for alpha, iters, gn, ok in self.rows:
                fh.write(f"{format(alpha, '.17g')},{iters},{format(gn, '.17g')},{int(ok)}\n")


def best_fixed_stepsize(loss, x0, alphas, cfg=None):
    """Run Newton per stepsize and pick the fastest-converging one.

    Ranking: converged before non-converged, then fewer iterations, then
    smaller final gradient norm, then smaller alpha.
    """
    alphas = list(alphas)
    if not alphas:
        raise InputError("alphas must be non-empty")
    cfg = cfg or NewtonConfig()
    result = SweepResult(best_alpha=np.nan, best_iterations=-1)
    best_key = None
    for alpha in alphas:
        tr = run_newton(loss, ConstantSchedule(alpha), x0, cfg)
        ok = tr.termination == "converged"
        gn = tr.grad_norms[-1] if np.isfinite(tr.grad_norms[-1]) else np.inf
        result.rows.append((float(alpha), tr.iterations, float(gn), ok))
        key = (0 if ok else 1, tr.iterations if ok else np.inf, gn, float(alpha))
        if best_key is None or key < best_key:
            best_key = key
            result.best_alpha = float(alpha)
            result.best_iterations = tr.iterations
    return result
