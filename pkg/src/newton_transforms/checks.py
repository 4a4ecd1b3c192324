"""Finite-difference validation of gradients and Hessians.

Central differences with step scaling 1 + ||x|| so relative accuracy holds
across benchmark scales (Goldstein-Price values span 1e6).
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, EvaluationError


def fd_gradient(value_fn, x, step_scale=1e-6):
    x = np.asarray(x, dtype=float)
    h = step_scale * (1.0 + np.linalg.norm(x))
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (value_fn(x + e) - value_fn(x - e)) / (2.0 * h)
    return g


def fd_hessian(gradient_fn, x, step_scale=1e-6):
    x = np.asarray(x, dtype=float)
    h = step_scale * (1.0 + np.linalg.norm(x))
    d = len(x)
    H = np.zeros((d, d))
    for i in range(d):
        e = np.zeros_like(x)
        e[i] = h
        H[:, i] = (gradient_fn(x + e) - gradient_fn(x - e)) / (2.0 * h)
    return 0.5 * (H + H.T)


def check_loss(loss, points, rtol_grad=1e-5, rtol_hess=1e-4, step_scale=1e-6):
    """Check analytic gradient/Hessian of a SmoothLoss against central
    differences at the given points; returns a list of failure messages.

    Points where the loss is not evaluable (kinks, domain edges) are skipped.
    """
    failures = []
    for x in points:
        try:
            f, g, H = loss.evaluate(x)
            gf = fd_gradient(lambda p: loss.evaluate(p)[0], x, step_scale)
            Hf = fd_hessian(lambda p: loss.evaluate(p)[1], x, step_scale)
        except (DomainError, EvaluationError):
            continue
        if not all(np.all(np.isfinite(a)) for a in (f, g, H, gf, Hf)):
            failures.append(f"{loss.name}: non-finite evaluation at {x}")
            continue
        gs = max(np.linalg.norm(g), np.linalg.norm(gf), 1e-8)
        hs = max(np.linalg.norm(H), np.linalg.norm(Hf), 1e-8)
        if np.linalg.norm(g - gf) > rtol_grad * gs:
            failures.append(f"{loss.name}: gradient mismatch at {x}: {g} vs FD {gf}")
        if np.linalg.norm(H - Hf) > rtol_hess * hs:
            failures.append(f"{loss.name}: Hessian mismatch at {x}")
    return failures


def check_transform(t, ys, rtol=1e-5, step_scale=1e-7):
    """Check phi' against FD of phi and phi'' against FD of phi' on samples."""
    failures = []
    for y in ys:
        if not (t.contains(y - 2 * step_scale * (1 + abs(y))) and t.contains(y + 2 * step_scale * (1 + abs(y)))):
            continue
        h = step_scale * (1.0 + abs(y))
        d1 = (t.phi(y + h) - t.phi(y - h)) / (2.0 * h)
        d2 = (t.phi_prime(y + h) - t.phi_prime(y - h)) / (2.0 * h)
        p1, p2 = t.phi_prime(y), t.phi_double_prime(y)
        if abs(p1 - d1) > rtol * max(abs(p1), abs(d1), 1e-8):
            failures.append(f"{t.name}: phi' mismatch at y={y}: {p1} vs FD {d1}")
        if abs(p2 - d2) > rtol * max(abs(p2), abs(d2), 1e-8):
            failures.append(f"{t.name}: phi'' mismatch at y={y}: {p2} vs FD {d2}")
    return failures
