"""BFGS with a strong-Wolfe line search (Nocedal & Wright, Algorithms 3.5/3.6 and 6.1)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

FunGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass(frozen=True)
class BFGSOptions:
    gtol: float = 1e-8
    max_iter: int = 10000
    c1: float = 1e-4
    c2: float = 0.9
    max_line_search: int = 50
    # relative energy resolution; steps changing f by less are judged on slope alone
    f_noise_rel: float = 1e-13


@dataclass
class BFGSResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    iterations: int
    n_evals: int
    converged: bool
    message: str
    history: list[float] = field(default_factory=list)

    @property
    def grad_norm(self) -> float:
        return float(np.max(np.abs(self.grad), initial=0.0))


class LineSearchError(RuntimeError):
    pass


def _cubic_min(a, fa, da, b, fb, db):
    """Minimizer of the cubic through (a, fa, da) and (b, fb, db), or None."""
    if a == b:
        return None
    d1 = da + db - 3 * (fa - fb) / (a - b)
    disc = d1 * d1 - da * db
    if disc < 0:
        return None
    d2 = math.copysign(math.sqrt(disc), b - a)
    denom = db - da + 2 * d2
    if denom == 0:
        return None
    return b - (b - a) * (db + d2 - d1) / denom


def strong_wolfe(phi, f0, d0, alpha1, c1, c2, max_evals, f_noise=0.0):
    """Return (alpha, payload) satisfying the strong Wolfe conditions.

    ``phi(alpha)`` returns ``(f, slope, payload)``. A point whose value is
    within ``f_noise`` of f0 is also accepted when it meets the curvature
    condition, since sufficient decrease cannot be resolved there.
    """
    if d0 >= 0:
        raise LineSearchError("search direction is not a descent direction")
    evals = 0

    def approx_ok(f, d):
        return f <= f0 + f_noise and abs(d) <= -c2 * d0

    def zoom(lo, hi, f_lo, f_hi, d_lo, d_hi):
        nonlocal evals
        while evals < max_evals:
            width = hi - lo
            if abs(f_hi - f_lo) <= f_noise and d_lo * d_hi < 0:
                # values unresolved: secant on the slopes
                a = lo - d_lo * (hi - lo) / (d_hi - d_lo)
            else:
                a = _cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi)
            left, right = min(lo, hi), max(lo, hi)
            margin = 0.1 * abs(width)
            if a is None or not (left + margin <= a <= right - margin):
                a = lo + 0.5 * width
            if abs(width) <= 1e-16 * max(1.0, abs(a)):
                break
            f, d, payload = phi(a)
            evals += 1
            if approx_ok(f, d):
                return a, payload
            if abs(f - f_lo) <= f_noise:
                if d * (hi - lo) >= 0:
                    hi, f_hi, d_hi = a, f, d
                else:
                    lo, f_lo, d_lo = a, f, d
            elif f > f0 + c1 * a * d0 or f >= f_lo:
                hi, f_hi, d_hi = a, f, d
            else:
                if abs(d) <= -c2 * d0:
                    return a, payload
                if d * (hi - lo) >= 0:
                    hi, f_hi, d_hi = lo, f_lo, d_lo
                lo, f_lo, d_lo = a, f, d
        raise LineSearchError("zoom phase did not find a strong-Wolfe point")

    a_prev, f_prev, d_prev = 0.0, f0, d0
    a = alpha1
    while evals < max_evals:
        f, d, payload = phi(a)
        evals += 1
        if not math.isfinite(f):
            a = 0.5 * (a_prev + a)
            continue
        if approx_ok(f, d):
            return a, payload
        unresolved = abs(f - f_prev) <= f_noise
        if not unresolved and (f > f0 + c1 * a * d0 or (a_prev > 0 and f >= f_prev)):
            return zoom(a_prev, a, f_prev, f, d_prev, d)
        if abs(d) <= -c2 * d0:
            return a, payload
        if d >= 0:
            return zoom(a, a_prev, f, f_prev, d, d_prev)
        a_next = _cubic_min(a_prev, f_prev, d_prev, a, f, d)
        if a_next is None or not (1.1 * a <= a_next <= 10.0 * a):
            a_next = 2.0 * a
        a_prev, f_prev, d_prev = a, f, d
        a = a_next
    raise LineSearchError("bracketing phase exceeded its evaluation budget")


def minimize_bfgs(fun_grad: FunGrad, x0, options: BFGSOptions = BFGSOptions()) -> BFGSResult:
    x = np.array(x0, dtype=float)
    n = x.size
    n_evals = 0

    def counted(xa):
        nonlocal n_evals
        n_evals += 1
        return fun_grad(xa)

    f, g = counted(x)
    history = [f]
    hinv = np.eye(n)
    scaled = False
    for it in range(options.max_iter):
        if np.max(np.abs(g), initial=0.0) < options.gtol:
            return BFGSResult(x, f, g, it, n_evals, True, "gradient below gtol", history)
        p = -hinv @ g
        slope = float(g @ p)
        if slope >= 0:
            hinv = np.eye(n)
            p, slope = -g, -float(g @ g)
        alpha1 = 1.0 if it > 0 else min(1.0, 1.01 / math.sqrt(-slope))

        def phi(alpha, x=x, p=p):
            xa = x + alpha * p
            fa, ga = counted(xa)
            return fa, float(ga @ p), (xa, fa, ga)

        try:
            _, (x_new, f_new, g_new) = strong_wolfe(
                phi,
                f,
                slope,
                alpha1,
                options.c1,
                options.c2,
                options.max_line_search,
                options.f_noise_rel * max(1.0, abs(f)),
            )
        except LineSearchError as exc:
            return BFGSResult(x, f, g, it, n_evals, False, f"line search failed: {exc}", history)
        s = x_new - x
        y = g_new - g
        x, f, g = x_new, f_new, g_new
        history.append(f)
        sy = float(s @ y)
        if sy > 1e-300:
            if not scaled:
                hinv = (sy / float(y @ y)) * np.eye(n)
                scaled = True
            rho = 1.0 / sy
            hy = hinv @ y
            hinv = (
                hinv
                - rho * (np.outer(s, hy) + np.outer(hy, s))
                + (rho * rho * float(y @ hy) + rho) * np.outer(s, s)
            )
    converged = np.max(np.abs(g), initial=0.0) < options.gtol
    return BFGSResult(x, f, g, options.max_iter, n_evals, bool(converged), "max_iter reached", history)
