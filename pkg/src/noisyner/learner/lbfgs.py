"""Limited-memory BFGS minimization with a backtracking Armijo line search."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class LBFGSResult:
    x: np.ndarray
    f: float
    iterations: int
    converged: bool
    message: str
    history: list = field(default_factory=list)   # f after each accepted step, starting with f(x0)


def two_loop(g, s_hist, y_hist):
    """Approximate H^{-1} g from the stored (s, y) pairs, oldest first."""
    q = g.copy()
    rhos = [1.0 / float(y @ s) for s, y in zip(s_hist, y_hist)]
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rhos)):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    if s_hist:
        s, y = s_hist[-1], y_hist[-1]
        q *= float(s @ y) / float(y @ y)
    for s, y, rho, a in zip(s_hist, y_hist, rhos, reversed(alphas)):
        b = rho * float(y @ q)
        q += (a - b) * s
    return q


def minimize(fun, x0, memory=10, max_iterations=200, grad_tolerance=1e-5,
             c1=1e-4, shrink=0.5, max_backtracks=60) -> LBFGSResult:
    """
    Minimize fun(x) -> (f, grad).

    Stops when ||grad|| / max(1, ||x||) < grad_tolerance or after
    max_iterations accepted steps. If the line search cannot satisfy the
    Armijo condition the best point so far is returned with a warning.
    """
    x = np.array(x0, dtype=float)
    f, g = fun(x)
    history = [f]
    s_hist, y_hist = deque(maxlen=memory), deque(maxlen=memory)

    def small(g, x):
        return np.linalg.norm(g) / max(1.0, np.linalg.norm(x)) < grad_tolerance

    if small(g, x):
        return LBFGSResult(x, f, 0, True, "gradient below tolerance", history)

    for it in range(1, max_iterations + 1):
        d = -two_loop(g, list(s_hist), list(y_hist))
        slope = float(g @ d)
        if not slope < 0:
            s_hist.clear()
            y_hist.clear()
            d = -g
            slope = float(g @ d)
        step = 1.0 if s_hist else min(1.0, 1.0 / np.linalg.norm(g))
        for _ in range(max_backtracks):
            x_new = x + step * d
            f_new, g_new = fun(x_new)
            if np.isfinite(f_new) and f_new <= f + c1 * step * slope:
                break
            step *= shrink
        else:
            logger.warning("line search failed at iteration %d; keeping best weights", it)
            return LBFGSResult(x, f, it - 1, False, "line search failed", history)
        s = x_new - x
        y = g_new - g
        if float(s @ y) > 1e-10 * float(y @ y):
            s_hist.append(s)
            y_hist.append(y)
        x, f, g = x_new, f_new, g_new
        history.append(f)
        if small(g, x):
            return LBFGSResult(x, f, it, True, "gradient below tolerance", history)
    return LBFGSResult(x, f, max_iterations, False, "iteration limit reached", history)
