"""Scalar search helpers: golden-section minimization and sign bisection.

Deterministic and derivative-free; every refinement stays inside the
bracket it was given, so callers can trust reported optima against their
coarse grids.
"""

import numpy as np

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_min(f, a, b, tol=1e-10, max_iter=200):
    """Minimize f on [a, b]; returns (x, f(x)).

    Assumes a single interior minimum in the bracket; with several, it
    converges to one of them.
    """
    if b < a:
        a, b = b, a
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol and it < max_iter:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        it += 1
    x = 0.5 * (a + b)
    return x, f(x)


def golden_max(f, a, b, tol=1e-10, max_iter=200):
    x, neg = golden_min(lambda t: -f(t), a, b, tol=tol, max_iter=max_iter)
    return x, -neg


def bisect_zero(f, a, b, tol=1e-9, max_iter=200):
    """Root of f on [a, b] where f(a) and f(b) have opposite signs."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise ValueError("bisection bracket does not change sign")
    it = 0
    while b - a > tol and it < max_iter:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b, fb = m, fm
        it += 1
    return 0.5 * (a + b)
