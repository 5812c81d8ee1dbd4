"""Derivative-free scalar maximization."""

import math

INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section_max(f, a, b, tol=1e-10, max_iter=500):
    """Maximizer of a unimodal ``f`` on [a, b], located to within ``tol``."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)
