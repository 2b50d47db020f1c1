"""Clamped-clamped Euler-Bernoulli beam eigenfunctions.

These are the 1D building blocks of the plate trial functions: each
satisfies zero deflection and zero slope at both ends, so their tensor
products satisfy the fully clamped plate boundary conditions.

The textbook form

    phi(x) = cosh(b x) - cos(b x) - sigma * (sinh(b x) - sin(b x))

is numerically useless beyond mode ~15: cosh(b x) grows like exp(lam)
while (1 - sigma) decays at the same rate, so the product loses all
significant digits and eventually overflows. Every evaluation here uses
an algebraically equivalent form in which all exponentials have
non-positive arguments, valid for any mode index in double precision.

Normalization matches the textbook form, for which
``integral(phi_i * phi_j, 0, L) = L * delta_ij``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.optimize import brentq


@lru_cache(maxsize=None)
def eigenvalue(index: int) -> float:
    """i-th positive root of cos(lam) * cosh(lam) = 1 (index starts at 1).

    Solved as cos(lam) - 1/cosh(lam) = 0, which stays bounded for large
    arguments. Roots approach (index + 1/2) * pi from alternating sides.
    """
    if index < 1:
        raise ValueError("mode index starts at 1")
    center = (index + 0.5) * np.pi
    f = lambda lam: np.cos(lam) - 1.0 / np.cosh(lam)
    return brentq(f, center - 0.3, center + 0.3, xtol=1e-15, rtol=8.9e-16)


def _pieces(lam: float, xi: np.ndarray):
    """Shared exponential/trig terms of the scaled mode function.

    All exp arguments are <= 0 for xi in [0, lam].
    """
    c, s = np.cos(lam), np.sin(lam)
    e_m = np.exp(-xi)                 # exp(-xi)
    e_p = np.exp(xi - lam)            # exp(xi - lam)
    e_p2 = np.exp(xi - 2.0 * lam)     # exp(xi - 2 lam)
    e_m2 = np.exp(-xi - lam)          # exp(-xi - lam)
    eL = np.exp(-lam)
    eL2 = np.exp(-2.0 * lam)
    return c, s, e_m, e_p, e_p2, e_m2, eL, eL2


def _denominator(lam: float) -> float:
    # (sinh(lam) - sin(lam)) scaled by 2 exp(-lam); order 1 for all modes
    return 1.0 - 2.0 * np.exp(-lam) * np.sin(lam) - np.exp(-2.0 * lam)


def evaluate(index: int, length: float, x, derivative_order: int = 0):
    """Mode function (or derivative) of the clamped-clamped beam.

    ``derivative_order`` may be 0, 1 or 2. ``x`` may be a scalar or
    array with 0 <= x <= length.
    """
    if derivative_order not in (0, 1, 2):
        raise ValueError("derivative_order > 2 is unsupported")
    x = np.asarray(x, dtype=float)
    if np.any(x < -1e-12 * length) or np.any(x > length * (1.0 + 1e-12)):
        raise ValueError("coordinate outside [0, length]")
    lam = eigenvalue(index)
    beta = lam / length
    xi = np.clip(x * beta, 0.0, lam)
    c, s, e_m, e_p, e_p2, e_m2, eL, eL2 = _pieces(lam, xi)
    if derivative_order == 0:
        n = (e_m - e_p2 + (c - s) * e_p - (c + s) * e_m2
             - (1.0 - eL2) * np.cos(xi) + (1.0 + eL2) * np.sin(xi)
             + 2.0 * eL * np.sin(lam - xi))
        scale = 1.0
    elif derivative_order == 1:
        n = (-e_m - e_p2 + (c - s) * e_p + (c + s) * e_m2
             + (1.0 - eL2) * np.sin(xi) + (1.0 + eL2) * np.cos(xi)
             - 2.0 * eL * np.cos(lam - xi))
        scale = beta
    else:
        n = (e_m - e_p2 + (c - s) * e_p - (c + s) * e_m2
             + (1.0 - eL2) * np.cos(xi) - (1.0 + eL2) * np.sin(xi)
             - 2.0 * eL * np.sin(lam - xi))
        scale = beta * beta
    return scale * n / _denominator(lam)


def integral(index: int, length: float, lo: float, hi: float) -> float:
    """Exact integral of the mode function over [lo, hi] within [0, length]."""
    lam = eigenvalue(index)
    beta = lam / length

    def antiderivative(xv):
        xi = np.clip(xv * beta, 0.0, lam)
        c, s, e_m, e_p, e_p2, e_m2, eL, eL2 = _pieces(lam, np.asarray(xi))
        return (-e_m - e_p2 + (c - s) * e_p + (c + s) * e_m2
                - (1.0 - eL2) * np.sin(xi) - (1.0 + eL2) * np.cos(xi)
                + 2.0 * eL * np.cos(lam - xi))

    return float(antiderivative(hi) - antiderivative(lo)) / (beta * _denominator(lam))


def eval_matrix(n_funcs: int, length: float, x, derivative_order: int = 0) -> np.ndarray:
    """Stack of the first ``n_funcs`` mode functions: shape (len(x), n_funcs)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((x.size, n_funcs))
    for i in range(n_funcs):
        out[:, i] = evaluate(i + 1, length, x, derivative_order)
    return out
