"""Dedekind eta, the weight-4 level-6 eta-quotient form, and its L-value.

The central quantity is 8 pi^2 L(f, 2) = 32 pi^4 int_0^inf f(iy) y dy for
f(z) = [eta(z) eta(2z) eta(3z) eta(6z)]^2.  The integral splits at a point
y0; the upper piece integrates the q-expansion termwise in closed form and
the lower piece maps onto the upper range through the Fricke involution
y -> 1/(6y), whose sign is measured, not assumed.
"""

from __future__ import annotations

import math
from functools import lru_cache

from mpmath import mp, mpf

from .errors import DomainError, FrickeInconsistent
from .mpcore import PrecisionContext


def eta(y, ctx: PrecisionContext):
    """Dedekind eta at z = i*y, y > 0: e^{-pi y/12} prod (1 - q^n), q = e^{-2 pi y}."""
    p = ctx.prec
    with mp.workprec(p + 16):
        yv = mpf(y)
        if yv <= 0:
            raise DomainError("eta requires y > 0")
        q = mp.exp(-2 * mp.pi * yv)
        nmax = int(math.ceil((p + 16) * math.log(2) / float(2 * mp.pi * yv))) + 2
        prod = mpf(1)
        qn = mpf(1)
        for _ in range(nmax):
            qn *= q
            prod *= 1 - qn
        val = mp.exp(-mp.pi * yv / 12) * prod
    with ctx.workprec():
        return +val


@lru_cache(maxsize=None)
def f46_q_coefficients(n_terms: int) -> tuple:
    """Integer q-expansion coefficients of [eta eta2 eta3 eta6]^2, from q^1.

    Computed by truncated polynomial products of the four Euler factors,
    entirely in exact integers.
    """
    # start with q * prod_n [(1-q^n)(1-q^2n)(1-q^3n)(1-q^6n)]^2
    size = n_terms + 1
    poly = [0] * size
    poly[0] = 1
    for mult in (1, 2, 3, 6):
        for _ in range(2):
            n = 1
            while n * mult < size:
                # multiply by (1 - q^(n*mult))
                shift = n * mult
                for i in range(size - 1, shift - 1, -1):
                    poly[i] -= poly[i - shift]
                n += 1
    # overall factor q: coefficient of q^k is poly[k-1]
    return tuple(poly[: n_terms])


def f46_eta_product(y, ctx: PrecisionContext):
    """f(iy) via the eta product."""
    with ctx.workprec():
        yv = mpf(y)
        vals = [eta(m * yv, ctx) for m in (1, 2, 3, 6)]
        prod = vals[0] * vals[1] * vals[2] * vals[3]
        return prod * prod


def f46_q_expansion(y, ctx: PrecisionContext, n_terms: int | None = None):
    """f(iy) by direct summation of the stored q-expansion."""
    p = ctx.prec
    with mp.workprec(p + 16):
        yv = mpf(y)
        if yv <= 0:
            raise DomainError("f46 requires y > 0")
        q = mp.exp(-2 * mp.pi * yv)
        if n_terms is None:
            n_terms = int(math.ceil((p + 16) * math.log(2)
                                    / float(2 * mp.pi * yv))) + 4
        coeffs = f46_q_coefficients(n_terms)
        qn = mpf(1)
        acc = mp.zero
        for k, a in enumerate(coeffs, start=1):
            qn *= q
            if a:
                acc += a * qn
        val = acc
    with ctx.workprec():
        return +val


def f46(y, ctx: PrecisionContext):
    """f(iy); eta product for small y, q-expansion once it converges fast."""
    with ctx.workprec():
        yv = mpf(y)
    if yv >= mpf(1) / mp.sqrt(6):
        return f46_q_expansion(yv, ctx)
    return f46_eta_product(yv, ctx)


def fricke_sign(ctx: PrecisionContext, target_digits: int = 20,
                probes=(mpf(1) / 2, mpf("0.9"), mpf("1.3"))) -> int:
    """Measured Fricke eigenvalue: f(i/(6y)) = eps * 36 y^4 f(iy).

    The probe must give the same unit value at every point; otherwise
    FrickeInconsistent is raised.
    """
    signs = []
    with ctx.workprec():
        tol = mpf(10) ** (-target_digits)
        for y in probes:
            yv = mpf(y)
            lhs = f46_eta_product(1 / (6 * yv), ctx)
            rhs = f46_eta_product(yv, ctx) * 36 * yv ** 4
            ratio = lhs / rhs
            if abs(ratio - 1) < tol:
                signs.append(1)
            elif abs(ratio + 1) < tol:
                signs.append(-1)
            else:
                raise FrickeInconsistent(
                    f"probe at y={y}: ratio {ratio} is not a unit")
    if len(set(signs)) != 1:
        raise FrickeInconsistent(f"probes disagree: {signs}")
    return signs[0]


def _upper_tail_integral(y0, n_terms: int, ctx: PrecisionContext):
    """int_{y0}^inf f(iy) y dy by termwise closed forms."""
    with ctx.workprec():
        coeffs = f46_q_coefficients(n_terms)
        acc = mp.zero
        y0 = mpf(y0)
        for k, a in enumerate(coeffs, start=1):
            if not a:
                continue
            lam = 2 * mp.pi * k
            acc += a * mp.exp(-lam * y0) * (y0 / lam + 1 / (lam * lam))
        return acc


def lvalue_f46(ctx: PrecisionContext, target_digits: int | None = None,
               y0=None):
    """8 pi^2 L(f, 2) = 32 pi^4 int_0^inf f(iy) y dy.

    Split at y0 (default 1/sqrt(6)); the lower piece maps to the upper range
    by the Fricke relation with the measured sign.
    """
    if target_digits is None:
        target_digits = ctx.digits
    p = ctx.prec
    with mp.workprec(p + 16):
        if y0 is None:
            y0 = 1 / mp.sqrt(6)
        y0 = mpf(y0)
        eps = fricke_sign(ctx, min(20, target_digits))
        # termwise tails need q^(n) below 2^-(p) at the smaller split point
        ysmall = min(y0, 1 / (6 * y0))
        n_terms = int(math.ceil((p + 32) * math.log(2)
                                / float(2 * mp.pi * ysmall))) + 8
        upper = _upper_tail_integral(y0, n_terms, ctx)
        lower_mapped = _upper_tail_integral(1 / (6 * y0), n_terms, ctx)
        val = 32 * mp.pi ** 4 * (upper + eps * lower_mapped)
    with ctx.workprec():
        return +val
