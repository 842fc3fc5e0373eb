"""Arbitrary-precision special functions: gamma, digamma, I0, K0, elliptic K.

All evaluators are implemented directly (Stirling series with recurrence
lifting for gamma/digamma, ascending/asymptotic series for the Bessel pair,
series/AGM for the complete elliptic integral) so that the rest of the
package does not depend on any external special-function code paths.
mpmath supplies only raw arithmetic, elementary functions and constants.

Conventions: ``elliptic_k(lam)`` is the complete elliptic integral of the
first kind as a function of lam = k^2 (the parameter, not the modulus), i.e.
elliptic_k(lam) = (pi/2) * 2F1(1/2, 1/2; 1; lam).
"""

from __future__ import annotations

import math
from fractions import Fraction

from mpmath import mp, mpf, mpc

from .errors import BranchError, DomainError, PoleError
from .mpcore import PrecisionContext

_bernoulli_cache: list[Fraction] = [Fraction(1)]


def bernoulli_frac(n: int) -> Fraction:
    """Exact Bernoulli number B_n (B_1 = -1/2 convention)."""
    while len(_bernoulli_cache) <= n:
        m = len(_bernoulli_cache)
        acc = Fraction(0)
        binom = 1
        for k in range(m):
            acc += binom * _bernoulli_cache[k]
            binom = binom * (m + 1 - k) // (k + 1)
        _bernoulli_cache.append(-acc / (m + 1))
    return _bernoulli_cache[n]


def is_nonpositive_int(a) -> bool:
    """Exact test for membership in Z_{<=0}; Fractions/ints only."""
    if isinstance(a, int):
        return a <= 0
    if isinstance(a, Fraction):
        return a.denominator == 1 and a <= 0
    return False


def pochhammer(a: Fraction, n: int) -> Fraction:
    """Rising factorial (a)_n in exact rationals."""
    acc = Fraction(1)
    for m in range(n):
        acc *= a + m
    return acc


def _to_mp(z):
    if isinstance(z, Fraction):
        return mpf(z.numerator) / z.denominator
    if isinstance(z, complex):
        return mpc(z.real, z.imag)
    return z if isinstance(z, (mpf, mpc)) else mpf(z)


def _loggamma_stirling(w, prec: int):
    """log Gamma(w) for Re(w) large enough for the Stirling tail at prec bits."""
    tol = mpf(2) ** (-(prec + 8))
    s = (w - mpf(1) / 2) * mp.log(w) - w + mp.log(2 * mp.pi) / 2
    w2 = w * w
    zpow = w
    prev = None
    for m in range(1, 4 * prec):
        b = bernoulli_frac(2 * m)
        term = (mpf(b.numerator) / b.denominator) / ((2 * m) * (2 * m - 1) * zpow)
        s += term
        at = abs(term)
        if at < tol * (1 + abs(s)):
            return s
        if prev is not None and at > prev:
            raise ArithmeticError("Stirling series diverging; shift too small")
        prev = at
        zpow *= w2
    raise ArithmeticError("Stirling series failed to converge")


def gamma(z, ctx: PrecisionContext):
    """Gamma(z) for complex z, poles at non-positive integers.

    Stirling asymptotic with recurrence lifting; reflection for Re z < 1/2.
    Rational z short-circuits pole detection exactly.
    """
    if isinstance(z, int):
        z = Fraction(z)
    if isinstance(z, Fraction):
        if is_nonpositive_int(z):
            raise PoleError(f"gamma pole at {z}")
        if z.denominator == 1 and z <= 40:
            return mpf_factorial(int(z) - 1, ctx)
    p = ctx.prec
    with mp.workprec(p + 24):
        w = _to_mp(z)
        if isinstance(w, mpc) and w.imag == 0:
            w = w.real
        if mp.re(w) < 0.5:
            # reflection: Gamma(z) = pi / (sin(pi z) Gamma(1-z))
            s = mp.sinpi(w)
            if s == 0:
                raise PoleError(f"gamma pole at {z}")
            val = mp.pi / (s * gamma_raw(1 - w, p + 24))
        else:
            val = gamma_raw(w, p + 24)
    with ctx.workprec():
        return +val


def gamma_raw(w, prec: int):
    """Gamma for Re(w) >= 1/2 at ``prec`` bits via shifted Stirling."""
    eta = max(12, int(math.ceil(0.22 * (prec + 10))))
    shift = max(0, int(math.ceil(eta - mp.re(w))))
    with mp.workprec(prec + 16 + max(0, shift.bit_length())):
        ws = w + shift
        lg = _loggamma_stirling(ws, prec + 16)
        # scale-aware guard for the exp of a large log
        extra = max(0, int(abs(lg)) .bit_length()) if abs(lg) > 1 else 0
        with mp.workprec(prec + 16 + extra):
            val = mp.exp(lg)
            for k in range(shift):
                val /= (w + k)
    return val


def mpf_factorial(n: int, ctx: PrecisionContext):
    with ctx.workprec():
        acc = mpf(1)
        for k in range(2, n + 1):
            acc *= k
        return acc


def gamma_of_frac(q: Fraction, ctx: PrecisionContext):
    """Gamma at an exact rational; exactness of the pole test guaranteed."""
    return gamma(Fraction(q), ctx)


def digamma(x, ctx: PrecisionContext):
    """psi^(0)(x) for real x, poles at non-positive integers."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction) and is_nonpositive_int(x):
        raise PoleError(f"digamma pole at {x}")
    p = ctx.prec
    with mp.workprec(p + 24):
        w = _to_mp(x)
        if w <= 0 and w == mp.floor(w):
            raise PoleError(f"digamma pole at {x}")
        if w < 0.5:
            # psi(x) = psi(1-x) - pi*cot(pi*x)
            val = _digamma_pos(1 - w, p) - mp.pi / mp.tan(mp.pi * w)
        else:
            val = _digamma_pos(w, p)
    with ctx.workprec():
        return +val


def _digamma_pos(w, prec: int):
    eta = max(12, int(math.ceil(0.22 * (prec + 10))))
    shift = max(0, int(math.ceil(eta - w)))
    with mp.workprec(prec + 24):
        ws = w + shift
        tol = mpf(2) ** (-(prec + 8))
        s = mp.log(ws) - 1 / (2 * ws)
        w2 = ws * ws
        zpow = w2
        for m in range(1, 4 * prec):
            b = bernoulli_frac(2 * m)
            term = (mpf(b.numerator) / b.denominator) / ((2 * m) * zpow)
            s -= term
            if abs(term) < tol * (1 + abs(s)):
                break
            zpow *= w2
        for k in range(shift):
            s -= 1 / (w + k)
    return s


def euler_gamma(ctx: PrecisionContext):
    with ctx.workprec():
        return +mp.euler


# ----------------------------------------------------------------------------
# Modified Bessel functions I0, K0 and their exponentially scaled variants.
# ----------------------------------------------------------------------------

def _crossover(prec: int) -> float:
    """Ascending/asymptotic switch point keeping both series in envelope."""
    return max(30.0, prec * math.log(2) / 2)


def _i0_ascending(t, prec: int):
    with mp.workprec(prec):
        tol = mpf(2) ** (-prec + 4)
        q = t * t / 4
        term = mpf(1)
        s = mpf(1)
        k = 1
        while True:
            term *= q / (k * k)
            s += term
            if term < tol * s:
                return s
            k += 1


def _i0_asym_scaled(t, prec: int):
    """e^{-t} I0(t) by the asymptotic series; valid for t above crossover."""
    with mp.workprec(prec):
        tol = mpf(2) ** (-prec + 4)
        term = mpf(1)
        s = mpf(1)
        k = 1
        while True:
            term *= mpf((2 * k - 1) ** 2) / (8 * k) / t
            if term >= s:
                raise DomainError("asymptotic I0 series outside its envelope")
            s += term
            if term < tol * s:
                break
            k += 1
        return s / mp.sqrt(2 * mp.pi * t)


def _k0_asym_scaled(t, prec: int):
    """e^{t} K0(t) by the asymptotic series; valid for t above crossover."""
    with mp.workprec(prec):
        tol = mpf(2) ** (-prec + 4)
        term = mpf(1)
        s = mpf(1)
        k = 1
        while True:
            term *= -mpf((2 * k - 1) ** 2) / (8 * k) / t
            if abs(term) >= abs(s):
                raise DomainError("asymptotic K0 series outside its envelope")
            s += term
            if abs(term) < tol * abs(s):
                break
            k += 1
        return s * mp.sqrt(mp.pi / (2 * t))


def _k0_log_series(t, prec: int):
    """K0 for small/moderate t; boosts precision against e^{2t} cancellation."""
    boost = int(math.ceil(2 * float(t) / math.log(2))) + 16
    with mp.workprec(prec + boost):
        i0 = _i0_ascending(t, prec + boost)
        tol = mpf(2) ** (-(prec + boost) + 4)
        q = t * t / 4
        term = mpf(1)
        h = mpf(0)
        s = mpf(0)
        k = 1
        while True:
            term *= q / (k * k)
            h += mpf(1) / k
            inc = term * h
            s += inc
            if inc < tol * (s + 1):
                break
            k += 1
        return -(mp.log(t / 2) + mp.euler) * i0 + s


def bessel_i0(t, ctx: PrecisionContext):
    """I0(t) for real t >= 0."""
    p = ctx.prec
    with mp.workprec(p + 16):
        t = _to_mp(t)
        if t < 0:
            raise DomainError("bessel_i0 requires t >= 0")
        if t == 0:
            return mpf(1)
        if t <= _crossover(p + 16):
            val = _i0_ascending(t, p + 16)
        else:
            val = _i0_asym_scaled(t, p + 16) * mp.exp(t)
    with ctx.workprec():
        return +val


def bessel_i0_scaled(t, ctx: PrecisionContext):
    """e^{-t} I0(t); safe for products with large t."""
    p = ctx.prec
    with mp.workprec(p + 16):
        t = _to_mp(t)
        if t < 0:
            raise DomainError("bessel_i0 requires t >= 0")
        if t == 0:
            return mpf(1)
        if t <= _crossover(p + 16):
            val = _i0_ascending(t, p + 16) * mp.exp(-t)
        else:
            val = _i0_asym_scaled(t, p + 16)
    with ctx.workprec():
        return +val


def bessel_k0(t, ctx: PrecisionContext):
    """K0(t) for real t > 0."""
    p = ctx.prec
    with mp.workprec(p + 16):
        t = _to_mp(t)
        if t <= 0:
            raise DomainError("bessel_k0 requires t > 0")
        if t <= _crossover(p + 16):
            val = _k0_log_series(t, p + 16)
        else:
            val = _k0_asym_scaled(t, p + 16) * mp.exp(-t)
    with ctx.workprec():
        return +val


def bessel_k0_scaled(t, ctx: PrecisionContext):
    """e^{t} K0(t); safe for products with large t."""
    p = ctx.prec
    with mp.workprec(p + 16):
        t = _to_mp(t)
        if t <= 0:
            raise DomainError("bessel_k0 requires t > 0")
        if t <= _crossover(p + 16):
            val = _k0_log_series(t, p + 16) * mp.exp(t)
        else:
            val = _k0_asym_scaled(t, p + 16)
    with ctx.workprec():
        return +val


# ----------------------------------------------------------------------------
# Complete elliptic integral of the first kind, parameter convention lam = k^2.
# ----------------------------------------------------------------------------

def elliptic_k(lam, ctx: PrecisionContext):
    """K as a function of lam = k^2: (pi/2) 2F1(1/2,1/2;1;lam).

    Principal branch; the ray lam in [1, inf) is the cut and raises
    BranchError.  Series for |lam| <= 0.8, complex AGM elsewhere with the
    branch rule |a_n - b_n| <= |a_n + b_n|.
    """
    p = ctx.prec
    with mp.workprec(p + 16):
        z = _to_mp(lam)
        if isinstance(z, mpc) and z.imag == 0:
            z = z.real
        if not isinstance(z, mpc) and z >= 1:
            raise BranchError("elliptic_k on the cut [1, inf)")
        if abs(z) <= mpf("0.8"):
            val = _elliptic_k_series(z, p + 16)
        else:
            val = _elliptic_k_agm(z, p + 16)
    with ctx.workprec():
        return +val


def _elliptic_k_series(z, prec: int):
    with mp.workprec(prec):
        tol = mpf(2) ** (-prec + 4)
        term = mpf(1) if not isinstance(z, mpc) else mpc(1)
        s = term
        k = 0
        while True:
            r = mpf(2 * k + 1) / (2 * k + 2)
            term = term * r * r * z
            s += term
            if abs(term) < tol * abs(s):
                return s * mp.pi / 2
            k += 1


def _elliptic_k_agm(z, prec: int):
    with mp.workprec(prec + 16):
        a = mpc(1) if isinstance(z, mpc) else mpf(1)
        b = mp.sqrt(1 - z)
        tol = mpf(2) ** (-prec)
        for _ in range(prec):
            an = (a + b) / 2
            bn = mp.sqrt(a * b)
            if abs(an - bn) > abs(an + bn):
                bn = -bn
            a, b = an, bn
            if abs(a - b) <= tol * abs(a):
                break
        return mp.pi / (2 * a)
