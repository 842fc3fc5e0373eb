"""Generalized hypergeometric series pFq with exact rational parameters.

Three evaluation regimes:

* ``pfq``      direct series for |z| < 1 (exact summation for terminating
               series with rational inputs),
* ``hyp2f1``   Gauss 2F1 on [0, 1) with the argument -> 1-z connection,
               including the logarithmic cases c - a - b in Z,
* ``pfq_unit`` unit argument, convergent for positive parametric excess,
               summed by direct terms plus two independent accelerations
               (Hurwitz-zeta tail fit and Levin-u) that must agree.

The acceleration engine works on generic term streams so the Meijer-G
residue series reuse it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import mpmath
from mpmath import mp, mpf

from .errors import (AccelerationDisagreement, DomainError, NoConvergence,
                     PoleError)
from .mpcore import PrecisionContext, digits_agreement
from . import specfun


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"parameter {x!r} must be an exact rational")


@dataclass(frozen=True)
class PFQSpec:
    """Upper/lower parameter lists (exact rationals) plus argument.

    Construction canonicalizes: common upper/lower parameters cancel exactly
    and both lists are sorted, so permuted specs evaluate bit-identically.
    """

    upper: tuple
    lower: tuple
    z: object = 1

    def __post_init__(self):
        up = sorted(_as_fraction(a) for a in self.upper)
        lo = sorted(_as_fraction(b) for b in self.lower)
        # exact cancellation of repeated parameters
        i = 0
        while i < len(up):
            a = up[i]
            if a in lo and not specfun.is_nonpositive_int(a):
                lo.remove(a)
                up.remove(a)
            else:
                i += 1
        for b in lo:
            if specfun.is_nonpositive_int(b):
                raise PoleError(f"lower parameter {b} in Z_<=0")
        object.__setattr__(self, "upper", tuple(up))
        object.__setattr__(self, "lower", tuple(lo))

    @property
    def sigma(self) -> Fraction:
        """Exact parametric excess sum(lower) - sum(upper)."""
        return sum(self.lower, Fraction(0)) - sum(self.upper, Fraction(0))

    @property
    def terminating_order(self) -> int | None:
        orders = [-int(a) for a in self.upper if specfun.is_nonpositive_int(a)]
        return min(orders) + 1 if orders else None   # number of terms

    def term_ratio(self, n: int) -> Fraction:
        """Exact t_{n+1}/t_n at unit argument."""
        num = Fraction(1)
        for a in self.upper:
            num *= (a + n)
        den = Fraction(n + 1)
        for b in self.lower:
            den *= (b + n)
        return num / den

    def head_length(self) -> int:
        """Index after which all terms share a fixed sign."""
        worst = 0
        for a in self.upper:
            if a < 0 and not specfun.is_nonpositive_int(a):
                worst = max(worst, int(math.ceil(-float(a))))
        for b in self.lower:
            if b < 0:
                worst = max(worst, int(math.ceil(-float(b))))
        return worst + 1


# ----------------------------------------------------------------------------
# Direct series (|z| < 1 or terminating).
# ----------------------------------------------------------------------------

def pfq_exact(spec: PFQSpec) -> Fraction:
    """Exact rational sum of a terminating series with rational argument."""
    n_terms = spec.terminating_order
    if n_terms is None:
        raise DomainError("pfq_exact requires a terminating series")
    z = _as_fraction(spec.z)
    total = Fraction(0)
    term = Fraction(1)
    for n in range(n_terms):
        total += term
        term *= spec.term_ratio(n) * z
    return total


def pfq(spec: PFQSpec, ctx: PrecisionContext):
    """Direct series; requires |z| < 1 unless terminating."""
    n_terms = spec.terminating_order
    if n_terms is not None and isinstance(spec.z, (int, Fraction)):
        val = pfq_exact(spec)
        with ctx.workprec():
            return mpf(val.numerator) / val.denominator
    p = ctx.prec + 16
    with mp.workprec(p):
        z = spec.z
        z = mpf(z.numerator) / z.denominator if isinstance(z, Fraction) else mpf(z)
        if n_terms is None and abs(z) >= 1:
            raise DomainError("pfq series requires |z| < 1")
        tol = mpf(2) ** (-p + 4)
        term = mpf(1)
        total = mpf(1)
        n = 0
        nmax = n_terms if n_terms is not None else 10 ** 7
        grew = 0
        while n + 1 < nmax:
            r = spec.term_ratio(n)
            new = term * r.numerator * z / r.denominator
            if abs(new) > abs(term):
                grew += 1
                if grew > 10_000 and abs(z) < 1:
                    raise NoConvergence("pfq terms failed to decrease")
            term = new
            total += term
            if abs(term) < tol * abs(total):
                break
            n += 1
        else:
            if n_terms is None:
                raise NoConvergence("pfq iteration cap reached")
    with ctx.workprec():
        return +total


# ----------------------------------------------------------------------------
# Gauss 2F1 on [0, 1).
# ----------------------------------------------------------------------------

def _series_2f1(a: Fraction, b: Fraction, c: Fraction, x, prec: int):
    with mp.workprec(prec):
        tol = mpf(2) ** (-prec + 4)
        term = mpf(1)
        total = mpf(1)
        n = 0
        while True:
            r = (a + n) * (b + n) / ((c + n) * (n + 1))
            term = term * r.numerator * x / r.denominator
            total += term
            if abs(term) < tol * (abs(total) + 1):
                return total
            n += 1
            if n > 8 * prec + 10_000:
                raise NoConvergence("2F1 series cap reached")


def hyp2f1(a, b, c, x, ctx: PrecisionContext):
    """2F1(a, b; c; x) for exact rational a, b, c and real x in [0, 1).

    Direct series for x <= 1/2; otherwise the connection to argument 1-x,
    with the psi/log form whenever c - a - b is an integer.
    """
    a, b, c = _as_fraction(a), _as_fraction(b), _as_fraction(c)
    if specfun.is_nonpositive_int(c):
        raise PoleError(f"2F1 lower parameter {c} in Z_<=0")
    p = ctx.prec + 24
    with mp.workprec(p):
        x = mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpf(x)
        if not (0 <= x < 1):
            raise DomainError("hyp2f1 requires x in [0, 1)")
        if specfun.is_nonpositive_int(a) or specfun.is_nonpositive_int(b):
            val = _terminating_2f1(a, b, c, x, p)
        elif x <= 0.5:
            val = _series_2f1(a, b, c, x, p)
        else:
            val = _connect_2f1(a, b, c, x, p)
    with ctx.workprec():
        return +val


def _terminating_2f1(a, b, c, x, prec):
    n_terms = min(-int(v) for v in (a, b) if specfun.is_nonpositive_int(v)) + 1
    with mp.workprec(prec):
        term = mpf(1)
        total = mpf(1)
        for n in range(n_terms - 1):
            r = (a + n) * (b + n) / ((c + n) * (n + 1))
            term = term * r.numerator * x / r.denominator
            total += term
        return total


def _connect_2f1(a: Fraction, b: Fraction, c: Fraction, x, prec: int):
    """Argument -> 1-x connection for x in (1/2, 1)."""
    m = c - a - b
    ictx = PrecisionContext(work_bits=max(64, prec), guard_bits=16)
    g = lambda q: specfun.gamma(q, ictx)
    w = 1 - x
    if m.denominator != 1:
        t1 = g(c) * g(m) / (g(c - a) * g(c - b)) * _series_2f1(a, b, 1 - m, w, prec)
        t2 = (g(c) * g(-m) / (g(a) * g(b)) * mp.power(w, m)
              * _series_2f1(c - a, c - b, 1 + m, w, prec))
        return t1 + t2
    mi = int(m)
    if mi < 0:
        # Euler transform lifts to the positive-integer case
        return mp.power(w, m) * _connect_2f1(c - a, c - b, c, x, prec)
    return _log_case_2f1(a, b, mi, w, prec, ictx)


def _log_case_2f1(a: Fraction, b: Fraction, m: int, w, prec: int,
                  ictx: PrecisionContext):
    """2F1(a, b; a+b+m; 1-w) for integer m >= 0, small w > 0."""
    with mp.workprec(prec):
        g = lambda q: specfun.gamma(q, ictx)
        psi = lambda q: specfun.digamma(q, ictx)
        logw = mp.log(w)
        tol = mpf(2) ** (-prec + 4)
        c = a + b + m
        gc = g(c)
        total = mp.zero
        if m > 0:
            # finite head: sum_{k<m} (a)_k (b)_k / (k! (1-m)_k) w^k
            head = mpf(1)
            term = mpf(1)
            for k in range(1, m):
                r = (a + k - 1) * (b + k - 1) / Fraction(k * (k - m))
                term = term * r.numerator * w / r.denominator
                head += term
            total += gc * g(m) / (g(a + m) * g(b + m)) * head
        # log series: -(gc/(G(a)G(b))) (-w)^m sum_k (a+m)_k (b+m)_k/(k!(k+m)!)
        #             * w^k [log w - psi(k+1) - psi(k+m+1) + psi(a+m+k) + psi(b+m+k)]
        pref = -gc / (g(a) * g(b)) * (-1) ** m * mp.power(w, m)
        fact_ratio = mpf(math.factorial(m))
        term = 1 / fact_ratio
        psi1 = psi(Fraction(1))
        psim1 = psi(Fraction(m + 1))
        psia = psi(a + m)
        psib = psi(b + m)
        s = mp.zero
        k = 0
        while True:
            bracket = logw - psi1 - psim1 + psia + psib
            inc = term * bracket
            s += inc
            if abs(inc) < tol * (abs(s) + 1) and k > 2:
                break
            r = (a + m + k) * (b + m + k) / Fraction((k + 1) * (k + 1 + m))
            term = term * r.numerator * w / r.denominator
            psi1 += mpf(1) / (k + 1)
            psim1 += mpf(1) / (k + 1 + m)
            da = a + m + k
            db = b + m + k
            psia += mpf(da.denominator) / da.numerator
            psib += mpf(db.denominator) / db.numerator
            k += 1
            if k > 8 * prec:
                raise NoConvergence("2F1 log-case series cap reached")
        return total + pref * s


# ----------------------------------------------------------------------------
# Generic accelerated summation for slowly convergent positive-excess series.
# ----------------------------------------------------------------------------

@dataclass
class TermStream:
    """Stream of series terms t_0, t_1, ... with known asymptotic decay.

    ``make_terms(prec)`` returns a generator of mpf terms at the given binary
    precision.  ``sigma`` is the exact decay exponent: t_n ~ n^-sigma *
    (c0 + c1/n + ...).  ``head`` bounds the pre-asymptotic/sign-irregular
    prefix.  ``label`` is used in error messages.
    """

    make_terms: Callable[[int], Iterator]
    sigma: Fraction
    head: int = 0
    label: str = "series"
    geometric_ratio: float = 1.0   # |t_{n+1}/t_n| limit; < 1 sums directly


def _pfq_unit_stream(spec: PFQSpec) -> TermStream:
    def make(prec: int):
        def gen():
            with mp.workprec(prec):
                t = mpf(1)
                n = 0
                while True:
                    yield t
                    r = spec.term_ratio(n)
                    t = t * r.numerator / r.denominator
                    n += 1
        return gen()
    return TermStream(make_terms=make, sigma=spec.sigma + 1,
                      head=spec.head_length(),
                      label=f"pFq{spec.upper}|{spec.lower}")


def _zeta_tail(samples, n_samples, big_n: int, sigma, prec: int):
    """Fit t_n ~ n^-sigma (c0 + c1/n + ... + cm/n^m); sum the fitted tail."""
    m = len(samples) - 1
    with mp.workprec(prec):
        sig = mpf(sigma.numerator) / sigma.denominator
        rows = []
        rhs = []
        for nj, tj in zip(n_samples, samples):
            y = mpf(big_n) / nj
            rows.append([y ** i for i in range(m + 1)])
            rhs.append(tj * mpf(nj) ** sig)
        sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
        tail = mp.zero
        for i in range(m + 1):
            ci = sol[i] * mpf(big_n) ** i
            tail += ci * mpmath.zeta(sig + i, big_n + 1)
        return tail


def _levin_u(partials, first_index: int, terms, prec: int):
    """Levin u-transform estimates over increasing order; returns the pair
    (best value, stabilization error estimate)."""
    with mp.workprec(prec):
        beta = 1
        npts = len(partials)
        omega = [(beta + first_index + j) * terms[j] for j in range(npts)]
        best = None
        best_err = mp.inf
        prev = None
        for k in range(3, npts - 1):
            num = mp.zero
            den = mp.zero
            binom = 1
            for j in range(k + 1):
                base = mpf(beta + first_index + j) ** (k - 1)
                if omega[j] == 0:
                    binom = binom * (k - j) // (j + 1)
                    continue
                contrib = ((-1) ** j) * binom * base / omega[j]
                num += contrib * partials[j]
                den += contrib
                binom = binom * (k - j) // (j + 1)
            if den == 0:
                continue
            est = num / den
            if prev is not None:
                err = abs(est - prev)
                if err < best_err:
                    best_err = err
                    best = est
            prev = est
        if best is None:
            raise NoConvergence("Levin-u produced no stable estimate")
        return best, best_err


def accelerated_sum(stream: TermStream, ctx: PrecisionContext,
                    target_digits: int, n_direct: int | None = None,
                    fit_order: int = 8):
    """Sum a positive-excess stream to ``target_digits``.

    Partial sum of N direct terms plus a Hurwitz-zeta tail from a fitted
    asymptotic expansion, cross-checked by Levin-u extrapolation of the
    partial sums; the two must agree or AccelerationDisagreement is raised.
    """
    if stream.sigma <= Fraction(1):
        raise DomainError(f"{stream.label}: needs decay exponent > 1")
    n0 = max(10_000, 50 * target_digits)
    attempts = 0
    while True:
        big_n = n0 * (2 ** attempts)
        p = ctx.prec + 48
        with mp.workprec(p):
            sample_idx = sorted({big_n - j * (big_n // 20)
                                 for j in range(fit_order + 1)})
            total = mp.zero
            samples = {}
            gen = stream.make_terms(p)
            for n in range(big_n + 1):
                t = next(gen)
                total += t
                if n in sample_idx:
                    samples[n] = t
            tail = _zeta_tail([samples[n] for n in sample_idx], sample_idx,
                              big_n, stream.sigma, p)
            zeta_val = total + tail

            # independent route: Levin-u on early partial sums
            k_levin = min(140, 24 + 6 * target_digits)
            first = max(16, stream.head + 4)
            p_lev = ctx.prec + 48 + 4 * k_levin
            with mp.workprec(p_lev):
                gen2 = stream.make_terms(p_lev)
                run = mp.zero
                partials = []
                terms_win = []
                for n in range(first + k_levin + 2):
                    t = next(gen2)
                    run += t
                    if n >= first:
                        partials.append(run)
                        terms_win.append(t)
                levin_val, _ = _levin_u(partials, first, terms_win, p_lev)

        agreed = digits_agreement(zeta_val, levin_val)
        if agreed >= min(target_digits, int((p - 40) * 0.301)):
            with ctx.workprec():
                return +zeta_val
        attempts += 1
        if attempts > 2:
            raise AccelerationDisagreement(
                f"{stream.label}: zeta-tail {mpmath.nstr(zeta_val, 30)} vs "
                f"Levin-u {mpmath.nstr(levin_val, 30)} agree only to "
                f"{agreed} digits (target {target_digits})")


def pfq_unit(spec: PFQSpec, ctx: PrecisionContext,
             target_digits: int | None = None):
    """pFq at unit argument via dual-method accelerated summation."""
    if target_digits is None:
        target_digits = ctx.digits
    if spec.terminating_order is not None:
        with ctx.workprec():
            val = pfq_exact(PFQSpec(spec.upper, spec.lower, Fraction(1)))
            return mpf(val.numerator) / val.denominator
    if spec.sigma <= 0:
        raise DomainError(f"pfq_unit requires positive excess, got {spec.sigma}")
    return accelerated_sum(_pfq_unit_stream(spec), ctx, target_digits)
