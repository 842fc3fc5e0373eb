"""Double-exponential quadrature (tanh-sinh / exp-sinh) plus a low-precision
multidimensional integrator for sanity checks.

Integrands declare their endpoint behavior via :class:`Endpoint`; a cheap
probe validates the declaration before the high-precision run.  Nodes are
generated and integrands evaluated at roughly doubled precision so that
algebraic endpoint singularities down to x^(-1/2) cost no accuracy.

Integrand protocol: ``f(x, ictx)`` where ``ictx`` is the PrecisionContext the
engine evaluates at (its ``prec`` matches the ambient mpmath precision).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from mpmath import mp, mpf

from .errors import DomainError, NoConvergence
from .mpcore import PrecisionContext, digits_agreement

INF = mp.inf

SMOOTH = "smooth"
ALGEBRAIC = "algebraic"
LOGARITHMIC = "logarithmic"
EXP_DECAY = "exp_decay"
ALGEBRAIC_DECAY = "algebraic_decay"


@dataclass(frozen=True)
class Endpoint:
    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in (SMOOTH, ALGEBRAIC, LOGARITHMIC, EXP_DECAY,
                             ALGEBRAIC_DECAY):
            raise ValueError(f"unknown endpoint kind {self.kind!r}")
        if self.kind == ALGEBRAIC and (self.param is None or self.param <= -1):
            raise ValueError("algebraic endpoint needs exponent alpha > -1")
        if self.kind == EXP_DECAY and (self.param is None or self.param <= 0):
            raise ValueError("exp_decay endpoint needs rate c > 0")
        if self.kind == ALGEBRAIC_DECAY and (self.param is None or self.param <= 1):
            raise ValueError("algebraic_decay endpoint needs beta > 1")


def smooth() -> Endpoint:
    return Endpoint(SMOOTH)


def algebraic(alpha: float) -> Endpoint:
    return Endpoint(ALGEBRAIC, alpha)


def logarithmic() -> Endpoint:
    return Endpoint(LOGARITHMIC)


def exp_decay(c: float) -> Endpoint:
    return Endpoint(EXP_DECAY, c)


def algebraic_decay(beta: float) -> Endpoint:
    return Endpoint(ALGEBRAIC_DECAY, beta)


@dataclass(frozen=True)
class IntegrandSpec:
    """Pure integrand on (a, b) with declared endpoint classes."""

    f: Callable
    a: object
    b: object                      # mp.inf allowed
    left: Endpoint
    right: Endpoint

    def finite(self) -> bool:
        return self.b != INF


# ----------------------------------------------------------------------------
# Node caches.  Keyed by (rule, level, k, prec); immutable once written.
# ----------------------------------------------------------------------------

_ts_cache: dict = {}
_es_cache: dict = {}


def _ts_node(level: int, k: int, prec: int):
    """tanh-sinh node for u = k*2^-level, k > 0.

    Returns (delta, wcore): distance-to-endpoint factor delta = 1/(e^{2c}+1)
    with c = (pi/2) sinh(u), and wcore = (pi/2) cosh(u) sech^2(c).
    """
    key = (level, k, prec)
    node = _ts_cache.get(key)
    if node is None:
        with mp.workprec(prec):
            u = mpf(k) / (1 << level)
            c = mp.pi / 2 * mp.sinh(u)
            e2c = mp.exp(2 * c)
            delta = 1 / (e2c + 1)
            sech = 2 / (mp.exp(c) + mp.exp(-c))
            wcore = mp.pi / 2 * mp.cosh(u) * sech * sech
        node = (delta, wcore)
        _ts_cache[key] = node
    return node


def _es_node(level: int, k: int, prec: int):
    """exp-sinh node for u = k*2^-level (k any sign): (x, wcore) with
    x = exp((pi/2) sinh u) and wcore = x * (pi/2) cosh(u)."""
    key = (level, k, prec)
    node = _es_cache.get(key)
    if node is None:
        with mp.workprec(prec):
            u = mpf(k) / (1 << level)
            x = mp.exp(mp.pi / 2 * mp.sinh(u))
            wcore = x * mp.pi / 2 * mp.cosh(u)
        node = (x, wcore)
        _es_cache[key] = node
    return node


# ----------------------------------------------------------------------------
# Core summation.
# ----------------------------------------------------------------------------

_MAX_LEVEL = 12
_CONSEC_SMALL = 6


def _ts_level_sum(f, a, b, level: int, only_odd: bool, prec: int, tol):
    """Sum of weighted samples at one tanh-sinh level (trapezoid in u)."""
    with mp.workprec(prec):
        a = mpf(a) if not isinstance(a, mpf) else a
        b = mpf(b) if not isinstance(b, mpf) else b
        width = b - a
        mid = (a + b) / 2
        ictx = PrecisionContext(work_bits=max(64, prec - 16), guard_bits=16,
                                max_bits=max(prec, 1 << 16))
        total = mp.zero
        if not only_odd:
            # u = 0: x = mid, weight core = pi/2
            total += mp.pi / 2 * f(mid, ictx)
        k = 1
        step = 2 if only_odd else 1
        small = 0
        kmax = (1 << level) * 16
        while k <= kmax:
            delta, wcore = _ts_node(level, k, prec)
            xr = b - width * delta
            xl = a + width * delta
            if xr == b or xl == a:
                break
            term = wcore * (f(xr, ictx) + f(xl, ictx))
            total += term
            if abs(term) < tol:
                small += 1
                if small >= _CONSEC_SMALL:
                    break
            else:
                small = 0
            k += step
        else:
            raise NoConvergence("tanh-sinh truncation cap reached")
        return total * width / 2


def _es_level_sum(f, a, level: int, only_odd: bool, prec: int, tol):
    """Sum of weighted samples at one exp-sinh level on (a, inf)."""
    with mp.workprec(prec):
        a = mpf(a) if not isinstance(a, mpf) else a
        ictx = PrecisionContext(work_bits=max(64, prec - 16), guard_bits=16,
                                max_bits=max(prec, 1 << 16))
        total = mp.zero
        if not only_odd:
            x, wcore = _es_node(level, 0, prec)
            total += wcore * f(a + x, ictx)
        step = 2 if only_odd else 1
        kmax = (1 << level) * 16
        for direction in (+1, -1):
            k = 1
            small = 0
            while k <= kmax:
                x, wcore = _es_node(level, direction * k, prec)
                term = wcore * f(a + x, ictx)
                total += term
                if abs(term) < tol:
                    small += 1
                    if small >= _CONSEC_SMALL:
                        break
                else:
                    small = 0
                k += step
            else:
                raise NoConvergence("exp-sinh truncation cap reached")
        return total


def _de_levels(level_sum, target_digits: int, prec: int, scale_hint):
    """Level-doubling driver shared by both rules."""
    with mp.workprec(prec):
        hint = mpf(scale_hint) if scale_hint is not None else mpf(0)
        tol_digits = target_digits + 2
        results = []
        total = None
        for level in range(3, _MAX_LEVEL + 1):
            if total is None:
                total = level_sum(level, False) / (1 << level)
            else:
                total = total / 2 + level_sum(level, True) / (1 << level)
            results.append(total)
            if len(results) >= 2:
                err = abs(results[-1] - results[-2])
                scale = max(abs(total), hint, mpf(10) ** (-tol_digits))
                if err <= scale * mpf(10) ** (-tol_digits):
                    return total
        raise NoConvergence(
            f"no {target_digits}-digit level agreement by level {_MAX_LEVEL}")


# ----------------------------------------------------------------------------
# Endpoint-class probe.
# ----------------------------------------------------------------------------

def _probe_value(f, x):
    ictx = PrecisionContext(work_bits=80, guard_bits=16)
    with mp.workprec(96):
        return f(mpf(x), ictx)


def _check_singular_end(f, a, b, end: Endpoint, at_left: bool):
    """Rough log-slope test near a finite endpoint against the declared class."""
    with mp.workprec(96):
        width = (mpf(b) - mpf(a))
        ds = [width * mpf(10) ** (-e) for e in (3, 5, 7)]
        xs = [mpf(a) + d if at_left else mpf(b) - d for d in ds]
        try:
            vals = [abs(_probe_value(f, x)) for x in xs]
        except ZeroDivisionError:
            raise DomainError("integrand not finite near endpoint")
        if any(not mp.isfinite(v) for v in vals):
            raise DomainError("integrand not finite near endpoint")
        if all(v == 0 for v in vals):
            return
        eps = mpf(10) ** -60
        slope = float(mp.log(vals[2] + eps) - mp.log(vals[0] + eps)) / float(
            mp.log(ds[2]) - mp.log(ds[0]))
    if end.kind == ALGEBRAIC:
        if abs(slope - end.param) > 0.35:
            raise DomainError(
                f"declared algebraic({end.param}) but measured slope {slope:.3f}")
    elif end.kind in (SMOOTH, LOGARITHMIC):
        # smooth allows zeros of any polynomial order; log gives slope ~ 0^-
        if slope < -0.35:
            raise DomainError(
                f"declared {end.kind} but measured slope {slope:.3f}")


def _check_infinite_end(f, a, end: Endpoint):
    with mp.workprec(96):
        if end.kind == EXP_DECAY:
            t1 = mpf(a) + max(5.0, 10.0 / end.param)
            t2 = mpf(a) + 2 * max(5.0, 10.0 / end.param)
        else:
            t1, t2 = mpf(a) + 20, mpf(a) + 80
        v1, v2 = abs(_probe_value(f, t1)), abs(_probe_value(f, t2))
        if v1 == 0 and v2 == 0:
            return
        if v2 == 0:
            v2 = mpf(10) ** -80
        ratio = float(mp.log(v1 / v2))
    if end.kind == EXP_DECAY:
        expected = float(end.param * (t2 - t1))
        if not (0.4 * expected < ratio < 2.5 * expected + 5):
            raise DomainError(
                f"declared exp_decay({end.param}) but log-drop {ratio:.2f} "
                f"vs expected {expected:.2f}")
    elif end.kind == ALGEBRAIC_DECAY:
        slope = ratio / float(mp.log(t2 / t1))
        if abs(slope - end.param) > 0.75:
            raise DomainError(
                f"declared algebraic_decay({end.param}) but measured "
                f"decay power {slope:.2f}")
    else:
        raise DomainError(f"{end.kind} endpoint not valid at infinity")


def validate_spec(spec: IntegrandSpec):
    if spec.finite():
        _check_singular_end(spec.f, spec.a, spec.b, spec.left, at_left=True)
        _check_singular_end(spec.f, spec.a, spec.b, spec.right, at_left=False)
    else:
        _check_singular_end(spec.f, spec.a, mpf(spec.a) + 1, spec.left,
                            at_left=True)
        _check_infinite_end(spec.f, spec.a, spec.right)


# ----------------------------------------------------------------------------
# Public entry point.
# ----------------------------------------------------------------------------

def integrate_de(spec: IntegrandSpec, ctx: PrecisionContext,
                 target_digits: int | None = None,
                 scale_hint=None, probe: bool = True):
    """Integrate with level-doubling tanh-sinh / exp-sinh rules.

    algebraic_decay tails are first mapped by x = a + s/(1-s) to recover
    double-exponential endpoint behavior.  ``scale_hint`` supplies the scale
    for the convergence test when the integral itself (nearly) vanishes.
    """
    if target_digits is None:
        target_digits = ctx.digits
    if probe:
        validate_spec(spec)
    prec = 2 * (ctx.prec + 32)
    with mp.workprec(prec):
        tol_term = mpf(10) ** (-(target_digits + 6)) * (
            mpf(scale_hint) if scale_hint is not None else mpf(1))

        if spec.finite():
            def level_sum(level, only_odd, _f=spec.f, _a=spec.a, _b=spec.b):
                return _ts_level_sum(_f, _a, _b, level, only_odd, prec, tol_term)
            result = _de_levels(level_sum, target_digits, prec, scale_hint)
        elif spec.right.kind == EXP_DECAY:
            def level_sum(level, only_odd, _f=spec.f, _a=spec.a):
                return _es_level_sum(_f, _a, level, only_odd, prec, tol_term)
            result = _de_levels(level_sum, target_digits, prec, scale_hint)
        elif spec.right.kind == ALGEBRAIC_DECAY:
            f, a = spec.f, spec.a

            def g(s, ictx, _f=f, _a=a):
                d = 1 - s
                return _f(_a + s / d, ictx) / (d * d)

            def level_sum(level, only_odd):
                return _ts_level_sum(g, mpf(0), mpf(1), level, only_odd, prec,
                                     tol_term)
            result = _de_levels(level_sum, target_digits, prec, scale_hint)
        else:
            raise DomainError(
                f"cannot integrate to infinity with right class {spec.right.kind}")
    with ctx.workprec():
        return +result


# ----------------------------------------------------------------------------
# Low-precision multidimensional integrator (float arithmetic, numpy).
# ----------------------------------------------------------------------------

_gl_cache: dict = {}


def _gauss_nodes(n: int, kind: str, alpha: float = 0.0, beta: float = 0.0):
    key = (n, kind, alpha, beta)
    got = _gl_cache.get(key)
    if got is None:
        from scipy.special import roots_jacobi, roots_legendre
        if kind == "legendre":
            got = roots_legendre(n)
        else:
            got = roots_jacobi(n, alpha, beta)
        _gl_cache[key] = got
    return got


@dataclass(frozen=True)
class MultiDimResult:
    value: float
    error: float

    def __float__(self):
        return self.value


def integrate_multidim(f, box, target_digits: int = 4,
                       jacobi_weights=None, max_evals: int = 10 ** 7,
                       sizes=(24, 34, 48)) -> MultiDimResult:
    """Tensor Gauss rule estimate of a 3- or 4-dimensional integral.

    ``f`` maps broadcastable coordinate arrays to an array of values.
    ``jacobi_weights``, when given, lists per-axis (alpha, beta) exponents of
    an analytically factored weight (1-u)^alpha * (1+u)^beta on the mapped
    interval [-1, 1]; the Gauss-Jacobi rule absorbs those singular factors.
    Never used for headline digit targets; error is estimated from the last
    two tensor sizes.
    """
    dims = len(box)
    if dims not in (3, 4):
        raise DomainError("integrate_multidim supports dims 3 and 4 only")
    if target_digits > 6:
        raise DomainError("multidimensional route is capped at 6 digits")
    estimates = []
    for n in sizes:
        if n ** dims > max_evals:
            break
        axes_x, axes_w = [], []
        for d in range(dims):
            lo, hi = box[d]
            if jacobi_weights is not None and jacobi_weights[d] is not None:
                al, be = jacobi_weights[d]
                x, w = _gauss_nodes(n, "jacobi", al, be)
                # absorb the interval map into the weight: u in [-1,1] -> [lo,hi]
                half = (hi - lo) / 2.0
                w = w * half ** (1.0 + al + be)
            else:
                x, w = _gauss_nodes(n, "legendre")
                half = (hi - lo) / 2.0
                w = w * half
            axes_x.append(lo + (x + 1.0) * (hi - lo) / 2.0)
            axes_w.append(w)
        total = 0.0
        # loop the first axis, broadcast the rest (bounded memory)
        rest = np.ix_(*axes_x[1:])
        wrest = np.multiply.outer(axes_w[1], axes_w[2])
        if dims == 4:
            wrest = np.multiply.outer(wrest, axes_w[3])
        for i, x0 in enumerate(axes_x[0]):
            vals = f(x0, *rest)
            total += axes_w[0][i] * float(np.sum(vals * wrest))
        estimates.append(total)
    if len(estimates) < 2:
        raise NoConvergence("evaluation cap too small for two tensor sizes")
    err = abs(estimates[-1] - estimates[-2])
    value = estimates[-1]
    tol = 10.0 ** (-target_digits) * max(abs(value), 1e-30)
    if err > tol:
        raise NoConvergence(
            f"multidim estimate error {err:.2e} above 10^-{target_digits}")
    return MultiDimResult(value=value, error=err)
