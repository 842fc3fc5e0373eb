"""Bessel moments, Watson lattice integrals and related parametric integrals.

Every integrand is assembled from exponentially scaled Bessel factors
(e^-t I0, e^t K0) with the net decay rate declared to the quadrature engine,
so the double-exponential rules see honest endpoint classes.  Regularized
moments switch to exact asymptotic product series in the far tail, where the
direct bracket would cancel catastrophically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf, mpc

from .errors import DivergentMoment, DomainError, ResidualImaginary, StencilError
from .mpcore import PrecisionContext
from . import specfun, quad, meijer
from .hyper import hyp2f1

ONE = Fraction(1)

REGULARIZERS = ("R_QUARTER_T2", "R_QUARTER_T2_SIXTEENTH_T4")


@dataclass(frozen=True)
class MomentSpec:
    """IKM-type moment: int_0^inf I0^a K0^b t^n * weight(t^2) dt.

    ``weight`` lists exact rational coefficients of powers of t^2 (constant
    first).  ``regularizer`` selects one of the two catalogued subtractions,
    which apply to the a = b = 3 family written as
    I0 K0 (I0^2 K0^2 - R(t)) t^n.
    """
    a: int
    b: int
    n: int
    weight: tuple = (ONE,)
    regularizer: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "weight",
                           tuple(Fraction(c) for c in self.weight))
        if self.b <= self.a:
            raise DivergentMoment("need more K0 than I0 factors")
        if self.n < 0:
            raise DivergentMoment("need n >= 0")
        if self.regularizer is not None:
            if self.regularizer not in REGULARIZERS:
                raise DomainError(f"unknown regularizer {self.regularizer}")
            if (self.a, self.b) != (3, 3):
                raise DomainError("regularized moments use the (3,3) family")


@dataclass(frozen=True)
class WatsonSpec:
    """d-dimensional simple-cubic lattice integral W_d(x), d in {3, 4}."""
    d: int
    x: object

    def __post_init__(self):
        if self.d not in (3, 4):
            raise DomainError("WatsonSpec needs d in {3, 4}")


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def _poly_t2(coeffs, t):
    acc = mpf(coeffs[0].numerator) / coeffs[0].denominator
    if len(coeffs) > 1:
        t2 = t * t
        powv = mpf(1)
        for c in coeffs[1:]:
            powv *= t2
            acc += (mpf(c.numerator) / c.denominator) * powv
    return acc


# ----------------------------------------------------------------------------
# General product moments with scaled factors.
# ----------------------------------------------------------------------------

def bessel_product_moment(factors, n, ctx: PrecisionContext,
                          target_digits: int | None = None,
                          weight=(ONE,), scale_hint=None):
    """int_0^inf prod_f B(scale*t) * t^n * weight(t^2) dt.

    ``factors`` is a sequence of ("I"|"K", scale) pairs.  The integrand is
    built from scaled Bessel evaluations with one overall exponential; a net
    zero rate falls back to the algebraic-decay route.
    """
    if target_digits is None:
        target_digits = ctx.digits
    weight = tuple(Fraction(c) for c in weight)
    rate = mpf(0)
    with ctx.workprec():
        fs = [(kind, _to_mpf(s)) for kind, s in factors]
        for kind, s in fs:
            rate += s if kind == "I" else -s
        if rate > 0:
            raise DivergentMoment("net exponential growth in the integrand")
    nk = sum(1 for kind, _ in fs if kind == "K")
    left = quad.logarithmic() if nk else quad.smooth()
    count = len(fs)

    def f(t, ictx, _fs=fs, _rate=rate, _n=n, _w=weight):
        acc = mp.exp(_rate * t) if _rate != 0 else mpf(1)
        for kind, s in _fs:
            st = s * t
            if kind == "I":
                acc *= specfun.bessel_i0_scaled(st, ictx) if st != 0 else mpf(1)
            else:
                acc *= specfun.bessel_k0_scaled(st, ictx)
        if _n:
            acc *= t ** _n
        if _w != (ONE,):
            acc *= _poly_t2(_w, t)
        return acc

    if rate < 0:
        right = quad.exp_decay(float(-rate))
    else:
        deg = 2 * (len(weight) - 1)
        beta = count / 2.0 - n - deg
        if beta <= 1:
            raise DivergentMoment("algebraic tail does not converge")
        right = quad.algebraic_decay(beta)
    spec = quad.IntegrandSpec(f, mpf(0), quad.INF, left, right)
    return quad.integrate_de(spec, ctx, target_digits, scale_hint=scale_hint,
                             probe=False)


def ikm(spec_or_a, b=None, n=None, ctx: PrecisionContext = None,
        target_digits: int | None = None, weight=(ONE,), scale_hint=None):
    """IKM(a, b; n) with optional polynomial weight or regularizer.

    Accepts either a MomentSpec or the (a, b, n) triple.
    """
    if isinstance(spec_or_a, MomentSpec):
        ms = spec_or_a
        if ms.regularizer is not None:
            return regularized_moment(ms.n, ms.regularizer, ctx, target_digits)
        a, b, n, weight = ms.a, ms.b, ms.n, ms.weight
    else:
        a = spec_or_a
    factors = [("I", 1)] * a + [("K", 1)] * b
    return bessel_product_moment(factors, n, ctx, target_digits,
                                 weight=weight, scale_hint=scale_hint)


# ----------------------------------------------------------------------------
# Regularized (3,3)-family moments with asymptotic tail switching.
# ----------------------------------------------------------------------------

_prod_series_cache: dict = {}


def _i0k0_product_coeffs(order: int) -> list:
    """Exact rationals p_m with 2t I0(t) K0(t) ~ sum p_m / t^(2m)."""
    got = _prod_series_cache.get(order)
    if got is not None:
        return got
    c = [Fraction(1)]
    for k in range(1, 2 * order + 1):
        c.append(c[-1] * Fraction((2 * k - 1) ** 2, 8 * k))
    p = []
    for m2 in range(0, 2 * order + 1, 2):
        acc = Fraction(0)
        for i in range(m2 + 1):
            j = m2 - i
            acc += (-1) ** j * c[i] * c[j]
        p.append(acc)
    _prod_series_cache[order] = p
    return p


def _bracket_tail(t, ictx: PrecisionContext, subtract_t4: bool):
    """I0^2 K0^2 - 1/(4t^2) [- 1/(16 t^4)] for large t, no cancellation."""
    p = ictx.prec
    with mp.workprec(p + 16):
        tau = 1 / (t * t)
        order = max(8, int(p * 0.75 / max(2.0, float(mp.log(t * t, 2)))) + 4)
        pm = _i0k0_product_coeffs(order)
        # u = sum p_m tau^m; u^2 - 1 = sum_{m>=1} q_m tau^m
        u = mp.zero
        tp = mpf(1)
        us = []
        for m in range(order + 1):
            us.append((mpf(pm[m].numerator) / pm[m].denominator) * tp)
            tp *= tau
        q = [mp.zero] * (order + 1)
        for i in range(order + 1):
            for j in range(order + 1 - i):
                if i + j >= 1:
                    q[i + j] += us[i] * us[j] / (mpf(1))
        start = 2 if subtract_t4 else 1
        acc = mp.zero
        for m in range(order, start - 1, -1):
            acc += q[m]
        return acc * tau / 4


def regularized_moment(n: int, regularizer: str, ctx: PrecisionContext,
                       target_digits: int | None = None):
    """int_0^inf I0 K0 (I0^2 K0^2 - R(t)) t^n dt for the catalogued R."""
    if target_digits is None:
        target_digits = ctx.digits
    subtract_t4 = regularizer == "R_QUARTER_T2_SIXTEENTH_T4"

    def f(t, ictx):
        i0 = specfun.bessel_i0_scaled(t, ictx)
        k0 = specfun.bessel_k0_scaled(t, ictx)
        ik = i0 * k0
        cross = specfun._crossover(ictx.prec)
        if t <= cross:
            br = ik * ik - 1 / (4 * t * t)
            if subtract_t4:
                br -= 1 / (16 * t ** 4)
        else:
            br = _bracket_tail(t, ictx, subtract_t4)
        return ik * br * t ** n

    # tail ~ t^(n - 2*start - 3); the catalogued cases decay like 1/t^2
    spec = quad.IntegrandSpec(f, mpf(0), quad.INF, quad.logarithmic(),
                              quad.algebraic_decay(2.0))
    return quad.integrate_de(spec, ctx, target_digits, probe=False)


# ----------------------------------------------------------------------------
# Parametric moments.
# ----------------------------------------------------------------------------

PARAM_KINDS = ("MB1_LHS", "MB2_LHS", "IKM231_X", "K_I2K2", "I_IK3",
               "BAILEY_IK", "IKM15_PARAM", "IKM24_PARAM", "W4_BM_X")


def param_moment(kind: str, x, ctx: PrecisionContext,
                 target_digits: int | None = None):
    """Catalogued parametric Bessel moments (argument u or x per kind)."""
    if target_digits is None:
        target_digits = ctx.digits
    with ctx.workprec():
        xv = _to_mpf(x)
    if kind == "MB1_LHS":
        if not (0 < xv < 4):
            raise DomainError("MB1_LHS needs u in (0, 4)")
        su = mp.sqrt(xv)
        a = bessel_product_moment([("I", su), ("K", 1), ("K", 1), ("K", 1),
                                   ("K", 1)], 1, ctx, target_digits)
        b = bessel_product_moment([("K", su), ("I", 1), ("K", 1), ("K", 1),
                                   ("K", 1)], 1, ctx, target_digits)
        return a + 4 * b
    if kind == "MB2_LHS":
        if not (0 < xv < 4):
            raise DomainError("MB2_LHS needs u in (0, 4)")
        su = mp.sqrt(xv)
        a = bessel_product_moment([("K", su), ("I", 1), ("I", 1), ("K", 1),
                                   ("K", 1)], 1, ctx, target_digits)
        b = bessel_product_moment([("I", su), ("I", 1), ("K", 1), ("K", 1),
                                   ("K", 1)], 1, ctx, target_digits)
        return a + b
    if kind == "IKM231_X":
        if not (0 <= xv < 2):
            raise DomainError("IKM231_X needs x in [0, 2)")
        return bessel_product_moment([("I", xv), ("I", 1), ("K", 1), ("K", 1),
                                      ("K", 1)], 1, ctx, target_digits)
    if kind == "K_I2K2":
        if not (0 < xv <= 4):
            raise DomainError("K_I2K2 needs u in (0, 4]")
        return bessel_product_moment([("K", mp.sqrt(xv)), ("I", 1), ("I", 1),
                                      ("K", 1), ("K", 1)], 1, ctx,
                                     target_digits)
    if kind == "I_IK3":
        if not (0 < xv <= 4):
            raise DomainError("I_IK3 needs u in (0, 4]")
        return bessel_product_moment([("I", mp.sqrt(xv)), ("I", 1), ("K", 1),
                                      ("K", 1), ("K", 1)], 1, ctx,
                                     target_digits)
    if kind == "BAILEY_IK":
        if not (0 < xv < 4):
            raise DomainError("BAILEY_IK needs u in (0, 4)")
        return bessel_product_moment([("K", mp.sqrt(xv)), ("I", 1), ("K", 1)],
                                     0, ctx, target_digits) / 2
    if kind == "IKM15_PARAM":
        if not (0 < xv < 16):
            raise DomainError("IKM15_PARAM needs u in (0, 16)")
        return bessel_product_moment([("I", mp.sqrt(xv)), ("K", 1), ("K", 1),
                                      ("K", 1), ("K", 1), ("K", 1)], 1, ctx,
                                     target_digits)
    if kind == "IKM24_PARAM":
        if not (0 < xv < 9):
            raise DomainError("IKM24_PARAM needs u in (0, 9)")
        return bessel_product_moment([("I", mp.sqrt(xv)), ("I", 1), ("K", 1),
                                      ("K", 1), ("K", 1), ("K", 1)], 1, ctx,
                                     target_digits)
    if kind == "W4_BM_X":
        if not (0 <= xv <= 1):
            raise DomainError("W4_BM_X needs x in [0, 1]")
        facs = [("I", xv), ("I", xv)] if xv != 0 else []
        facs += [("I", 1), ("K", 1), ("K", 1), ("K", 1)]
        return bessel_product_moment(facs, 1, ctx, target_digits)
    raise DomainError(f"unknown parametric moment kind {kind!r}")


# ----------------------------------------------------------------------------
# Watson lattice integrals.
# ----------------------------------------------------------------------------

def watson(spec_or_d, x=None, ctx: PrecisionContext = None,
           target_digits: int | None = None):
    """W_d(x) = int_0^inf e^{-d t} I0(x t)^d dt  (so W_d(0) = 1/d)."""
    if isinstance(spec_or_d, WatsonSpec):
        d, x = spec_or_d.d, spec_or_d.x
    else:
        d = spec_or_d
    if target_digits is None:
        target_digits = ctx.digits
    with ctx.workprec():
        xv = _to_mpf(x)
        if not (0 <= xv <= 1):
            raise DomainError("watson needs x in [0, 1]")
        if xv == 0:
            return mpf(1) / d

    def f(t, ictx, _d=d, _x=xv):
        return (specfun.bessel_i0_scaled(_x * t, ictx) ** _d
                * mp.exp(-_d * (1 - _x) * t))

    if xv < 1:
        right = quad.exp_decay(float(d * (1 - xv)))
    else:
        right = quad.algebraic_decay(d / 2.0)
    spec = quad.IntegrandSpec(f, mpf(0), quad.INF, quad.smooth(), right)
    return quad.integrate_de(spec, ctx, target_digits, probe=False)


def jz_parameter(x, ctx: PrecisionContext):
    """Joyce-Zucker elliptic parameter p(x) for the 3-d lattice integral."""
    with ctx.workprec():
        xv = _to_mpf(x)
        if not (0 < xv < 1):
            raise DomainError("jz_parameter needs x in (0, 1)")
        return mp.sqrt((1 - mp.sqrt(1 - xv * xv / 9)) / (1 + mp.sqrt(1 - xv * xv)))


def w3s_closed(form: str, x, ctx: PrecisionContext,
               target_digits: int | None = None):
    """Closed forms of W_3(x): the 2F1(1/8,3/8) square or the K(p)^2 form."""
    with ctx.workprec():
        xv = _to_mpf(x)
        if not (0 < xv < 1):
            raise DomainError("w3s_closed needs x in (0, 1)")
        x2 = xv * xv
        if form == "JZ_18_38":
            arg = (16 * x2 * (9 - 5 * x2 - (9 - x2) * mp.sqrt(1 - x2)) ** 2
                   / (9 * (3 + x2) ** 4))
            fval = hyp2f1(Fraction(1, 8), Fraction(3, 8), ONE, arg, ctx)
            return (2 - mp.sqrt(1 - x2)) / (3 + x2) * fval * fval
        if form == "JZ_K":
            p = jz_parameter(xv, ctx)
            arg = 16 * p ** 3 / ((1 - p) ** 3 * (3 * p + 1))
            fval = hyp2f1(Fraction(1, 2), Fraction(1, 2), ONE, arg, ctx)
            return ((1 - 9 * p ** 4) / (3 * (1 - p) ** 3 * (3 * p + 1))
                    * fval * fval)
    raise DomainError(f"unknown closed form {form!r}")


def gg_moduli(x, ctx: PrecisionContext):
    """Squared elliptic moduli k_pm^2(x) of the Abel-transform representation."""
    with ctx.workprec():
        xv = _to_mpf(x)
        x2 = xv * xv
        root4 = mp.sqrt(1 - x2 / 4)
        root1 = mp.sqrt(1 - x2)
        kp = (1 + x2 * root4 - (1 - x2 / 2) * root1) / 2
        km = (1 - x2 * root4 - (1 - x2 / 2) * root1) / 2
        return kp, km


# ----------------------------------------------------------------------------
# Kluyver's 4-step density via the Mellin-Barnes basis.
# ----------------------------------------------------------------------------

def p4_over_sqrtu(u, ctx: PrecisionContext, target_digits: int | None = None):
    """p4(sqrt(u))/sqrt(u), u in (0, 4), from the g1/g2 basis pair.

    The combination is real; a residual imaginary part above the target
    tolerance raises ResidualImaginary.
    """
    if target_digits is None:
        target_digits = ctx.digits
    with ctx.workprec():
        uv = _to_mpf(u)
        if not (0 < uv < 4):
            raise DomainError("p4_over_sqrtu needs u in (0, 4)")
        w = -108 * uv / (4 - uv) ** 3
    g1 = meijer.f32_sunrise(w, ctx, target_digits)
    g2 = meijer.g2_sunrise(w, ctx, target_digits)
    with ctx.workprec():
        combo = (3 * mp.sqrt(3) / (2 * mp.pi ** mpf("3.5") * (4 - uv))
                 * (2 * mpc(0, 1) * mp.pi ** mpf("2.5") / mp.sqrt(3) * g1 + g2))
        scale = max(abs(combo.real), mpf(1))
        if abs(combo.imag) > scale * mpf(10) ** (-target_digits):
            raise ResidualImaginary(
                f"imaginary residue {combo.imag} at u={u}")
        return combo.real


# ----------------------------------------------------------------------------
# Exact combinatorial moments.
# ----------------------------------------------------------------------------

def _cos_power_average(m: int) -> Fraction:
    """(1/pi) int_0^pi cos^m = C(m, m/2)/2^m for even m, else 0."""
    if m % 2:
        return Fraction(0)
    return Fraction(math.comb(m, m // 2), 2 ** m)


def even_cos_moment_lhs(n: int) -> Fraction:
    """(1/(4 pi^4)) int_[0,pi]^4 ((cos f1+...+cos f4)/4)^(2n), exactly."""
    if n < 0 or n > 8:
        raise DomainError("supported range is 0 <= n <= 8")
    total = Fraction(0)
    m = 2 * n
    for i in range(m + 1):
        for j in range(m - i + 1):
            for k in range(m - i - j + 1):
                l = m - i - j - k
                coef = (math.factorial(m) // (math.factorial(i)
                        * math.factorial(j) * math.factorial(k)
                        * math.factorial(l)))
                total += (coef * _cos_power_average(i) * _cos_power_average(j)
                          * _cos_power_average(k) * _cos_power_average(l))
    return total / Fraction(4 ** (2 * n)) / 4


def even_cos_moment_rhs(n: int) -> Fraction:
    """Double-factorial/multinomial closed form of the same average."""
    acc = Fraction(0)
    for j in range(n + 1):
        for k in range(n - j + 1):
            for l in range(n - j - k + 1):
                m = n - j - k - l
                t = Fraction(math.factorial(n), math.factorial(j)
                             * math.factorial(k) * math.factorial(l)
                             * math.factorial(m))
                acc += t * t
    return (Fraction(math.factorial(2 * n),
                     math.factorial(n) ** 2) * acc
            / Fraction(2 ** (2 * (3 * n + 1))))


def even_cos_moment_exact(n: int) -> Fraction:
    """The lattice cosine average; raises if the two exact routes disagree."""
    lhs = even_cos_moment_lhs(n)
    rhs = even_cos_moment_rhs(n)
    if lhs != rhs:
        raise ArithmeticError(f"exact moment mismatch at n={n}")
    return lhs


def odd_sum_13(n: int) -> Fraction:
    """Rational part of IKM(1,3;2n+1): sum of squared multinomials."""
    acc = Fraction(0)
    for j in range(n + 1):
        for k in range(n - j + 1):
            for l in range(n - j - k + 1):
                m = n - j - k - l
                t = Fraction(math.factorial(n), math.factorial(j)
                             * math.factorial(k) * math.factorial(l)
                             * math.factorial(m))
                acc += t * t
    return acc


def ikm13_closed(n: int, ctx: PrecisionContext):
    """Closed form of IKM(1,3;2n+1): (n!)^2 pi^2/2^(4(n+1)) * odd_sum_13(n)."""
    if n < 0 or n > 8:
        raise DomainError("supported range is 0 <= n <= 8")
    s = odd_sum_13(n)
    with ctx.workprec():
        fact = mpf(math.factorial(n))
        return (fact * fact * mp.pi ** 2 / mpf(2) ** (4 * (n + 1))
                * s.numerator / s.denominator)


# ----------------------------------------------------------------------------
# Vanhove differential-operator checks by finite differences.
# ----------------------------------------------------------------------------

def _fornberg_weights(order: int, offsets) -> list:
    """Exact FD weights for derivatives 0..order at 0 on integer offsets."""
    n = len(offsets)
    d = [[[Fraction(0)] * n for _ in range(order + 1)] for _ in range(n)]
    d[0][0][0] = Fraction(1)
    c1 = Fraction(1)
    for i in range(1, n):
        c2 = Fraction(1)
        for j in range(i):
            c3 = Fraction(offsets[i] - offsets[j])
            c2 *= c3
            for m in range(min(i, order) + 1):
                prev = d[i - 1][m - 1][j] if m else Fraction(0)
                d[i][m][j] = (Fraction(offsets[i]) * d[i - 1][m][j]
                              - m * prev) / c3
        for m in range(min(i, order) + 1):
            prev = d[i - 1][m - 1][i - 1] if m else Fraction(0)
            d[i][m][i] = c1 / c2 * (m * prev
                                    - Fraction(offsets[i - 1]) * d[i - 1][m][i - 1])
        c1 = c2
    return [d[n - 1][m] for m in range(order + 1)]


L3_COEFFS = {
    3: lambda u: u * u * (u - 4) * (u - 16),
    2: lambda u: 6 * u * (u * u - 15 * u + 32),
    1: lambda u: 7 * u * u - 68 * u + 64,
    0: lambda u: u - 4,
}

L4_COEFFS = {
    4: lambda u: u * u * (u - 25) * (u - 9) * (u - 1),
    3: lambda u: 2 * u * (5 * u ** 3 - 140 * u * u + 777 * u - 450),
    2: lambda u: 25 * u ** 3 - 518 * u * u + 1839 * u - 450,
    1: lambda u: (3 * u - 5) * (5 * u - 57),
    0: lambda u: u - 5,
}

VANHOVE_TARGETS = ("MB1_LHS", "MB2_LHS", "IKM15_PARAM", "IKM24_PARAM")


def vanhove_apply(op: str, target: str, u, ctx: PrecisionContext,
                  derivative: bool = False):
    """Apply the third/fourth-order mass-parameter operator numerically.

    Central stencils of order-matched width at step h = 10^(-digits/6);
    integrand evaluations run with a precision boost covering the h^-order
    amplification.  ``derivative=True`` returns d/du of the operator value
    (an outer 5-point stencil).
    """
    if target not in VANHOVE_TARGETS:
        raise DomainError(f"unknown vanhove target {target!r}")
    coeffs = {"L3": L3_COEFFS, "L4": L4_COEFFS}[op]
    order = max(coeffs)
    wd = ctx.digits
    if wd < 36:
        raise StencilError("vanhove stencils need at least 36 working digits")
    hexp = max(6, wd // 6)
    boost = int(math.ceil((order + (1 if derivative else 0))
                          * hexp * math.log2(10))) + 24
    ictx = ctx.boosted(boost)

    def opval(u0):
        with ictx.workprec():
            h = mpf(10) ** (-hexp)
            half = order // 2 + 2
            offsets = list(range(-half, half + 1))
            vals = [param_moment(target, u0 + k * h, ictx,
                                 target_digits=ictx.digits - 8)
                    for k in offsets]
            wts = _fornberg_weights(order, offsets)
            total = mp.zero
            for m, cfun in coeffs.items():
                deriv = mp.zero
                for wcoef, v in zip(wts[m], vals):
                    deriv += (mpf(wcoef.numerator) / wcoef.denominator) * v
                deriv /= h ** m
                total += cfun(u0) * deriv
            return total

    with ictx.workprec():
        u0 = _to_mpf(u)
        if not derivative:
            result = opval(u0)
        else:
            hout = mpf(10) ** (-max(3, hexp // 3))
            pts = [opval(u0 + k * hout) for k in (-2, -1, 1, 2)]
            result = (pts[0] - 8 * pts[1] + 8 * pts[2] - pts[3]) / (12 * hout)
    with ctx.workprec():
        return +result
