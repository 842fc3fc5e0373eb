"""Identity catalogue and verification runner.

Each identity lists at least two named evaluators that must agree to the
identity's digit target; wherever an independent route is available the
evaluators share no top-level operation.  Vanishing identities compare each
route against scale * 10^-target.  Reports are deterministic (ordered by
id) and JSON-serializable.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .errors import UnknownIdentity
from .mpcore import (PrecisionContext, adaptive_eval, digits_agreement,
                     to_decimal_string, AGREEMENT_CAP)
from . import specfun, quad, hyper, meijer, moments, modular
from .hyper import PFQSpec

F = Fraction
ONE = F(1)

REGISTRY_VERSION = 1

# ----------------------------------------------------------------------------
# Small helpers shared by many evaluators.
# ----------------------------------------------------------------------------

_memo: dict = {}


def _memoized(tag, ctx, builder):
    key = (tag, ctx.work_bits, ctx.guard_bits)
    val = _memo.get(key)
    if val is None:
        val = builder()
        _memo[key] = val
    return val


def _inner(ctx: PrecisionContext) -> int:
    """Digit goal passed to inner operations at this context."""
    return max(16, ctx.digits - 4)


def ikm_c(a, b, n, ctx, weight=(ONE,), scale_hint=None):
    key = ("ikm", a, b, n, weight)
    return _memoized(key, ctx, lambda: moments.ikm(
        a, b, n, ctx, _inner(ctx), weight=weight, scale_hint=scale_hint))


def gamma13(ctx):
    return specfun.gamma(F(1, 3), ctx)


def _xy9(ctx):
    """(sqrt(pi)/Gamma(1/3))^9 and its reciprocal, at context precision."""
    with ctx.workprec():
        y = gamma13(ctx) / mp.sqrt(mp.pi)
        return (1 / y) ** 9, y ** 9


FA = PFQSpec((F(1, 6), F(1, 3), F(1, 3), F(1, 2)), (F(2, 3), F(5, 6), F(5, 6)))
FB = PFQSpec((F(1, 2), F(2, 3), F(2, 3), F(5, 6)), (F(7, 6), F(7, 6), F(4, 3)))
FC = PFQSpec((F(-1, 2), F(1, 6), F(1, 3), F(4, 3)), (F(-1, 6), F(5, 6), F(5, 3)))
FD = PFQSpec((F(-7, 6), F(-1, 2), F(-1, 3), F(2, 3)), (F(-5, 6), F(1, 6), F(1, 3)))
FE = PFQSpec((F(1, 3), F(1, 2), F(1, 2), F(2, 3)), (F(5, 6), F(1), F(7, 6)))
FG = PFQSpec((F(2, 3), F(4, 3), F(3, 2), F(5, 2)), (F(2), F(13, 6), F(17, 6)))
F76_L = PFQSpec((F(1, 3), F(1, 3), F(1, 2), F(1, 2), F(2, 3), F(2, 3), F(5, 4)),
                (F(1, 4), F(5, 6), F(5, 6), F(1), F(7, 6), F(7, 6)))
F65_L = PFQSpec((F(1, 2), F(1, 2), F(1, 2), F(2, 3), F(2, 3), F(4, 3)),
                (F(1, 3), F(1), F(7, 6), F(7, 6), F(7, 6)))
F54_L = PFQSpec((F(1, 3), F(1, 3), F(1, 2), F(1, 2), F(1, 2)),
                (F(5, 6), F(5, 6), F(5, 6), F(1)))
F76_BL = PFQSpec((F(-1, 3), F(1, 3), F(2, 3), F(4, 3), F(3, 2), F(3, 2), F(7, 4)),
                 (F(3, 4), F(1), F(7, 6), F(11, 6), F(13, 6), F(17, 6)))
F76_BL2 = PFQSpec((F(-1, 3), F(-1, 3), F(1, 3), F(1, 3), F(1, 2), F(1, 2), F(5, 4)),
                  (F(1, 4), F(1), F(7, 6), F(7, 6), F(11, 6), F(11, 6)))
F76_BL3 = PFQSpec((F(1, 3), F(1, 2), F(3, 2), F(3, 2), F(13, 6), F(13, 6), F(7, 3)),
                  (F(7, 6), F(7, 6), F(11, 6), F(11, 6), F(17, 6), F(3)))
F54_BL = PFQSpec((F(-1, 3), F(1, 2), F(3, 2), F(3, 2), F(5, 3)),
                 (F(7, 6), F(7, 6), F(13, 6), F(3)))

NAMED_SERIES = {
    "F_A": FA, "F_B": FB, "F_C": FC, "F_D": FD, "F_E": FE, "F_G": FG,
    "F76_LAPORTA": F76_L, "F65_LAPORTA": F65_L, "F54_LAPORTA": F54_L,
    "F76_BL": F76_BL, "F76_BL_ALT1": F76_BL2, "F76_BL_ALT2": F76_BL3,
    "F54_BL": F54_BL,
}


def pfq1(spec, ctx):
    key = ("pfq1", spec.upper, spec.lower)
    return _memoized(key, ctx,
                     lambda: hyper.pfq_unit(spec, ctx, _inner(ctx)))


def combo_AB(sign, ctx):
    """(sqrt3/2^6 Y^9 F_A  sign  2^4/3 X^9 F_B)."""
    x9, y9 = _xy9(ctx)
    with ctx.workprec():
        return (mp.sqrt(3) / 64 * y9 * pfq1(FA, ctx)
                + sign * mpf(16) / 3 * x9 * pfq1(FB, ctx))


def combo_CD(sign, ctx):
    """(sqrt3/2^7 Y^9 F_C  sign  (5/7) 2^4/3 X^9 F_D)."""
    x9, y9 = _xy9(ctx)
    with ctx.workprec():
        return (mp.sqrt(3) / 128 * y9 * pfq1(FC, ctx)
                + sign * mpf(5) / 7 * mpf(16) / 3 * x9 * pfq1(FD, ctx))


def laporta_integral(ctx):
    """int_0^1 2F1(1/3,2/3;1|x)^2 dx/sqrt(1-x)."""
    def f(x, ictx):
        v = hyper.hyp2f1(F(1, 3), F(2, 3), ONE, x, ictx)
        return v * v / mp.sqrt(1 - x)
    return _memoized("laporta_int", ctx, lambda: quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), mpf(1), quad.smooth(),
                           quad.algebraic(-0.5)),
        ctx, _inner(ctx), probe=False))


def bl_integral(ctx):
    """int_0^1 2F1(-1/3,1/3;1|x)^2 dx/sqrt(1-x)."""
    def f(x, ictx):
        v = hyper.hyp2f1(F(-1, 3), F(1, 3), ONE, x, ictx)
        return v * v / mp.sqrt(1 - x)
    return _memoized("bl_int", ctx, lambda: quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), mpf(1), quad.smooth(),
                           quad.algebraic(-0.5)),
        ctx, _inner(ctx), probe=False))


def broadhurst_product_integral(ctx):
    """int_0^1 2F1(1/3,2/3;1|x) 2F1(1/3,2/3;1|1-x) dx/sqrt(1-x)."""
    def f(x, ictx):
        v1 = hyper.hyp2f1(F(1, 3), F(2, 3), ONE, x, ictx)
        v2 = hyper.hyp2f1(F(1, 3), F(2, 3), ONE, 1 - x, ictx)
        return v1 * v2 / mp.sqrt(1 - x)
    return _memoized("bh_prod_int", ctx, lambda: quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), mpf(1), quad.logarithmic(),
                           quad.algebraic(-0.5)),
        ctx, _inner(ctx), probe=False))


LAPORTA_G24 = dict(m=2, n=4, p=4, q=4,
                   a=(F(1, 3), F(1, 2), F(1, 2), F(2, 3)),
                   b=(F(0), F(0), F(-1, 6), F(1, 6)))
LAPORTA_G22 = dict(m=2, n=2, p=4, q=4,
                   a=(F(1, 2), F(1, 2), F(1, 3), F(2, 3)),
                   b=(F(0), F(0), F(-1, 6), F(1, 6)))
BL_G24 = dict(m=2, n=4, p=4, q=4,
              a=(F(-1, 2), F(1, 2), F(2, 3), F(4, 3)),
              b=(F(0), F(1), F(-5, 6), F(-1, 6)))
BL_G22 = dict(m=2, n=2, p=4, q=4,
              a=(F(-1, 2), F(1, 2), F(2, 3), F(4, 3)),
              b=(F(0), F(1), F(-5, 6), F(-1, 6)))
BH_G24 = dict(m=2, n=4, p=4, q=4,
              a=(F(1, 3), F(1, 2), F(1, 2), F(2, 3)),
              b=(F(0), F(0), F(-1, 4), F(1, 4)))
IKM243_G33 = dict(m=3, n=3, p=4, q=4,
                  a=(F(-1, 2), F(2, 3), F(4, 3), F(1, 2)),
                  b=(F(-5, 6), F(-1, 6), F(1), F(0)))


def meijer_value(gdict, ctx, closure="right"):
    spec = meijer.MeijerGSpec(**gdict)
    key = ("G", tuple(sorted(gdict.items())), closure)
    return _memoized(key, ctx, lambda: meijer.residue_sum_G(
        spec, ctx, _inner(ctx), closure=closure))


def elliptic_k(lam, ctx):
    return specfun.elliptic_k(lam, ctx)


# ----------------------------------------------------------------------------
# Evaluators.  All are pure functions of (ctx) returning mpf.
# ----------------------------------------------------------------------------

def ev_watson41_bm(ctx):
    with ctx.workprec():
        return 12 / mp.pi ** 4 * ikm_c(1, 5, 1, ctx)


def ev_watson41_exp(ctx):
    return moments.watson(4, 1, ctx, _inner(ctx))


def ev_watson4_multidim(ctx):
    import numpy as np

    def f(x0, x1, x2, x3):
        return 1.0 / (4.0 - np.cos(x0) - np.cos(x1) - np.cos(x2) - np.cos(x3))
    pi = float(mp.pi)
    res = quad.integrate_multidim(f, [(0.0, pi)] * 4, target_digits=3,
                                  sizes=(20, 28, 40))
    with ctx.workprec():
        return mpf(res.value) / mp.pi ** 4


def ev_watson3_multidim(ctx):
    import numpy as np

    def f(x0, x1, x2):
        return 1.0 / (3.0 - np.cos(x0) - np.cos(x1) - np.cos(x2))
    pi = float(mp.pi)
    res = quad.integrate_multidim(f, [(0.0, pi)] * 3, target_digits=3,
                                  sizes=(24, 40, 64))
    with ctx.workprec():
        return mpf(res.value) / mp.pi ** 3


def _w4bm(x, ctx):
    with ctx.workprec():
        return 4 / mp.pi ** 2 * moments.param_moment("W4_BM_X", x, ctx,
                                                     _inner(ctx))


def ev_w4bm_0(ctx):
    return _w4bm(F(0), ctx)


def ev_w4bm_half(ctx):
    return _w4bm(F(1, 2), ctx)


def ev_w4bm_1(ctx):
    return _w4bm(F(1), ctx)


def ev_watson40(ctx):
    return moments.watson(4, 0, ctx, _inner(ctx))


def ev_watson4_half(ctx):
    return moments.watson(4, F(1, 2), ctx, _inner(ctx))


def ev_ikm33_pi2(ctx):
    with ctx.workprec():
        return mp.pi ** 2 * ikm_c(3, 3, 1, ctx)


def ev_ikm15_triple(ctx):
    with ctx.workprec():
        return 3 * ikm_c(1, 5, 1, ctx)


def ev_gg_elliptic(ctx):
    def f(x, ictx):
        kp, km = moments.gg_moduli(x, ictx)
        return (specfun.elliptic_k(kp, ictx) * specfun.elliptic_k(km, ictx)
                / mp.sqrt(1 - x * x))
    val = quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), mpf(1), quad.smooth(),
                           quad.algebraic(-0.5)),
        ctx, _inner(ctx), probe=False)
    with ctx.workprec():
        return 2 / mp.pi ** 3 * val


def _w3_quad(x, ctx):
    return moments.watson(3, x, ctx, _inner(ctx))


def ev_w3_quad_half(ctx):
    return _w3_quad(F(1, 2), ctx)


def ev_w3_jz1_half(ctx):
    return moments.w3s_closed("JZ_18_38", F(1, 2), ctx, _inner(ctx))


def ev_w3_jz2_half(ctx):
    return moments.w3s_closed("JZ_K", F(1, 2), ctx, _inner(ctx))


def ev_w3_quad_09(ctx):
    return _w3_quad(F(9, 10), ctx)


def ev_w3_jz1_09(ctx):
    return moments.w3s_closed("JZ_18_38", F(9, 10), ctx, _inner(ctx))


def ev_w3_jz2_09(ctx):
    return moments.w3s_closed("JZ_K", F(9, 10), ctx, _inner(ctx))


def ev_lvalue(ctx):
    return modular.lvalue_f46(ctx, _inner(ctx))


def ev_sunrise_16(ctx):
    with ctx.workprec():
        return 16 * ikm_c(1, 5, 1, ctx)


def _w4_2f1_u_integrand(u, ictx):
    v = u * u * (9 + u) / (3 + u) ** 3
    one_minus = 27 * (1 + u) / (3 + u) ** 3
    a = hyper.hyp2f1(F(1, 3), F(2, 3), ONE, v, ictx)
    b = hyper.hyp2f1(F(1, 3), F(2, 3), ONE, one_minus, ictx)
    return a * b / (3 + u) ** 2


def ev_w4_2f1_u_pos(ctx):
    def f(u, ictx):
        return _w4_2f1_u_integrand(u, ictx)
    val = quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), quad.INF, quad.logarithmic(),
                           quad.algebraic_decay(1.8)),
        ctx, _inner(ctx), probe=False)
    with ctx.workprec():
        return mp.sqrt(3) / mp.pi * val


def ev_w4_2f1_u_neg(ctx):
    def f(t, ictx):
        # u = t - 1 maps (0,1) onto (-1,0)
        return _w4_2f1_u_integrand(t - 1, ictx)
    val = quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), mpf(1), quad.logarithmic(),
                           quad.logarithmic()),
        ctx, _inner(ctx), probe=False)
    with ctx.workprec():
        return 2 * mp.sqrt(3) / mp.pi * val


def ev_bbbg223(ctx):
    def f(y, ictx):
        m1 = (1 - 3 * y) * (1 + y) ** 3 / ((1 + 3 * y) * (1 - y) ** 3)
        m2 = 16 * y ** 3 / ((1 + 3 * y) * (1 - y) ** 3)
        return (y / ((3 * y + 1) * (1 - y) ** 3)
                * specfun.elliptic_k(m1, ictx) * specfun.elliptic_k(m2, ictx))
    val = quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), mpf(1) / 3, quad.algebraic(1.0),
                           quad.logarithmic()),
        ctx, _inner(ctx), probe=False)
    with ctx.workprec():
        return 8 / mp.pi * val


def ev_ikm33_quad(ctx):
    return ikm_c(3, 3, 1, ctx)


def _ramanujan(p, variant, side, ctx):
    with ctx.workprec():
        pv = mpf(p.numerator) / p.denominator
        arg = 27 * pv ** 2 * (1 + pv) ** 2 / (4 * (1 + pv + pv ** 2) ** 3)
        lam = pv ** 3 * (2 + pv) / (1 + 2 * pv)
        if variant == "B":
            arg = 1 - arg
            lam = 1 - lam
        if side == "2f1":
            return hyper.hyp2f1(F(1, 3), F(2, 3), ONE, arg, ctx)
        scale = mp.sqrt(1 + 2 * pv) if variant == "A" else mp.sqrt(3 + 6 * pv)
        return (2 / mp.pi * (1 + pv + pv ** 2) / scale
                * specfun.elliptic_k(lam, ctx))


def ev_ram_a02_2f1(ctx):
    return _ramanujan(F(1, 5), "A", "2f1", ctx)


def ev_ram_a02_k(ctx):
    return _ramanujan(F(1, 5), "A", "k", ctx)


def ev_ram_a06_2f1(ctx):
    return _ramanujan(F(3, 5), "A", "2f1", ctx)


def ev_ram_a06_k(ctx):
    return _ramanujan(F(3, 5), "A", "k", ctx)


def ev_ram_b02_2f1(ctx):
    return _ramanujan(F(1, 5), "B", "2f1", ctx)


def ev_ram_b02_k(ctx):
    return _ramanujan(F(1, 5), "B", "k", ctx)


def ev_ram_b06_2f1(ctx):
    return _ramanujan(F(3, 5), "B", "2f1", ctx)


def ev_ram_b06_k(ctx):
    return _ramanujan(F(3, 5), "B", "k", ctx)


def ev_parseval(ctx):
    def f(x, ictx):
        lam = 1 / mpc(1, x) ** 2
        kp = specfun.elliptic_k(lam, ictx)
        return (kp * mpc(kp.real, -kp.imag)).real / (1 + x * x)
    val = quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), quad.INF, quad.smooth(),
                           quad.algebraic_decay(2.0)),
        ctx, _inner(ctx), probe=False)
    with ctx.workprec():
        return 2 / mp.pi ** 3 * val


def _ikm231(x, ctx):
    return moments.param_moment("IKM231_X", x, ctx, _inner(ctx))


def _ikm231_hyp(x, ctx):
    with ctx.workprec():
        xv = mpf(x.numerator) / x.denominator
        w = -108 * xv ** 2 / (4 - xv ** 2) ** 3
        g1 = meijer.f32_sunrise(w, ctx, _inner(ctx))
        return mp.pi ** 2 / (4 * (4 - xv ** 2)) * g1


def ev_ikm231_quad_half(ctx):
    return _ikm231(F(1, 2), ctx)


def ev_ikm231_hyp_half(ctx):
    return _ikm231_hyp(F(1, 2), ctx)


def ev_ikm231_quad_1(ctx):
    return _ikm231(F(1), ctx)


def ev_ikm231_hyp_1(ctx):
    return _ikm231_hyp(F(1), ctx)


def ev_ikm231_quad_18(ctx):
    return _ikm231(F(9, 5), ctx)


def ev_ikm231_hyp_18(ctx):
    return _ikm231_hyp(F(9, 5), ctx)


def ev_sunrise_4f3(ctx):
    with ctx.workprec():
        return 4 * mp.pi ** mpf("2.5") / mp.sqrt(3) * combo_AB(-1, ctx)


def ev_laporta_int(ctx):
    return laporta_integral(ctx)


def ev_laporta_g22(ctx):
    return meijer_value(LAPORTA_G22, ctx)


def ev_laporta_g24_right(ctx):
    with ctx.workprec():
        return 3 / (4 * mp.pi ** 2) * meijer_value(LAPORTA_G24, ctx, "right")


def ev_laporta_g24_left(ctx):
    with ctx.workprec():
        return 3 / (4 * mp.pi ** 2) * meijer_value(LAPORTA_G24, ctx, "left")


def ev_laporta_4f3(ctx):
    with ctx.workprec():
        return 9 / mp.sqrt(mp.pi) * combo_AB(-1, ctx)


def ev_bailey_7f6(ctx):
    with ctx.workprec():
        return mpf(9) / 2 * pfq1(F76_L, ctx)


def ev_bailey_6f5(ctx):
    with ctx.workprec():
        return (2 ** (mpf(14) / 3) * mp.sqrt(3)
                * (mp.sqrt(mp.pi) / gamma13(ctx)) ** 6 * pfq1(F65_L, ctx))


def ev_bailey_5f4(ctx):
    with ctx.workprec():
        return (3 * mp.sqrt(3) / 2 ** (mpf(11) / 3)
                * (gamma13(ctx) / mp.sqrt(mp.pi)) ** 6 * pfq1(F54_L, ctx))


def _mb1_lhs(u, ctx):
    return moments.param_moment("MB1_LHS", u, ctx, _inner(ctx))


def _mb1_line(u, ctx):
    k = meijer.mb_kernel("MB1", u, ctx)
    return meijer.mb_vertical_line(k, F(1, 4), meijer.W_ONE, ctx, _inner(ctx))


def _mb2_lhs(u, ctx):
    return moments.param_moment("MB2_LHS", u, ctx, _inner(ctx))


def _mb2_line(u, ctx):
    k = meijer.mb_kernel("MB2", u, ctx)
    return meijer.mb_vertical_line(k, F(1, 4), meijer.W_ONE, ctx, _inner(ctx))


def ev_mb1_lhs_half(ctx):
    return _mb1_lhs(F(1, 2), ctx)


def ev_mb1_line_half(ctx):
    return _mb1_line(F(1, 2), ctx)


def ev_mb1_lhs_1(ctx):
    return _mb1_lhs(F(1), ctx)


def ev_mb1_line_1(ctx):
    return _mb1_line(F(1), ctx)


def ev_mb1_lhs_3(ctx):
    return _mb1_lhs(F(3), ctx)


def ev_mb1_line_3(ctx):
    return _mb1_line(F(3), ctx)


def ev_mb2_lhs_half(ctx):
    return _mb2_lhs(F(1, 2), ctx)


def ev_mb2_line_half(ctx):
    return _mb2_line(F(1, 2), ctx)


def ev_mb2_lhs_1(ctx):
    return _mb2_lhs(F(1), ctx)


def ev_mb2_line_1(ctx):
    return _mb2_line(F(1), ctx)


def ev_mb2_lhs_3(ctx):
    return _mb2_lhs(F(3), ctx)


def ev_mb2_line_3(ctx):
    return _mb2_line(F(3), ctx)


def ev_broadhurst2008_quad(ctx):
    return moments.param_moment("K_I2K2", 4, ctx, _inner(ctx))


def ev_broadhurst2008_gamma(ctx):
    with ctx.workprec():
        return mp.pi / 2 ** (mpf(20) / 3) * (gamma13(ctx) / mp.sqrt(mp.pi)) ** 6


def ev_factor3_lhs(ctx):
    return moments.param_moment("I_IK3", 4, ctx, _inner(ctx))


def ev_factor3_rhs(ctx):
    with ctx.workprec():
        return 3 * moments.param_moment("K_I2K2", 4, ctx, _inner(ctx))


def ev_reg153_lhs(ctx):
    with ctx.workprec():
        return (mp.pi ** 2 / 3
                * moments.regularized_moment(3, "R_QUARTER_T2", ctx,
                                             _inner(ctx)))


def ev_ikm153_quad(ctx):
    return ikm_c(1, 5, 3, ctx)


def ev_reg155_lhs(ctx):
    with ctx.workprec():
        return (mp.pi ** 2 / 3
                * moments.regularized_moment(5, "R_QUARTER_T2_SIXTEENTH_T4",
                                             ctx, _inner(ctx)))


def ev_ikm155_quad(ctx):
    return ikm_c(1, 5, 5, ctx)


def ev_sumrule15_single(ctx):
    return ikm_c(1, 5, 1, ctx, weight=(F(2), F(-85), F(72)),
                 scale_hint=mpf(1))


def ev_sumrule15_split(ctx):
    with ctx.workprec():
        return (2 * ikm_c(1, 5, 1, ctx) - 85 * ikm_c(1, 5, 3, ctx)
                + 72 * ikm_c(1, 5, 5, ctx))


def ev_sumrule24_single(ctx):
    return ikm_c(2, 4, 1, ctx, weight=(F(2), F(-85), F(72)),
                 scale_hint=mpf(1))


def ev_sumrule24_split(ctx):
    with ctx.workprec():
        return (2 * ikm_c(2, 4, 1, ctx) - 85 * ikm_c(2, 4, 3, ctx)
                + 72 * ikm_c(2, 4, 5, ctx))


def ev_ikm151_quad(ctx):
    return ikm_c(1, 5, 1, ctx)


def ev_ikm151_cstar(ctx):
    return meijer.residue_sum_weighted("PHI", "W_ONE", "C_STAR", ctx,
                                       _inner(ctx))


def ev_ikm151_line(ctx):
    return meijer.mb_vertical_line(meijer.PHI, F(1, 4), meijer.W_ONE, ctx, 12)


def ev_ikm153_cstar(ctx):
    return meijer.residue_sum_weighted("PHI", "W_T3", "C_STAR", ctx,
                                       _inner(ctx))


def ev_ikm153_line(ctx):
    x9, _ = _xy9(ctx)
    with ctx.workprec():
        line = meijer.mb_vertical_line(meijer.PHI, F(1, 4),
                                       meijer.WEIGHTS["W_T3"], ctx, 12)
        return line - 2 * mp.pi ** mpf("2.5") / (27 * mp.sqrt(3)) * x9


def ev_ikm155_cstar(ctx):
    return meijer.residue_sum_weighted("PHI", "W_T5", "C_STAR", ctx,
                                       _inner(ctx))


def ev_ikm155_line(ctx):
    x9, y9 = _xy9(ctx)
    with ctx.workprec():
        line = meijer.mb_vertical_line(meijer.PHI, F(1, 4),
                                       meijer.WEIGHTS["W_T5"], ctx, 12)
        return (line - 43 * mp.pi ** mpf("2.5") / (486 * mp.sqrt(3)) * x9
                - 5 * mp.pi ** mpf("2.5") / 331776 * y9)


def ev_phivanish_cstar(ctx):
    return meijer.residue_sum_weighted("PHI", "W_VANISH", "C_STAR", ctx,
                                       _inner(ctx))


def ev_phivanish_line(ctx):
    x9, y9 = _xy9(ctx)
    with ctx.workprec():
        line = meijer.mb_vertical_line(meijer.PHI, F(1, 4),
                                       meijer.WEIGHTS["W_VANISH"], ctx, 11)
        return (line - 5 * mp.pi ** mpf("2.5") / 4608 * y9
                - 2 * mp.pi ** mpf("2.5") / (27 * mp.sqrt(3)) * x9)


def ev_ikm153_simple_cstar(ctx):
    return meijer.residue_sum_weighted("PHI", "W_SIMPLE_153", "C_STAR", ctx,
                                       _inner(ctx))


def ev_bl_int(ctx):
    return bl_integral(ctx)


def ev_bl_g22(ctx):
    return meijer_value(BL_G22, ctx)


def ev_bl_g24(ctx):
    with ctx.workprec():
        return -3 / (4 * mp.pi ** 2) * meijer_value(BL_G24, ctx, "right")


def ev_bl_4f3(ctx):
    with ctx.workprec():
        return 3 / mp.sqrt(mp.pi) * combo_CD(+1, ctx)


def ev_bl_7f6(ctx):
    with ctx.workprec():
        return mpf(6561) / 3850 * pfq1(F76_BL, ctx)


def ev_ikm15_diff_quad(ctx):
    return ikm_c(1, 5, 1, ctx, weight=(F(1), F(-8)))


def ev_ikm15_diff_bl(ctx):
    with ctx.workprec():
        return 7 * mp.pi ** 3 / (108 * mp.sqrt(3)) * bl_integral(ctx)


def ev_ikm15_diff_cstar(ctx):
    return meijer.residue_sum_weighted("PHI", "W_DIFF", "C_STAR", ctx,
                                       _inner(ctx))


def ev_extra7f6_a(ctx):
    with ctx.workprec():
        return mpf(81) / 50 * pfq1(F76_BL2, ctx)


def ev_extra7f6_b(ctx):
    with ctx.workprec():
        return (mpf(567) / 1375 * mp.sqrt(3) / 2 ** (mpf(8) / 3)
                * (gamma13(ctx) / mp.sqrt(mp.pi)) ** 6 * pfq1(F76_BL3, ctx))


def ev_extra5f4(ctx):
    with ctx.workprec():
        return (mpf(27) / 7 * 2 ** (mpf(5) / 3) * mp.sqrt(3)
                * (mp.sqrt(mp.pi) / gamma13(ctx)) ** 6 * pfq1(F54_BL, ctx))


def ev_ikm241_quad(ctx):
    return ikm_c(2, 4, 1, ctx)


def ev_ikm241_4f3combo(ctx):
    with ctx.workprec():
        return 3 * mp.pi ** mpf("1.5") / 20 * combo_AB(+1, ctx)


def ev_ikm241_4f3(ctx):
    with ctx.workprec():
        return mp.pi ** 2 / 10 * pfq1(FE, ctx)


def ev_bh_product_int(ctx):
    return broadhurst_product_integral(ctx)


def ev_bh_product_g24(ctx):
    with ctx.workprec():
        return (3 / (4 * mp.sqrt(2) * mp.pi ** 2)
                * meijer_value(BH_G24, ctx, "right"))


def ev_bh_product_4f3(ctx):
    with ctx.workprec():
        return 3 * pfq1(FE, ctx)


def ev_ikm241_product(ctx):
    with ctx.workprec():
        return mp.pi ** 2 / 30 * broadhurst_product_integral(ctx)


def ev_ikm241_line(ctx):
    return meijer.mb_vertical_line(meijer.PSI, F(1, 4), meijer.W_ONE, ctx,
                                   _inner(ctx))


def ev_ikm243_quad(ctx):
    return ikm_c(2, 4, 3, ctx)


def ev_ikm243_line(ctx):
    x9, _ = _xy9(ctx)
    with ctx.workprec():
        line = meijer.mb_vertical_line(meijer.PSI, F(1, 4),
                                       meijer.WEIGHTS["W_T3"], ctx,
                                       _inner(ctx))
        return line + 4 * mp.pi ** mpf("1.5") / 45 * x9


def ev_ikm245_quad(ctx):
    return ikm_c(2, 4, 5, ctx)


def ev_ikm245_line(ctx):
    x9, y9 = _xy9(ctx)
    with ctx.workprec():
        line = meijer.mb_vertical_line(meijer.PSI, F(1, 4),
                                       meijer.WEIGHTS["W_T5"], ctx,
                                       _inner(ctx))
        return (line + 43 * mp.pi ** mpf("1.5") / 405 * x9
                - mp.pi ** mpf("1.5") / (18432 * mp.sqrt(3)) * y9)


def ev_psivanish_line(ctx):
    x9, y9 = _xy9(ctx)
    with ctx.workprec():
        line = meijer.mb_vertical_line(meijer.PSI, F(1, 4),
                                       meijer.WEIGHTS["W_VANISH"], ctx,
                                       _inner(ctx))
        return (line - mp.pi ** mpf("1.5") / (256 * mp.sqrt(3)) * y9
                + 4 * mp.pi ** mpf("1.5") / 45 * x9)


def ev_psivanish_simple(ctx):
    x9, _ = _xy9(ctx)
    with ctx.workprec():
        line = meijer.mb_vertical_line(meijer.PSI, F(1, 4),
                                       meijer.WEIGHTS["W_SIMPLE_B"], ctx,
                                       _inner(ctx))
        return line + 4 * mp.pi ** mpf("1.5") / 15 * x9


def ev_ikm243_simple_line(ctx):
    x9, _ = _xy9(ctx)
    with ctx.workprec():
        line = meijer.mb_vertical_line(meijer.PSI, F(1, 4),
                                       meijer.WEIGHTS["W_SIMPLE_153"], ctx,
                                       _inner(ctx))
        return line + 2 * mp.pi ** mpf("1.5") / 9 * x9


def ev_ikm243_chain_quad(ctx):
    return ikm_c(2, 4, 1, ctx, weight=(F(1), F(-8)))


def ev_ikm243_chain_g33(ctx):
    with ctx.workprec():
        return 7 / (240 * mp.sqrt(3)) * meijer_value(IKM243_G33, ctx, "right")


def ev_ikm243_chain_4f3combo(ctx):
    with ctx.workprec():
        return 7 * mp.pi ** mpf("1.5") / 60 * combo_CD(-1, ctx)


def ev_ikm243_chain_4f3(ctx):
    with ctx.workprec():
        return 9 * mp.pi ** 2 / 550 * pfq1(FG, ctx)


def ev_det_quad(ctx):
    with ctx.workprec():
        return (ikm_c(1, 5, 1, ctx) * ikm_c(2, 4, 3, ctx)
                - ikm_c(1, 5, 3, ctx) * ikm_c(2, 4, 1, ctx))


def ev_det_pi4(ctx):
    with ctx.workprec():
        return mp.pi ** 4 / 576


def ev_unit_combo(ctx):
    with ctx.workprec():
        return (mpf(7) / 40 * pfq1(FB, ctx) * pfq1(FC, ctx)
                + mpf(1) / 4 * pfq1(FA, ctx) * pfq1(FD, ctx))


def ev_one(ctx):
    return mpf(1)


def ev_ikm14_gamma(ctx):
    with ctx.workprec():
        return 8 * ikm_c(1, 4, 1, ctx) * 30 * mp.sqrt(5)


def ev_gamma15_product(ctx):
    with ctx.workprec():
        return (specfun.gamma(F(1, 15), ctx) * specfun.gamma(F(2, 15), ctx)
                * specfun.gamma(F(4, 15), ctx) * specfun.gamma(F(8, 15), ctx))


def _mellin_quad(nu, s, shifted, ctx):
    def f(t, ictx):
        if shifted:
            v = hyper.hyp2f1(-nu, nu, ONE, 1 - t, ictx)
        else:
            v = hyper.hyp2f1(-nu, nu + 1, ONE, 1 - t, ictx)
        return v * t ** (mpf(s.numerator) / s.denominator - 1)
    return quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), mpf(1),
                           quad.algebraic(float(s) - 1), quad.smooth()),
        ctx, _inner(ctx), probe=False)


def ev_mellin_a_quad(ctx):
    return _mellin_quad(F(-1, 3), F(3, 4), False, ctx)


def ev_mellin_a_gamma(ctx):
    g = lambda q: specfun.gamma(q, ctx)
    with ctx.workprec():
        s, nu = F(3, 4), F(-1, 3)
        return g(s) ** 2 / (g(s - nu) * g(s + nu + 1))


def ev_mellin_b_quad(ctx):
    return _mellin_quad(F(-1, 3), F(3, 2), True, ctx)


def ev_mellin_b_gamma(ctx):
    g = lambda q: specfun.gamma(q, ctx)
    with ctx.workprec():
        s, nu = F(3, 2), F(-1, 3)
        return g(s) * g(s + 1) / (g(s + 1 - nu) * g(s + 1 + nu))


def ev_neumann_i0_quad(ctx):
    def f(th, ictx):
        return specfun.bessel_i0(2 * mp.cos(th), ictx)
    val = quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), mp.pi / 2, quad.smooth(), quad.smooth()),
        ctx, _inner(ctx), probe=False)
    with ctx.workprec():
        return 2 / mp.pi * val


def ev_neumann_i0_direct(ctx):
    with ctx.workprec():
        v = specfun.bessel_i0(mpf(1), ctx)
        return v * v


def ev_neumann_k0_quad(ctx):
    def f(th, ictx):
        return specfun.bessel_k0(2 * mp.cos(th), ictx)
    val = quad.integrate_de(
        quad.IntegrandSpec(f, mpf(0), mp.pi / 2, quad.smooth(),
                           quad.logarithmic()),
        ctx, _inner(ctx), probe=False)
    with ctx.workprec():
        return 2 / mp.pi * val


def ev_neumann_k0_direct(ctx):
    with ctx.workprec():
        return (specfun.bessel_i0(mpf(1), ctx)
                * specfun.bessel_k0(mpf(1), ctx))


def ev_bailey_ik_quad(ctx):
    return moments.param_moment("BAILEY_IK", 1, ctx, _inner(ctx))


def ev_bailey_ik_kk(ctx):
    with ctx.workprec():
        lam_p = (1 + mpc(0, 1) * mp.sqrt(3)) / 2
        lam_m = (1 - mpc(0, 1) * mp.sqrt(3)) / 2
        val = (specfun.elliptic_k(lam_p, ctx)
               * specfun.elliptic_k(lam_m, ctx))
        return val.real / 2


def _zudilin_triple(n: int):
    """Float tensor-Jacobi estimate of the Zudilin triple integral."""
    import numpy as np

    def f(x, y, z):
        return (x * z * (1.0 - z)) ** n / (1.0 - x * (1.0 - y * (1.0 - z))) ** (2.0 / 3.0)

    jac = [(-1.0 / 6, -2.0 / 3 + n), (-1.0 / 3, -2.0 / 3),
           (-2.0 / 3 + n, -1.0 / 2 + n)]

    def fsmooth(x, y, z):
        return 1.0 / (1.0 - x * (1.0 - y * (1.0 - z))) ** (2.0 / 3.0)

    res = quad.integrate_multidim(fsmooth, [(0.0, 1.0)] * 3,
                                  target_digits=4 if n == 0 else 3,
                                  jacobi_weights=jac, sizes=(40, 64, 96))
    return res.value


def ev_zudilin0_quad(ctx):
    with ctx.workprec():
        return mpf(_zudilin_triple(0))


def ev_zudilin0_ikm(ctx):
    with ctx.workprec():
        return (2 ** (mpf(4) / 3) * mp.sqrt(3) * 24 * ikm_c(1, 5, 1, ctx)
                / mp.pi)


def ev_zudilin1_quad(ctx):
    with ctx.workprec():
        return mpf(_zudilin_triple(1))


def ev_zudilin1_ikm(ctx):
    with ctx.workprec():
        return (2 ** (mpf(4) / 3) * mp.sqrt(3)
                * (32 * ikm_c(1, 5, 1, ctx) - 256 * ikm_c(1, 5, 3, ctx))
                / (21 * mp.pi))


def _vanhove_ctx():
    return PrecisionContext(work_bits=200, guard_bits=32)


def ev_vanhove_l3_mb1(ctx):
    return moments.vanhove_apply("L3", "MB1_LHS", F(1, 2), _vanhove_ctx())


def ev_vanhove_l3_mb2(ctx):
    return moments.vanhove_apply("L3", "MB2_LHS", F(1, 2), _vanhove_ctx())


def ev_vanhove_l4(ctx):
    return moments.vanhove_apply("L4", "IKM15_PARAM", F(1, 2), _vanhove_ctx())


def ev_minus_15_2(ctx):
    with ctx.workprec():
        return mpf(-15) / 2


def ev_vanhove_l4_deriv(ctx):
    return moments.vanhove_apply("L4", "IKM15_PARAM", F(1), _vanhove_ctx(),
                                 derivative=True)


def _sym_residual(which, seed, ctx):
    import random
    rng = random.Random(seed)
    with ctx.workprec():
        worst = mpf(0)
        for _ in range(25):
            s = mpc(mpf(rng.uniform(-3, 3)), mpf(rng.uniform(-3, 3)))
            phi = meijer.PHI.eval(s, ctx)
            if which == "reflect":
                other = meijer.PHI.eval(mpf(1) / 2 - s, ctx)
                res = abs(phi - other) / max(abs(phi), mpf(10) ** -30)
            else:
                psi = meijer.PSI.eval(s, ctx)
                res = (abs(psi * 5 * mp.pi * mp.sin(2 * mp.pi * s) - 9 * phi)
                       / max(abs(phi), mpf(10) ** -30))
            worst = max(worst, res)
        return worst


def ev_phi_reflect_a(ctx):
    return _sym_residual("reflect", 20230409, ctx)


def ev_phi_reflect_b(ctx):
    return _sym_residual("reflect", 777, ctx)


def ev_psi_phi_a(ctx):
    return _sym_residual("psiphi", 20230409, ctx)


def ev_psi_phi_b(ctx):
    return _sym_residual("psiphi", 777, ctx)


def _gm_even(n, side, ctx):
    v = (moments.even_cos_moment_lhs(n) if side == "lhs"
         else moments.even_cos_moment_rhs(n))
    with ctx.workprec():
        return mpf(v.numerator) / v.denominator


def _bbbg_closed(n, ctx):
    return moments.ikm13_closed(n, ctx)


def _bbbg_quad(n, ctx):
    return ikm_c(1, 3, 2 * n + 1, ctx)
