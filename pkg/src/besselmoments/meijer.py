"""Meijer G-functions and Mellin-Barnes kernels from a fixed catalogue.

Evaluation is by (i) residue series over the pole families of the integrand,
including double poles with digamma/log terms, and (ii) numerical
vertical-line contour integration.  Kernels are products of gamma factors
Gamma(eps*s + shift)^power times a rational bracket weight and z^(-s); the
residue term streams use exact rational recurrences so that only the first
term of each family needs full gamma evaluations.

Orientation conventions (z, delta real positive; principal logs):

* vertical line:  (1/2*pi*i) Int_{delta-i inf}^{delta+i inf} = -sum of right
  residues (contour closed rightward) = +sum of left residues (leftward),
* C_* / C_** (unions of infinitesimal clockwise circles): -sum of residues,
* G(z) itself is the sum over residues of -kernel*z^(-s) at the poles of
  the Gamma(1 - a_j - s) group, i.e. the rightward closure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import mp, mpf, mpc

from .errors import DomainError, UnsupportedContour, UnsupportedSpec
from .mpcore import PrecisionContext
from .hyper import TermStream, accelerated_sum, PFQSpec, pfq_unit
from . import specfun
from . import quad

ONE = Fraction(1)


@dataclass(frozen=True)
class GammaFactor:
    """Gamma(eps*s + shift)^power; negative power means denominator."""
    eps: int
    shift: Fraction
    power: int

    def arg_at(self, s: Fraction) -> Fraction:
        return self.eps * s + self.shift


def gammas(*triples) -> tuple:
    return tuple(GammaFactor(e, Fraction(a), p) for e, a, p in triples)


@dataclass(frozen=True)
class Weight:
    """Rational bracket: const + sum coef/(c0 + c1*s)."""
    terms: tuple = ()
    const: Fraction = ONE

    def eval_frac(self, s: Fraction) -> Fraction:
        acc = Fraction(self.const)
        for coef, c0, c1 in self.terms:
            acc += coef / (c0 + c1 * s)
        return acc

    def deriv_frac(self, s: Fraction) -> Fraction:
        acc = Fraction(0)
        for coef, c0, c1 in self.terms:
            acc -= coef * c1 / (c0 + c1 * s) ** 2
        return acc

    def eval_mp(self, s):
        acc = mpf(self.const.numerator) / self.const.denominator
        for coef, c0, c1 in self.terms:
            acc = acc + (mpf(coef.numerator) / coef.denominator) / (
                mpf(c0.numerator) / c0.denominator
                + (mpf(c1.numerator) / c1.denominator) * s)
        return acc

    def poles(self) -> list:
        return [Fraction(-c0, 1) / c1 for _, c0, c1 in self.terms]

    @property
    def degree_drop(self) -> int:
        return 0 if self.const != 0 else 1

    def is_one(self) -> bool:
        return not self.terms and self.const == 1


def weight(*terms, const=ONE) -> Weight:
    return Weight(tuple((Fraction(c), Fraction(c0), Fraction(c1))
                        for c, c0, c1 in terms), Fraction(const))


W_ONE = Weight()

# bracket weights keyed to the kernel moment relations they serve
WEIGHTS = {
    "W_ONE": W_ONE,
    # t^3 moment bracket: 1/(3(5-6s)) + 1/(2s+1) - 2/3
    "W_T3": weight((Fraction(1, 3), 5, -6), (1, 1, 2), const=Fraction(-2, 3)),
    # t^5 moment bracket
    "W_T5": weight((Fraction(25, 54), 7, -6), (Fraction(43, 108), 5, -6),
                   (Fraction(23, 4), 1, 2), (Fraction(-45, 2), 3, 2),
                   const=Fraction(68, 27)),
    # the vanishing combination
    "W_VANISH": weight((Fraction(100, 3), 7, -6), (Fraction(1, 3), 5, -6),
                       (329, 1, 2), (-1620, 3, 2), const=240),
    # 1/(5-6s) - 2/(1+2s) + 1
    "W_SIMPLE_B": weight((1, 5, -6), (-2, 1, 2), const=1),
    # 5/(6(5-6s)) - 1/6
    "W_SIMPLE_153": weight((Fraction(5, 6), 5, -6), const=Fraction(-1, 6)),
    # -(1/3)(20/(5-6s) - 7)
    "W_DIFF": weight((Fraction(-20, 3), 5, -6), const=Fraction(7, 3)),
    # 10/(5-6s) + 5/(1+3s) - 7  (C_** bracket)
    "W_DIFF_STARSTAR": weight((10, 5, -6), (5, 1, 3), const=-7),
}


@dataclass(frozen=True)
class MBKernel:
    """Catalogued Mellin-Barnes integrand.

    ``prefactor`` maps a PrecisionContext to the constant multiplier.
    ``log_z`` is log of the z in z^(-s) (0 for z = 1); may be complex.
    ``decay``/``decay_param`` classify behavior on vertical lines.
    """
    name: str
    factors: tuple
    prefactor: Callable = None
    log_z: object = 0
    decay: str = "exponential"
    decay_param: float = 2 * math.pi
    asym_coeff: Callable = None     # leading c with kernel ~ c/s^2 (algebraic)

    def pole_free(self, s: Fraction) -> bool:
        for f in self.factors:
            if f.power > 0 and specfun.is_nonpositive_int(f.arg_at(s)):
                return False
        return True

    def eval(self, s, ctx: PrecisionContext):
        """Kernel value at complex s (without any bracket weight)."""
        with ctx.workprec():
            acc = mpc(1)
            for f in self.factors:
                g = specfun.gamma(f.eps * s + mpf(f.shift.numerator)
                                  / f.shift.denominator, ctx)
                acc *= g ** f.power
            if self.log_z != 0:
                acc *= mp.exp(-s * self.log_z)
            if self.prefactor is not None:
                acc *= self.prefactor(ctx)
            return acc


# ----------------------------------------------------------------------------
# Residue family streams.
# ----------------------------------------------------------------------------

def _mpq(q: Fraction):
    return mpf(q.numerator) / q.denominator


def _gamma_frac(q: Fraction, ictx: PrecisionContext):
    return specfun.gamma(q, ictx)


@dataclass
class _Family:
    """Pole family s_l = start + direction*l, l = 0..count-1 (count None = inf)."""
    start: Fraction
    direction: int
    units: tuple          # ((factor_index, count), ...) total multiplicity
    count: int | None = None

    @property
    def multiplicity(self) -> int:
        return sum(c for _, c in self.units)


def _enumerate_families(kernel: MBKernel, side: str) -> list:
    """Merge the kernel's pole ladders on one side into maximal families.

    side 'right': poles of Gamma(shift - s) factors -> s = shift + m.
    side 'left' : poles of Gamma(s + shift) factors -> s = -shift - m.
    Raises UnsupportedSpec for multiplicity > 2 or denominator cancellations.
    """
    eps_want = -1 if side == "right" else +1
    direction = +1 if side == "right" else -1
    starts = []       # (start point, factor index, power)
    for idx, f in enumerate(kernel.factors):
        if f.power > 0 and f.eps == eps_want:
            start = f.shift if side == "right" else -f.shift
            starts.append((start, idx, f.power))
    # group by fractional class: ladders overlap iff starts differ by integers
    classes: dict = {}
    for start, idx, power in starts:
        classes.setdefault(start % 1, []).append((start, idx, power))
    families = []
    for _, group in sorted(classes.items()):
        group.sort(key=lambda t: t[0] if direction == +1 else -t[0])
        # walk the ladder: multiplicity accumulates as later starts join
        active: list = []
        for i, (start, idx, power) in enumerate(group):
            active.append((idx, power))
            if i + 1 < len(group):
                nxt = group[i + 1][0]
                span = abs(int(nxt - start))
                if span > 0:
                    families.append(_Family(start, direction, tuple(active),
                                            count=span))
            else:
                families.append(_Family(start, direction, tuple(active),
                                        count=None))
    for fam in families:
        if fam.multiplicity > 2:
            raise UnsupportedSpec("pole multiplicity above 2 not supported")
        # denominator-factor cancellation would change multiplicities
        for f in kernel.factors:
            if f.power < 0 and specfun.is_nonpositive_int(f.arg_at(fam.start)):
                raise UnsupportedSpec("denominator cancellation at pole family")
    return families


def _family_sigma(kernel: MBKernel, fam: _Family, w: Weight) -> Fraction:
    """Exact decay exponent of the family's residue terms (t_l ~ l^-sigma).

    The per-step term ratio is a product of monic linear factors in l: one
    denominator factor per factorial-ladder step and one per regular
    gamma-factor power (numerator or denominator by growth direction);
    sigma is the denominator-root sum minus the numerator-root sum.
    """
    unit_idx = {i for i, _ in fam.units}
    u_roots: list = []   # numerator roots (growth)
    v_roots: list = []   # denominator roots (decay)
    s0 = fam.start
    d = fam.direction
    for idx, f in enumerate(kernel.factors):
        if idx in unit_idx:
            continue
        arg0 = f.arg_at(s0)
        step = f.eps * d
        grow = (f.power > 0) == (step > 0)
        root = arg0 if step > 0 else (ONE - arg0)
        for _ in range(abs(f.power)):
            (u_roots if grow else v_roots).append(root)
    for fidx, cnt in fam.units:
        f = kernel.factors[fidx]
        m0 = -f.arg_at(s0)
        assert m0.denominator == 1 and m0 >= 0
        for _ in range(cnt):
            v_roots.append(Fraction(m0 + 1))
    sigma = sum(v_roots, Fraction(0)) - sum(u_roots, Fraction(0))
    sigma += w.degree_drop
    if fam.multiplicity == 2:
        sigma += 1
    return sigma


def _stream_sign_is_constant(kernel: MBKernel, fam: _Family) -> bool:
    """True when per-step ratios keep one sign once past the head."""
    neg = 0
    unit_idx = {i for i, _ in fam.units}
    for idx, f in enumerate(kernel.factors):
        if idx in unit_idx:
            continue
        if f.eps * fam.direction < 0:
            neg += abs(f.power)
    for _, cnt in fam.units:
        neg += cnt   # factorial ladder carries (-1) per step
    return neg % 2 == 0


def _family_stream(kernel: MBKernel, fam: _Family, w: Weight,
                   label: str) -> TermStream:
    """Residue term stream for one family (without overall orientation sign)."""
    if fam.multiplicity == 1:
        return _simple_stream(kernel, fam, w, label)
    return _double_stream(kernel, fam, w, label)


def _regular_indices(kernel: MBKernel, fam: _Family):
    unit_idx = {i for i, _ in fam.units}
    return [i for i in range(len(kernel.factors)) if i not in unit_idx]


def _head_length(kernel: MBKernel, fam: _Family, w: Weight) -> int:
    """Steps until every linear factor in the ratio has fixed sign."""
    worst = 4
    s0 = fam.start
    for f in kernel.factors:
        root = f.arg_at(s0)
        worst = max(worst, int(math.ceil(abs(float(root)))) + 2)
    for p in w.poles():
        worst = max(worst, int(math.ceil(abs(float(p - s0)))) + 2)
    return worst


def _simple_stream(kernel: MBKernel, fam: _Family, w: Weight,
                   label: str) -> TermStream:
    (fidx, _), = fam.units
    sing = kernel.factors[fidx]
    reg = _regular_indices(kernel, fam)
    s0 = fam.start
    d = fam.direction
    m0 = -sing.arg_at(s0)
    assert m0.denominator == 1 and m0 >= 0
    m0 = int(m0)

    def make(prec: int):
        ictx = PrecisionContext(work_bits=max(64, prec), guard_bits=16)

        def gen():
            with mp.workprec(prec + 16):
                base = mpc(1) if isinstance(kernel.log_z, mpc) else mpf(1)
                for i in reg:
                    f = kernel.factors[i]
                    base *= _gamma_frac(f.arg_at(s0), ictx) ** f.power
                sign = sing.eps * (-1) ** m0
                fact = mpf(1)
                for k in range(2, m0 + 1):
                    fact *= k
                base = base * sign / fact
                if kernel.prefactor is not None:
                    base *= kernel.prefactor(ictx)
                zr = mp.exp(-_mpq(s0) * kernel.log_z) if kernel.log_z != 0 else 1
                zstep = mp.exp(-d * kernel.log_z) if kernel.log_z != 0 else 1
                base = base * zr
                ell = 0
                cur = base
                while fam.count is None or ell < fam.count:
                    sl = s0 + d * ell
                    wv = w.eval_frac(sl)
                    yield cur * wv.numerator / wv.denominator
                    num, den = 1, 1
                    for i in reg:
                        f = kernel.factors[i]
                        arg = f.arg_at(sl)
                        step = f.eps * d
                        q = arg if step > 0 else (arg - 1)
                        if f.power * (1 if step > 0 else -1) > 0:
                            for _ in range(abs(f.power)):
                                num *= q.numerator
                                den *= q.denominator
                        else:
                            for _ in range(abs(f.power)):
                                num *= q.denominator
                                den *= q.numerator
                    mnext = m0 + ell + 1
                    den *= mnext
                    num = -num
                    cur = cur * num / den
                    if kernel.log_z != 0:
                        cur = cur * zstep
                    ell += 1
        return gen()

    return TermStream(make_terms=make, sigma=_family_sigma(kernel, fam, w),
                      head=_head_length(kernel, fam, w), label=label,
                      geometric_ratio=_geometric_ratio(kernel, d))


def _double_stream(kernel: MBKernel, fam: _Family, w: Weight,
                   label: str) -> TermStream:
    units = []
    for fidx, cnt in fam.units:
        units.extend([fidx] * cnt)
    assert len(units) == 2
    reg = _regular_indices(kernel, fam)
    s0 = fam.start
    d = fam.direction
    eps_u = [kernel.factors[i].eps for i in units]
    m0s = []
    for i in units:
        m = -kernel.factors[i].arg_at(s0)
        assert m.denominator == 1 and m >= 0
        m0s.append(int(m))

    def make(prec: int):
        ictx = PrecisionContext(work_bits=max(64, prec), guard_bits=16)

        def gen():
            with mp.workprec(prec + 16):
                # A(l) = eps1*eps2*(-1)^(m1+m2)/(m1! m2!) * prod reg Gamma * z^-s
                amp = mpc(1) if isinstance(kernel.log_z, mpc) else mpf(1)
                for i in reg:
                    f = kernel.factors[i]
                    amp *= _gamma_frac(f.arg_at(s0), ictx) ** f.power
                sign = eps_u[0] * eps_u[1] * (-1) ** (m0s[0] + m0s[1])
                fact = mpf(1)
                for m in m0s:
                    for k in range(2, m + 1):
                        fact *= k
                amp = amp * sign / fact
                if kernel.prefactor is not None:
                    amp *= kernel.prefactor(ictx)
                if kernel.log_z != 0:
                    amp *= mp.exp(-_mpq(s0) * kernel.log_z)
                zstep = mp.exp(-d * kernel.log_z) if kernel.log_z != 0 else 1
                # digamma trackers
                psi_units = [specfun.digamma(Fraction(m + 1), ictx)
                             for m in m0s]
                psi_reg = []
                for i in reg:
                    f = kernel.factors[i]
                    psi_reg.append(specfun.digamma(f.arg_at(s0), ictx))
                lnz = kernel.log_z if kernel.log_z != 0 else mpf(0)
                ell = 0
                cur = amp
                ms = list(m0s)
                while fam.count is None or ell < fam.count:
                    sl = s0 + d * ell
                    # L = sum reg power*eps*psi(arg) - ln z
                    L = -lnz
                    for j, i in enumerate(reg):
                        f = kernel.factors[i]
                        L += f.power * f.eps * psi_reg[j]
                    bracket = eps_u[0] * psi_units[0] + eps_u[1] * psi_units[1] + L
                    wv = w.eval_frac(sl)
                    wd = w.deriv_frac(sl)
                    term = cur * (bracket * wv.numerator / wv.denominator
                                  + mpf(wd.numerator) / wd.denominator)
                    yield term
                    # advance amplitude
                    num, den = 1, 1
                    for i in reg:
                        f = kernel.factors[i]
                        arg = f.arg_at(sl)
                        step = f.eps * d
                        q = arg if step > 0 else (arg - 1)
                        if f.power * (1 if step > 0 else -1) > 0:
                            for _ in range(abs(f.power)):
                                num *= q.numerator
                                den *= q.denominator
                        else:
                            for _ in range(abs(f.power)):
                                num *= q.denominator
                                den *= q.numerator
                    den *= (ms[0] + 1) * (ms[1] + 1)
                    cur = cur * num / den
                    if kernel.log_z != 0:
                        cur = cur * zstep
                    # advance digammas
                    for j in range(2):
                        psi_units[j] += mpf(1) / (ms[j] + 1)
                        ms[j] += 1
                    for j, i in enumerate(reg):
                        f = kernel.factors[i]
                        arg = f.arg_at(s0 + d * ell)
                        step = f.eps * d
                        if step > 0:
                            psi_reg[j] += mpf(arg.denominator) / arg.numerator
                        else:
                            prev = arg - 1
                            psi_reg[j] -= mpf(prev.denominator) / prev.numerator
                    ell += 1
        return gen()

    return TermStream(make_terms=make, sigma=_family_sigma(kernel, fam, w),
                      head=_head_length(kernel, fam, w), label=label)


def _geometric_ratio(kernel: MBKernel, direction: int) -> float:
    if kernel.log_z == 0:
        return 1.0
    return float(mp.exp(-direction * mp.re(mpc(kernel.log_z))))


def _sum_stream(stream: TermStream, ctx: PrecisionContext,
                target_digits: int):
    """Sum one family: geometric direct summation or dual acceleration."""
    geometric = stream.geometric_ratio < 0.995
    if stream.sigma <= 1 and not geometric:
        raise UnsupportedSpec(f"{stream.label}: divergent residue family")
    if not geometric:
        return accelerated_sum(stream, ctx, target_digits)
    p = ctx.prec + 48
    with mp.workprec(p):
        tol = mpf(2) ** (-p + 8)
        total = mp.zero
        gen = stream.make_terms(p)
        small = 0
        for n in range(2_000_000):
            t = next(gen)
            total += t
            if abs(t) < tol * (abs(total) + 1):
                small += 1
                if small > 4 and n > stream.head:
                    break
            else:
                small = 0
        else:
            raise UnsupportedSpec(f"{stream.label}: geometric sum cap reached")
    with ctx.workprec():
        return +total


def _sum_finite(stream: TermStream, count: int, ctx: PrecisionContext):
    p = ctx.prec + 48
    with mp.workprec(p):
        gen = stream.make_terms(p)
        total = mp.zero
        for _ in range(count):
            total += next(gen)
    with ctx.workprec():
        return +total


def residue_sum(kernel: MBKernel, w: Weight, ctx: PrecisionContext,
                target_digits: int, side: str = "right"):
    """Sum of residues of kernel*weight over all pole families on one side.

    Returned WITHOUT orientation sign (caller applies -1 for rightward
    closure / clockwise circles, +1 for leftward closure).
    """
    for p in w.poles():
        if not kernel.pole_free(p):
            raise UnsupportedContour("weight pole collides with kernel pole")
    families = _enumerate_families(kernel, side)
    if not families:
        raise UnsupportedSpec(f"kernel {kernel.name} has no {side} poles")
    total = None
    for fam in families:
        stream = _family_stream(kernel, fam, w,
                                f"{kernel.name}:{side}@{fam.start}")
        if fam.count is not None:
            val = _sum_finite(stream, fam.count, ctx)
        else:
            val = _sum_stream(stream, ctx, target_digits)
        total = val if total is None else total + val
    return total


def weight_pole_residues(kernel: MBKernel, w: Weight, region: Callable,
                         ctx: PrecisionContext):
    """Sum of residues of kernel*weight at the weight's own poles inside a
    region (predicate on the exact pole location)."""
    total = mp.zero
    with ctx.workprec():
        for (coef, c0, c1), pole in zip(w.terms, w.poles()):
            if not region(pole):
                continue
            if not kernel.pole_free(pole):
                raise UnsupportedContour("weight pole on a kernel pole")
            kval = kernel.eval(_mpq(pole), ctx)
            total += kval * _mpq(coef / c1)
        if isinstance(total, mpc) and total.imag == 0:
            return total.real
        return total


# ----------------------------------------------------------------------------
# Kernel catalogue.
# ----------------------------------------------------------------------------

def _pref_phi(ictx: PrecisionContext):
    with ictx.workprec():
        return mp.pi ** 3 / (72 * mp.sqrt(3))


def _pref_psi(ictx: PrecisionContext):
    with ictx.workprec():
        return 1 / (80 * mp.sqrt(3))


def _phi_asym(ictx: PrecisionContext):
    # Phi(s) ~ -pi^3/(72 sqrt3 s^2) on vertical lines away from the real axis
    with ictx.workprec():
        return -mp.pi ** 3 / (72 * mp.sqrt(3))


PHI = MBKernel(
    name="PHI",
    factors=gammas((-1, Fraction(1, 3), 1), (-1, Fraction(2, 3), 1),
                   (+1, Fraction(-1, 6), 1), (+1, Fraction(1, 6), 1),
                   (-1, Fraction(1), -2), (+1, Fraction(1, 2), -2)),
    prefactor=_pref_phi,
    decay="algebraic", decay_param=2.0, asym_coeff=_phi_asym)

PSI = MBKernel(
    name="PSI",
    factors=gammas((-1, Fraction(1, 3), 1), (-1, Fraction(1, 2), 1),
                   (-1, Fraction(2, 3), 1), (+1, Fraction(-1, 6), 1),
                   (+1, Fraction(0), 1), (+1, Fraction(1, 6), 1),
                   (-1, Fraction(1), -1), (+1, Fraction(1, 2), -1)),
    prefactor=_pref_psi,
    decay="exponential", decay_param=2 * math.pi)

KERNELS = {"PHI": PHI, "PSI": PSI}


def _to_mpf(u):
    if isinstance(u, Fraction):
        return mpf(u.numerator) / u.denominator
    return mpf(u)


def _log_w_of_u(u, prec: int):
    """log(108 u / (4-u)^3) for the parametric kernels, u in (0, 4)."""
    with mp.workprec(prec):
        uu = _to_mpf(u)
        return mp.log(108 * uu / (4 - uu) ** 3)


def mb1_kernel(u, ctx: PrecisionContext) -> MBKernel:
    """Weighted-sum kernel for I0(sqrt(u) t) K0^4 + 4 K0(sqrt(u) t) I0 K0^3."""
    if not (0 < u < 4):
        raise DomainError("mb1_kernel requires u in (0, 4)")
    lz = _log_w_of_u(u, ctx.prec + 16)
    uu = _to_mpf(u)

    def pref(ictx, _u=uu):
        with ictx.workprec():
            return mp.sqrt(3) * mp.pi ** mpf("1.5") / (4 * (4 - _u))

    return MBKernel(
        name=f"MB1({u})",
        factors=gammas((-1, Fraction(1, 3), 1), (-1, Fraction(2, 3), 1),
                       (+1, Fraction(0), 2),
                       (-1, Fraction(1), -1), (+1, Fraction(1, 2), -1)),
        prefactor=pref, log_z=lz,
        decay="exponential", decay_param=math.pi)


def mb2_kernel(u, ctx: PrecisionContext) -> MBKernel:
    """Kernel for K0(sqrt(u) t) I0^2 K0^2 + I0(sqrt(u) t) I0 K0^3."""
    if not (0 < u < 4):
        raise DomainError("mb2_kernel requires u in (0, 4)")
    lz = _log_w_of_u(u, ctx.prec + 16)
    uu = _to_mpf(u)

    def pref(ictx, _u=uu):
        with ictx.workprec():
            return mp.sqrt(3) / (8 * mp.pi ** mpf("1.5") * (4 - _u))

    return MBKernel(
        name=f"MB2({u})",
        factors=gammas((-1, Fraction(1, 3), 1), (-1, Fraction(1, 2), 1),
                       (-1, Fraction(2, 3), 1), (+1, Fraction(0), 3)),
        prefactor=pref, log_z=lz,
        decay="exponential", decay_param=3 * math.pi)


@dataclass(frozen=True)
class KernelSum:
    """Sum of catalogued kernels (for integrands like phi(u, s))."""
    name: str
    parts: tuple
    decay: str
    decay_param: float

    def eval(self, s, ctx: PrecisionContext):
        with ctx.workprec():
            return sum((k.eval(s, ctx) for k in self.parts), mpc(0))

    def pole_free(self, s: Fraction) -> bool:
        return all(k.pole_free(s) for k in self.parts)


def phi_small_kernel(u, ctx: PrecisionContext) -> KernelSum:
    """phi(u, s): Mellin-Barnes integrand of K0(sqrt(u) t) I0^2 K0^2 alone."""
    if not (0 < u < 4):
        raise DomainError("phi_small_kernel requires u in (0, 4)")
    lz = _log_w_of_u(u, ctx.prec + 16)
    uu = _to_mpf(u)

    def pref_a(ictx, _u=uu):
        with ictx.workprec():
            return mp.sqrt(3) / (8 * mp.pi ** mpf("1.5") * (4 - _u))

    def pref_b(ictx, _u=uu):
        with ictx.workprec():
            return -mp.sqrt(3) * mp.sqrt(mp.pi) / (8 * (4 - _u))

    part_a = MBKernel(
        name=f"PHI_SMALL_A({u})",
        factors=gammas((-1, Fraction(1, 3), 1), (-1, Fraction(1, 2), 1),
                       (-1, Fraction(2, 3), 1), (+1, Fraction(0), 3)),
        prefactor=pref_a, log_z=lz, decay="exponential",
        decay_param=3 * math.pi)
    part_b = MBKernel(
        name=f"PHI_SMALL_B({u})",
        factors=gammas((-1, Fraction(1, 3), 1), (-1, Fraction(1, 2), 1),
                       (-1, Fraction(2, 3), 1), (+1, Fraction(0), 1),
                       (-1, Fraction(1), -2)),
        prefactor=pref_b, log_z=lz, decay="exponential",
        decay_param=math.pi)
    return KernelSum(name=f"PHI_SMALL({u})", parts=(part_a, part_b),
                     decay="exponential", decay_param=math.pi)


def mb_kernel(kind: str, u=None, ctx: PrecisionContext | None = None):
    """Catalogue lookup: PHI, PSI, MB1(u), MB2(u), PHI_SMALL(u)."""
    if kind in ("PHI", "PSI"):
        return KERNELS[kind]
    if ctx is None:
        raise DomainError("parametric kernels need a PrecisionContext")
    if kind == "MB1":
        return mb1_kernel(u, ctx)
    if kind == "MB2":
        return mb2_kernel(u, ctx)
    if kind == "PHI_SMALL":
        return phi_small_kernel(u, ctx)
    raise UnsupportedSpec(f"unknown kernel {kind!r}")


# ----------------------------------------------------------------------------
# Meijer G specification (catalogue-restricted).
# ----------------------------------------------------------------------------

_ALLOWED_SHAPES = {(2, 2, 4, 4), (2, 4, 4, 4), (3, 3, 4, 4), (2, 3, 3, 3),
                   (3, 3, 3, 3)}


@dataclass(frozen=True)
class MeijerGSpec:
    """G^{m,n}_{p,q}(z | a ; b) with exact rational parameter lists.

    Only the catalogue shapes appearing in the verified identities are
    accepted.  Pole multiplicity structure is computed exactly at load and
    anything beyond double poles is rejected.
    """
    m: int
    n: int
    p: int
    q: int
    a: tuple
    b: tuple
    z: object = 1

    def __post_init__(self):
        if (self.m, self.n, self.p, self.q) not in _ALLOWED_SHAPES:
            raise UnsupportedSpec(
                f"G^{self.m},{self.n}_{self.p},{self.q} outside the catalogue")
        if len(self.a) != self.p or len(self.b) != self.q:
            raise UnsupportedSpec("parameter list lengths must match p, q")
        object.__setattr__(self, "a", tuple(Fraction(x) for x in self.a))
        object.__setattr__(self, "b", tuple(Fraction(x) for x in self.b))
        _enumerate_families(self.kernel(), "right")   # validates multiplicity

    def kernel(self) -> MBKernel:
        facs = []
        for j, aj in enumerate(self.a):
            if j < self.n:
                facs.append(GammaFactor(-1, 1 - aj, +1))
            else:
                facs.append(GammaFactor(+1, aj, -1))
        for k, bk in enumerate(self.b):
            if k < self.m:
                facs.append(GammaFactor(+1, bk, +1))
            else:
                facs.append(GammaFactor(-1, 1 - bk, -1))
        if self.z == 1:
            lz = 0
        else:
            with mp.workprec(400):
                lz = mp.log(mpf(self.z))
        num = sum(1 for f in facs if f.power > 0)
        den = sum(1 for f in facs if f.power < 0)
        rate = (num - den) * math.pi / 2
        return MBKernel(name=f"G{self.m}{self.n}{self.p}{self.q}",
                        factors=tuple(facs), log_z=lz,
                        decay="exponential" if rate > 0.1 else "algebraic",
                        decay_param=rate if rate > 0.1 else 2.0)


def residue_sum_G(spec: MeijerGSpec, ctx: PrecisionContext,
                  target_digits: int | None = None, closure: str = "right"):
    """Meijer G value by residue summation.

    ``closure='right'`` is the defining sum over the poles of the
    Gamma(1-a_j-s) group; ``closure='left'`` closes the other way (valid at
    z = 1 for the catalogued specs, and for |z| < 1), providing an
    independent code path.
    """
    if target_digits is None:
        target_digits = ctx.digits
    kern = spec.kernel()
    if closure == "right":
        val = -residue_sum(kern, W_ONE, ctx, target_digits, side="right")
    elif closure == "left":
        val = +residue_sum(kern, W_ONE, ctx, target_digits, side="left")
    else:
        raise DomainError("closure must be 'right' or 'left'")
    with ctx.workprec():
        if isinstance(val, mpc):
            if abs(val.imag) > abs(val.real) * mpf(10) ** (-8):
                return val
            return val.real
        return val


def residue_sum_weighted(kind: str, w, contour: str, ctx: PrecisionContext,
                         target_digits: int | None = None):
    """(1/2 pi i) integral over C_* or C_** of kernel(s) * weight(s) ds.

    C_* circles the kernel's rightward pole ladders clockwise; C_** uses the
    ladder set {n+1/3} U {n-1/3} and therefore also picks up weight poles
    sitting at -1/3 + Z_{>=0}.  Clockwise orientation gives -sum(residues).
    """
    if target_digits is None:
        target_digits = ctx.digits
    kern = KERNELS[kind] if isinstance(kind, str) else kind
    if isinstance(w, str):
        w = WEIGHTS[w]
    total = residue_sum(kern, w, ctx, target_digits, side="right")
    if contour == "C_STAR_STAR":
        def in_pointset(pole: Fraction) -> bool:
            for offs in (Fraction(1, 3), Fraction(-1, 3)):
                d = pole - offs
                if d.denominator == 1 and d >= 0:
                    return True
            return False
        total += weight_pole_residues(kern, w, in_pointset, ctx)
    elif contour != "C_STAR":
        raise UnsupportedContour(f"unknown contour {contour!r}")
    with ctx.workprec():
        return -(total.real if isinstance(total, mpc) else total)


# ----------------------------------------------------------------------------
# Vertical-line contour integration.
# ----------------------------------------------------------------------------

def mb_vertical_line(kernel, delta: Fraction, w: Weight,
                     ctx: PrecisionContext, target_digits: int | None = None):
    """(1/2 pi i) integral over the vertical line Re s = delta of kernel * w.

    Exponential-class kernels integrate to full precision with the
    double-exponential rule; algebraic-class kernels (Phi) go through a
    capped 12-digit route with an analytic 1/tau^2 tail estimate.
    """
    if target_digits is None:
        target_digits = ctx.digits
    delta = Fraction(delta)
    if isinstance(w, str):
        w = WEIGHTS[w]
    if not kernel.pole_free(delta):
        raise UnsupportedContour(f"delta = {delta} sits on a kernel pole")
    if delta in w.poles():
        raise UnsupportedContour(f"delta = {delta} sits on a weight pole")
    d0 = _mpq(delta)

    def integrand(tau, ictx):
        s = mpc(d0, tau)
        val = kernel.eval(s, ictx)
        if not w.is_one():
            val *= w.eval_mp(s)
        return val.real / mp.pi

    if kernel.decay == "exponential":
        spec = quad.IntegrandSpec(integrand, mpf(0), quad.INF,
                                  quad.smooth(), quad.exp_decay(kernel.decay_param))
        return quad.integrate_de(spec, ctx, target_digits, probe=False)

    # algebraic route (Phi): finite pieces plus analytic tail; 12-digit cap
    target = min(target_digits, 12)
    lctx = PrecisionContext(work_bits=128, guard_bits=32)
    with lctx.workprec():
        T = mpf(10) ** 7
        p1 = quad.integrate_de(
            quad.IntegrandSpec(integrand, mpf(0), mpf(20),
                               quad.smooth(), quad.smooth()),
            lctx, target + 3, probe=False)

        def logsub(v, ictx):
            tau = mp.exp(v)
            return integrand(tau, ictx) * tau

        p2 = quad.integrate_de(
            quad.IntegrandSpec(logsub, mp.log(20), mp.log(T),
                               quad.smooth(), quad.smooth()),
            lctx, target + 3, probe=False)
        A = kernel.asym_coeff(lctx)
        w_inf = _mpq(w.const)
        tail = (A * w_inf * (-mpc(0, 1) / mpc(d0, T))).real / mp.pi
        result = p1 + p2 + tail
    with ctx.workprec():
        return +result


# ----------------------------------------------------------------------------
# The sunrise ODE basis: g1 (3F2), g2, g3 (Meijer G) with continuations.
# ----------------------------------------------------------------------------

F32_PARAMS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))


def f32_sunrise(w, ctx: PrecisionContext, target_digits: int | None = None):
    """3F2(1/3,1/2,2/3; 1,1; w) for real w < 1, continued past w = -1.

    |w| < 1 uses the defining series; w <= -1 the Mellin-Barnes rightward
    ladder sum in powers of 1/w (geometric, real).
    """
    if target_digits is None:
        target_digits = ctx.digits
    with ctx.workprec():
        wv = _to_mpf(w)
        if wv >= 1:
            raise DomainError("f32_sunrise needs w < 1")
    if abs(wv) < mpf("0.99"):
        return _f32_series(wv, ctx)
    if wv > -1:
        raise DomainError("f32_sunrise cannot evaluate near w = +1")

    def pref(ictx):
        with ictx.workprec():
            g = specfun.gamma
            return 1 / (g(Fraction(1, 3), ictx) * g(Fraction(1, 2), ictx)
                        * g(Fraction(2, 3), ictx))

    with ctx.workprec():
        lz = -mp.log(-wv)    # kernel carries (-w)^{+s} = z^{-s}, z = 1/(-w)
    kern = MBKernel(
        name="F32cont",
        factors=gammas((+1, Fraction(1, 3), 1), (+1, Fraction(1, 2), 1),
                       (+1, Fraction(2, 3), 1), (-1, Fraction(0), 1),
                       (+1, Fraction(1), -2)),
        prefactor=pref, log_z=lz, decay="exponential",
        decay_param=math.pi)
    val = residue_sum(kern, W_ONE, ctx, target_digits, side="left")
    with ctx.workprec():
        return val.real if isinstance(val, mpc) else val


def _f32_series(wv, ctx: PrecisionContext):
    from .hyper import pfq as _pfq
    return _pfq(PFQSpec(F32_PARAMS, (ONE, ONE), wv), ctx)


def g2_sunrise(w, ctx: PrecisionContext, target_digits: int | None = None):
    """G^{2,3}_{3,3}(w | 1/3,1/2,2/3 ; 0,0,0) on the principal branch.

    Complex-valued for w < 0 (log w = log|w| + i pi).  |w| > 1 sums the
    rightward simple ladders; |w| < 1 the leftward double ladder at -n
    (digamma/log terms).
    """
    if target_digits is None:
        target_digits = ctx.digits
    with ctx.workprec():
        wv = _to_mpf(w)
        lz = mpc(mp.log(abs(wv)), mp.pi) if wv < 0 else mp.log(wv)
    kern = MBKernel(
        name="G2333",
        factors=gammas((-1, Fraction(1, 3), 1), (-1, Fraction(1, 2), 1),
                       (-1, Fraction(2, 3), 1), (+1, Fraction(0), 2),
                       (-1, Fraction(1), -1)),
        log_z=lz, decay="exponential", decay_param=math.pi)
    if abs(wv) > 1:
        val = -residue_sum(kern, W_ONE, ctx, target_digits, side="right")
    elif abs(wv) < 1:
        val = +residue_sum(kern, W_ONE, ctx, target_digits, side="left")
    else:
        raise DomainError("g2_sunrise undefined at |w| = 1")
    with ctx.workprec():
        return val


def g3_sunrise(x, ctx: PrecisionContext, target_digits: int | None = None):
    """G^{3,3}_{3,3}(x | 1/3,1/2,2/3 ; 0,0,0) for real x > 1."""
    if target_digits is None:
        target_digits = ctx.digits
    with ctx.workprec():
        xv = _to_mpf(x)
        if xv <= 1:
            raise DomainError("g3_sunrise needs x > 1")
        lz = mp.log(xv)
    kern = MBKernel(
        name="G3333",
        factors=gammas((-1, Fraction(1, 3), 1), (-1, Fraction(1, 2), 1),
                       (-1, Fraction(2, 3), 1), (+1, Fraction(0), 3)),
        log_z=lz, decay="exponential", decay_param=0.1)
    val = -residue_sum(kern, W_ONE, ctx, target_digits, side="right")
    with ctx.workprec():
        return val.real if isinstance(val, mpc) else val


# ----------------------------------------------------------------------------
# Bailey's very-well-poised 7F6 <-> G^{2,4}_{4,4} correspondence.
# ----------------------------------------------------------------------------

def bailey_7f6_spec(a, b, c, d, e, f) -> PFQSpec:
    a, b, c, d, e, f = (Fraction(x) for x in (a, b, c, d, e, f))
    upper = (a, 1 + a / 2, b, c, d, e, f)
    lower = (a / 2, 1 + a - b, 1 + a - c, 1 + a - d, 1 + a - e, 1 + a - f)
    return PFQSpec(upper, lower, 1)


def bailey_g_spec(a, b, c, d, e, f) -> MeijerGSpec:
    a, b, c, d, e, f = (Fraction(x) for x in (a, b, c, d, e, f))
    return MeijerGSpec(2, 4, 4, 4,
                       a=(e + f - a, 1 - b, 1 - c, 1 - d),
                       b=(Fraction(0), 1 + a - b - c - d, e - a, f - a), z=1)


def bailey_prefactor(a, b, c, d, e, f, ctx: PrecisionContext):
    a, b, c, d, e, f = (Fraction(x) for x in (a, b, c, d, e, f))
    g = lambda q: specfun.gamma(q, ctx)
    with ctx.workprec():
        num = (g(1 + a - b) * g(1 + a - c) * g(1 + a - d) * g(1 + a - e)
               * g(1 + a - f))
        den = (g(a + 1) * g(b) * g(c) * g(d) * g(1 + a - b - c)
               * g(1 + a - b - d) * g(1 + a - c - d) * g(1 + a - e - f))
        return num / den
