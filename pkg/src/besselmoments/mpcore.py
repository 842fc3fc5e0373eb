"""Precision policy, adaptive re-evaluation and digit-agreement measurement.

Precision is always explicit: every numeric operation in this package takes a
:class:`PrecisionContext` and runs at ``work_bits + guard_bits`` binary digits.
Correctness policy for computed values is agreement of two evaluations at
successive precisions, not interval arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import mp, mpf

from .errors import PrecisionExhausted

# Largest digit count digits_agreement will report; returned for exact equality.
AGREEMENT_CAP = 10_000

LOG10_2 = math.log10(2.0)


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in bits plus guard policy.

    work_bits   binary precision results are quoted at (>= 64)
    guard_bits  extra bits used internally by operations (>= 16)
    max_bits    escalation ceiling for adaptive re-evaluation
    """

    work_bits: int = 192
    guard_bits: int = 32
    max_bits: int = 1 << 16

    def __post_init__(self):
        if self.work_bits < 64:
            raise ValueError("work_bits must be >= 64")
        if self.guard_bits < 16:
            raise ValueError("guard_bits must be >= 16")
        if self.max_bits < self.work_bits:
            raise ValueError("max_bits must be >= work_bits")

    @property
    def prec(self) -> int:
        """Total binary precision used inside operations."""
        return self.work_bits + self.guard_bits

    @property
    def digits(self) -> int:
        """Decimal digits carried by work_bits."""
        return int(self.work_bits * LOG10_2)

    @property
    def guard_digits(self) -> int:
        return max(1, int(self.guard_bits * LOG10_2))

    def with_bits(self, work_bits: int) -> "PrecisionContext":
        return replace(self, work_bits=work_bits, max_bits=max(self.max_bits, work_bits))

    def boosted(self, extra_bits: int) -> "PrecisionContext":
        return self.with_bits(self.work_bits + extra_bits)

    def workprec(self):
        """mpmath context manager running at this context's precision."""
        return mp.workprec(self.prec)


def ctx_for_digits(target_digits: int, guard_bits: int = 32,
                   max_bits: int = 1 << 16) -> PrecisionContext:
    """Context sized per the adaptive-evaluation start rule."""
    guard_digits = max(1, int(guard_bits * LOG10_2))
    bits = int(math.ceil(3.33 * (target_digits + guard_digits))) + 64
    return PrecisionContext(work_bits=max(64, bits), guard_bits=guard_bits,
                            max_bits=max(max_bits, bits))


def mpf_from(x, ctx: PrecisionContext):
    """Convert int/Fraction/float/str/mpf to mpf at the context precision."""
    with ctx.workprec():
        if isinstance(x, Fraction):
            return mpf(x.numerator) / x.denominator
        return mpf(x)


def to_decimal_string(x, ctx: PrecisionContext) -> str:
    """Decimal string carrying ceil(work_bits*0.302) digits (round-trip safe)."""
    dps = int(math.ceil(ctx.work_bits * 0.302))
    with ctx.workprec():
        return mpmath.nstr(mpf(x), dps, strip_zeros=False)


def digits_agreement(a, b) -> int:
    """Largest d >= 0 with |a-b| <= 10^-d * max(|a|, |b|, 1).

    The scale floor of 1 gives an absolute-digit fallback when both values
    are tiny (e.g. residuals of vanishing sums).  Exact equality reports
    AGREEMENT_CAP.  Complex inputs are compared in modulus.
    """
    if not isinstance(a, (mpf, mpmath.mpc)):
        a = mpf(a)
    if not isinstance(b, (mpf, mpmath.mpc)):
        b = mpf(b)
    if a == b:
        return AGREEMENT_CAP
    with mp.workprec(mp.prec + 16):
        delta = abs(a - b)
        scale = max(abs(a), abs(b), mpf(1))
        d = int(mpmath.floor(mpmath.log10(scale / delta)))
    return max(0, min(d, AGREEMENT_CAP))


@dataclass(frozen=True)
class AdaptiveResult:
    value: object            # mpf
    agreed_digits: int
    work_bits: int           # bits of the final evaluation
    evaluations: int

    def __float__(self):
        return float(self.value)


def adaptive_eval(evaluator: Callable[[PrecisionContext], object],
                  target_digits: int,
                  guard_bits: int = 32,
                  max_bits: int = 1 << 16,
                  start_bits: int | None = None) -> AdaptiveResult:
    """Evaluate at doubling precisions until two successive results agree.

    ``evaluator`` must be a pure function of its PrecisionContext.  Agreement
    means ``digits_agreement >= target_digits + guard`` where guard is the
    decimal equivalent of ``guard_bits``.  Raises PrecisionExhausted when
    ``max_bits`` is reached without agreement.
    """
    guard_digits = max(1, int(guard_bits * LOG10_2))
    needed = target_digits + guard_digits
    if start_bits is None:
        start_bits = int(math.ceil(3.33 * needed)) + 64
    bits = max(64, start_bits)
    ctx = PrecisionContext(work_bits=bits, guard_bits=guard_bits,
                           max_bits=max(max_bits, bits))
    prev = evaluator(ctx)
    evaluations = 1
    while True:
        bits *= 2
        if bits > max_bits:
            raise PrecisionExhausted(
                f"no {needed}-digit agreement below {max_bits} bits")
        ctx = ctx.with_bits(bits)
        cur = evaluator(ctx)
        evaluations += 1
        agreed = digits_agreement(cur, prev)
        if agreed >= needed:
            return AdaptiveResult(value=cur, agreed_digits=agreed,
                                  work_bits=bits, evaluations=evaluations)
        prev = cur
