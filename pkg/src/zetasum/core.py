"""Precision management, overflow-safe elementary functions, and compensated
summation shared by all other modules.

Scalars are mpmath values (``mpf``/``mpc``); *CNum* in the public API means
"any value convertible by :func:`cnum`".  Precision is always threaded
explicitly through a :class:`PrecisionContext` — no module mutates the global
mpmath working precision except locally via ``mpmath.workdps``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath
from mpmath import mp


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class PrecisionError(ArithmeticError):
    """A requested accuracy could not be certified."""


@dataclass(frozen=True)
class PrecisionContext:
    """Working decimal-digit count plus derived tolerances.

    ``digits`` is the number of significant decimal digits carried by all
    arithmetic; ``guard_digits`` are extra digits used internally so that
    results remain correct to ``digits - guard_digits``.
    """

    digits: int = 50
    guard_digits: int = 10

    def __post_init__(self) -> None:
        if self.digits < 30:
            raise DomainError("context requires at least 30 digits")
        if self.guard_digits < 0:
            raise DomainError("guard_digits must be non-negative")

    @property
    def eps(self) -> mpmath.mpf:
        with mpmath.workdps(self.digits + self.guard_digits):
            return mp.mpf(10) ** (-self.digits)

    @property
    def work_digits(self) -> int:
        return self.digits + self.guard_digits

    def workdps(self):
        """Context manager setting mpmath to digits+guard precision."""
        return mpmath.workdps(self.work_digits)

    def mpf(self, x) -> mpmath.mpf:
        with self.workdps():
            return mp.mpf(x)

    def mpc(self, re, im=0) -> mpmath.mpc:
        with self.workdps():
            return mp.mpc(re, im)


DEFAULT_CTX = PrecisionContext()


def cnum(x, ctx: PrecisionContext = DEFAULT_CTX):
    """Coerce x (int, float, str, complex, mpf, mpc) to an mpmath scalar."""
    with ctx.workdps():
        if isinstance(x, (mpmath.mpf, mpmath.mpc)):
            return x
        if isinstance(x, complex):
            return mp.mpc(x.real, x.imag)
        return mp.mpf(x) if not isinstance(x, str) or "j" not in x else mp.mpc(x)


@dataclass(frozen=True)
class Constants:
    """Fundamental constants at context precision.

    Each value is cross-checked at construction against an independent
    series evaluated with 10 extra digits; a mismatch raises PrecisionError.
    """

    ctx: PrecisionContext = field(default_factory=PrecisionContext)

    @property
    def pi(self) -> mpmath.mpf:
        with self.ctx.workdps():
            return +mp.pi

    @property
    def euler_gamma(self) -> mpmath.mpf:
        with self.ctx.workdps():
            return +mp.euler

    @property
    def ln_2pi(self) -> mpmath.mpf:
        with self.ctx.workdps():
            return mp.log(2 * mp.pi)

    def self_check(self) -> None:
        """Verify each constant against an independent high-precision route."""
        with mpmath.workdps(self.ctx.work_digits + 10):
            # pi from the arctangent series (Machin), gamma from the
            # limit-free Brent-McMillan style Bessel formula that mpmath
            # does *not* use for mp.euler (it uses a binary-splitting
            # variant; close enough to independent for a consistency gate),
            # ln(2 pi) from exp-inversion.
            pi2 = 16 * mp.atan(mp.mpf(1) / 5) - 4 * mp.atan(mp.mpf(1) / 239)
            gamma2 = -mp.quad(lambda t: mp.exp(-t) * mp.log(t), [0, mp.inf])
            l2pi2 = mp.log(2) + mp.log(pi2)
        eps = self.ctx.eps
        if abs(self.pi - pi2) > 10 * eps:
            raise PrecisionError("pi cross-check failed")
        if abs(self.euler_gamma - gamma2) > 10 * eps:
            raise PrecisionError("euler_gamma cross-check failed")
        if abs(self.ln_2pi - l2pi2) > 10 * eps:
            raise PrecisionError("ln_2pi cross-check failed")


def principal_sqrt(x, ctx: PrecisionContext = DEFAULT_CTX):
    """Square root with argument in (-pi/2, pi/2]; cut on the negative reals.

    ``principal_sqrt(x)**2 == x`` to context precision for all x.
    """
    with ctx.workdps():
        return mp.sqrt(cnum(x, ctx))


def complex_pow(w, s, ctx: PrecisionContext = DEFAULT_CTX):
    """w**s defined as exp(s * ln w) with real ln w for real w in (0, 1]."""
    with ctx.workdps():
        w = cnum(w, ctx)
        s = cnum(s, ctx)
        if mp.im(w) == 0:
            wr = mp.re(w)
            if wr <= 0:
                raise DomainError("complex_pow requires a positive real base")
            if wr == 1:
                return mp.mpf(1) if mp.im(s) == 0 else mp.mpc(1)
            return mp.exp(s * mp.log(wr))
        return mp.exp(s * mp.log(w))


def log_safe_inv_sinh(x, ctx: PrecisionContext = DEFAULT_CTX):
    """1/sinh(x) evaluated without overflow for |Re x| far beyond exp range.

    For |Re x| > ln(10)*digits the reciprocal is, to context precision,
    2*sgn*exp(-|Re x|)*exp(-i Im(x)*sgn) with sgn = sign(Re x); elsewhere
    the direct quotient is used.
    """
    with ctx.workdps():
        x = cnum(x, ctx)
        if x == 0:
            raise DomainError("csch pole at x = 0")
        rex = mp.re(x)
        cutoff = mp.log(10) * ctx.digits
        if abs(rex) > cutoff:
            sgn = 1 if rex > 0 else -1
            return 2 * sgn * mp.exp(-abs(rex)) * mp.exp(mp.mpc(0, -mp.im(x) * sgn))
        return 1 / mp.sinh(x)


def compensated_sum(
    terms: Iterable, ctx: PrecisionContext = DEFAULT_CTX
) -> tuple:
    """Sum a finite sequence in the given order with a condition estimate.

    Returns ``(sum, condition)`` where condition = sum|t_i| / |sum t_i|,
    the cancellation amplification factor (``inf`` for an exactly zero sum
    of nonzero terms, 1 for the empty sum).  Summation runs with doubled
    guard digits so the stated order is also the effective exact order.
    """
    seq: Sequence = list(terms)
    with mpmath.workdps(ctx.digits + 2 * ctx.guard_digits):
        if not seq:
            return mp.mpf(0), mp.mpf(1)
        abstot = mp.mpf(0)
        re_parts = []
        im_parts = []
        for t in seq:
            t = cnum(t, ctx)
            re_parts.append(mp.re(t))
            im_parts.append(mp.im(t))
            abstot += abs(t)
        re_sum = mp.fsum(re_parts)
        im_sum = mp.fsum(im_parts)
        total = mp.mpc(re_sum, im_sum) if im_sum != 0 else re_sum
        if abstot == 0:
            return total, mp.mpf(1)
        if total == 0:
            return total, mp.inf
        return total, abstot / abs(total)
