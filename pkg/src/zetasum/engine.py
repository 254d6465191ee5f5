"""Extended-precision evaluation of zeta, its first two derivatives, gamma,
the continuous gamma argument, the Hardy phase, U(rho), and the critical-line
symbol bundle.

Evaluation strategy for zeta
----------------------------
* ``Re s >= -1/2`` and moderate height: Euler-Maclaurin with
  ``N = max(ceil(1.3*digits), ceil(3*|Im s|))`` cutoff and Bernoulli order
  ``p = digits/2`` rounded up to even.  Derivative orders 1 and 2 come from
  term-wise differentiation of the same formula (the Pochhammer polynomial
  and its derivatives are built by a product recurrence, which stays exact
  at negative integer arguments).
* ``Re s < -1/2``: the functional equation
  ``zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)``
  written as ``G(s) * sin(pi s/2)`` so that derivatives at the trivial zeros
  (where the sine factor vanishes) stay well-conditioned.
* ``|Im s|`` above ``DELEGATE_HEIGHT``: delegated to mpmath's zeta (its
  Riemann-Siegel path); the Euler-Maclaurin term count mandated above grows
  linearly with height and is not usable there.  Delegated results carry an
  est_error of 10*eps*|value|.

Gamma and the digamma/trigamma helpers use the Stirling asymptotic series
after recurrence-shifting the argument to modulus ``>= 0.4*digits + 8``;
``arg_gamma`` is the imaginary part of the shifted log-gamma, which is
continuous along vertical lines in the right half-plane by construction
(every shift factor stays in the right half-plane, so no principal-branch
jumps occur).
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp

from .core import DomainError, PrecisionContext, PrecisionError, cnum

DEFAULT_CTX = PrecisionContext()

#: Height above which zeta evaluation is delegated to mpmath (see module doc).
DELEGATE_HEIGHT = 400


class PoleError(DomainError):
    """Evaluation requested exactly at a pole."""


class DivergenceFlag(ArithmeticError):
    """U(rho) evaluated where its defining cotangent argument hits a pole
    of the identity family (argument = (n+1/2)*pi within tolerance)."""


@dataclass(frozen=True)
class ZetaValue:
    value: object  # mpf/mpc
    order: int
    est_error: object  # mpf

    def __complex__(self) -> complex:
        return complex(self.value)


@dataclass(frozen=True)
class PhaseValue:
    rho: object
    phi: object
    Z: object


@dataclass(frozen=True)
class AppendixBundle:
    rho: object
    D_R: object
    D_I: object
    N: object
    C_p: object
    C_m: object
    Gamma_R: object
    Gamma_I: object
    D_plus: object
    D_minus: object
    Gamma_plus: object
    Gamma_minus: object


# ---------------------------------------------------------------------------
# Euler-Maclaurin core
# ---------------------------------------------------------------------------

def em_parameters(s, ctx: PrecisionContext) -> tuple:
    """The documented (N, p) selection rule for the Euler-Maclaurin sum."""
    n_terms = max(int(mp.ceil(mp.mpf("1.3") * ctx.digits)),
                  int(mp.ceil(3 * abs(mp.im(s)))))
    p = ctx.digits // 2
    if p % 2:
        p += 1
    return n_terms, p


def _zeta_em(s, order: int, ctx: PrecisionContext):
    """Euler-Maclaurin zeta and derivatives; valid for Re s >= -1/2 at
    moderate height.  Returns (value, est_error)."""
    with ctx.workdps():
        n_big, p = em_parameters(s, ctx)
        nn = mp.mpf(n_big)
        ln_n = mp.log(nn)
        # Partial Dirichlet sum and its log-weighted versions.
        v0 = mp.mpf(0); v1 = mp.mpf(0); v2 = mp.mpf(0)
        for k in range(1, n_big):
            t = mp.power(k, -s)
            v0 += t
            if order >= 1:
                lk = mp.log(k)
                v1 -= lk * t
                if order >= 2:
                    v2 += lk * lk * t
        npow = mp.power(nn, -s)          # N^-s
        # midpoint term N^-s / 2
        v0 += npow / 2
        if order >= 1:
            v1 -= ln_n * npow / 2
        if order >= 2:
            v2 += ln_n * ln_n * npow / 2
        # integral term N^(1-s)/(s-1)
        sm1 = s - 1
        ipow = nn * npow
        v0 += ipow / sm1
        if order >= 1:
            v1 += ipow * (-ln_n / sm1 - 1 / sm1**2)
        if order >= 2:
            v2 += ipow * (ln_n**2 / sm1 + 2 * ln_n / sm1**2 + 2 / sm1**3)
        # Bernoulli corrections: B_2j/(2j)! * P_{2j-1}(s) * N^(-s-2j+1)
        # with P_m(s) = s(s+1)...(s+m-1), built by a product recurrence that
        # also tracks first and second derivatives.  The documented p is a
        # floor; the series is extended term by term until the correction
        # magnitude certifies the tail below working eps (the corrections
        # decay geometrically like ((|s|+2j)/(2 pi N))^2 per step, so the
        # last included term bounds the tail up to a factor ~2).
        pv = mp.mpf(1); dp = mp.mpf(0); d2p = mp.mpf(0)
        npw = npow * nn                  # N^(-s+1); divide by N^2 per step
        last = mp.inf
        target = mp.mpf(10) ** (-ctx.work_digits - 2)
        jmax = max(p // 2, 4 * ctx.digits)
        for j in range(1, jmax + 1):
            for m in (2 * j - 3, 2 * j - 2):
                if m < 0:
                    continue
                f = s + m
                d2p = d2p * f + 2 * dp
                dp = dp * f + pv
                pv = pv * f
            npw = npw / (nn * nn)        # now N^(-s-2j+1)
            coeff = mp.bernoulli(2 * j) / mp.factorial(2 * j)
            term0 = coeff * pv * npw
            size = max(abs(term0), abs(coeff * npw * dp),
                       abs(coeff * npw * d2p) if order >= 2 else 0)
            if j > p // 2 and size > last:
                raise PrecisionError(
                    f"Euler-Maclaurin corrections diverging at s={s}")
            v0 += term0
            if order >= 1:
                v1 += coeff * npw * (dp - ln_n * pv)
            if order >= 2:
                v2 += coeff * npw * (d2p - 2 * ln_n * dp + ln_n**2 * pv)
            last = size
            if j >= p // 2 and size < target:
                break
        value = (v0, v1, v2)[order]
        est = 2 * last + abs(value) * ctx.eps / 10**ctx.guard_digits
        return value, est


# ---------------------------------------------------------------------------
# Stirling gamma / digamma / trigamma
# ---------------------------------------------------------------------------

def _stirling_shift(s, ctx: PrecisionContext) -> int:
    target = mp.mpf("0.4") * ctx.work_digits + 8
    m = 0
    while abs(s + m) < target or mp.re(s + m) < mp.mpf("0.5"):
        m += 1
    return m


def log_gamma(s, ctx: PrecisionContext = DEFAULT_CTX):
    """log Gamma via the Stirling series after a recurrence shift.

    Continuous (no branch jumps) along vertical lines in Re s > 0.
    """
    with ctx.workdps():
        s = cnum(s, ctx)
        if mp.im(s) == 0 and mp.re(s) <= 0 and mp.re(s) == mp.floor(mp.re(s)):
            raise PoleError(f"Gamma pole at s={s}")
        m = _stirling_shift(s, ctx)
        z = s + m
        out = (z - mp.mpf("0.5")) * mp.log(z) - z + mp.log(2 * mp.pi) / 2
        zpw = z
        prev = mp.inf
        for j in range(1, 4 * ctx.work_digits):
            term = mp.bernoulli(2 * j) / ((2 * j) * (2 * j - 1) * zpw)
            if abs(term) < mp.mpf(10) ** (-ctx.work_digits - 5):
                out += term
                break
            if abs(term) > prev:
                raise PrecisionError("Stirling series failed to converge")
            out += term
            prev = abs(term)
            zpw *= z * z
        for k in range(m):
            out -= mp.log(s + k)
        return out


def gamma_value(s, ctx: PrecisionContext = DEFAULT_CTX):
    """Gamma(s); reflection for Re s <= 0 to keep the shift count small."""
    with ctx.workdps():
        s = cnum(s, ctx)
        if mp.re(s) < mp.mpf("-0.5"):
            if mp.im(s) == 0 and mp.re(s) == mp.floor(mp.re(s)):
                raise PoleError(f"Gamma pole at s={s}")
            return mp.pi / (mp.sin(mp.pi * s) * mp.exp(log_gamma(1 - s, ctx)))
        return mp.exp(log_gamma(s, ctx))


def arg_gamma(s, ctx: PrecisionContext = DEFAULT_CTX):
    """Continuous (unwrapped) argument of Gamma(s) for Re s > 0."""
    with ctx.workdps():
        s = cnum(s, ctx)
        if mp.re(s) <= 0:
            raise DomainError("arg_gamma implemented for Re s > 0 only")
        return mp.im(log_gamma(s, ctx))


def digamma(s, ctx: PrecisionContext = DEFAULT_CTX):
    with ctx.workdps():
        s = cnum(s, ctx)
        m = _stirling_shift(s, ctx)
        z = s + m
        out = mp.log(z) - 1 / (2 * z)
        z2 = z * z
        zpw = z2
        for j in range(1, 4 * ctx.work_digits):
            term = mp.bernoulli(2 * j) / (2 * j * zpw)
            out -= term
            if abs(term) < mp.mpf(10) ** (-ctx.work_digits - 5):
                break
            zpw *= z2
        for k in range(m):
            out -= 1 / (s + k)
        return out


def trigamma(s, ctx: PrecisionContext = DEFAULT_CTX):
    with ctx.workdps():
        s = cnum(s, ctx)
        m = _stirling_shift(s, ctx)
        z = s + m
        out = 1 / z + 1 / (2 * z * z)
        z2 = z * z
        zpw = z * z2
        for j in range(1, 4 * ctx.work_digits):
            term = mp.bernoulli(2 * j) / zpw
            out += term
            if abs(term) < mp.mpf(10) ** (-ctx.work_digits - 5):
                break
            zpw *= z2
        for k in range(m):
            out += 1 / (s + k) ** 2
        return out


# ---------------------------------------------------------------------------
# zeta dispatch
# ---------------------------------------------------------------------------

def _zeta_reflected(s, order: int, ctx: PrecisionContext):
    """Functional-equation route, written as G(s)*sin(pi s/2)."""
    with ctx.workdps():
        u = 1 - s
        z0, e0 = _zeta_em(u, 0, ctx)
        g = mp.power(2, s) * mp.power(mp.pi, s - 1) \
            * mp.exp(log_gamma(u, ctx)) * z0
        sn = mp.sin(mp.pi * s / 2)
        if order == 0:
            val = g * sn
            return val, abs(g) * 2 * e0 / max(abs(z0), mp.mpf(10) ** (-ctx.work_digits))
        z1, e1 = _zeta_em(u, 1, ctx)
        g1 = mp.log(2 * mp.pi) - digamma(u, ctx) - z1 / z0
        cs = mp.pi / 2 * mp.cos(mp.pi * s / 2)
        if order == 1:
            val = g * (g1 * sn + cs)
            est = abs(val) * ctx.eps / 10**ctx.guard_digits + abs(g) * (e0 + e1)
            return val, est
        z2, e2 = _zeta_em(u, 2, ctx)
        dg1 = trigamma(u, ctx) + (z2 * z0 - z1 * z1) / (z0 * z0)
        g2 = g1 * g1 + dg1
        val = g * (g2 * sn + 2 * g1 * cs - (mp.pi / 2) ** 2 * sn)
        est = abs(val) * ctx.eps / 10**ctx.guard_digits + abs(g) * (e0 + e1 + e2)
        return val, est


def _zeta_any(s, order: int, ctx: PrecisionContext):
    with ctx.workdps():
        s = cnum(s, ctx)
        if s == 1:
            raise PoleError("zeta pole at s=1")
        if (order == 0 and mp.im(s) == 0 and mp.re(s) < 0
                and mp.isint(mp.re(s)) and int(mp.re(s)) % 2 == 0):
            return mp.mpf(0), mp.mpf(0)   # trivial zero, exact
        if abs(mp.im(s)) > DELEGATE_HEIGHT:
            val = mp.zeta(s, derivative=order) if order else mp.zeta(s)
            return val, 10 * abs(val) * ctx.eps
        if mp.re(s) >= mp.mpf("-0.5"):
            return _zeta_em(s, order, ctx)
        return _zeta_reflected(s, order, ctx)


def zeta(s, ctx: PrecisionContext = DEFAULT_CTX) -> ZetaValue:
    """zeta(s) to context precision (see module docstring for the route)."""
    val, est = _zeta_any(s, 0, ctx)
    if not est < abs(val) * ctx.eps * 10**ctx.guard_digits + mp.mpf(10) ** (
            -ctx.digits):
        raise PrecisionError(f"zeta({s}): tail bound {est} too large")
    return ZetaValue(val, 0, est)


def zeta_deriv(s, order: int, ctx: PrecisionContext = DEFAULT_CTX,
               check: bool = True) -> ZetaValue:
    """First or second derivative of zeta.

    The term-wise differentiated route is the primary; when ``check`` is
    set, a central-difference oracle with step 10^(-digits/3) must agree to
    10^(-digits/2) relative, else PrecisionError.
    """
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    val, est = _zeta_any(s, order, ctx)
    if check:
        with ctx.workdps():
            s = cnum(s, ctx)
            h = mp.mpf(10) ** (-(ctx.digits // 3))
            if order == 1:
                fd = (_zeta_any(s + h, 0, ctx)[0]
                      - _zeta_any(s - h, 0, ctx)[0]) / (2 * h)
            else:
                fd = (_zeta_any(s + h, 0, ctx)[0] - 2 * _zeta_any(s, 0, ctx)[0]
                      + _zeta_any(s - h, 0, ctx)[0]) / (h * h)
            tol = mp.mpf(10) ** (-(ctx.digits // 2))
            scale = max(abs(val), mp.mpf(1))
            if not abs(fd - val) <= tol * scale:
                raise PrecisionError(
                    f"zeta_deriv({s},{order}): finite-difference oracle "
                    f"disagrees ({fd} vs {val})")
    return ZetaValue(val, order, est)


def zeta_prime_neg_even(n: int, ctx: PrecisionContext = DEFAULT_CTX):
    """Closed form zeta'(-2n) = (-1)^n zeta(2n+1) (2n)! / (2 (2pi)^(2n))."""
    if n < 1:
        raise DomainError("n must be >= 1")
    with ctx.workdps():
        z = _zeta_any(mp.mpf(2 * n + 1), 0, ctx)[0]
        return (-1) ** n * z * mp.factorial(2 * n) / (2 * (2 * mp.pi) ** (2 * n))


# ---------------------------------------------------------------------------
# Hardy phase, U(rho), appendix bundle
# ---------------------------------------------------------------------------

def _hurwitz_int(s: int, a, ctx: PrecisionContext):
    """zeta(s, a) for integer s >= 2 and real a > 0 by Euler-Maclaurin.

    mpmath's Hurwitz route loses tens of digits for large integer s at
    moderate a; this direct evaluation keeps every term positive-scale so
    accuracy tracks the working precision.
    """
    with ctx.workdps():
        a = mp.mpf(a)
        # the correction series bottoms out near exp(-2 pi x): x must grow
        # with both the order s and the requested digits; on a near-miss
        # the start point is enlarged and the evaluation retried
        x_min = max(mp.mpf(s) / 4, mp.mpf("0.55") * (ctx.work_digits + 8), 12)
        for _attempt in range(6):
            n_start = max(int(mp.ceil(x_min - a)), 0)
            total = mp.fsum((k + a) ** (-s) for k in range(n_start))
            x = n_start + a
            total += x ** (1 - s) / (s - 1) + x ** (-s) / 2
            tol = abs(total) * mp.mpf(10) ** (-ctx.work_digits - 3)
            poch = mp.mpf(s)          # (s)_{2j-1} running product
            xpow = x ** (-s - 1)
            j = 1
            prev = mp.inf
            diverged = False
            while True:
                term = mp.bernoulli(2 * j) / mp.factorial(2 * j) * poch * xpow
                if abs(term) > prev:
                    diverged = True
                    break
                total += term
                if abs(term) < tol:
                    return total
                prev = abs(term)
                poch *= (s + 2 * j - 1) * (s + 2 * j)
                xpow /= x * x
                j += 1
            if diverged:
                x_min = x_min * 3 / 2 + s / 8
        raise PrecisionError(
            f"hurwitz({s},{a}): asymptotic series diverging")


def phase_phi(rho, ctx: PrecisionContext = DEFAULT_CTX) -> PhaseValue:
    """Hardy phase phi(rho) from its arctangent series, plus the real Z.

    phi = -(gamma + log pi + 3 log 2 + pi/2) rho / 2
          + sum_{k>=0} [2 rho/(4k+1) - arctan(2 rho/(4k+1))].

    The series tail (terms with 2 rho/(4k+1) < 1/2) is resummed exactly as
    sum_m (-1)^(m+1) (2 rho)^(2m+1)/(2m+1) 4^-(2m+1) zeta(2m+1, K+1/4),
    a geometric-rate Hurwitz-zeta expansion, so the tail bound is explicit.
    """
    with ctx.workdps():
        rho = mp.mpf(rho)
        if rho <= 0:
            raise DomainError("phase_phi requires rho > 0")
        phi = -(mp.euler + mp.log(mp.pi) + 3 * mp.log(2) + mp.pi / 2) * rho / 2
        big_k = int(mp.ceil(rho)) + 4
        for k in range(big_k):
            x = 2 * rho / (4 * k + 1)
            phi += x - mp.atan(x)
        ratio = 2 * rho / (4 * big_k + 1)
        x2 = -(ratio * (4 * big_k + 1)) ** 2   # (2 rho)^2 with sign folded in
        pw = 2 * rho
        tail_ok = False
        for m in range(1, 16 * ctx.work_digits):
            pw *= x2  # accumulates (-1)^m (2 rho)^(2m+1)
            hz = _hurwitz_int(2 * m + 1, mp.mpf(big_k) + mp.mpf(1) / 4, ctx)
            term = -pw * hz / (2 * m + 1) * mp.power(4, -(2 * m + 1))
            phi += term
            if abs(term) < mp.mpf(10) ** (-ctx.work_digits - 2):
                tail_ok = True
                break
        if not tail_ok:
            raise PrecisionError("phase series tail bound not met")
        zval = _zeta_any(mp.mpc(mp.mpf(1) / 2, rho), 0, ctx)[0]
        z_real = zval * mp.exp(mp.mpc(0, 1) * phi)
        return PhaseValue(rho, phi, z_real)


def u_of_rho(rho, ctx: PrecisionContext = DEFAULT_CTX,
             flag_tol=None):
    """U(rho) = cot(-arg Gamma(1/2+i rho)/2 + rho ln(2 pi)/2
    + arctan(tanh(pi rho/2))/2), with the unwrapped gamma argument.

    Raises DivergenceFlag when the cotangent argument sits on the identity
    family's divergence lattice (odd multiples of pi/2) within ``flag_tol``.
    """
    with ctx.workdps():
        rho = mp.mpf(rho)
        if rho <= 0:
            raise DomainError("u_of_rho requires rho > 0")
        if flag_tol is None:
            flag_tol = mp.mpf(10) ** (-ctx.work_digits) / 10
        arg = (-arg_gamma(mp.mpc(mp.mpf(1) / 2, rho), ctx) / 2
               + rho * mp.log(2 * mp.pi) / 2
               + mp.atan(mp.tanh(mp.pi * rho / 2)) / 2)
        # distance to the nearest odd multiple of pi/2
        q = arg / mp.pi - mp.mpf(1) / 2
        dist = abs(q - mp.nint(q)) * mp.pi
        if dist < flag_tol:
            raise DivergenceFlag(f"U(rho) divergence lattice hit at rho={rho}")
        return mp.cot(arg)


def appendix_bundle(rho, ctx: PrecisionContext = DEFAULT_CTX) -> AppendixBundle:
    """The critical-line symbol bundle (D_R, D_I, N, C_p, C_m, Gamma_R,
    Gamma_I, D_+, D_-, Gamma_+, Gamma_-) at 1/2 + i rho."""
    with ctx.workdps():
        rho = mp.mpf(rho)
        if rho <= 0:
            raise DomainError("appendix_bundle requires rho > 0")
        g = gamma_value(mp.mpc(mp.mpf(1) / 2, rho), ctx)
        gr, gi = mp.re(g), mp.im(g)
        ch, sh = mp.cosh(mp.pi * rho / 2), mp.sinh(mp.pi * rho / 2)
        cp = gr * ch + gi * sh
        cm = gi * ch - gr * sh
        ell = rho * mp.log(2 * mp.pi)
        d_r = mp.mpf(1) / 2 - (cp * mp.cos(ell) + cm * mp.sin(ell)) / (2 * mp.sqrt(mp.pi))
        d_i = 1 - d_r
        n2 = d_r * d_i
        n = mp.sqrt(n2) if n2 >= 0 else mp.mpc(0, mp.sqrt(-n2))
        ep, em = mp.exp(mp.pi * rho / 2), mp.exp(-mp.pi * rho / 2)
        g_plus = gr * em + gi * ep
        g_minus = -gr * ep + gi * em
        d_plus = g_plus * mp.cos(ell) + g_minus * mp.sin(ell) - mp.sqrt(mp.pi)
        d_minus = -g_plus * mp.sin(ell) + g_minus * mp.cos(ell) + mp.sqrt(mp.pi)
        return AppendixBundle(rho, d_r, d_i, n, cp, cm, gr, gi,
                              d_plus, d_minus, g_plus, g_minus)


# ---------------------------------------------------------------------------
# double-precision critical-line fast path (used by the long trace)
# ---------------------------------------------------------------------------

def zeta_prime_on_line_fast(rho: float) -> complex:
    """zeta'(1/2 + i rho) at a *zero* ordinate rho, double precision.

    At a simple zero, zeta'(tau) = -i exp(-i theta(rho)) Z'(rho) with theta
    the Riemann-Siegel theta and Z the Hardy function; both are cheap at any
    height in double precision.  Only valid on zero ordinates.
    """
    from mpmath import fp
    zp = fp.siegelz(rho, derivative=1)
    th = fp.siegeltheta(rho)
    return complex(-1j * fp.exp(-1j * th) * zp)
