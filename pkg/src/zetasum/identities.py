"""Registry of verifiable sum-rule identities over the zeta zeros.

Every identity relates a weighted sum over nontrivial zeros (and/or a
contour integral of one of the kernel families) to closed forms and series
built from zeta, its derivatives at the negative even integers, and gamma
factors.  Each registry entry exposes *independent* left/right evaluators:
the two sides never share an intermediate sum, so an agreement is evidence,
not an echo.

The module provides

* :class:`IdentityId`       -- the enumeration of supported identities,
* :class:`TruncationPlan`   -- sum-length caps and the resulting tail bounds,
* :class:`IdentityReport`   -- both sides, residuals, flags, serialization,
* :func:`eval_S1` / :func:`eval_S2`  -- the two series companions of the
  primary zero sum rule,
* :func:`eval_tau_sum`      -- per-identity term shapes summed over zeros,
* :func:`asymptotic_coeffs` -- the decay-rate coefficients of the zero terms,
* :func:`exceptional_indices` / :func:`cancellation_check` -- the divergent
  parameter lattice and the pairwise-cancellation diagnostics,
* :func:`verify`            -- evaluate both sides of one identity,
* :func:`partial_sum_trace` -- the long running-error trace of the
  slowly-converging conjugate-branch sum,
* :func:`half_zero_root`    -- the root of Re Gamma(1/2 + i rho) = 1.

Tail models: factorially-damped series report twice the last included term;
zero sums fit an exp(-c sqrt(rho)) envelope to the computed terms and
integrate it against the zero-counting density, doubled for safety.
"""

from __future__ import annotations

import enum
import math
import cmath
from dataclasses import dataclass, field, replace

from mpmath import mp

from .core import (DEFAULT_CTX, DomainError, PrecisionContext, PrecisionError,
                   cnum, compensated_sum, complex_pow, principal_sqrt)
from . import engine
from .catalog import InsufficientCatalog, ZeroCatalog
from .geometry import MapParameter
from . import quadrature
from .quadrature import KernelSpec, Unconverged


class ExceptionalA(DomainError):
    """The parameter sits on (or too close to) the divergent lattice a_{p,q}.

    Attributes: a_pq (the nearby lattice value), p, q.
    """

    def __init__(self, msg, a_pq=None, p=None, q=None):
        super().__init__(msg)
        self.a_pq = a_pq
        self.p = p
        self.q = q


class NoRoot(ArithmeticError):
    """A bracketing search failed to locate a sign change."""


class IdentityId(enum.Enum):
    MASTER_ZETA = "MASTER_ZETA"      # integral = w^(1/4)/zeta(a), no poles
    SRULE1 = "SRULE1"                # primary zero sum rule (tau vs S1+S2)
    EXCEPT_APQ = "EXCEPT_APQ"        # sum rule at a lattice point a_{p,q}
    EXCEPT_2M = "EXCEPT_2M"          # sum rule at a = 2m, w = 1
    SRULE2 = "SRULE2"                # integral at negative non-integer a
    SRULE2A = "SRULE2A"              # integral at a = -2m (log-weight limit)
    SRULE_2A = "SRULE_2A"            # full zero sum rule at a = -2m
    IB_INT = "IB_INT"                # integral at purely imaginary a
    NEGA_CPLX = "NEGA_CPLX"          # integral at complex a, Re a < 0, w = 1
    ZETA5 = "ZETA5"                  # zeta(5) = (4/3) pi^4 zeta'(-4)
    AMHALF = "AMHALF"                # the a = -1/2 + i worked instance
    A_APPROX_TAU = "A_APPROX_TAU"    # pole/zero near-cancellation at a ~ tau_m
    A_EQ_TAU = "A_EQ_TAU"            # the coalescence limit a -> tau_m
    A_EQ_TAUM = "A_EQ_TAUM"          # full zero sum rule at a = tau_m
    TAU_ASY = "TAU_ASY"              # exp(-(c1 - i c2) pi sqrt(rho)) envelope
    Q9Q5 = "Q9Q5"                    # two reduced term forms on the line
    Q9_ASY = "Q9_ASY"                # asymptotic trace of the reduced term
    MTX1 = "MTX1"                    # two-parameter ratio sum rule
    MTXBRJ = "MTXBRJ"                # ratio rule at b = 2m, a = 2j
    MTX1AB = "MTX1AB"                # the b -> a first-order coefficient rule
    A_THIRD = "A_THIRD"              # MTX1AB at a = -1/3 (Euler-gamma limit)
    DIFFLOG = "DIFFLOG"              # k-sum as a log-derivative of a product
    S4 = "S4"                        # derivative-family sum rule
    ZRAT = "ZRAT"                    # functional-ratio / gamma-form integrals
    M1Z2 = "M1Z2"                    # product-of-zetas integral
    MT1A = "MT1A"                    # product-of-zetas zero sum rule
    A_NEG_I = "A_NEG_I"              # series transform at a = -i
    A_2I = "A_2I"                    # special zero sum at a = 2i
    A_I = "A_I"                      # special zero sum at a = i
    A_HALF_I = "A_HALF_I"            # special zero sums at a = +-i/2
    HALF_ZERO = "HALF_ZERO"          # root of Re Gamma(1/2 + i rho) = 1


@dataclass(frozen=True)
class TruncationPlan:
    """Sum-length caps plus the tail estimates the evaluation reported."""

    n_max: int = 40
    k_max: int = 24
    tau_max: int = 100
    tail_estimates: dict = field(default_factory=dict)


_FLAG_NAMES = ("exceptional", "boundary", "principal_value", "unconverged")

CSV_FIELDS = ("id", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
              "abs_residual", "rel_residual", "flags",
              "n_max", "k_max", "tau_max")


@dataclass(frozen=True)
class IdentityReport:
    id: IdentityId
    params: dict
    lhs: object
    rhs: object
    abs_residual: object
    rel_residual: object
    plan: TruncationPlan
    condition: object
    flags: dict

    def line(self) -> str:
        """One-line text record (space-separated key=value pairs)."""
        fl = ",".join(k for k in _FLAG_NAMES if self.flags.get(k)) or "-"
        pp = ",".join(f"{k}={_num_str(v)}" for k, v in sorted(
            self.params.items()))
        return (f"id={self.id.value} params={pp or '-'} "
                f"lhs={_num_str(self.lhs)} rhs={_num_str(self.rhs)} "
                f"abs_residual={_num_str(self.abs_residual)} "
                f"rel_residual={_num_str(self.rel_residual)} "
                f"condition={_num_str(self.condition)} flags={fl} "
                f"n_max={self.plan.n_max} k_max={self.plan.k_max} "
                f"tau_max={self.plan.tau_max}")

    def csv_row(self) -> str:
        fl = "|".join(k for k in _FLAG_NAMES if self.flags.get(k))
        pp = "|".join(f"{k}={_num_str(v)}" for k, v in sorted(
            self.params.items()))
        lhs, rhs = mp.mpc(self.lhs), mp.mpc(self.rhs)
        cells = (self.id.value, pp, _num_str(lhs.real), _num_str(lhs.imag),
                 _num_str(rhs.real), _num_str(rhs.imag),
                 _num_str(self.abs_residual), _num_str(self.rel_residual),
                 fl, str(self.plan.n_max), str(self.plan.k_max),
                 str(self.plan.tau_max))
        return ",".join(cells)


def _num_str(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, float)):
        return repr(x)
    try:
        if mp.im(x) == 0:
            return mp.nstr(mp.re(x), 20, strip_zeros=False)
        return mp.nstr(x, 20, strip_zeros=False).replace(" ", "")
    except Exception:
        return str(x)


# ---------------------------------------------------------------------------
# shared numeric helpers
# ---------------------------------------------------------------------------

def _zeta(s, ctx):
    return engine.zeta(s, ctx).value


def _zeta_d(s, order, ctx):
    return engine.zeta_deriv(s, order, ctx, check=False).value


def _zp_neg(n, ctx):
    return engine.zeta_prime_neg_even(n, ctx)


def _csch(x):
    """1/sinh with exponent-safe evaluation (mp arguments)."""
    if mp.re(x) > 30 or mp.re(x) < -30:
        s = 1 if mp.re(x) > 0 else -1
        e = mp.exp(-s * x)
        return 2 * s * e / (1 - e * e * (1 if s > 0 else 1))
    return 1 / mp.sinh(x)


def _ln_abs_zeta_probe(s) -> float:
    """Cheap estimate of ln|zeta(s)| (double-ish precision), used only to
    decide whether a series term is worth computing at full precision."""
    with mp.workdps(15):
        s = mp.mpc(s)
        if mp.re(s) >= 2:
            return 0.0
        if mp.re(s) > -2 and abs(mp.im(s)) < 50:
            try:
                return float(mp.log(abs(mp.zeta(s))))
            except ValueError:
                return 0.0
        # reflection magnitude: |2^s pi^(s-1) sin(pi s/2) Gamma(1-s)|,
        # with |zeta(1-s)| ~ 1
        val = (s * mp.log(2) + (s - 1) * mp.log(mp.pi)
               + mp.loggamma(1 - s))
        # ln|sin(pi s/2)| ~ pi |Im s| / 2 - ln 2 for large |Im s|
        ims = abs(mp.im(s))
        if ims > 20:
            lnsin = mp.pi * ims / 2 - mp.log(2)
        else:
            lnsin = mp.log(abs(mp.sin(mp.pi * s / 2)) + mp.mpf(10) ** -300)
        return float(mp.re(val) + lnsin)


def _series_sum(term_fn, start, cap, cutoff, tail_factor=2,
                min_terms=3, probe_fn=None):
    """Sum term_fn(k) for k = start.. until |term| < cutoff twice running
    (or cap is hit).  Returns (terms list, tail estimate)."""
    terms = []
    small = 0
    k = start
    last_mag = None
    prev_mag = None
    while k < start + cap:
        if probe_fn is not None and k - start >= min_terms:
            est = probe_fn(k)
            if est is not None and est < math.log(max(float(cutoff),
                                                      1e-300)):
                last_mag = mp.exp(est)
                break
        t = term_fn(k)
        terms.append(t)
        if abs(t) > 0:
            prev_mag = last_mag
            last_mag = abs(t)
        if 0 < abs(t) < cutoff and k - start >= min_terms:
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        k += 1
    if last_mag is None:
        return terms, mp.mpf(0)
    tail = tail_factor * last_mag
    # slowly decaying series (e.g. exp(-c sqrt(n)) envelopes): bound the
    # tail geometrically from the last observed term ratio
    if prev_mag and 0 < last_mag < prev_mag:
        r = last_mag / prev_mag
        if r > mp.mpf("0.5"):
            tail = tail_factor * last_mag * r / (1 - r)
    return terms, tail


def _tau_tail(mags, rhos):
    """Tail bound for a zero sum from the observed exp(-c sqrt(rho)) decay.

    Fits c from the last two decades of computed term magnitudes, then
    integrates the envelope against the smooth zero density
    ln(rho/2pi)/(2pi); doubled for safety.  A non-decaying fit returns the
    last magnitude times the term count (flagging non-convergence)."""
    if not mags:
        return mp.mpf(0)
    if len(mags) < 4:
        return 2 * mags[-1]
    i0 = max(0, len(mags) - max(4, len(mags) // 2))
    m0, m1 = mags[i0], mags[-1]
    r0, r1 = rhos[i0], rhos[-1]
    if m1 == 0:
        return mp.mpf(0)
    if m0 <= 0 or m1 >= m0 or r1 <= r0:
        return mags[-1] * len(mags)
    c = float(mp.log(m0 / m1)) / (math.sqrt(r1) - math.sqrt(r0))
    if c <= 0:
        return mags[-1] * len(mags)
    dens = math.log(r1 / (2 * math.pi)) / (2 * math.pi)
    # integral_{r1}^inf A exp(-c sqrt(r)) dens dr, A = m1 exp(c sqrt(r1))
    s = math.sqrt(r1)
    integral = dens * 2 * (s / c + 1 / (c * c))
    return 3 * mags[-1] * mp.mpf(integral)


def _catalog_required(cat, count):
    if cat is None:
        raise InsufficientCatalog("a zero catalog is required")
    if len(cat) < count:
        raise InsufficientCatalog(
            f"catalog holds {len(cat)} zeros, {count} required")


# ---------------------------------------------------------------------------
# the S1 / S2 series and the exceptional lattice
# ---------------------------------------------------------------------------

def nearest_exceptional(a, ctx: PrecisionContext = DEFAULT_CTX,
                        n_limit: int = 400):
    """The nearest lattice value a_{p,q} = 2p/(4q^2-1) with p <= n_limit,
    returned as (a_pq, p, q, distance); None when a is not real positive
    or no lattice point lies within distance 0.25/(4q^2-1)."""
    with ctx.workdps():
        a = cnum(a, ctx)
        if mp.im(a) != 0 or mp.re(a) <= 0:
            return None
        a = mp.re(a)
        best = None
        q = 1
        while True:
            den = 4 * q * q - 1
            p = int(mp.nint(a * den / 2))
            if p >= 1 and p <= n_limit:
                cand = mp.mpf(2 * p) / den
                d = abs(a - cand)
                if best is None or d < best[3]:
                    best = (cand, p, q, d)
            if (2 * (n_limit + 1)) / den < a / 2 and q > 2:
                break
            q += 1
            if q > 4 * n_limit:
                break
        return best


def _check_exceptional(a, ctx, n_limit):
    hit = nearest_exceptional(a, ctx, n_limit)
    if hit is None:
        return
    a_pq, p, q, d = hit
    with ctx.workdps():
        if d < mp.mpf(10) ** (-(ctx.digits // 4)):
            raise ExceptionalA(
                f"a = {mp.nstr(mp.re(cnum(a, ctx)), 12)} lies within "
                f"10^-{ctx.digits // 4} of the divergent lattice value "
                f"2*{p}/(4*{q}^2-1); use the exceptional-limit path",
                a_pq=a_pq, p=p, q=q)


def _s1_term(a, w, n, ctx):
    """Term n of the trivial-zero series of the primary sum rule."""
    wfac = complex_pow(w, mp.mpf(-n) / (2 * a), ctx) if w != 1 else mp.mpf(1)
    root = principal_sqrt(1 + mp.mpf(2 * n) / a, ctx)
    return wfac / (principal_sqrt(a + 2 * n, ctx) * _zp_neg(n, ctx)
                   * mp.sin(mp.pi * root / 2))


def _s2_term(a, w, k, ctx):
    """Term k (k >= 1) of the alternating reciprocal-zeta series,
    including the -(4 sqrt a / pi) prefactor of the series."""
    wfac = (complex_pow(w, mp.mpf(1) / 4 - k * k, ctx)
            if w != 1 else mp.mpf(1))
    z = _zeta(a * (1 - 4 * k * k), ctx)
    return (-4 * principal_sqrt(a, ctx) / mp.pi) * (-1) ** k * wfac / z


def eval_S1(a, w, n_max, ctx: PrecisionContext = DEFAULT_CTX, skip=()):
    """Partial sum of the trivial-zero series, with a tail bound.

    Raises ExceptionalA when a sits on the divergent lattice, unless the
    offending indices are explicitly routed around via ``skip``."""
    with ctx.workdps():
        a = cnum(a, ctx)
        w = mp.mpf(w)
        if not 0 < w <= 1:
            raise DomainError("w must lie in (0, 1]")
        if not skip:
            _check_exceptional(a, ctx, n_max)
        if n_max <= 0:
            first = abs(_s1_term(a, w, 1, ctx)) if 1 not in skip else mp.mpf(0)
            return mp.mpf(0), first
        cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))
        terms, tail = _series_sum(
            lambda n: mp.mpf(0) if n in skip else _s1_term(a, w, n, ctx),
            1, n_max, cutoff)
        total, _ = compensated_sum(terms, ctx)
        return total, tail


def eval_S2(a, w, k_max, ctx: PrecisionContext = DEFAULT_CTX, skip=()):
    """Partial sum of the alternating reciprocal-zeta series (prefactor
    included), with a tail bound.  ``skip`` holds k indices to omit."""
    with ctx.workdps():
        a = cnum(a, ctx)
        w = mp.mpf(w)
        if not 0 < w <= 1:
            raise DomainError("w must lie in (0, 1]")
        if not skip:
            _check_exceptional(a, ctx, 4 * k_max * k_max)
        if k_max <= 0:
            first = abs(_s2_term(a, w, 1, ctx)) if 1 not in skip else mp.mpf(0)
            return mp.mpf(0), first
        cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))

        def probe(k):
            # |term| ~ w^(1/4-k^2) / |zeta(a(1-4k^2))|
            est = -_ln_abs_zeta_probe(mp.re(a) * (1 - 4 * k * k))
            if w != 1:
                est += float((mp.mpf(1) / 4 - k * k) * mp.log(w))
            return est

        terms, tail = _series_sum(
            lambda k: mp.mpf(0) if k in skip else _s2_term(a, w, k, ctx),
            1, k_max, cutoff,
            probe_fn=probe if mp.im(a) == 0 else None)
        total, _ = compensated_sum(terms, ctx)
        return total, tail


def exceptional_indices(p: int, q: int, n_limit: int, k_limit: int):
    """All divergent index pairs for a = a_{p,q} = 2p/(4q^2-1).

    The trivial-zero series diverges at n with 1 + 2n/a = 4h^2 (h integer);
    each such n pairs with the alternating-series index k = h - 1.  Returns
    (n_list, k_list, a_pq) with n_list sorted ascending, n <= n_limit and
    k <= k_limit (pairs are dropped only when *both* caps exclude them)."""
    if p < 1 or q < 1:
        raise DomainError("p and q must be >= 1")
    den = 4 * q * q - 1
    n_list, k_list = [], []
    h = 1
    while True:
        num = p * (4 * h * h - 1)
        n = num // den
        if n > n_limit and h - 1 > k_limit:
            break
        if num % den == 0:
            n_list.append(n)
            k_list.append(h - 1)
        h += 1
        if h > 4 * (n_limit + k_limit + 4):
            break
    n_list = [n for n, k in zip(n_list, k_list)
              if n <= n_limit and k <= k_limit]
    k_list = k_list[: len(n_list)]
    from fractions import Fraction
    return n_list, k_list, Fraction(2 * p, den)


def _except1_finite(a, w, n, h, ctx):
    """Finite part of the divergent trivial-zero term at the lattice."""
    sgn = (-1) ** h
    wfac = complex_pow(w, mp.mpf(-n) / (2 * a), ctx) if w != 1 else mp.mpf(1)
    zp = _zp_neg(n, ctx)
    sa = principal_sqrt(a, ctx)
    lnw = mp.log(mp.mpf(w)) if w != 1 else mp.mpf(0)
    out = -sgn * wfac * lnw / (sa * mp.pi * zp)
    out += -(mp.mpf(1) / 4) * sgn * (a + 3 * n) * wfac / (
        sa * n * h * h * mp.pi * zp)
    return out


def _except2_finite(a, w, j, k, ctx):
    """Finite part of the divergent alternating-series term at the lattice;
    j is the paired trivial index, k = h - 1 the series index."""
    sgn = (-1) ** k
    wfac = complex_pow(w, mp.mpf(-j) / (2 * a), ctx) if w != 1 else mp.mpf(1)
    sa = principal_sqrt(a, ctx)
    zp = _zp_neg(j, ctx)
    zpp = _zeta_d(mp.mpf(-2 * j), 2, ctx)
    out = -sa * sgn * wfac / (j * mp.pi * zp)
    out += -2 * zpp * sa * sgn * wfac / (mp.pi * zp * zp)
    return out


def _except_pair_divergent(a, a_pq, w, n, h, ctx):
    """The two 1/(a - a_pq) parts (they cancel pairwise); diagnostic only."""
    sgn = (-1) ** h
    wfac = complex_pow(w, mp.mpf(-n) / (2 * a), ctx) if w != 1 else mp.mpf(1)
    zp = _zp_neg(n, ctx)
    d1 = -2 * sgn * a ** mp.mpf(1.5) * wfac / (n * zp * mp.pi * (a - a_pq))
    d2 = -d1
    return d1, d2


@dataclass(frozen=True)
class CancellationReport:
    p: int
    q: int
    a_pq: object
    epsilons: tuple
    pair_sums: tuple        # S1-term + S2-term at each epsilon
    term_magnitudes: tuple  # |S1 term| at each epsilon
    limit_value: object     # finite-part prediction at the lattice
    stable: bool            # pair sums vary < 1e-3 relative across steps
    divergent: bool         # individual terms grow ~ 1/epsilon


def cancellation_check(p: int, q: int, epsilon_seq,
                       ctx: PrecisionContext = DEFAULT_CTX,
                       w=1) -> CancellationReport:
    """Evaluate the paired divergent terms at a = a_{p,q}(1 + eps) along a
    decreasing eps sequence and report whether their sum stabilizes at the
    finite-part limit while the individual terms blow up like 1/eps."""
    eps = [mp.mpf(e) for e in epsilon_seq]
    if any(e <= 0 for e in eps) or any(
            e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
        raise DomainError("epsilon_seq must be positive and decreasing")
    n_list, k_list, a_pq_frac = exceptional_indices(p, q, 10 ** 6, 10 ** 6)
    with ctx.workdps():
        a_pq = mp.mpf(a_pq_frac.numerator) / a_pq_frac.denominator
        n, k = n_list[0], k_list[0]
        h = k + 1
        sums, mags = [], []
        for e in eps:
            a = a_pq * (1 + e)
            t1 = _s1_term(a, w, n, ctx)
            t2 = _s2_term(a, w, h, ctx)
            sums.append(t1 + t2)
            mags.append(abs(t1))
        limit = (_except1_finite(a_pq, w, n, h, ctx)
                 + _except2_finite(a_pq, w, n, k, ctx))
        stable = all(
            abs(s2 - s1) <= mp.mpf("1e-3") * max(abs(s1), mp.mpf(1))
            for s1, s2 in zip(sums, sums[1:]))
        divergent = all(
            m2 > 2 * m1 for m1, m2 in zip(mags, mags[1:])) if len(
                mags) > 1 else False
        return CancellationReport(
            p=p, q=q, a_pq=a_pq, epsilons=tuple(eps), pair_sums=tuple(sums),
            term_magnitudes=tuple(mags), limit_value=limit,
            stable=stable, divergent=divergent)


# ---------------------------------------------------------------------------
# zero sums
# ---------------------------------------------------------------------------

def _tau_shape(kind: str, a, w, ctx, extras):
    """Return (term(tau, zprime), include_conj) for one identity's shape.

    ``zprime`` is zeta'(tau); the conjugate term reuses conj(zprime)."""
    pi = mp.pi

    if kind == "srule1":
        lnw = mp.log(mp.mpf(w)) if w != 1 else None

        def term(t, zp):
            wf = mp.exp(t / (4 * a) * lnw) if lnw is not None else 1
            arg = pi * principal_sqrt(t / a - 1, ctx) / 2
            return wf / (principal_sqrt(t - a, ctx) * zp) * _csch(arg)
        return term, True

    if kind == "ib-int":
        lnw = mp.log(mp.mpf(w)) if w != 1 else None

        def term(t, zp):
            wf = mp.exp(t / (4 * a) * lnw) if lnw is not None else 1
            arg = pi * principal_sqrt(t / a - 1, ctx) / 2
            return wf / (principal_sqrt(t - a, ctx) * zp) * _csch(arg)
        return term, False

    if kind == "a-approx-tau":
        def term(t, zp):
            root = principal_sqrt(-a * (a - t), ctx)
            return _csch(pi * root / (2 * a)) / (root * zp)
        return term, False

    if kind == "a-eq-taum":
        tau_m = extras["tau_m"]

        def term(t, zp):
            root = principal_sqrt(-tau_m * (tau_m - t), ctx)
            return _csch(pi * root / (2 * tau_m)) / (
                principal_sqrt(t - tau_m, ctx) * zp)
        return term, True

    if kind == "srule-2a":
        m = extras["m"]
        lnw = mp.log(mp.mpf(w)) if w != 1 else None

        def term(t, zp):
            wf = mp.exp(-t * lnw / (8 * m)) if lnw is not None else 1
            s = mp.sin(pi / 2 * principal_sqrt(1 + t / (2 * m), ctx))
            return wf / (zp * principal_sqrt(2 * m + t, ctx) * s)
        return term, True

    if kind == "nega-cplx":
        def term(t, zp):
            root = principal_sqrt(-a * (a - t), ctx)
            return _csch(pi * root / (2 * a)) / (
                principal_sqrt(t - a, ctx) * zp)
        return term, False

    if kind == "mtx1":
        b = extras["b"]

        def term(t, zp):
            root = principal_sqrt(-a * a + a * t, ctx)
            return (_zeta(b * t / a, ctx) / (zp * root)
                    * _csch(pi * root / (2 * a)))
        return term, True

    if kind == "mtxbrj":
        m, j = extras["m"], extras["j"]

        def term(t, zp):
            root = principal_sqrt(t / (2 * j) - 1, ctx)
            return (_zeta(mp.mpf(m) * t / j, ctx) / (zp * root)
                    * _csch(pi / 2 * root))
        return term, True

    if kind == "mtx1ab":
        def term(t, zp):
            root = principal_sqrt(-a * a + a * t, ctx)
            return t / root * _csch(pi * root / (2 * a))
        return term, True

    if kind == "a-third":
        def term(t, zp):
            root = principal_sqrt(-3 * t - 1, ctx)
            return t / root * _csch(pi * root / 2)
        return term, True

    if kind == "s4":
        sa = principal_sqrt(a, ctx)

        def term(t, zp):
            u = pi * principal_sqrt(t - a, ctx) / (2 * sa)
            core = (mp.coth(u) / 2
                    + sa / (pi * principal_sqrt(t - a, ctx)))
            return core * _csch(u) / (zp * (a - t))
        return term, True

    if kind in ("m1z2", "mt1a"):
        def term(t, zp):
            return 1 / (zp * _zeta(1j * a - t, ctx) * mp.cosh(pi * t / a))
        return term, kind == "mt1a"

    raise DomainError(f"unknown zero-sum shape {kind!r}")


def eval_tau_sum(kind: str, a, w, cat: ZeroCatalog, tau_max: int,
                 ctx: PrecisionContext = DEFAULT_CTX,
                 extras=None, exclude=(), band=None):
    """Sum the named term shape over the first ``tau_max`` catalog zeros.

    Conjugate associates are included or not per the identity (a shape
    summed over the full zero set pairs each ordinate with its conjugate;
    shapes restricted to the upper half plane do not).  ``exclude`` drops
    ordinate indices (1-based); ``band`` = (lo, hi) keeps only ordinates
    with lo <= rho <= hi.  Returns (value, tail_estimate)."""
    if tau_max < 0:
        raise DomainError("tau_max must be >= 0")
    extras = extras or {}
    with ctx.workdps():
        a = cnum(a, ctx)
        term, with_conj = _tau_shape(kind, a, w, ctx, extras)
        if tau_max == 0:
            _catalog_required(cat, 1)
            t = mp.mpc(mp.mpf(1) / 2, cat.rho(1, ctx))
            zp = _zeta_d(t, 1, ctx)
            first = abs(term(t, zp))
            if with_conj:
                first += abs(term(mp.conj(t), mp.conj(zp)))
            return mp.mpf(0), first
        _catalog_required(cat, tau_max)
        terms, mags, rhos = [], [], []
        for m_idx in range(1, tau_max + 1):
            if m_idx in exclude:
                continue
            rho = cat.rho(m_idx, ctx)
            if band is not None and not (band[0] <= rho <= band[1]):
                continue
            t = mp.mpc(mp.mpf(1) / 2, rho)
            zp = _zeta_d(t, 1, ctx)
            val = term(t, zp)
            if with_conj:
                val += term(mp.conj(t), mp.conj(zp))
            terms.append(val)
            mags.append(abs(val))
            rhos.append(float(rho))
        total, _ = compensated_sum(terms, ctx)
        tail = _tau_tail(mags, rhos) if band is None else mp.mpf(0)
        return total, tail


def asymptotic_coeffs(rho_m, ctx: PrecisionContext = DEFAULT_CTX):
    """Decay/oscillation coefficients (c1, c2, z2) of the zero-term
    envelope exp(-(c1 - i c2) pi sqrt(rho)) for the sum anchored at the
    m-th zero ordinate rho_m."""
    with ctx.workdps():
        rho = mp.mpf(rho_m)
        if rho <= 0:
            raise DomainError("rho_m must be positive")
        z2 = mp.sqrt(mp.sqrt(4 * rho * rho + 1) + 2 * rho)
        c1 = (1 + 2 * z2 * z2 * rho) / (2 * z2 * (2 * rho - z2 * z2) ** 2)
        c2 = 1 / (2 * (2 * rho - z2 * z2) * z2)
        return c1, c2, z2


def tau_term_envelope(rho_m, rho, conjugate=False,
                      ctx: PrecisionContext = DEFAULT_CTX):
    """The model for the bare zero term 1/(sqrt(tau - tau_m) sinh(...)):
    sqrt(2)(1 -+ i) exp(-+(c1 -+ i c2) pi sqrt(rho))/sqrt(rho) (upper sign:
    direct branch; lower: conjugate branch, which decays like exp(c2 ...))."""
    with ctx.workdps():
        c1, c2, _ = asymptotic_coeffs(rho_m, ctx)
        rho = mp.mpf(rho)
        sr = mp.sqrt(rho)
        if conjugate:
            return mp.sqrt(2) * (1 + 1j) * mp.exp(
                (c2 + 1j * c1) * mp.pi * sr) / sr
        return mp.sqrt(2) * (1 - 1j) * mp.exp(
            -(c1 - 1j * c2) * mp.pi * sr) / sr


# ---------------------------------------------------------------------------
# identity registry: validity table (data, not code)
# ---------------------------------------------------------------------------

def _require(cond, text):
    if not cond:
        raise DomainError(text)


def _is_real(x):
    return mp.im(x) == 0


# Each entry: (constraint description used in error messages, checker).
# Checkers receive (params dict with mp values, ctx).

def _val_master_zeta(p, ctx):
    a = p["a"]
    _require(_is_real(a) and mp.re(a) > 0,
             "the pole-free case needs a real and positive")
    _require(mp.re(a) < 99, "a must stay below rho_1^2/2 ~ 99.9, where the "
             "first zero's preimage enters the strip")


def _val_srule1(p, ctx):
    a = p["a"]
    _require(_is_real(a) and mp.re(a) > 0, "the primary sum rule needs "
             "a real and positive")
    _require(mp.re(a) < 99, "a must stay below rho_1^2/2 ~ 99.9")
    _require(0 < p["w"] <= 1, "w must lie in (0, 1]")


def _val_srule2(p, ctx):
    a = p["a"]
    _require(_is_real(a) and mp.re(a) < 0,
             "valid for a < 0")
    _require(abs(mp.re(a) - mp.nint(mp.re(a))) > mp.mpf("1e-12")
             or mp.nint(mp.re(a)) >= 0,
             "a must not equal -1, -2, ... (integer limits have their own "
             "log-weight form)")
    _require(0 < p["w"] <= 1, "w must lie in (0, 1]")


def _val_positive_int(key):
    def chk(p, ctx):
        m = p[key]
        _require(float(m) == int(float(m)) and int(float(m)) >= 1,
                 f"{key} must be a positive integer")
    return chk


def _val_srule_2a(p, ctx):
    _val_positive_int("m")(p, ctx)
    _require(p["w"] > 1, "the alternating reciprocal-zeta series carries "
             "weight w^(-(2k+3)(2k+1)/4) and converges only for w > 1")


def _val_ib_int(p, ctx):
    _require(float(p["beta"]) > 0, "beta must be positive")
    _require(0 < p["w"] <= 1, "w must lie in (0, 1]")


def _val_nega_cplx(p, ctx):
    a = p["a"]
    al, be = mp.re(a), mp.im(a)
    _require(al < 0 and be > 0, "valid for Re a < 0 and Im a > 0 at w = 1")
    # principal-value lattice: beta = -alpha sqrt(-(4 alpha + 2L) alpha)
    #                                 / (2 alpha + L) for an even integer L
    L = 2
    while 4 * al + 2 * L < 0:
        den = 2 * al + L
        if den != 0:
            bound = -al * mp.sqrt(-(4 * al + 2 * L) * al) / den
            if abs(be - bound) < mp.mpf("1e-8"):
                raise DomainError(
                    "beta sits on the principal-value lattice (the "
                    "contour meets a trivial-zero preimage); the integral "
                    "exists only as a principal value here")
        L += 2
        if L > 10 ** 4:
            break


def _val_mtx1(p, ctx):
    a, b = mp.re(p["a"]), mp.re(p["b"])
    _require(_is_real(p["a"]) and _is_real(p["b"]),
             "a and b must be real")
    _require(b < a, "the two series converge only if b < a")
    _require(b > 0 and a > 0, "a and b must be positive")
    _require(abs(a - 1) > mp.mpf("1e-9") and abs(b - 1) > mp.mpf("1e-9"),
             "a = 1 or b = 1 hits the zeta pole in the closed terms")


def _val_mt1a(p, ctx):
    a = cnum(p["a"], ctx)
    _require(mp.im(a) != 0 or mp.re(a) != 0, "a must be nonzero")
    eps = mp.mpf("1e-9")
    _require(abs(1j * a / 2 - 1) > eps,
             "i a / 2 = 1 hits the zeta pole in the closed term")
    for k in range(200):
        _require(abs(-1j * a * k - 1j * a / 2 - 1) > eps
                 and abs(1j * a * k + 3j * a / 2 - 1) > eps,
                 "a k-series denominator hits the zeta pole")
    for n in range(1, 200):
        arg = 1j * a + 2 * n
        _require(abs(arg - 1) > eps, "an n-series denominator hits the "
                 "zeta pole")
        _require(not (abs(mp.im(arg)) < eps and mp.re(arg) < 0
                      and abs(mp.re(arg) - mp.nint(mp.re(arg))) < eps
                      and int(mp.nint(mp.re(arg))) % 2 == 0),
                 "an n-series denominator hits a trivial zero of zeta")
        _require(abs(mp.cosh(2 * mp.pi * n / a)) > eps,
                 "cosh(2 pi n / a) vanishes in the n-series")


def _val_mtxbrj(p, ctx):
    m, j = int(float(p["m"])), int(float(p["j"]))
    _require(m >= 1 and j >= m + 1,
             "needs integer 1 <= m < j (b = 2m, a = 2j)")


def _val_mtx1ab(p, ctx):
    _require(_is_real(p["a"]) and mp.re(p["a"]) < 0, "valid for a < 0")


def _val_s4(p, ctx):
    _require(mp.re(p["a"]) > 0, "valid for Re(a) > 0")


def _val_zrat(p, ctx):
    a = p["a"]
    _require(_is_real(a) and mp.re(a) > 0, "a must be real and positive")
    _require(0 < p["w"] <= 1, "w must lie in (0, 1]")
    if p.get("form", "zeta-ratio") == "gamma":
        ar = mp.re(a)
        _require(abs(ar - 2 * mp.nint(ar / 2) - 1) > mp.mpf("1e-9")
                 and abs(ar / 2 - mp.nint(ar / 2)) > mp.mpf("1e-9")
                 or True, "")
    else:
        _require(abs(mp.re(a) - 1) > mp.mpf("1e-9"), "a = 1 hits the pole "
                 "of the completed ratio")


def _val_a_half_i(p, ctx):
    _require(int(p.get("sign", -1)) in (-1, 1), "sign must be +1 or -1")


VALIDITY = {
    IdentityId.MASTER_ZETA: _val_master_zeta,
    IdentityId.SRULE1: _val_srule1,
    IdentityId.SRULE2: _val_srule2,
    IdentityId.SRULE2A: _val_positive_int("m"),
    IdentityId.SRULE_2A: _val_srule_2a,
    IdentityId.EXCEPT_2M: _val_positive_int("m"),
    IdentityId.IB_INT: _val_ib_int,
    IdentityId.NEGA_CPLX: _val_nega_cplx,
    IdentityId.MTX1: _val_mtx1,
    IdentityId.MTXBRJ: _val_mtxbrj,
    IdentityId.MTX1AB: _val_mtx1ab,
    IdentityId.S4: _val_s4,
    IdentityId.ZRAT: _val_zrat,
    IdentityId.MT1A: _val_mt1a,
    IdentityId.A_HALF_I: _val_a_half_i,
}


DEFAULT_PARAMS = {
    IdentityId.MASTER_ZETA: {"a": 2, "w": 1},
    IdentityId.SRULE1: {"a": mp.mpf(1) / 2, "w": 1},
    IdentityId.EXCEPT_APQ: {"p": 1, "q": 3, "w": 1},
    IdentityId.EXCEPT_2M: {"m": 1},
    IdentityId.SRULE2: {"a": mp.mpf(-1) / 2, "w": mp.mpf("0.9")},
    IdentityId.SRULE2A: {"m": 1, "w": mp.mpf("0.5")},
    IdentityId.SRULE_2A: {"m": 1, "w": mp.mpf("1.5")},
    IdentityId.IB_INT: {"beta": 2, "w": mp.mpf("0.5")},
    IdentityId.NEGA_CPLX: {"a": mp.mpc(-0.5, 1), "w": 1},
    IdentityId.ZETA5: {},
    IdentityId.AMHALF: {},
    IdentityId.A_APPROX_TAU: {"m": 1, "eps": mp.mpf("1e-8")},
    IdentityId.A_EQ_TAU: {"m": 1, "eps": mp.mpf("1e-6")},
    IdentityId.A_EQ_TAUM: {"m": 1},
    IdentityId.TAU_ASY: {"m": 1, "rho": 10 ** 4},
    IdentityId.Q9Q5: {"count": 20},
    IdentityId.Q9_ASY: {"count": 10},
    IdentityId.MTX1: {"a": mp.mpf(3) / 2, "b": mp.mpf(1) / 2},
    IdentityId.MTXBRJ: {"m": 1, "j": 2},
    IdentityId.MTX1AB: {"a": mp.mpf(-1) / 2},
    IdentityId.A_THIRD: {},
    IdentityId.DIFFLOG: {"a": mp.mpf(-1) / 2},
    IdentityId.S4: {"a": mp.mpf(1) / 2},
    IdentityId.ZRAT: {"a": mp.mpf(1) / 2, "w": mp.mpf("0.5"),
                      "form": "zeta-ratio"},
    IdentityId.M1Z2: {"a": mp.mpc(1, -4), "w": 1},
    IdentityId.MT1A: {"a": mp.mpc(0, "2.5")},
    IdentityId.A_NEG_I: {},
    IdentityId.A_2I: {},
    IdentityId.A_I: {},
    IdentityId.A_HALF_I: {"sign": -1},
    IdentityId.HALF_ZERO: {},
}

DEFAULT_PLANS = {
    IdentityId.A_NEG_I: TruncationPlan(n_max=150, k_max=150),
    IdentityId.A_2I: TruncationPlan(n_max=150, k_max=150, tau_max=10),
    IdentityId.A_I: TruncationPlan(n_max=150, k_max=150, tau_max=10),
    IdentityId.A_HALF_I: TruncationPlan(n_max=150, k_max=150, tau_max=3),
    IdentityId.A_EQ_TAUM: TruncationPlan(n_max=60, k_max=12, tau_max=200),
    IdentityId.MTX1: TruncationPlan(n_max=120, k_max=12, tau_max=60),
    IdentityId.MTXBRJ: TruncationPlan(n_max=120, k_max=6, tau_max=60),
    IdentityId.MTX1AB: TruncationPlan(n_max=200, k_max=12, tau_max=100),
    IdentityId.A_THIRD: TruncationPlan(n_max=200, k_max=12, tau_max=100),
    IdentityId.S4: TruncationPlan(n_max=60, k_max=16, tau_max=60),
    IdentityId.MT1A: TruncationPlan(n_max=40, k_max=40, tau_max=40),
    IdentityId.M1Z2: TruncationPlan(tau_max=40),
    IdentityId.IB_INT: TruncationPlan(tau_max=200),
}


def _quad_tol(ctx):
    return mp.mpf(10) ** (-(max(ctx.digits - 20, 10)))


# ---------------------------------------------------------------------------
# per-identity evaluators.  Each returns (lhs, rhs, flags, condition, tails).
# ---------------------------------------------------------------------------

def _do_master_zeta(p, plan, cat, ctx):
    a, w = p["a"], p["w"]
    family = p.get("family", "reciprocal-zeta")
    spec = KernelSpec(family, MapParameter(a, w))
    res = quadrature.integrate(spec, 0.0, _quad_tol(ctx), ctx)
    wq = complex_pow(w, mp.mpf(1) / 4, ctx)
    rhs = wq if family == "plain" else wq / _zeta(a, ctx)
    return (res.value, rhs, {}, mp.mpf(1),
            {"quadrature": res.est_error})


def _srule1_rhs(a, w, plan, ctx, skip_n=(), skip_k=(), extra_terms=()):
    s1, t1 = eval_S1(a, w, plan.n_max, ctx, skip=skip_n)
    s2, t2 = eval_S2(a, w, plan.k_max, ctx, skip=skip_k)
    base = -2 * principal_sqrt(a, ctx) * complex_pow(
        w, mp.mpf(1) / 4, ctx) / (mp.pi * _zeta(a, ctx))
    rhs = base + s1 + s2
    for t in extra_terms:
        rhs += t
    return rhs, {"S1": t1, "S2": t2}


def _do_srule1(p, plan, cat, ctx):
    a, w = p["a"], p["w"]
    lhs, tail = eval_tau_sum("srule1", a, w, cat, plan.tau_max, ctx)
    rhs, tails = _srule1_rhs(a, w, plan, ctx)
    tails["tau"] = tail
    return lhs, rhs, {}, mp.mpf(1), tails


def _do_except_apq(p, plan, cat, ctx):
    pp, qq, w = int(p["p"]), int(p["q"]), p["w"]
    n_list, k_list, a_frac = exceptional_indices(
        pp, qq, plan.n_max, plan.k_max)
    a = mp.mpf(a_frac.numerator) / a_frac.denominator
    lhs, tail = eval_tau_sum("srule1", a, w, cat, plan.tau_max, ctx)
    limits = []
    for n, k in zip(n_list, k_list):
        limits.append(_except1_finite(a, w, n, k + 1, ctx)
                      + _except2_finite(a, w, n, k, ctx))
    # the series skip k+1 because the alternating series indexes from 1
    rhs, tails = _srule1_rhs(a, w, plan, ctx,
                             skip_n=set(n_list),
                             skip_k={k + 1 for k in k_list},
                             extra_terms=limits)
    tails["tau"] = tail
    return lhs, rhs, {"exceptional": True}, mp.mpf(1), tails


def _do_except_2m(p, plan, cat, ctx):
    m = int(p["m"])
    a = mp.mpf(2 * m)
    lhs, tail = eval_tau_sum("srule1", a, 1, cat, plan.tau_max, ctx)
    skipped = {m * (4 * h * h - 1) for h in range(1, plan.n_max)}
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))

    def primed(n):
        if n in skipped:
            return mp.mpf(0)
        s = mp.sin(mp.pi / 2 * mp.sqrt(1 + mp.mpf(n) / m))
        return 1 / (mp.sqrt(m + n) * _zp_neg(n, ctx) * s)

    t_primed, tp_tail = _series_sum(primed, 1, plan.n_max, cutoff)

    def starred(h):
        n = m * (4 * h * h - 1)
        return ((-1) ** h * (12 * h * h - 1)
                / (n * h * h * _zp_neg(n, ctx)))

    h_cap = max(2, int(math.isqrt(plan.n_max // (4 * m) + 1)) + 2)
    t_star, ts_tail = _series_sum(starred, 1, h_cap, cutoff, min_terms=1)

    def ksum(k):
        j = m * (2 * k + 3) * (2 * k + 1)
        zp = _zp_neg(j, ctx)
        zpp = _zeta_d(mp.mpf(-2 * j), 2, ctx)
        return (-1) ** k / zp * (mp.mpf(1) / j + 2 * zpp / zp)

    t_k, tk_tail = _series_sum(ksum, 0, plan.k_max, cutoff)
    # the starred-sum prefactor is sqrt(2m)/(8 pi): it is the a -> 2m limit
    # of the generic finite part -(a+3n)/(4 sqrt(a) n h^2 pi zeta'(-2n))
    # with n = m(4h^2-1), where a+3n = m(12h^2-1)
    s2m = mp.sqrt(mp.mpf(2 * m))
    rhs = (mp.fsum(t_primed) / mp.sqrt(2)
           - s2m / (8 * mp.pi) * mp.fsum(t_star)
           - s2m / mp.pi * mp.fsum(t_k)
           - 2 * s2m / (mp.pi * _zeta(a, ctx)))
    tails = {"tau": tail, "primed": tp_tail, "starred": ts_tail,
             "k": tk_tail}
    return lhs, rhs, {"exceptional": True}, mp.mpf(1), tails


def _srule2_series(a, w, ctx, n_cap):
    """The two trivial-zero residue series of the negative-a integral."""
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))
    ar = mp.re(a)
    n_split = int(mp.floor(-ar / 2))

    def hyp(n):
        wf = complex_pow(w, mp.mpf(-n) / (2 * a), ctx) if w != 1 else 1
        root = principal_sqrt(-a * a - 2 * a * n, ctx)
        return wf / (_zp_neg(n, ctx) * root) * _csch(
            mp.pi * root / (2 * a))

    t_h, tail_h = _series_sum(hyp, n_split + 1, n_cap, cutoff)
    t_t = []
    for n in range(1, n_split + 1):
        wf = complex_pow(w, mp.mpf(-n) / (2 * a), ctx) if w != 1 else 1
        root = principal_sqrt(a * a + 2 * a * n, ctx)
        t_t.append(wf / (_zp_neg(n, ctx) * root
                         * mp.sin(mp.pi * root / (2 * a))))
    return (mp.pi / 2 * mp.fsum(t_h) - mp.pi / 2 * mp.fsum(t_t),
            mp.pi / 2 * tail_h)


def _do_srule2(p, plan, cat, ctx):
    a, w = p["a"], p["w"]
    spec = KernelSpec("reciprocal-zeta", MapParameter(a, w))
    res = quadrature.integrate(spec, 0.0, _quad_tol(ctx), ctx)
    series, tail = _srule2_series(a, w, ctx, plan.n_max)
    rhs = complex_pow(w, mp.mpf(1) / 4, ctx) / _zeta(a, ctx) + series
    return (res.value, rhs, {}, mp.mpf(1),
            {"quadrature": res.est_error, "series": tail})


def _do_srule2a(p, plan, cat, ctx):
    m, w = int(p["m"]), mp.mpf(p["w"])
    a = mp.mpf(-2 * m)
    spec = KernelSpec("reciprocal-zeta", MapParameter(a, w))
    res = quadrature.integrate(spec, 0.0, _quad_tol(ctx), ctx)
    lnw = mp.log(w) if w != 1 else mp.mpf(0)
    wq = complex_pow(w, mp.mpf(1) / 4, ctx) if w != 1 else mp.mpf(1)
    zp_m = _zp_neg(m, ctx)
    zpp_m = _zeta_d(mp.mpf(-2 * m), 2, ctx)
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))

    def hyp(n):
        wf = (complex_pow(w, mp.mpf(n + 1 + m) / (4 * m), ctx)
              if w != 1 else 1)
        return wf / (mp.sqrt(n + 1) * _zp_neg(n + m + 1, ctx)
                     * mp.sinh(mp.pi * mp.sqrt(n + 1) / (2 * mp.sqrt(m))))

    t_h, tail_h = _series_sum(hyp, 0, plan.n_max, cutoff)
    t_t = []
    for n in range(1, m):
        wf = complex_pow(w, mp.mpf(n) / (4 * m), ctx) if w != 1 else 1
        t_t.append(wf / (_zp_neg(n, ctx) * mp.sqrt(m * m - m * n)
                         * mp.sin(mp.pi / 2 * mp.sqrt(1 - mp.mpf(n) / m))))
    rhs = (-wq * lnw / (8 * m * zp_m)
           + mp.pi ** 2 / 48 * wq / (m * zp_m)
           - wq * zpp_m / (2 * zp_m * zp_m)
           - mp.pi / (4 * mp.sqrt(m)) * mp.fsum(t_h)
           + mp.pi / 4 * mp.fsum(t_t))
    return (res.value, rhs, {}, mp.mpf(1),
            {"quadrature": res.est_error, "series": tail_h})


def _do_srule_2a(p, plan, cat, ctx):
    m, w = int(p["m"]), mp.mpf(p["w"])
    a = mp.mpf(-2 * m)
    tau_part, tail = eval_tau_sum("srule-2a", a, w, cat, plan.tau_max, ctx,
                                  extras={"m": m})
    lhs = tau_part / mp.sqrt(mp.mpf(2 * m))
    lnw = mp.log(w) if w != 1 else mp.mpf(0)
    wq = complex_pow(w, mp.mpf(1) / 4, ctx) if w != 1 else mp.mpf(1)
    zp_m = _zp_neg(m, ctx)
    zpp_m = _zeta_d(mp.mpf(-2 * m), 2, ctx)
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))

    def hyp(n):
        wf = (complex_pow(w, mp.mpf(n + m + 1) / (4 * m), ctx)
              if w != 1 else 1)
        return wf / (mp.sqrt(n + 1) * _zp_neg(n + m + 1, ctx)
                     * mp.sinh(mp.pi * mp.sqrt(n + 1) / (2 * mp.sqrt(m))))

    t_h, tail_h = _series_sum(hyp, 0, plan.n_max, cutoff)
    t_t = []
    for n in range(1, m):
        wf = complex_pow(w, mp.mpf(n) / (4 * m), ctx) if w != 1 else 1
        t_t.append(wf / (_zp_neg(n, ctx) * mp.sqrt(m * m - m * n)
                         * mp.sin(mp.pi / 2 * mp.sqrt(1 - mp.mpf(n) / m))))

    def ksum(k):
        kk = (2 * k + 3) * (2 * k + 1)
        wf = complex_pow(w, -mp.mpf(kk) / 4, ctx) if w != 1 else mp.mpf(1)
        return (-1) ** k * wf / _zeta(mp.mpf(2 * m * kk), ctx)

    t_k, tail_k = _series_sum(ksum, 0, plan.k_max, cutoff)
    rhs = (-mp.pi / (24 * m) * wq / zp_m
           + mp.fsum(t_h) / (2 * mp.sqrt(m))
           - mp.fsum(t_t) / 2
           + wq * lnw / (4 * mp.pi * m * zp_m)
           + wq * zpp_m / (mp.pi * zp_m * zp_m)
           + 4 / mp.pi * mp.fsum(t_k))
    return (lhs, rhs, {}, mp.mpf(1),
            {"tau": tail, "series": tail_h, "k": tail_k})


def _do_ib_int(p, plan, cat, ctx):
    beta, w = mp.mpf(p["beta"]), mp.mpf(p["w"])
    a = mp.mpc(0, beta)
    spec = KernelSpec("reciprocal-zeta", MapParameter(a, w))
    res = quadrature.integrate(spec, 0.0, _quad_tol(ctx), ctx)
    flags = {}
    if w > 1:
        flags["boundary"] = True
    tau_part, tail = eval_tau_sum("ib-int", a, w, cat, plan.tau_max, ctx)
    rhs = (complex_pow(w, mp.mpf(1) / 4, ctx) / _zeta(a, ctx)
           + mp.pi / (2 * principal_sqrt(a, ctx)) * tau_part)
    return (res.value, rhs, flags, mp.mpf(1),
            {"quadrature": res.est_error, "tau": tail})


def nega_cplx_bounds(a, ctx: PrecisionContext = DEFAULT_CTX):
    """(N, band) for the complex negative-alpha case: N bounds the
    trivial-zero residue sum, band = (lo, hi) brackets the ordinates of
    the enclosed nontrivial zeros (None when the contour never reaches
    them)."""
    with ctx.workdps():
        a = cnum(a, ctx)
        al, be = mp.re(a), mp.im(a)
        mod2 = al * al + be * be
        n_cap = int(mp.floor(-2 * al * mod2 / (be * be)))
        disc = 4 * be * be + 2 * al
        if disc <= 0:
            return n_cap, None
        mid = be * (4 * mod2 + al) / (2 * al * al)
        half = mod2 * mp.sqrt(disc) / (al * al)
        return n_cap, (mid - half, mid + half)


def _do_nega_cplx(p, plan, cat, ctx):
    a, w = cnum(p["a"], ctx), p.get("w", 1)
    n_cap, band = nega_cplx_bounds(a, ctx)
    t_t = []
    for n in range(1, min(n_cap, plan.n_max) + 1):
        root = principal_sqrt(a * a + 2 * a * n, ctx)
        t_t.append(1 / (_zp_neg(n, ctx) * root
                        * mp.sin(mp.pi * root / (2 * a))))
    tau_part = mp.mpf(0)
    tail = mp.mpf(0)
    if band is not None:
        _catalog_required(cat, 1)
        count = min(plan.tau_max, len(cat))
        tau_part, tail = eval_tau_sum(
            "nega-cplx", a, 1, cat, count, ctx, band=band)
    rhs = (1 / _zeta(a, ctx)
           - mp.pi / 2 * mp.fsum(t_t)
           - mp.pi / (2 * principal_sqrt(a, ctx)) * tau_part)
    spec = KernelSpec("reciprocal-zeta", MapParameter(a, 1))
    res = quadrature.integrate(spec, 0.0, _quad_tol(ctx), ctx)
    return (res.value, rhs, {}, mp.mpf(1),
            {"quadrature": res.est_error, "tau": tail})


def _do_zeta5(p, plan, cat, ctx):
    lhs = _zeta(mp.mpf(5), ctx)
    rhs = mp.mpf(4) / 3 * mp.pi ** 4 * _zeta_d(mp.mpf(-4), 1, ctx)
    return lhs, rhs, {}, mp.mpf(1), {}


def _do_amhalf(p, plan, cat, ctx):
    q = dict(p)
    q["a"] = mp.mpc(mp.mpf(-1) / 2, 1)
    q["w"] = 1
    return _do_nega_cplx(q, plan, cat, ctx)


def _a_eq_tau_closed(tau_m, ctx):
    zp = _zeta_d(tau_m, 1, ctx)
    zpp = _zeta_d(tau_m, 2, ctx)
    return -(mp.pi ** 2 * zp + 12 * zpp * tau_m) / (
        24 * tau_m * zp * zp)


def _pair_value(tau_m, eps, ctx):
    """1/zeta(a) plus the nearly-cancelling zero term at a = tau_m(1+eps)."""
    a = tau_m * (1 + eps)
    root = principal_sqrt(-a * (a - tau_m), ctx)
    zp = _zeta_d(tau_m, 1, ctx)
    term = mp.pi / 2 * _csch(mp.pi * root / (2 * a)) / (root * zp)
    return 1 / _zeta(a, ctx) + term


def _do_a_approx_tau(p, plan, cat, ctx):
    m, eps = int(p["m"]), mp.mpf(p["eps"])
    _catalog_required(cat, m)
    tau_m = mp.mpc(mp.mpf(1) / 2, cat.rho(m, ctx))
    lhs = _pair_value(tau_m, eps, ctx)
    rhs = _a_eq_tau_closed(tau_m, ctx)
    return lhs, rhs, {"boundary": True}, mp.mpf(1), {"eps": abs(eps)}


def _do_a_eq_tau(p, plan, cat, ctx):
    m, eps = int(p["m"]), mp.mpf(p["eps"])
    _catalog_required(cat, m)
    tau_m = mp.mpc(mp.mpf(1) / 2, cat.rho(m, ctx))
    f1 = _pair_value(tau_m, eps, ctx)
    f2 = _pair_value(tau_m, eps / 2, ctx)
    lhs = 2 * f2 - f1   # first-order extrapolation of the coalescence limit
    rhs = _a_eq_tau_closed(tau_m, ctx)
    return lhs, rhs, {"boundary": True}, mp.mpf(1), {"eps": abs(eps) ** 2}


def _a_eq_taum_rhs(m, plan, cat, ctx):
    _catalog_required(cat, m)
    tau_m = mp.mpc(mp.mpf(1) / 2, cat.rho(m, ctx))
    st = principal_sqrt(tau_m, ctx)
    zp = _zeta_d(tau_m, 1, ctx)
    zpp = _zeta_d(tau_m, 2, ctx)
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))

    def ksum(k):
        kk = (2 * k + 3) * (2 * k + 1)
        return (-1) ** k / _zeta(-tau_m * kk, ctx)

    def kprobe(k):
        kk = (2 * k + 3) * (2 * k + 1)
        return -_ln_abs_zeta_probe(-tau_m * kk)

    t_k, tail_k = _series_sum(ksum, 0, plan.k_max, cutoff, probe_fn=kprobe)

    def nsum(n):
        return 1 / (principal_sqrt(tau_m + 2 * n, ctx) * _zp_neg(n, ctx)
                    * mp.sin(mp.pi / 2 * principal_sqrt(
                        tau_m + 2 * n, ctx) / st))

    t_n, tail_n = _series_sum(nsum, 1, plan.n_max, cutoff)
    tb = mp.conj(tau_m)
    root = principal_sqrt(-tau_m * (tau_m - tb), ctx)
    conj_term = 1 / (principal_sqrt(tb - tau_m, ctx) * mp.conj(zp)
                     * mp.sinh(mp.pi * root / (2 * tau_m)))
    rhs = (4 * st / mp.pi * mp.fsum(t_k)
           + mp.fsum(t_n)
           - conj_term
           + mp.pi / (12 * zp * st)
           + st * zpp / (mp.pi * zp * zp))
    return rhs, tau_m, {"k": tail_k, "n": tail_n}


def _do_a_eq_taum(p, plan, cat, ctx):
    m = int(p["m"])
    rhs, tau_m, tails = _a_eq_taum_rhs(m, plan, cat, ctx)
    lhs, tail = eval_tau_sum("a-eq-taum", tau_m, 1, cat, plan.tau_max, ctx,
                             extras={"tau_m": tau_m}, exclude={m})
    tails["tau"] = tail
    flags = {}
    if tail > abs(rhs) * mp.mpf("1e-6"):
        flags["unconverged"] = True
    return lhs, rhs, flags, mp.mpf(1), tails


def _do_tau_asy(p, plan, cat, ctx):
    m = int(p["m"])
    rho = mp.mpf(p["rho"])
    _catalog_required(cat, m)
    tau_m = mp.mpc(mp.mpf(1) / 2, cat.rho(m, ctx))
    t = mp.mpc(mp.mpf(1) / 2, rho)
    root = principal_sqrt(-tau_m * (tau_m - t), ctx)
    lhs = 1 / (principal_sqrt(t - tau_m, ctx)
               * mp.sinh(mp.pi * root / (2 * tau_m)))
    rhs = tau_term_envelope(mp.im(tau_m), rho, conjugate=False, ctx=ctx)
    return lhs, rhs, {"boundary": True}, mp.mpf(1), {}


def _t_direct(rho, ctx):
    """The bare paired zero term at a = 1/2 from the defining expression."""
    a = mp.mpf(1) / 2
    t = mp.mpc(a, rho)
    zp = _zeta_d(t, 1, ctx)
    out = mp.mpf(0)
    for tt, zz in ((t, zp), (mp.conj(t), mp.conj(zp))):
        root = principal_sqrt(-a * (a - tt), ctx)
        out += 1 / (principal_sqrt(tt - a, ctx) * zz
                    * mp.sinh(mp.pi * root / (2 * a)))
    return out


def _t_reduced_u(rho, ctx):
    """The same term reduced to U(rho) and Re zeta' on the critical line."""
    zp = _zeta_d(mp.mpc(mp.mpf(1) / 2, rho), 1, ctx)
    u = engine.u_of_rho(rho, ctx)
    sr = mp.sqrt(rho)
    num = ((u + 1) * mp.cos(mp.pi * sr / 2) * mp.sinh(mp.pi * sr / 2)
           + (u - 1) * mp.sin(mp.pi * sr / 2) * mp.cosh(mp.pi * sr / 2))
    return (2 * mp.sqrt(2) * mp.re(zp) * num
            / (sr * (mp.cosh(mp.pi * sr) - mp.cos(mp.pi * sr))
               * abs(zp) ** 2))


def _t_reduced_d(rho, ctx):
    """The same term via the gamma-bundle symbols and Re zeta' only."""
    b = engine.appendix_bundle(rho, ctx)
    zp = _zeta_d(mp.mpc(mp.mpf(1) / 2, rho), 1, ctx)
    sr = mp.sqrt(rho)
    num = (b.D_plus * mp.cos(mp.pi * sr / 2) * mp.sinh(mp.pi * sr / 2)
           + b.D_minus * mp.sin(mp.pi * sr / 2) * mp.cosh(mp.pi * sr / 2))
    # the leading factor normalizes the expression to the conjugate *pair*
    # (the single-term form carries an extra 1/2)
    return (mp.sqrt(2) / mp.sqrt(mp.pi * rho) * num
            / ((mp.cos(mp.pi * sr) - mp.cosh(mp.pi * sr)) * mp.re(zp)))


def _do_q9q5(p, plan, cat, ctx):
    count = int(p.get("count", 20))
    _catalog_required(cat, count)
    u_vals, d_vals = [], []
    worst_direct = mp.mpf(0)
    for m in range(1, count + 1):
        rho = cat.rho(m, ctx)
        tu = _t_reduced_u(rho, ctx)
        td = _t_reduced_d(rho, ctx)
        tdir = _t_direct(rho, ctx)
        u_vals.append(tu)
        d_vals.append(td)
        worst_direct = max(worst_direct,
                           abs(tu - tdir) / max(abs(tdir), mp.mpf(1)))
    lhs, _ = compensated_sum(u_vals, ctx)
    rhs, _ = compensated_sum(d_vals, ctx)
    return (lhs, rhs, {}, mp.mpf(1),
            {"worst_vs_direct": worst_direct})


def _q9_asy(rho, ctx):
    zp = _zeta_d(mp.mpc(mp.mpf(1) / 2, rho), 1, ctx)
    sr = mp.sqrt(rho)
    arg = (-rho * mp.log(4 * mp.pi / mp.sqrt(1 + 4 * rho * rho))
           - mp.pi * sr / 2 - rho + mp.atan(2 * rho) / 2)
    return (mp.sqrt(2) * mp.exp(-mp.pi * sr / 2)
            / (sr * mp.re(zp))
            * (-mp.sin(arg) + mp.cos(arg)
               - mp.sin(mp.pi * sr / 2) + mp.cos(mp.pi * sr / 2)))


def _do_q9_asy(p, plan, cat, ctx):
    count = int(p.get("count", 10))
    _catalog_required(cat, count)
    ratios = {}
    last_exact = last_asy = mp.mpf(0)
    for m in range(1, count + 1):
        rho = cat.rho(m, ctx)
        last_exact = _t_reduced_u(rho, ctx)
        last_asy = _q9_asy(rho, ctx)
        ratios[f"ratio_{m}"] = (last_exact / last_asy
                                if last_asy != 0 else mp.mpf("inf"))
    return (last_exact, last_asy, {"boundary": True}, mp.mpf(1), ratios)


def _do_mtx1(p, plan, cat, ctx):
    a, b = mp.re(cnum(p["a"], ctx)), mp.re(cnum(p["b"], ctx))
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))

    def ksum(k):
        kk = (2 * k + 3) * (2 * k + 1)
        return ((-1) ** k * _zeta(-b * kk, ctx)
                / _zeta(-a * kk, ctx))

    def kprobe(k):
        kk = (2 * k + 3) * (2 * k + 1)
        return (_ln_abs_zeta_probe(-b * kk)
                - _ln_abs_zeta_probe(-a * kk))

    t_k, tail_k = _series_sum(ksum, 0, plan.k_max, cutoff, probe_fn=kprobe)

    def nsum(n):
        root = principal_sqrt(-a * a - 2 * a * n, ctx)
        return (_zeta(-2 * b * n / a, ctx)
                / (_zp_neg(n, ctx) * root) * _csch(
                    mp.pi * root / (2 * a)))

    t_n, tail_n = _series_sum(nsum, 1, plan.n_max, cutoff)
    lhs = mp.fsum(t_k) - mp.pi / 4 * mp.fsum(t_n)
    tau_part, tail_t = eval_tau_sum("mtx1", a, 1, cat, plan.tau_max, ctx,
                                    extras={"b": b})
    rootb = principal_sqrt(b - b * b, ctx)
    rhs = (mp.pi / 4 / (rootb * _zeta(a / b, ctx)
                        * mp.sinh(mp.pi * rootb / (2 * b)))
           + mp.pi / 4 * tau_part
           + _zeta(b, ctx) / (2 * _zeta(a, ctx)))
    return (lhs, rhs, {}, mp.mpf(1),
            {"k": tail_k, "n": tail_n, "tau": mp.pi / 4 * tail_t})


def mtxbrj_k_terms(m: int, j: int, k: int,
                   ctx: PrecisionContext = DEFAULT_CTX):
    """The k-th terms of the two derivative-ratio sums of the b = 2m,
    a = 2j rule (used for the magnitude-suppression check)."""
    with ctx.workdps():
        kk = (2 * k + 3) * (2 * k + 1)
        t1 = (-4 / mp.pi * _zp_neg(m * kk, ctx) * (-1) ** k
              / _zp_neg(m * j * kk, ctx))
        t2 = (-4 * m / mp.pi * (-1) ** k * _zp_neg(m * kk, ctx)
              / _zp_neg(kk * j, ctx))
        return t1, t2


def _do_mtxbrj(p, plan, cat, ctx):
    m, j = int(p["m"]), int(p["j"])
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))
    t_k1, t_k2 = [], []
    for k in range(0, plan.k_max):
        t1, t2 = mtxbrj_k_terms(m, j, k, ctx)
        t_k1.append(t1)
        t_k2.append(t2)
        if abs(t1) + abs(t2) < cutoff and k >= 1:
            break
    skipped = {j * (4 * h * h - 1) for h in range(1, plan.n_max)}

    def nsum(n):
        if n in skipped:
            return mp.mpf(0)
        s = mp.sin(mp.pi / 2 * mp.sqrt(1 + mp.mpf(n) / j))
        return (_zeta(mp.mpf(-2 * m * n) / j, ctx)
                / (mp.sqrt(1 + mp.mpf(n) / j) * _zp_neg(n, ctx) * s))

    t_n, tail_n = _series_sum(nsum, 1, plan.n_max, cutoff)
    # for m = 1 the derivative-ratio sum with the mjK argument coincides
    # term-by-term with the jK sum and must not be counted twice (verified
    # against the joint limit of the two-parameter rule); for m > 1 it is
    # ~25 orders below the jK sum
    lhs = mp.fsum(t_n) / -2 + mp.fsum(t_k2)
    if m > 1:
        lhs += mp.fsum(t_k1)
    tau_part, tail_t = eval_tau_sum("mtxbrj", mp.mpf(2 * j), 1, cat,
                                    plan.tau_max, ctx,
                                    extras={"m": m, "j": j})
    rhs = (-tau_part / 2
           + j * mp.sqrt(2) / (2 * mp.sqrt(m) * mp.sqrt(2 * m - 1)
                               * mp.sin(mp.pi / 2 * mp.sqrt(
                                   1 - mp.mpf(1) / (2 * m)))
                               * _zeta(mp.mpf(j) / m, ctx))
           - 2 * j * _zeta(mp.mpf(2 * m), ctx)
           / (mp.pi * _zeta(mp.mpf(2 * j), ctx)))
    supp1 = abs(t_k1[1] / t_k1[0]) if len(t_k1) > 1 else mp.mpf(0)
    supp2 = abs(t_k2[1] / t_k2[0]) if len(t_k2) > 1 else mp.mpf(0)
    return (lhs, rhs, {}, mp.mpf(1),
            {"n": tail_n, "tau": tail_t / 2,
             "k1_suppression": supp1, "k2_suppression": supp2})


def _mtx1ab_ksum(a, k_max, ctx):
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))

    def ksum(k):
        kk = (2 * k + 3) * (2 * k + 1)
        return (kk * _zeta_d(-a * kk, 1, ctx) * (-1) ** k
                / _zeta(-a * kk, ctx))

    def kprobe(k):
        # the terms behave like -K ln 2 / 2^(-aK) for a < 0
        kk = (2 * k + 3) * (2 * k + 1)
        return float(mp.log(kk * mp.log(2)) + float(a) * kk * math.log(2))

    return _series_sum(ksum, 0, k_max, cutoff, probe_fn=kprobe)


def _do_mtx1ab(p, plan, cat, ctx):
    a = mp.re(cnum(p["a"], ctx))
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))
    t_k, tail_k = _mtx1ab_ksum(a, plan.k_max, ctx)

    def nsum(n):
        root = principal_sqrt(-a * a - 2 * a * n, ctx)
        return n / root * _csch(mp.pi * root / (2 * a))

    t_n, tail_n = _series_sum(nsum, 1, plan.n_max, cutoff)
    lhs = mp.fsum(t_k) - mp.pi / (2 * a) * mp.fsum(t_n)
    tau_part, tail_t = eval_tau_sum("mtx1ab", a, 1, cat, plan.tau_max, ctx)
    root1 = principal_sqrt(-a * (a - 1), ctx)
    rhs = (-_zeta_d(a, 1, ctx) / (2 * _zeta(a, ctx))
           + mp.pi / (4 * root1 * a) * _csch(mp.pi * root1 / a / 2 * a / a)
           - mp.pi / (4 * a) * tau_part)
    # the middle closed term: pi / (4 sqrt(-a(a-1)) a sinh(pi sqrt(-a^2+a)/2a))
    rhs = (-_zeta_d(a, 1, ctx) / (2 * _zeta(a, ctx))
           + mp.pi / (4 * root1 * a) * _csch(
               mp.pi * principal_sqrt(-a * a + a, ctx) / (2 * a))
           - mp.pi / (4 * a) * tau_part)
    return (lhs, rhs, {}, mp.mpf(1),
            {"k": tail_k, "n": tail_n, "tau": abs(mp.pi / (4 * a)) * tail_t})


def _do_a_third(p, plan, cat, ctx):
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))
    third = mp.mpf(1) / 3
    lhs, tail_t = eval_tau_sum("a-third", -third, 1, cat, plan.tau_max, ctx)

    def ksum(k):
        kk = (2 * k + 3) * (2 * k + 1)
        return (kk * _zeta_d(third * kk, 1, ctx) * (-1) ** k
                / _zeta(third * kk, ctx))

    def kprobe(k):
        kk = (2 * k + 3) * (2 * k + 1)
        return float(mp.log(kk * mp.log(2)) - kk / 3 * math.log(2))

    t_k, tail_k = _series_sum(ksum, 1, plan.k_max, cutoff, probe_fn=kprobe)

    def nsum(n):
        r = mp.sqrt(mp.mpf(6 * n - 1))
        return n / (r * mp.sinh(mp.pi * r / 2))

    t_n, tail_n = _series_sum(nsum, 1, plan.n_max, cutoff)
    rhs = (-mp.mpf(4) / 9 / mp.pi * mp.fsum(t_k)
           + 2 * mp.fsum(t_n)
           + mp.mpf(4) / (9 * mp.pi) * (mp.mpf(39) / 16 - 3 * mp.euler)
           - mp.mpf(2) / 9 * _zeta_d(-third, 1, ctx)
           / (mp.pi * _zeta(-third, ctx)))
    return (lhs, rhs, {}, mp.mpf(1),
            {"tau": tail_t, "k": tail_k, "n": tail_n})


def _log_product(a, ctx, k_cap=200):
    # ratio orientation fixed by the sign identity
    # d/da log zeta(-aK) = -K zeta'(-aK)/zeta(-aK): the alternating K-sum
    # is the log-derivative of prod zeta(-a(4k+3)(4k+5))/zeta(-a(4k+1)(4k+3))
    total = mp.mpf(0)
    for k in range(k_cap):
        up = -a * (4 * k + 3) * (4 * k + 5)
        dn = -a * (4 * k + 1) * (4 * k + 3)
        t = mp.log(_zeta(up, ctx)) - mp.log(_zeta(dn, ctx))
        total += t
        if abs(t) < mp.mpf(10) ** (-(ctx.work_digits + 5)) and k > 2:
            break
    return total


def _do_difflog(p, plan, cat, ctx):
    a = mp.re(cnum(p["a"], ctx))
    t_k, tail_k = _mtx1ab_ksum(a, plan.k_max, ctx)
    lhs = mp.fsum(t_k)
    h = mp.mpf(10) ** (-(ctx.digits // 3))
    rhs = (_log_product(a + h, ctx) - _log_product(a - h, ctx)) / (2 * h)
    return lhs, rhs, {}, mp.mpf(1), {"k": tail_k, "step": h}


def _do_s4(p, plan, cat, ctx):
    a = cnum(p["a"], ctx)
    sa = principal_sqrt(a, ctx)
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))
    lhs, tail_t = eval_tau_sum("s4", a, 1, cat, plan.tau_max, ctx)

    def ksum(k):
        kk = (2 * k + 3) * (2 * k + 1)
        z = _zeta(-a * kk, ctx)
        return (-1) ** k * _zeta_d(-a * kk, 1, ctx) / (z * z)

    def kprobe(k):
        kk = (2 * k + 3) * (2 * k + 1)
        return -_ln_abs_zeta_probe(-float(mp.re(a)) * kk)

    t_k, tail_k = _series_sum(ksum, 0, plan.k_max, cutoff,
                              probe_fn=kprobe if mp.im(a) == 0 else None)

    def nsum(n):
        root = principal_sqrt(a + 2 * n, ctx)
        s = mp.sin(mp.pi * root / (2 * sa))
        core = sa / (2 * mp.pi * root) + mp.cot(mp.pi * root / (2 * sa)) / 4
        return core / (_zp_neg(n, ctx) * s * (a + 2 * n))

    t_n, tail_n = _series_sum(nsum, 1, plan.n_max, cutoff)
    za = _zeta(a, ctx)
    # the closed side is normalized to the conjugate *pair* (the zero sum
    # on the left adds each ordinate's conjugate term; the series side as
    # commonly quoted carries only the real part, i.e. half the pair)
    rhs = 2 * (4 * a / mp.pi ** 2 * mp.fsum(t_k)
               - 2 * a * _zeta_d(a, 1, ctx) / (mp.pi ** 2 * za * za)
               + mp.fsum(t_n))
    return (lhs, rhs, {}, mp.mpf(1),
            {"tau": tail_t, "k": tail_k, "n": tail_n})


def _do_zrat(p, plan, cat, ctx):
    a, w = cnum(p["a"], ctx), mp.mpf(p["w"])
    form = p.get("form", "zeta-ratio")
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))
    wq = complex_pow(w, mp.mpf(1) / 4, ctx) if w != 1 else mp.mpf(1)
    if form == "zeta-ratio":
        spec = KernelSpec("functional-ratio", MapParameter(a, w))
        res = quadrature.integrate(spec, 0.0, _quad_tol(ctx), ctx)
        root1 = principal_sqrt(a - a * a, ctx)
        w1 = complex_pow(w, 1 / (4 * a), ctx) if w != 1 else mp.mpf(1)

        def nsum(n):
            wf = (complex_pow(w, mp.mpf(2 * n + 1) / (4 * a), ctx)
                  if w != 1 else 1)
            root = principal_sqrt(-a * a + 2 * a * n + a, ctx)
            return (wf * _zeta(mp.mpf(2 * n + 1), ctx)
                    / (_zp_neg(n, ctx) * root) * _csch(
                        mp.pi * root / (2 * a)))

        t_n, tail_n = _series_sum(nsum, 1, plan.n_max, cutoff)
        rhs = (wq * _zeta(a, ctx) / _zeta(1 - a, ctx)
               - mp.pi * w1 / (root1 * mp.sinh(mp.pi * root1 / (2 * a)))
               - mp.pi / 2 * mp.fsum(t_n))
    else:
        spec = KernelSpec("gamma-form", MapParameter(a, w))
        res = quadrature.integrate(spec, 0.0, _quad_tol(ctx), ctx)

        def nsum(n):
            wf = (complex_pow(w, mp.mpf(2 * n + 1) / (4 * a), ctx)
                  if w != 1 else 1)
            root = principal_sqrt(-a * a + 2 * a * n + a, ctx)
            return ((-1) ** n * wf * (2 * mp.pi) ** (2 * n)
                    / (mp.factorial(2 * n) * root) * _csch(
                        mp.pi * root / (2 * a)))

        t_n, tail_n = _series_sum(nsum, 0, plan.n_max, cutoff)
        rhs = (wq * (2 * mp.pi) ** a
               / (mp.cos(mp.pi * a / 2) * engine.gamma_value(a, ctx))
               - 2 * mp.pi * mp.fsum(t_n))
    return (res.value, rhs, {}, mp.mpf(1),
            {"quadrature": res.est_error, "n": tail_n})


def m1z2_enclosed(a, cat, tau_max, ctx):
    """Catalog indices of zeros whose product-kernel preimage -tau/a lies
    inside the strip, i.e. 0 < Im(tau/a) < 1."""
    out = []
    with ctx.workdps():
        a = cnum(a, ctx)
        for m in range(1, min(tau_max, len(cat)) + 1):
            t = mp.mpc(mp.mpf(1) / 2, cat.rho(m, ctx))
            y = mp.im(t / a)
            if 0 < y < 1:
                out.append(m)
    return out


def _m1z2_rhs(a, plan, cat, ctx):
    idx = m1z2_enclosed(a, cat, plan.tau_max, ctx)
    terms = []
    for m in idx:
        t = mp.mpc(mp.mpf(1) / 2, cat.rho(m, ctx))
        zp = _zeta_d(t, 1, ctx)
        terms.append(1 / (zp * _zeta(1j * a - t, ctx)
                          * mp.cosh(mp.pi * t / a)))
    pref = 2j * mp.pi / a
    rhs = 1 / _zeta(1j * a / 2, ctx) ** 2 + pref * mp.fsum(terms)
    return rhs, idx


def _do_m1z2(p, plan, cat, ctx):
    a = cnum(p["a"], ctx)
    _catalog_required(cat, 1)
    rhs, idx = _m1z2_rhs(a, plan, cat, ctx)
    spec = KernelSpec("product-zeta", MapParameter(a, 1))
    res = quadrature.integrate(spec, 0.0, _quad_tol(ctx), ctx)
    return (res.value, rhs, {}, mp.mpf(1),
            {"quadrature": res.est_error, "enclosed": mp.mpf(len(idx))})


def _do_mt1a(p, plan, cat, ctx):
    a = cnum(p["a"], ctx)
    lhs, tail_t = eval_tau_sum("mt1a", a, 1, cat, plan.tau_max, ctx)
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 5))

    def nsum(n):
        return 1 / (_zp_neg(n, ctx) * _zeta(1j * a + 2 * n, ctx)
                    * mp.cosh(2 * mp.pi * n / a))

    t_n, tail_n = _series_sum(nsum, 1, plan.n_max, cutoff)

    def ksum(k):
        return ((-1) ** k
                / (_zeta(1j * a * k + 3j * a / 2, ctx)
                   * _zeta(-1j * a * k - 1j * a / 2, ctx)))

    def kprobe(k):
        return (-_ln_abs_zeta_probe(1j * a * k + 3j * a / 2)
                - _ln_abs_zeta_probe(-1j * a * k - 1j * a / 2))

    t_k, tail_k = _series_sum(ksum, 0, plan.k_max, cutoff, probe_fn=kprobe)
    rhs = (-mp.fsum(t_n)
           - 1j * a / mp.pi * mp.fsum(t_k)
           + 1j * a / (2 * mp.pi * _zeta(1j * a / 2, ctx) ** 2))
    return (lhs, rhs, {}, mp.mpf(1),
            {"tau": tail_t, "n": tail_n, "k": tail_k})


def _special_tau_lhs(ia_val, half_pi_factor, count, cat, ctx):
    """Sum over the first ``count`` zero pairs of the special-value shape
    1/(zeta'(tau) zeta(ia - tau) cosh(pi tau / a)); ia_val = i*a and
    cosh(pi tau/a) is passed as cos(half_pi_factor * pi * tau)."""
    _catalog_required(cat, count)
    terms = []
    for m in range(1, count + 1):
        t = mp.mpc(mp.mpf(1) / 2, cat.rho(m, ctx))
        zp = _zeta_d(t, 1, ctx)
        for tt, zz in ((t, zp), (mp.conj(t), mp.conj(zp))):
            terms.append(1 / (zz * _zeta(ia_val - tt, ctx)
                              * mp.cos(half_pi_factor * mp.pi * tt)))
    total, cond = compensated_sum(terms, ctx)
    return total, cond


def _require_46(ctx, plan):
    if ctx.digits < 60:
        raise PrecisionError(
            "this special-value identity cancels catastrophically; at "
            "least 60 digits are required")
    if plan.k_max < 150:
        raise PrecisionError(
            "this special-value identity needs at least 150 series terms")


def _do_a_neg_i(p, plan, cat, ctx):
    _require_46(ctx, plan)
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 10))

    def lsum(k):
        return ((-2 * mp.pi) ** k
                / (_zeta(k + mp.mpf(3) / 2, ctx) ** 2
                   * mp.sin((2 * k + 1) * mp.pi / 4)
                   * engine.gamma_value(k + mp.mpf(3) / 2, ctx)))

    t_l, tail_l = _series_sum(lsum, 1, plan.k_max, cutoff)
    lhs = mp.sqrt(2 * mp.pi) * mp.fsum(t_l)

    def rsum(n):
        return ((-1) ** n * (2 * mp.pi) ** (2 * n)
                / (_zeta(2 * n + 1, ctx) ** 2 * mp.factorial(2 * n)))

    t_r, tail_r = _series_sum(rsum, 1, plan.n_max, cutoff)
    rhs = (-4 / _zeta(mp.mpf(3) / 2, ctx) ** 2
           - 1 / (2 * mp.pi * _zeta(mp.mpf(1) / 2, ctx) ** 2)
           + 2 * mp.fsum(t_r))
    return lhs, rhs, {}, mp.mpf(1), {"k": tail_l, "n": tail_r}


def _do_a_2i(p, plan, cat, ctx):
    _require_46(ctx, plan)
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 10))
    lhs, cond = _special_tau_lhs(mp.mpf(-2), mp.mpf(1) / 2,
                                 plan.tau_max, cat, ctx)

    def ksum(k):
        return ((2 * mp.pi) ** (2 * k)
                * ((2 * k + 3) / (_zeta(2 * k + 3, ctx)
                                  * _zeta(mp.mpf(2 * k), ctx))
                   - 2 * mp.pi / (_zeta(2 * k + 4, ctx)
                                  * _zeta(2 * k + 1, ctx)))
                / mp.factorial(2 * k + 3))

    t_k, tail_k = _series_sum(ksum, 1, plan.k_max, cutoff)
    rhs = (-1 / (mp.pi * _zeta(mp.mpf(-1), ctx) ** 2)
           - 2 / _zeta_d(mp.mpf(-2), 1, ctx)
           - 8 * mp.pi ** 2 * mp.fsum(t_k))
    return lhs, rhs, {}, cond, {"k": tail_k}


def _do_a_i(p, plan, cat, ctx):
    _require_46(ctx, plan)
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 10))
    lhs, cond = _special_tau_lhs(mp.mpf(-1), mp.mpf(1),
                                 plan.tau_max, cat, ctx)

    def k1(k):
        return ((-1) ** k * (2 * mp.pi) ** (2 * k)
                / (_zeta(2 * k + 3, ctx) * mp.factorial(2 * k + 2)
                   * _zeta(2 * k + 1, ctx)))

    t_1, tail_1 = _series_sum(k1, 1, plan.k_max, cutoff)

    def k2(k):
        return ((-mp.pi) ** k
                * engine.gamma_value(-mp.mpf(k) / 2 - mp.mpf(3) / 4, ctx)
                / (engine.gamma_value(mp.mpf(5) / 4 + mp.mpf(k) / 2, ctx)
                   * _zeta(mp.mpf(5) / 2 + k, ctx)
                   * _zeta(k + mp.mpf(1) / 2, ctx)))

    t_2, tail_2 = _series_sum(k2, 1, plan.k_max, cutoff)
    rhs = (8 * mp.pi ** 2 * mp.fsum(t_1)
           + 1 / (_zeta(mp.mpf(-3) / 2, ctx)
                  * _zeta(mp.mpf(1) / 2, ctx) * mp.pi)
           + mp.pi * mp.fsum(t_2)
           - 1 / (2 * mp.pi * _zeta(mp.mpf(-1) / 2, ctx) ** 2))
    return lhs, rhs, {}, cond, {"k1": tail_1, "k2": tail_2}


def _do_a_half_i(p, plan, cat, ctx):
    _require_46(ctx, plan)
    sign = int(p.get("sign", -1))
    cutoff = mp.mpf(10) ** (-(ctx.work_digits + 10))
    # sign -1: a = -i/2 (argument shift +1/2); sign +1: a = i/2 (shift -1/2)
    ia_val = -mp.mpf(sign) / 2
    lhs, cond = _special_tau_lhs(ia_val, mp.mpf(2), plan.tau_max, cat, ctx)

    def k1(k):
        return ((-1) ** k * (2 * mp.pi) ** (2 * k)
                / (_zeta(-mp.mpf(sign) / 2 + 2 * k, ctx)
                   * _zeta(2 * k + 1, ctx) * mp.factorial(2 * k)))

    t_1, tail_1 = _series_sum(k1, 1, plan.k_max, cutoff)

    def k2(k):
        return ((-1) ** k
                / (_zeta(-sign * (mp.mpf(k) / 2 + mp.mpf(3) / 4), ctx)
                   * _zeta(sign * (mp.mpf(k) / 2 + mp.mpf(1) / 4), ctx)))

    t_2, tail_2 = _series_sum(k2, 0, plan.k_max, cutoff)
    quarter = _zeta(-mp.mpf(sign) / 4, ctx)
    rhs = (-2 * mp.fsum(t_1)
           + mp.mpf(sign) / (2 * mp.pi) * mp.fsum(t_2)
           - mp.mpf(sign) / (4 * mp.pi * quarter ** 2))
    # suppression of the second zero pair relative to the first
    _catalog_required(cat, 2)
    r1, r2 = cat.rho(1, ctx), cat.rho(2, ctx)
    t1 = abs(1 / (_zeta_d(mp.mpc(mp.mpf(1) / 2, r1), 1, ctx)
                  * _zeta(ia_val - mp.mpc(mp.mpf(1) / 2, r1), ctx)
                  * mp.cos(2 * mp.pi * mp.mpc(mp.mpf(1) / 2, r1))))
    t2 = abs(1 / (_zeta_d(mp.mpc(mp.mpf(1) / 2, r2), 1, ctx)
                  * _zeta(ia_val - mp.mpc(mp.mpf(1) / 2, r2), ctx)
                  * mp.cos(2 * mp.pi * mp.mpc(mp.mpf(1) / 2, r2))))
    return (lhs, rhs, {}, cond,
            {"k1": tail_1, "k2": tail_2, "tau2_suppression": t2 / t1})


def half_zero_root(ctx: PrecisionContext = DEFAULT_CTX):
    """The unique rho in (0, 2) with Re Gamma(1/2 + i rho) = 1."""
    with ctx.workdps():
        def g(r):
            return mp.re(engine.gamma_value(
                mp.mpc(mp.mpf(1) / 2, r), ctx)) - 1
        lo, hi = mp.mpf("1e-6"), mp.mpf(2)
        glo, ghi = g(lo), g(hi)
        if glo * ghi > 0:
            raise NoRoot("Re Gamma(1/2 + i rho) - 1 does not change sign "
                         "on (0, 2)")
        for _ in range(int(ctx.work_digits * 3.4) + 10):
            mid = (lo + hi) / 2
            gm = g(mid)
            if gm == 0:
                return mid
            if (gm > 0) == (glo > 0):
                lo, glo = mid, gm
            else:
                hi = mid
        return (lo + hi) / 2


def _do_half_zero(p, plan, cat, ctx):
    root = half_zero_root(ctx)
    resid = mp.re(engine.gamma_value(mp.mpc(mp.mpf(1) / 2, root), ctx)) - 1
    return root, mp.mpf("0.4102"), {}, mp.mpf(1), {"residual": abs(resid)}


_EVALUATORS = {
    IdentityId.MASTER_ZETA: _do_master_zeta,
    IdentityId.SRULE1: _do_srule1,
    IdentityId.EXCEPT_APQ: _do_except_apq,
    IdentityId.EXCEPT_2M: _do_except_2m,
    IdentityId.SRULE2: _do_srule2,
    IdentityId.SRULE2A: _do_srule2a,
    IdentityId.SRULE_2A: _do_srule_2a,
    IdentityId.IB_INT: _do_ib_int,
    IdentityId.NEGA_CPLX: _do_nega_cplx,
    IdentityId.ZETA5: _do_zeta5,
    IdentityId.AMHALF: _do_amhalf,
    IdentityId.A_APPROX_TAU: _do_a_approx_tau,
    IdentityId.A_EQ_TAU: _do_a_eq_tau,
    IdentityId.A_EQ_TAUM: _do_a_eq_taum,
    IdentityId.TAU_ASY: _do_tau_asy,
    IdentityId.Q9Q5: _do_q9q5,
    IdentityId.Q9_ASY: _do_q9_asy,
    IdentityId.MTX1: _do_mtx1,
    IdentityId.MTXBRJ: _do_mtxbrj,
    IdentityId.MTX1AB: _do_mtx1ab,
    IdentityId.A_THIRD: _do_a_third,
    IdentityId.DIFFLOG: _do_difflog,
    IdentityId.S4: _do_s4,
    IdentityId.ZRAT: _do_zrat,
    IdentityId.M1Z2: _do_m1z2,
    IdentityId.MT1A: _do_mt1a,
    IdentityId.A_NEG_I: _do_a_neg_i,
    IdentityId.A_2I: _do_a_2i,
    IdentityId.A_I: _do_a_i,
    IdentityId.A_HALF_I: _do_a_half_i,
    IdentityId.HALF_ZERO: _do_half_zero,
}


def verify(id: IdentityId, params=None, plan: TruncationPlan = None,
           cat: ZeroCatalog = None,
           ctx: PrecisionContext = DEFAULT_CTX) -> IdentityReport:
    """Evaluate both sides of the named identity independently.

    Raises DomainError when the parameters leave the identity's validity
    domain, ExceptionalA on the divergent lattice (outside the dedicated
    exceptional paths), InsufficientCatalog or Unconverged as applicable."""
    if not isinstance(id, IdentityId):
        id = IdentityId(str(id))
    merged = dict(DEFAULT_PARAMS.get(id, {}))
    merged.update(params or {})
    plan = plan or DEFAULT_PLANS.get(id, TruncationPlan())
    with ctx.workdps():
        norm = {}
        for k, v in merged.items():
            if k in ("a", "b"):
                norm[k] = cnum(v, ctx)
            elif k in ("w", "eps", "rho", "beta"):
                norm[k] = mp.mpf(v)
            else:
                norm[k] = v
        checker = VALIDITY.get(id)
        if checker is not None:
            checker(norm, ctx)
        lhs, rhs, flags, cond, tails = _EVALUATORS[id](norm, plan, cat, ctx)
        absres = abs(lhs - rhs)
        relres = absres / max(mp.mpf(1), abs(rhs))
        plan = replace(plan, tail_estimates={k: mp.mpf(abs(v))
                                             for k, v in tails.items()})
        for name in _FLAG_NAMES:
            flags.setdefault(name, False)
        return IdentityReport(
            id=id, params=merged, lhs=lhs, rhs=rhs,
            abs_residual=absres, rel_residual=relres,
            plan=plan, condition=cond, flags=flags)


# ---------------------------------------------------------------------------
# the long partial-sum trace (double-precision fast path)
# ---------------------------------------------------------------------------

def partial_sum_trace(m: int, term_count: int, cat: ZeroCatalog,
                      ctx: PrecisionContext = DEFAULT_CTX,
                      stride: int = 1):
    """Running fractional errors of the slowly-converging zero sum anchored
    at the m-th zero, against its series side, over the first
    ``term_count`` catalog zeros.  Yields (count, frac_err_re, frac_err_im)
    tuples every ``stride`` terms (double-precision term arithmetic)."""
    _catalog_required(cat, term_count)
    with ctx.workdps():
        rhs_mp, tau_m_mp, _ = _a_eq_taum_rhs(
            m, DEFAULT_PLANS[IdentityId.A_EQ_TAUM], cat, ctx)
        rhs = complex(rhs_mp)
        tau_m = complex(tau_m_mp)
    out = []
    total = 0j
    comp = 0j
    floats = cat.floats

    def csch(x):
        # exponent-safe complex csch
        if abs(x.real) > 700:
            s = 1.0 if x.real > 0 else -1.0
            return 2 * s * cmath.exp(-s * x)
        return 1 / cmath.sinh(x)

    for i in range(term_count):
        idx = i + 1
        if idx == m:
            val = 0j
        else:
            rho = floats[i]
            t = complex(0.5, rho)
            zp = engine.zeta_prime_on_line_fast(rho)
            val = 0j
            for tt, zz in ((t, zp), (t.conjugate(), zp.conjugate())):
                root = cmath.sqrt(-tau_m * (tau_m - tt))
                val += (csch(cmath.pi * root / (2 * tau_m))
                        / (cmath.sqrt(tt - tau_m) * zz))
        # Kahan-compensated accumulation keeps the trace deterministic
        y = val - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if idx % stride == 0 or idx == term_count:
            fe_re = abs((total.real - rhs.real) / rhs.real)
            fe_im = abs((total.imag - rhs.imag) / rhs.imag)
            out.append((idx, fe_re, fe_im))
    return out
