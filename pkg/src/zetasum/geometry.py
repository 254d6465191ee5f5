"""The map z = 4 a v (v+i): forward evaluation, preimages for arbitrary
complex a, strip membership, enclosure predicates, and counting bounds.

The strip S is -1 < Im v < 0.  A point z0 = sigma + i rho has preimages in
the v-plane given by closed forms dispatched on the sign of the
discriminant D = alpha*rho + (sigma - 2 alpha)*beta (a = alpha + i beta);
the two preimages always satisfy v2 = (-v1_R, -v1_I - 1).  Membership of
either preimage in S is equivalent to

    E(z0) = (1/8) sqrt(((alpha-sigma)^2 + (beta-rho)^2)/(alpha^2+beta^2))
          + (alpha(alpha-sigma) + beta(beta-rho)) / (8 (alpha^2+beta^2))
    <= 1/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from mpmath import mp

from .core import DomainError, PrecisionContext, cnum, principal_sqrt
from .catalog import InsufficientCatalog, ZeroCatalog, Tau

DEFAULT_CTX = PrecisionContext()


class ZeroParamError(DomainError):
    """The map parameter a must be nonzero."""


@dataclass(frozen=True)
class MapParameter:
    """a = alpha + i beta together with the weight w in (0, 1]."""

    a: object
    w: object = 1

    def __post_init__(self) -> None:
        with DEFAULT_CTX.workdps():
            a = cnum(self.a)
            w = mp.mpf(self.w)
        if a == 0:
            raise ZeroParamError("a must be nonzero")
        if not 0 < w <= 1:
            raise DomainError("w must lie in (0, 1]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "w", w)

    def alpha_beta(self, ctx: PrecisionContext = DEFAULT_CTX):
        with ctx.workdps():
            a = cnum(self.a, ctx)
            return mp.re(a), mp.im(a)


@dataclass(frozen=True)
class StripPoint:
    v: object
    in_strip: bool
    boundary_flag: bool = False


@dataclass(frozen=True)
class EnclosureResult:
    enclosed: tuple       # ((label, preimage pair), ...)
    boundary_cases: tuple
    M: int                # distinct nontrivial ordinates enclosed
    trivial_indices: tuple = ()
    trivial_infinite: bool = False
    nontrivial_infinite: bool = False
    family_bounds: dict = field(default_factory=dict)


def forward_map(p: MapParameter, v, ctx: PrecisionContext = DEFAULT_CTX):
    """z = 4 a v (v + i)."""
    with ctx.workdps():
        a = cnum(p.a, ctx)
        v = cnum(v, ctx)
        return 4 * a * v * (v + mp.mpc(0, 1))


def _strip_point(v, ctx: PrecisionContext) -> StripPoint:
    with ctx.workdps():
        imv = mp.im(v)
        btol = mp.mpf(10) ** (-(ctx.digits // 4))
        boundary = min(abs(imv), abs(imv + 1)) < btol
        in_strip = (-1 <= imv <= 0) or boundary
        return StripPoint(v, bool(in_strip), bool(boundary))


def membership_expr(p: MapParameter, z0, ctx: PrecisionContext = DEFAULT_CTX):
    """The quantity E(z0) of the module docstring; preimage in S iff <= 1/4."""
    with ctx.workdps():
        al, be = p.alpha_beta(ctx)
        z0 = cnum(z0, ctx)
        sg, rh = mp.re(z0), mp.im(z0)
        mod2 = al * al + be * be
        d2 = (al - sg) ** 2 + (be - rh) ** 2
        return mp.sqrt(d2 / mod2) / 8 + (al * (al - sg) + be * (be - rh)) / (8 * mod2)


def preimages(p: MapParameter, z0,
              ctx: PrecisionContext = DEFAULT_CTX) -> tuple:
    """Both solutions of 4 a v (v+i) = z0 via the case closed forms.

    Dispatches on D = alpha*rho + (sigma-2 alpha)*beta.  The degenerate
    Case-3 corner sigma = 2 alpha (where the published sign choice is
    ambiguous) falls back to the principal-sqrt route and is flagged as a
    boundary case.
    """
    with ctx.workdps():
        al, be = p.alpha_beta(ctx)
        a = cnum(p.a, ctx)
        z0 = cnum(z0, ctx)
        sg, rh = mp.re(z0), mp.im(z0)
        mod2 = al * al + be * be
        disc = al * rh + (sg - 2 * al) * be
        i = mp.mpc(0, 1)
        v1 = None
        boundary = False
        if disc != 0:
            x = mp.sqrt(mod2 * ((al - sg) ** 2 + (be - rh) ** 2))
            y = be * be - al * al - be * rh + al * sg
            sp = mp.sqrt(2 * x + 2 * y)
            sm = mp.sqrt(2 * x - 2 * y)
            if disc > 0:
                v1r = (al * sp + be * sm) / (4 * mod2)
                v1i = -mp.mpf(1) / 2 + (al * sm - be * sp) / (4 * mod2)
            else:
                v1r = (al * sp - be * sm) / (4 * mod2)
                v1i = -mp.mpf(1) / 2 - (al * sm + be * sp) / (4 * mod2)
            v1 = mp.mpc(v1r, v1i)
        elif rh == 0 and be == 0:
            # real a, real z0 (covers the trivial-zero preimages)
            q = sg / (4 * al) - mp.mpf(1) / 4
            if q >= 0:
                v1 = mp.mpc(mp.sqrt(q), -mp.mpf(1) / 2)
            else:
                v1 = mp.mpc(0, -mp.mpf(1) / 2 + mp.sqrt(-q))
        elif sg == 2 * al:
            # ambiguous published sign choice; principal-sqrt fallback
            v1 = -i / 2 + principal_sqrt(z0 / (4 * a) - mp.mpf(1) / 4, ctx)
            boundary = True
        else:
            den = mp.sqrt((2 * al - sg) ** 2 + rh * rh)
            if al < 0 and sg > al:
                v1r = rh * mp.sqrt(sg - al) / (2 * mp.sqrt(-al) * den)
                v1i = (-mp.mpf(1) / 2
                       + mp.sqrt(-al) * (sg - 2 * al) * mp.sqrt(sg - al)
                       / (2 * al * den))
            elif al > 0 and sg < al:
                v1r = rh * mp.sqrt(al - sg) / (2 * mp.sqrt(al) * den)
                v1i = (-mp.mpf(1) / 2
                       + (2 * al - sg) * mp.sqrt(al - sg) / (2 * mp.sqrt(al) * den))
            else:
                sgn = 1 if sg < 2 * al else -1
                root = mp.sqrt((den * den) * abs(al - sg))
                if al > 0:  # sigma > alpha here
                    v1r = sgn * (2 * al - sg) * root / (2 * mp.sqrt(al) * den * den)
                    v1i = (-mp.mpf(1) / 2
                           - sgn * rh * root / (2 * mp.sqrt(al) * den * den))
                else:       # alpha < 0, sigma < alpha
                    v1r = -sgn * (2 * al - sg) * root / (2 * mp.sqrt(-al) * den * den)
                    v1i = (-mp.mpf(1) / 2
                           - sgn * rh * mp.sqrt(-al) * root / (2 * al * den * den))
            v1 = mp.mpc(v1r, v1i)
        v2 = mp.mpc(-mp.re(v1), -mp.im(v1) - 1)
        p1 = _strip_point(v1, ctx)
        p2 = _strip_point(v2, ctx)
        if boundary:
            p1 = StripPoint(p1.v, p1.in_strip, True)
            p2 = StripPoint(p2.v, p2.in_strip, True)
        return p1, p2


def preimage_identities_check(p: MapParameter, z0,
                              ctx: PrecisionContext = DEFAULT_CTX) -> bool:
    """Verify the two quadratic preimage relations

    v1R^2 + (v1I+1/2)^2 = (1/4) sqrt(((a-s)^2+(b-r)^2)/(a^2+b^2))
    v1R^2 - (v1I+1/2)^2 = -1/4 + (a s + b r)/(4 (a^2+b^2))

    to 10^(-digits/2)."""
    with ctx.workdps():
        al, be = p.alpha_beta(ctx)
        z0 = cnum(z0, ctx)
        sg, rh = mp.re(z0), mp.im(z0)
        mod2 = al * al + be * be
        v1, _ = preimages(p, z0, ctx)
        vr, vi = mp.re(v1.v), mp.im(v1.v)
        lhs_sum = vr * vr + (vi + mp.mpf(1) / 2) ** 2
        rhs_sum = mp.sqrt(((al - sg) ** 2 + (be - rh) ** 2) / mod2) / 4
        lhs_diff = vr * vr - (vi + mp.mpf(1) / 2) ** 2
        rhs_diff = -mp.mpf(1) / 4 + (al * sg + be * rh) / (4 * mod2)
        tol = mp.mpf(10) ** (-(ctx.digits // 2))
        scale = 1 + abs(rhs_sum) + abs(rhs_diff)
        return bool(abs(lhs_sum - rhs_sum) < tol * scale
                    and abs(lhs_diff - rhs_diff) < tol * scale)


# ---------------------------------------------------------------------------
# Enclosure
# ---------------------------------------------------------------------------

def _membership_expr_np(al: float, be: float, sg, rh):
    """Vectorized double-precision E(z0) for catalog filtering."""
    mod2 = al * al + be * be
    d2 = (al - sg) ** 2 + (be - rh) ** 2
    return np.sqrt(d2 / mod2) / 8 + (al * (al - sg) + be * (be - rh)) / (8 * mod2)


def _family_rho_limit(al: float, be: float, conj: bool,
                      shift: float = 0.0) -> float:
    """Largest ordinate rho whose zero (upper or conjugate branch) can be
    enclosed; math.inf for the alpha=0 upward-parabola branch that encloses
    every sufficiently high zero."""
    mod = math.hypot(al, be)
    s = -1.0 if conj else 1.0
    slope = (mod - s * be) / (8 * mod * mod)
    if slope <= 0 or (shift == 0.0 and slope * 1e-12 == 0 and mod == s * be):
        return math.inf
    if mod == s * be:
        return math.inf

    if shift == 0.0:
        def f(r):
            return _membership_expr_np(al, be, 0.5, s * r) - 0.25
    else:
        p = MapParameter(complex(al, be))

        def f(r):
            v1, _ = preimages(p, mp.mpc(0.5, s * r))
            i1 = float(mp.im(v1.v))
            return max(i1, -i1 - 1) - shift

    hi = (0.25 / slope + 8 * mod + 8) * (2 + 4 * abs(shift)) ** 2
    if f(hi) <= 0:
        return math.inf
    lo = 0.0
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return hi


def zeros_enclosed(p: MapParameter, cat: ZeroCatalog,
                   include_trivial: bool = False,
                   ctx: PrecisionContext = DEFAULT_CTX,
                   shift: float = 0.0) -> EnclosureResult:
    """Every nontrivial zero (and optionally trivial zero) whose preimage
    lies in the (possibly upward-extended) strip.

    For shift = 0 this is ordinary strip membership, E(z0) <= 1/4.  For
    shift > 0 the strip is extended to -1 <= Im v <= shift; membership of
    the upper preimage becomes Im v1 <= shift, tested directly.

    M counts distinct catalog ordinates with at least one enclosed member
    (a conjugate pair enclosed together counts once).  When a = i beta the
    upward-opening parabola encloses *every* zero above a height; that
    branch is flagged nontrivial_infinite and only catalog members are
    listed.
    """
    al, be = (float(x) for x in p.alpha_beta(ctx))
    if not cat.ordinates:
        raise InsufficientCatalog("empty catalog")
    rhos = np.asarray(cat.floats)
    btol = 10.0 ** (-(ctx.digits // 4))
    mod = math.hypot(al, be)
    limits = {c: _family_rho_limit(al, be, c, shift) for c in (False, True)}
    nontriv_inf = any(math.isinf(v) for v in limits.values())
    finite_req = max((v for v in limits.values() if not math.isinf(v)),
                     default=0.0)
    if finite_req > cat.floats[-1]:
        raise InsufficientCatalog(
            f"catalog height {cat.floats[-1]:.1f} < membership limit "
            f"{finite_req:.1f} for a={complex(al, be)}, shift={shift}")
    enclosed = []
    boundary = []
    seen_idx = set()
    for conj in (False, True):
        r = -rhos if conj else rhos
        if shift == 0.0:
            e = _membership_expr_np(al, be, 0.5, r)
            cand = np.nonzero(e <= 0.25 + max(btol, 1e-9))[0]
        else:
            # direct preimage test below; coarse prefilter via E for the
            # widened strip (matching the rho/(4|a|) growth of Im v1)
            e = _membership_expr_np(al, be, 0.5, r)
            cap = (0.5 + abs(shift) + 1.0) ** 2 / 4
            cand = np.nonzero(e <= cap)[0]
        for i in cand:
            z0 = mp.mpc(mp.mpf(1) / 2, -cat.rho(int(i) + 1, ctx) if conj
                        else cat.rho(int(i) + 1, ctx))
            v1, v2 = preimages(p, z0, ctx)
            with ctx.workdps():
                if shift == 0.0:
                    expr = membership_expr(p, z0, ctx)
                    dist = expr - mp.mpf(1) / 4
                    is_boundary = abs(dist) < btol
                    inside = dist <= 0 and not is_boundary
                else:
                    im1 = mp.im(v1.v)
                    im_top = max(im1, -im1 - 1)
                    dist = im_top - mp.mpf(shift)
                    is_boundary = abs(dist) < btol or v1.boundary_flag
                    inside = dist <= 0 and not is_boundary
            t = Tau(sigma="0.5", rho=cat.ordinates[int(i)],
                    index=int(i) + 1, conjugate=conj)
            if is_boundary:
                boundary.append((t, (v1, v2)))
            elif inside:
                enclosed.append((t, (v1, v2)))
                seen_idx.add(int(i) + 1)
    # Trivial zeros z0 = -2n
    triv = []
    triv_inf = False
    if include_trivial:
        if be == 0 and al < 0 and shift >= 0:
            triv_inf = True  # every -2n is enclosed; report, don't enumerate
        else:
            # asymptotically E(-2n) ~ (n/4)(|a|+alpha)/|a|^2, so the family
            # ends near n* = |a|^2/(|a|+alpha); scan a safety margin past it
            n_stop = int(2 * mod * mod / max(mod + al, 1e-30)) + 10
            for n in range(1, n_stop + 1):
                with ctx.workdps():
                    e = membership_expr(p, mp.mpf(-2 * n), ctx)
                    if e <= mp.mpf(1) / 4 + btol:
                        triv.append(n)
    return EnclosureResult(tuple(enclosed), tuple(boundary),
                           M=len(seen_idx), trivial_indices=tuple(triv),
                           trivial_infinite=triv_inf,
                           nontrivial_infinite=nontriv_inf)


def _rvm_count(t: float) -> float:
    """Riemann-von Mangoldt smooth zero count N(T)."""
    u = t / (2 * math.pi)
    return u * math.log(u) - u + 7.0 / 8.0


def shifted_enclosure(p: MapParameter, shift: float, cat: ZeroCatalog,
                      ctx: PrecisionContext = DEFAULT_CTX) -> EnclosureResult:
    """Enclosure for the strip extended upward by ``shift``.

    Families whose membership limit exceeds the catalog height are reported
    as analytic bounds in ``family_bounds`` (zero counts from the smooth
    counting function), not enumerated.
    """
    if shift < 0:
        raise DomainError("shift must be >= 0")
    if math.isinf(shift):
        return EnclosureResult((), (), M=0,
                               family_bounds={"tau": math.inf,
                                              "conjugate": math.inf,
                                              "trivial": math.inf})
    if shift == 0:
        return zeros_enclosed(p, cat, include_trivial=True, ctx=ctx)

    def im_v1(rho_ord: float, conj: bool) -> float:
        z0 = mp.mpc(0.5, -rho_ord if conj else rho_ord)
        v1, _ = preimages(p, z0, ctx)
        i1 = float(mp.im(v1.v))
        return max(i1, -i1 - 1)

    bounds = {}
    for name, conj in (("tau", False), ("conjugate", True)):
        lo, hi = 1.0, 2.0
        while im_v1(hi, conj) < shift:
            lo, hi = hi, hi * 2
            if hi > 1e18:
                break
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if im_v1(mid, conj) < shift:
                lo = mid
            else:
                hi = mid
        bounds[name] = 0.5 * (lo + hi)
    fam = {}
    for name in ("tau", "conjugate"):
        rho_lim = bounds[name]
        if rho_lim <= cat.floats[-1]:
            fam[name] = int(np.searchsorted(np.asarray(cat.floats), rho_lim))
        else:
            fam[name] = int(round(_rvm_count(rho_lim)))
    enumerable = all(bounds[n] <= cat.floats[-1] for n in bounds)
    if enumerable:
        res = zeros_enclosed(p, cat, include_trivial=True, ctx=ctx,
                             shift=shift)
        return EnclosureResult(res.enclosed, res.boundary_cases, res.M,
                               res.trivial_indices, res.trivial_infinite,
                               family_bounds=fam)
    return EnclosureResult((), (), M=0, family_bounds=fam)
