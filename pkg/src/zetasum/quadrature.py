"""Numerical evaluation of the master contour integrals over horizontal
lines v = t + i*shift.

Every kernel is built from the quadratic map z = 4 a v (v+i), the weight
w^{v(v+i)} (w in (0,1]) and a 1/cosh(pi v) factor, so on any fixed line the
integrand decays at least like exp(-pi|t|) (and like w^(t^2) when w < 1).
Panels use Gauss-Legendre nodes computed in-house and cached per
(precision, order); each unit panel is evaluated both whole and split in
half, with the coarse/fine difference driving the error estimate
(interval-doubling refinement).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from mpmath import mp, fp

from .core import (DEFAULT_CTX, DomainError, PrecisionContext, cnum,
                   compensated_sum)
from . import engine
from .geometry import MapParameter, preimages

FAMILIES = ("plain", "reciprocal-zeta", "ratio-zeta", "functional-ratio",
            "gamma-form", "product-zeta", "derivative-form")

#: families whose integrand obeys f(v) + f(-v-i) = 0; the derivative-form
#: pair instead obeys f(v) - f(-v-i) = 0 and is checked accordingly.
_ODD_FAMILIES = frozenset(FAMILIES) - {"derivative-form"}

_MAX_EXTENSION_PANELS = 25
_GROWTH_STREAK = 4


class SingularityOnContour(DomainError):
    """A kernel singularity lies too close to the integration line."""


class Unconverged(ArithmeticError):
    """The truncated integral did not settle below the tolerance."""

    def __init__(self, msg: str, partial=None):
        super().__init__(msg)
        self.partial = partial


@dataclass(frozen=True)
class KernelSpec:
    family: str
    p: MapParameter
    extra: dict = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise DomainError(f"unknown kernel family {self.family!r}")
        extra = dict(self.extra or {})
        if self.family == "ratio-zeta":
            if "b" not in extra:
                raise DomainError("ratio-zeta requires extra={'b': ...}")
            with DEFAULT_CTX.workdps():
                extra["b"] = cnum(extra["b"])
        elif self.family == "derivative-form":
            side = extra.setdefault("side", "lhs")
            if side not in ("lhs", "rhs"):
                raise DomainError("derivative-form side must be lhs or rhs")
        elif extra:
            raise DomainError(f"family {self.family!r} takes no extras")
        object.__setattr__(self, "extra", extra)
        self._assert_line_symmetry()

    # -- integrand ---------------------------------------------------------
    def integrand(self, ctx: PrecisionContext = DEFAULT_CTX):
        """Return f(v) as a callable of a complex mp value."""
        a = cnum(self.p.a, ctx)
        w = ctx.mpf(self.p.w)
        lnw = mp.log(w) if w != 1 else None
        fam = self.family

        def wfac(v):
            if lnw is None:
                return mp.mpf(1)
            return mp.exp(lnw * v * (v + 1j))

        if fam == "plain":
            def f(v):
                return wfac(v) / mp.cosh(mp.pi * v)
        elif fam == "reciprocal-zeta":
            def f(v):
                z = 4 * a * v * (v + 1j)
                return wfac(v) / (_zeta_val(z, ctx) * mp.cosh(mp.pi * v))
        elif fam == "ratio-zeta":
            b = cnum(self.extra["b"], ctx)

            def f(v):
                q = v * (v + 1j)
                return (wfac(v) * _zeta_val(4 * b * q, ctx)
                        / (_zeta_val(4 * a * q, ctx) * mp.cosh(mp.pi * v)))
        elif fam == "functional-ratio":
            def f(v):
                z = 4 * a * v * (v + 1j)
                return (wfac(v) * _zeta_val(z, ctx)
                        / (_zeta_val(1 - z, ctx) * mp.cosh(mp.pi * v)))
        elif fam == "gamma-form":
            def f(v):
                z = 4 * a * v * (v + 1j)
                return (wfac(v) * mp.exp(z * mp.log(2 * mp.pi))
                        * _recip_gamma(z, ctx)
                        / (mp.cos(mp.pi * z / 2) * mp.cosh(mp.pi * v)))
        elif fam == "product-zeta":
            def f(v):
                return (wfac(v) / (_zeta_val(a * (v + 1j), ctx)
                                   * _zeta_val(-a * v, ctx)
                                   * mp.cosh(mp.pi * v)))
        else:  # derivative-form
            if self.extra["side"] == "lhs":
                def f(v):
                    z = 4 * a * v * (v + 1j)
                    return (mp.sinh(mp.pi * v)
                            / (_zeta_val(z, ctx) * mp.cosh(mp.pi * v) ** 2))
            else:
                def f(v):
                    z = 4 * a * v * (v + 1j)
                    zv = _zeta_val(z, ctx)
                    zp = mp.zeta(z, derivative=1)
                    return ((2j * v - 1) * zp
                            / (mp.cosh(mp.pi * v) * zv * zv))
        return f

    def _assert_line_symmetry(self) -> None:
        """Check f(v) +/- f(-v-i) = 0 at 10 fixed strip points."""
        ctx = PrecisionContext(digits=30)
        sign = 1 if self.family in _ODD_FAMILIES else -1
        with ctx.workdps():
            f = self.integrand(ctx)
            pts = [mp.mpc(mp.mpf(3 + 7 * k) / 17, -mp.mpf(2 + 5 * k % 13) / 16)
                   for k in range(10)]
            for v in pts:
                fv = f(v)
                fr = f(-v - 1j)
                if abs(fv + sign * fr) > mp.mpf(10) ** (-ctx.digits + 6) * (
                        abs(fv) + 1):
                    raise DomainError(
                        f"kernel family {self.family!r} violates the line "
                        f"symmetry at v={complex(v)}")

    # -- symmetry of f along the real direction ----------------------------
    def line_parity(self) -> str:
        """'conj' if f(-t+is) = conj(f(t+is)), 'anticonj' if = -conj(...),
        'none' when parameters are not real."""
        with DEFAULT_CTX.workdps():
            a = cnum(self.p.a)
            if mp.im(a) != 0:
                return "none"
            if self.family == "ratio-zeta" and mp.im(cnum(self.extra["b"])) != 0:
                return "none"
        if self.family == "derivative-form" and self.extra["side"] == "lhs":
            return "anticonj"
        return "conj"


@dataclass(frozen=True)
class QuadResult:
    value: object          # mpf/mpc
    est_error: object      # mpf
    truncation_V: float
    panels: int
    unconverged: bool = False


# ---------------------------------------------------------------------------
# fast helpers
# ---------------------------------------------------------------------------

def _zeta_val(s, ctx: PrecisionContext):
    """zeta value for integrand use; delegated to the library so that the
    integral route of every identity shares no zeta code with the series
    route, with a cheap Dirichlet-sum path for very large Re s."""
    sigma = mp.re(s)
    if sigma >= 40:
        work = ctx.work_digits
        # tail of sum_{n>M} n^-s bounded by M^(1-sigma)/(sigma-1)
        m_need = mp.power(10, mp.mpf(work + 2) / (sigma - 1))
        if m_need <= 256:
            m_int = int(mp.ceil(m_need)) + 1
            tot = mp.mpf(1)
            for n in range(2, m_int + 1):
                tot += mp.exp(-s * mp.log(n))
            return tot
    return mp.zeta(s)


def _recip_gamma(z, ctx: PrecisionContext):
    """1/Gamma(z), entire; reflection route below Re z = 1/2."""
    if mp.re(z) >= mp.mpf("0.5"):
        return mp.exp(-engine.log_gamma(z, ctx))
    return engine.gamma_value(1 - z, ctx) * mp.sin(mp.pi * z) / mp.pi


@lru_cache(maxsize=64)
def _gauss_legendre(dps: int, n: int):
    """Nodes/weights on [-1, 1] by Newton iteration on P_n."""
    with mp.workdps(dps + 10):
        nodes, weights = [], []
        for k in range(1, n // 2 + n % 2 + 1):
            x = mp.mpf(math.cos(math.pi * (k - 0.25) / (n + 0.5)))
            for _ in range(100):
                p0, p1 = mp.mpf(1), x
                for j in range(2, n + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mp.mpf(10) ** (-dps - 5):
                    break
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
        xs, ws = [], []
        for x, wt in zip(nodes, weights):
            xs.append(x)
            ws.append(wt)
            if x != 0:
                xs.append(-x)
                ws.append(wt)
        return tuple(xs), tuple(ws)


def _panel(f, t0, t1, shift, nodes, weights):
    mid = (t0 + t1) / 2
    half = (t1 - t0) / 2
    tot = mp.mpf(0)
    for x, wt in zip(nodes, weights):
        tot += wt * f(mp.mpc(mid + half * x, shift))
    return tot * half


# ---------------------------------------------------------------------------
# pole proximity
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _low_ordinates(count: int = 30) -> tuple:
    """First ordinates of the zeta zeros on the critical line (float)."""
    out = []
    t = 13.0
    prev = fp.siegelz(t)
    step = 0.05
    while len(out) < count:
        t += step
        cur = fp.siegelz(t)
        if prev == 0 or (prev < 0) != (cur < 0):
            lo, hi = t - step, t
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if (fp.siegelz(lo) < 0) != (fp.siegelz(mid) < 0):
                    hi = mid
                else:
                    lo = mid
            out.append(0.5 * (lo + hi))
        prev = cur
    return tuple(out)


def _singular_points(k: KernelSpec, shift: float, band: float,
                     ctx: PrecisionContext):
    """Candidate singularities of the integrand whose imaginary part lies
    within `band` of `shift`; returns (re, im, label) triples."""
    pts = []
    m_lo = int(math.floor(shift - band - 0.5))
    m_hi = int(math.ceil(shift + band - 0.5)) + 1
    for m_ in range(m_lo, m_hi + 1):
        pts.append((0.0, m_ + 0.5, f"cosh zero at v = {m_ + 0.5}i"))
    fam = k.family

    def add_preimages(param, z0, label):
        try:
            sp1, sp2 = preimages(param, z0, ctx)
        except DomainError:
            return
        for sp in (sp1, sp2):
            im = float(mp.im(sp.v))
            if abs(im - shift) <= band:
                pts.append((float(mp.re(sp.v)), im, label))

    if fam in ("reciprocal-zeta", "ratio-zeta", "derivative-form",
               "functional-ratio"):
        # zeros of zeta(4 a v (v+i)) (and the z = 1 pole of the numerator
        # for the ratio families)
        targets = [(-2 * n, f"trivial zero -{2 * n}") for n in range(1, 200)]
        for idx, rho in enumerate(_low_ordinates(), start=1):
            targets.append((mp.mpc(0.5, rho), f"zero #{idx}"))
            targets.append((mp.mpc(0.5, -rho), f"zero #-{idx}"))
        if fam == "functional-ratio":
            # singular where zeta(1-z) = 0 or z = 1
            targets = ([(1 + 2 * n, f"reflected trivial zero {1 + 2 * n}")
                        for n in range(1, 200)]
                       + [(1 - t_, lbl + " (reflected)") for t_, lbl in
                          targets if not isinstance(t_, int)]
                       + [(1, "pole of the numerator")])
        for z0, lbl in targets:
            add_preimages(k.p, z0, lbl)
        if fam == "ratio-zeta":
            bpar = MapParameter(k.extra["b"], k.p.w)
            add_preimages(bpar, 1, "numerator pole (b map)")
    elif fam == "gamma-form":
        # cos(pi z / 2) vanishes at odd integers
        for m_ in range(-199, 200, 2):
            add_preimages(k.p, m_, f"cosine zero at z = {m_}")
    elif fam == "product-zeta":
        with ctx.workdps():
            a = cnum(k.p.a, ctx)
            targets = [(mp.mpf(-2 * n), f"trivial zero -{2 * n}")
                       for n in range(1, 200)]
            for idx, rho in enumerate(_low_ordinates(), start=1):
                targets.append((mp.mpc(0.5, rho), f"zero #{idx}"))
                targets.append((mp.mpc(0.5, -rho), f"zero #-{idx}"))
            for z0, lbl in targets:
                for v, tag in ((z0 / a - 1j, "left factor"),
                               (-z0 / a, "right factor")):
                    im = float(mp.im(v))
                    if abs(im - shift) <= band:
                        pts.append((float(mp.re(v)), im, f"{lbl} ({tag})"))
    return pts


def _min_pole_distance(points, shift: float) -> tuple:
    best = (float("inf"), "none")
    for _re, im, label in points:
        d = abs(im - shift)
        if d < best[0]:
            best = (d, label)
    return best


def _segment_pole_distance(points, shift: float, t0: float, t1: float,
                           mirror: bool) -> float:
    """Distance from the nearest singularity to the segment
    [t0, t1] x {shift}; with `mirror`, the segment [-t1, -t0] counts too
    (the conjugate-parity fold evaluates both)."""
    best = float("inf")
    for re_, im, _label in points:
        dy = im - shift
        dx = max(0.0, t0 - re_, re_ - t1)
        if mirror:
            dx = min(dx, max(0.0, t0 + re_, -re_ - t1))
        best = min(best, math.hypot(dx, dy))
    return best


# ---------------------------------------------------------------------------
# main entry points
# ---------------------------------------------------------------------------

def _truncation_v(w, shift, tol) -> float:
    """Smallest t with w^(t^2 - s(s+1)) * 2 exp(-pi t) <= tol / 10."""
    lw = math.log(float(w)) if float(w) < 1 else 0.0
    s = float(shift)
    target = math.log(float(tol) / 10)
    if lw == 0.0:
        v = (math.log(2) - target) / math.pi
    else:
        c = math.log(2) - s * (s + 1) * lw - target
        v = (math.pi - math.sqrt(math.pi ** 2 - 4 * lw * c)) / (2 * lw)
    return max(3.0, math.ceil(v))


def _order_for(tol, d) -> int:
    """Gauss-Legendre order for half-width 0.5 panels and pole distance d."""
    h = 0.5
    r = d / h + math.sqrt(1 + (d / h) ** 2)
    digits_needed = -math.log10(float(tol)) + 3
    n = int(math.ceil(digits_needed * math.log(10) / (2 * math.log(r))))
    return min(max(n, 16), 96)


_MAX_DEPTH = 14


def _refine(f, t0, t1, shift, nodes, weights, local_tol, depth,
            coarse=None):
    """Interval-doubling refinement of one panel.

    Returns (value, err, converged); `err` is the accepted coarse/fine
    difference, a safe overestimate of the fine-rule error.  The parent's
    half-panel value is passed down as `coarse` to avoid re-evaluation."""
    if coarse is None:
        coarse = _panel(f, t0, t1, shift, nodes, weights)
    tm = (t0 + t1) / 2
    left = _panel(f, t0, tm, shift, nodes, weights)
    right = _panel(f, tm, t1, shift, nodes, weights)
    fine = left + right
    diff = abs(fine - coarse)
    if diff <= local_tol:
        return fine, diff, True
    if depth >= _MAX_DEPTH:
        return fine, diff, False
    vl, el, cl = _refine(f, t0, tm, shift, nodes, weights,
                         local_tol / 2, depth + 1, coarse=left)
    vr, er, cr = _refine(f, tm, t1, shift, nodes, weights,
                         local_tol / 2, depth + 1, coarse=right)
    return vl + vr, el + er, cl and cr


def _sum_panels(f, edges, shift, dps, local_tol, tol, points, mirror):
    """Adaptive panel sums with per-panel Gauss-Legendre order chosen from
    the local pole distance; returns (pieces, err_total, all_converged)."""
    pieces = []
    err = mp.mpf(0)
    ok = True
    for t0, t1 in edges:
        d_loc = _segment_pole_distance(points, float(shift),
                                       float(t0), float(t1), mirror)
        order = _order_for(tol, min(d_loc, 1.0))
        nodes, weights = _gauss_legendre(dps, order)
        val, e, conv = _refine(f, t0, t1, shift, nodes, weights,
                               local_tol, 0)
        pieces.append(val)
        err += e
        ok = ok and conv
    return pieces, err, ok


def integrate(k: KernelSpec, shift: float, tol,
              ctx: PrecisionContext = DEFAULT_CTX) -> QuadResult:
    """Integrate the kernel along v = t + i*shift, t in (-inf, inf)."""
    with ctx.workdps():
        tol = mp.mpf(tol)
        if tol < ctx.eps * mp.power(10, ctx.guard_digits):
            raise DomainError("tolerance below the context resolution")
        points = _singular_points(k, float(shift), 1.5, ctx)
        d, label = _min_pole_distance(points, float(shift))
        if d < 10 * float(tol) or d < 1e-12:
            raise SingularityOnContour(
                f"singularity within {d:.3e} of the line: {label}")
        v_half = _truncation_v(k.p.w, shift, tol)
        v_cap = 2 * v_half + _MAX_EXTENSION_PANELS  # doubled analytic bound
        v_core = int(min(v_half, 4))
        parity = k.line_parity()
        mirror = parity != "none"
        f = k.integrand(ctx)
        dps = mp.dps

        # cancellation screen: the integrand's magnitude near the middle of
        # the line sets the roundoff floor attainable at this precision
        peak = max(abs(f(mp.mpc(t, shift)))
                   for t in (mp.mpf("0.11"), mp.mpf("0.7"), mp.mpf("1.3"),
                             mp.mpf("2.6")))
        if peak * mp.power(10, -ctx.work_digits) > tol:
            raise Unconverged(
                f"integrand magnitude {mp.nstr(peak, 3)} on the line puts "
                f"the roundoff floor above {mp.nstr(tol, 3)}")

        def unit_edges(t_from, t_to):
            return [(mp.mpf(t_from + j), mp.mpf(t_from + j + 1))
                    for j in range(int(t_to - t_from))]

        local_tol = tol / (20 * (2 * v_half + 1))
        if parity != "none":
            edges = unit_edges(0, v_core)
        else:
            edges = unit_edges(-v_core, v_core)
        pieces, err, all_ok = _sum_panels(f, edges, shift, dps, local_tol,
                                          tol, points, mirror)

        # outward extension: keep adding unit panels until two consecutive
        # rings fall below the tail budget, up to the doubled analytic bound
        unconverged = not all_ok
        streak = 0
        small_rings = 0
        last_mag = None
        t_hi = mp.mpf(v_core)
        while t_hi < v_cap:
            sides = [(t_hi, t_hi + 1)]
            if parity == "none":
                sides.append((-t_hi - 1, -t_hi))
            piece_sum = mp.mpf(0)
            for t0, t1 in sides:
                new_pieces, new_err, ok = _sum_panels(
                    f, [(t0, t1)], shift, dps, local_tol, tol, points,
                    mirror)
                pieces.extend(new_pieces)
                err += new_err
                unconverged = unconverged or not ok
                piece_sum += abs(new_pieces[0])
            if piece_sum <= tol / 20:
                small_rings += 1
                if small_rings >= 2:
                    break
            else:
                small_rings = 0
            if last_mag is not None and piece_sum > last_mag:
                streak += 1
                if streak >= _GROWTH_STREAK:
                    unconverged = True
                    break
            else:
                streak = 0
            last_mag = piece_sum
            t_hi += 1
        else:
            unconverged = True

        total, _cond = compensated_sum(pieces, ctx)
        if parity == "conj":
            total = 2 * mp.re(total)
            err *= 2
        elif parity == "anticonj":
            total = mp.mpc(0, 2 * mp.im(total))
            err *= 2
        err += tol / 10  # truncated tail allowance
        # roundoff floor: cancellation across panels cannot be beaten by
        # panel refinement, so it is reported explicitly
        err += mp.power(10, -ctx.work_digits) * mp.fsum(
            abs(x) for x in pieces)
        n_panels = len(pieces) * 2  # fine panels actually evaluated
        res = QuadResult(value=total, est_error=err,
                         truncation_V=float(t_hi),
                         panels=n_panels, unconverged=unconverged)
        if unconverged or not err < tol:
            raise Unconverged(
                f"tail did not settle below {mp.nstr(tol)} "
                f"(est_error {mp.nstr(err)})", partial=res)
        return res


def integrate_partial_range(k: KernelSpec, shift: float, t_range, tol,
                            ctx: PrecisionContext = DEFAULT_CTX) -> QuadResult:
    """Integral restricted to real parts t in [t0, t1]."""
    with ctx.workdps():
        tol = mp.mpf(tol)
        t0, t1 = (mp.mpf(t_range[0]), mp.mpf(t_range[1]))
        if t1 <= t0:
            return QuadResult(value=mp.mpf(0), est_error=mp.mpf(0),
                              truncation_V=0.0, panels=0)
        points = _singular_points(k, float(shift), 1.5, ctx)
        d, label = _min_pole_distance(points, float(shift))
        if d < 10 * float(tol) or d < 1e-12:
            raise SingularityOnContour(
                f"singularity within {d:.3e} of the line: {label}")
        f = k.integrand(ctx)
        n_sub = max(1, int(mp.ceil(t1 - t0)))
        step = (t1 - t0) / n_sub
        edges = [(t0 + j * step, t0 + (j + 1) * step) for j in range(n_sub)]
        pieces, err, ok = _sum_panels(f, edges, shift, mp.dps,
                                      tol / (20 * (n_sub + 1)), tol,
                                      points, False)
        total, _cond = compensated_sum(pieces, ctx)
        return QuadResult(value=total, est_error=err,
                          truncation_V=float(t1), panels=len(pieces) * 2,
                          unconverged=not ok)
