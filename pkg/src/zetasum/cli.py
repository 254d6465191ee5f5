"""Command-line front end: catalog management, identity verification,
parameter scans, traces, and geometry queries with CSV emission.

Exit codes
----------
0   success (for ``verify``: residual below the tolerance)
1   ``verify`` ran cleanly but the residual exceeded the tolerance
2   parse or validation failure (bad flags, config file, catalog table)
3   parameters outside an identity's validity domain
4   unconverged evaluation, uncertifiable precision, or a catalog too
    small for the requested truncation

Configuration
-------------
Every run is described by a flat key=value config (RunConfig).  A config
file may be given with ``--config``; individual flags override file
values.  The full effective config is echoed as '#'-prefixed comment
lines at the top of every CSV so that a run can be reproduced exactly;
identical configs produce byte-identical CSV files.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields

from mpmath import mp

from . import catalog as catmod
from . import geometry, identities
from .core import DomainError, PrecisionContext, PrecisionError
from .engine import PoleError
from .identities import IdentityId, IdentityReport, TruncationPlan
from .quadrature import Unconverged

EXIT_OK = 0
EXIT_TOL = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_UNCONVERGED = 4


class ConfigError(ValueError):
    """Bad key or value in a run configuration."""


@dataclass
class RunConfig:
    """Flat run description; numeric values kept as decimal strings so
    that they can be re-parsed at any working precision without loss."""

    digits: str = "40"
    catalog_path: str = ""
    identity: str = ""
    a_re: str = ""
    a_im: str = ""
    b_re: str = ""
    b_im: str = ""
    w: str = ""
    m: str = ""
    p: str = ""
    q: str = ""
    j: str = ""
    sign: str = ""
    count: str = ""
    eps: str = ""
    rho: str = ""
    beta: str = ""
    n_max: str = ""
    k_max: str = ""
    tau_max: str = ""
    tol: str = "1e-6"
    out: str = ""

    def lines(self) -> list:
        """Deterministic key=value listing of the non-empty fields."""
        return [f"{f.name}={getattr(self, f.name)}"
                for f in fields(self) if getattr(self, f.name) != ""]


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def read_config(path) -> dict:
    """Parse a key=value config file ('#' comments, blank lines ok)."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = val.strip()
    return out


def build_config(args) -> RunConfig:
    """Config file first, then explicit flags override."""
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, val in read_config(args.config).items():
            setattr(cfg, key, val)
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, str(val))
    return cfg


def _check_decimal(name: str, text: str) -> str:
    try:
        mp.mpf(text)
    except (ValueError, TypeError):
        raise ConfigError(f"{name}: not a decimal number: {text!r}")
    return text


def _ctx(cfg: RunConfig) -> PrecisionContext:
    try:
        digits = int(cfg.digits)
    except ValueError:
        raise ConfigError(f"digits: not an integer: {cfg.digits!r}")
    if digits < 10:
        raise ConfigError("digits must be >= 10")
    return PrecisionContext(digits)


def _load_catalog(path):
    """Text table or binary cache, sniffed by magic."""
    with open(path, "rb") as fh:
        head = fh.read(len(catmod.MAGIC))
    if head == catmod.MAGIC:
        return catmod.load(path)
    return catmod.ingest(path)


def _params_from_config(cfg: RunConfig, ctx: PrecisionContext) -> dict:
    params = {}
    with ctx.workdps():
        if cfg.a_re or cfg.a_im:
            params["a"] = mp.mpc(mp.mpf(_check_decimal("a_re", cfg.a_re or "0")),
                                 mp.mpf(_check_decimal("a_im", cfg.a_im or "0")))
        if cfg.b_re or cfg.b_im:
            params["b"] = mp.mpc(mp.mpf(_check_decimal("b_re", cfg.b_re or "0")),
                                 mp.mpf(_check_decimal("b_im", cfg.b_im or "0")))
        for name in ("w", "eps", "rho", "beta"):
            val = getattr(cfg, name)
            if val:
                params[name] = mp.mpf(_check_decimal(name, val))
    for name in ("m", "p", "q", "j", "sign", "count"):
        val = getattr(cfg, name)
        if val:
            try:
                params[name] = int(val)
            except ValueError:
                raise ConfigError(f"{name}: not an integer: {val!r}")
    return params


def _plan_from_config(cfg: RunConfig, identity: IdentityId) -> TruncationPlan:
    base = identities.DEFAULT_PLANS.get(identity, TruncationPlan())
    kw = {}
    for name in ("n_max", "k_max", "tau_max"):
        val = getattr(cfg, name)
        if val:
            try:
                kw[name] = int(val)
            except ValueError:
                raise ConfigError(f"{name}: not an integer: {val!r}")
    return TruncationPlan(
        n_max=kw.get("n_max", base.n_max),
        k_max=kw.get("k_max", base.k_max),
        tau_max=kw.get("tau_max", base.tau_max))


def _open_out(cfg: RunConfig):
    if cfg.out:
        return open(cfg.out, "w", encoding="utf-8", newline="\n")
    return sys.stdout


def _emit_csv(cfg: RunConfig, header: str, rows: list) -> None:
    fh = _open_out(cfg)
    try:
        for line in cfg.lines():
            fh.write(f"# {line}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


# ---------------------------------------------------------------- zeros

def cmd_zeros(args) -> int:
    cfg = build_config(args)
    ctx = _ctx(cfg)
    if args.zeros_cmd == "ingest":
        cat = catmod.ingest(args.table)
        if args.out:
            catmod.persist(cat, args.out)
            print(f"ingested {len(cat)} ordinates from {args.table}; "
                  f"cache written to {args.out}")
        else:
            print(f"ingested {len(cat)} ordinates from {args.table}")
        return EXIT_OK
    cat = _load_catalog(args.table)
    if args.zeros_cmd == "info":
        print(f"count={len(cat)} height={cat.height()!r} "
              f"validated_upto={cat.validated_upto} "
              f"digits_per_entry={cat.digits_per_entry} "
              f"source={cat.source}")
        return EXIT_OK
    # validate
    upto = min(args.upto, len(cat))
    cat = catmod.validate(cat, upto, ctx)
    print(f"validated first {upto} of {len(cat)} ordinates: all residuals "
          f"|zeta(1/2 + i rho)| below 10^{-(cat.digits_per_entry or 10) + 2}")
    return EXIT_OK


# --------------------------------------------------------------- verify

def cmd_verify(args) -> int:
    cfg = build_config(args)
    ctx = _ctx(cfg)
    identity = IdentityId(cfg.identity)
    params = _params_from_config(cfg, ctx)
    plan = _plan_from_config(cfg, identity)
    cat = _load_catalog(cfg.catalog_path) if cfg.catalog_path else None
    report = identities.verify(identity, params=params, plan=plan,
                               cat=cat, ctx=ctx)
    print(report.line())
    for name, est in sorted(report.plan.tail_estimates.items()):
        print(f"tail[{name}]={mp.nstr(mp.mpf(est), 8)}")
    with ctx.workdps():
        tol = mp.mpf(_check_decimal("tol", cfg.tol))
        ok = report.rel_residual < tol and not report.flags.get("unconverged")
    if cfg.out:
        _emit_csv(cfg, ",".join(identities.CSV_FIELDS), [report.csv_row()])
    return EXIT_OK if ok else EXIT_TOL


# ----------------------------------------------------------------- scan

def _grid(start: str, stop: str, step: str, ctx: PrecisionContext) -> list:
    with ctx.workdps():
        lo, hi = mp.mpf(start), mp.mpf(stop)
        dt = mp.mpf(step)
        if dt <= 0:
            raise ConfigError("scan step must be positive")
        out = []
        k = 0
        while True:
            val = lo + k * dt
            if val > hi + dt / 2:
                break
            out.append(val)
            k += 1
        return out


def cmd_scan(args) -> int:
    cfg = build_config(args)
    ctx = _ctx(cfg)
    identity = IdentityId(cfg.identity)
    plan = _plan_from_config(cfg, identity)
    base = _params_from_config(cfg, ctx)
    cat = _load_catalog(cfg.catalog_path) if cfg.catalog_path else None
    points = _grid(args.a_from, args.a_to, args.a_step, ctx)
    rows, failures = [], 0
    for a in points:
        with ctx.workdps():
            params = dict(base)
            params["a"] = a
            a_str = mp.nstr(a, 20, strip_zeros=False)
            enclosed = ""
            if cat is not None:
                try:
                    enc = geometry.zeros_enclosed(
                        geometry.MapParameter(a, base.get("w", 1)), cat,
                        ctx=ctx)
                    enclosed = str(enc.M)
                except (DomainError, ValueError):
                    enclosed = ""
        try:
            report = identities.verify(identity, params=params, plan=plan,
                                       cat=cat, ctx=ctx)
            rows.append(f"{a_str},{enclosed},{report.csv_row()}")
        except identities.ExceptionalA as exc:
            rows.append(f"{a_str},{enclosed},{identity.value},"
                        f"a={a_str},,,,,,,exceptional,,,")
            failures += 1
        except (DomainError, Unconverged, PrecisionError, PoleError,
                catmod.InsufficientCatalog) as exc:
            rows.append(f"{a_str},{enclosed},{identity.value},"
                        f"a={a_str},,,,,,,error:{type(exc).__name__},,,")
            failures += 1
    _emit_csv(cfg, "a,enclosed_M," + ",".join(identities.CSV_FIELDS), rows)
    if points and failures == len(points):
        return EXIT_UNCONVERGED
    return EXIT_OK


# ---------------------------------------------------------------- trace

def cmd_trace(args) -> int:
    cfg = build_config(args)
    ctx = _ctx(cfg)
    cat = _load_catalog(cfg.catalog_path)
    trace = identities.partial_sum_trace(
        int(cfg.m or 1), args.terms, cat, ctx=ctx, stride=args.stride)
    rows = [f"{idx},{fe_re!r},{fe_im!r}" for idx, fe_re, fe_im in trace]
    _emit_csv(cfg, "terms,frac_err_re,frac_err_im", rows)
    return EXIT_OK


# ------------------------------------------------------------- geometry

def cmd_geometry(args) -> int:
    cfg = build_config(args)
    ctx = _ctx(cfg)
    with ctx.workdps():
        a = mp.mpc(mp.mpf(_check_decimal("a_re", cfg.a_re or "0")),
                   mp.mpf(_check_decimal("a_im", cfg.a_im or "0")))
        if a == 0:
            raise ConfigError("geometry needs a nonzero a "
                              "(--a and/or --a-im)")
        w = mp.mpf(cfg.w) if cfg.w else mp.mpf(1)
        par = geometry.MapParameter(a, w)
        rows = []
        # image of the strip's upper boundary Im v = 0: the boundary
        # parabola z = 4 a v (v + i), v real
        span = mp.mpf(args.span)
        n = args.samples
        for k in range(-n, n + 1):
            v = span * k / n
            z = geometry.forward_map(par, v, ctx)
            rows.append(f"boundary,v={mp.nstr(v, 10)},"
                        f"{mp.nstr(mp.re(z), 20, strip_zeros=False)},"
                        f"{mp.nstr(mp.im(z), 20, strip_zeros=False)}")
        comment = []
        if cfg.catalog_path:
            cat = _load_catalog(cfg.catalog_path)
            enc = geometry.zeros_enclosed(par, cat, ctx=ctx)
            comment.append(f"M={enc.M}")
            if enc.nontrivial_infinite:
                comment.append("nontrivial_enclosure=infinite")
            for label, pre in enc.enclosed:
                zz = pre[0] if isinstance(pre, tuple) else pre
                rows.append(f"zero,{label},"
                            f"{mp.nstr(mp.re(zz), 20, strip_zeros=False)},"
                            f"{mp.nstr(mp.im(zz), 20, strip_zeros=False)}")
    header = "kind,label,re,im"
    fh = _open_out(cfg)
    try:
        for line in cfg.lines():
            fh.write(f"# {line}\n")
        for line in comment:
            fh.write(f"# {line}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


# ----------------------------------------------------------------- main

def _add_common(sp, with_identity=False):
    sp.add_argument("--config", help="key=value config file")
    sp.add_argument("--digits", help="working decimal digits")
    sp.add_argument("--catalog", dest="catalog_path",
                    help="zero catalog (text table or binary cache)")
    sp.add_argument("-o", "--out", help="output CSV path (default stdout)")
    if with_identity:
        sp.add_argument("--a", dest="a_re", help="Re a")
        sp.add_argument("--a-im", dest="a_im", help="Im a")
        sp.add_argument("--b", dest="b_re", help="Re b")
        sp.add_argument("--b-im", dest="b_im", help="Im b")
        for name in ("w", "m", "p", "q", "j", "sign", "count",
                     "eps", "rho", "beta"):
            sp.add_argument(f"--{name}", dest=name)
        sp.add_argument("--n-max", dest="n_max")
        sp.add_argument("--k-max", dest="k_max")
        sp.add_argument("--tau-max", dest="tau_max")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="zetasum",
        description="Zero-sum rule verification and contour quadrature.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    zp = sub.add_parser("zeros", help="catalog ingest/validate/info")
    zsub = zp.add_subparsers(dest="zeros_cmd", required=True)
    for name in ("ingest", "validate", "info"):
        zz = zsub.add_parser(name)
        zz.add_argument("table", help="ordinate table or cache file")
        if name == "validate":
            zz.add_argument("--upto", type=int, default=100)
        _add_common(zz)
    vp = sub.add_parser("verify", help="check one identity")
    vp.add_argument("identity", help="identity id, e.g. ZETA5")
    vp.add_argument("--tol", help="residual tolerance for exit code 0")
    _add_common(vp, with_identity=True)

    sp = sub.add_parser("scan", help="sweep a over a grid")
    sp.add_argument("identity")
    sp.add_argument("--a-from", required=True)
    sp.add_argument("--a-to", required=True)
    sp.add_argument("--a-step", required=True)
    _add_common(sp, with_identity=True)

    tp = sub.add_parser("trace", help="partial-sum fractional-error trace")
    tp.add_argument("--m", default="1")
    tp.add_argument("--terms", type=int, required=True)
    tp.add_argument("--stride", type=int, default=100)
    _add_common(tp)

    gp = sub.add_parser("geometry", help="boundary parabola and enclosure")
    gp.add_argument("--a", dest="a_re")
    gp.add_argument("--a-im", dest="a_im")
    gp.add_argument("--w", dest="w")
    gp.add_argument("--samples", type=int, default=100)
    gp.add_argument("--span", default="5", help="|v| range to sample")
    _add_common(gp)
    return ap


_DISPATCH = {"zeros": cmd_zeros, "verify": cmd_verify, "scan": cmd_scan,
             "trace": cmd_trace, "geometry": cmd_geometry}


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return _DISPATCH[args.cmd](args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConfigError, catmod.ParseError, catmod.OrderError,
            catmod.FormatError, catmod.ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (Unconverged, PrecisionError, PoleError,
            catmod.InsufficientCatalog) as exc:
        print(f"unconverged: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
