"""Ingest, validate, persist, and query tables of nontrivial-zero ordinates.

Ordinates are stored internally as decimal strings, so a catalog written at
one working precision can be reloaded and used at a higher one without
silent rounding.

Text input format
-----------------
UTF-8, one ordinate per line, ascending; an optional leading integer index
column (whitespace-separated) is allowed; ``#`` starts a comment; blank
lines are ignored.

Binary cache format (version 1)
-------------------------------
=======  ======  ==============================================
offset   size    contents
=======  ======  ==============================================
0        8       magic ``b"ZETZEROS"``
8        2       format version, big-endian uint16 (= 1)
10       8       entry count, big-endian uint64
18       ...     entries
=======  ======  ==============================================

Each entry is a big-endian uint16 byte length followed by that many bytes of
ASCII decimal ordinate string.  After the entries, a UTF-8 provenance string
prefixed by its own big-endian uint32 length terminates the file.
"""

from __future__ import annotations

import bisect
import struct
from dataclasses import dataclass, field, replace

from mpmath import mp

from .core import PrecisionContext
from . import engine

DEFAULT_CTX = PrecisionContext()

MAGIC = b"ZETZEROS"
VERSION = 1


class ParseError(ValueError):
    """Malformed catalog text line (carries the 1-based line number)."""


class OrderError(ValueError):
    """Ordinates not strictly ascending."""


class FormatError(ValueError):
    """Bad magic/version/structure in a binary catalog file."""


class ValidationError(ValueError):
    """One or more ordinates failed the |zeta| residual check."""


class InsufficientCatalog(LookupError):
    """The catalog does not extend to the height a computation requires."""


@dataclass(frozen=True)
class Tau:
    """A nontrivial zero tau = sigma + i rho with its catalog index.

    The four associates tau, conj(tau), 1-tau, 1-conj(tau) are derived on
    demand, never stored.  Under the on-line assumption sigma = 1/2 and
    1 - tau = conj(tau).
    """

    sigma: object
    rho: object
    index: int
    conjugate: bool = False

    def value(self, ctx: PrecisionContext = DEFAULT_CTX):
        with ctx.workdps():
            rho = mp.mpf(self.rho)
            return mp.mpc(mp.mpf(self.sigma), -rho if self.conjugate else rho)

    def associates(self, ctx: PrecisionContext = DEFAULT_CTX) -> tuple:
        """(tau, conj tau, 1-tau, 1-conj tau) at context precision."""
        with ctx.workdps():
            t = self.value(ctx)
            tb = mp.conj(t)
            return (t, tb, 1 - t, 1 - tb)


@dataclass(frozen=True)
class ZeroCatalog:
    ordinates: tuple  # decimal strings, ascending
    source: str = ""
    validated_upto: int = 0
    digits_per_entry: int = 0
    on_line: bool = True  # sigma = 1/2 assumption flag
    _floats: tuple = field(default=(), repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.ordinates)

    @property
    def floats(self) -> tuple:
        """Double-precision view of the ordinates (cached lazily)."""
        if len(self._floats) != len(self.ordinates):
            object.__setattr__(
                self, "_floats", tuple(float(x) for x in self.ordinates))
        return self._floats

    def rho(self, m: int, ctx: PrecisionContext = DEFAULT_CTX):
        """Ordinate rho_m (1-based) at context precision."""
        if not 1 <= m <= len(self.ordinates):
            raise IndexError(f"catalog has {len(self.ordinates)} zeros")
        with ctx.workdps():
            return mp.mpf(self.ordinates[m - 1])

    def height(self) -> float:
        return self.floats[-1] if self.ordinates else 0.0


def _build(entries: list, source: str) -> ZeroCatalog:
    prev = None
    floats = []
    for lineno, text in entries:
        try:
            val = float(text)
        except ValueError:
            raise ParseError(f"line {lineno}: not a decimal ordinate: {text!r}")
        if val <= 0:
            raise ParseError(f"line {lineno}: ordinate must be positive")
        if prev is not None and val <= prev:
            raise OrderError(
                f"line {lineno}: ordinate {text} not strictly ascending")
        prev = val
        floats.append(val)
    digits = min((len(t.replace(".", "").lstrip("0")) for _, t in entries),
                 default=0)
    return ZeroCatalog(
        ordinates=tuple(t for _, t in entries),
        source=source,
        digits_per_entry=digits,
        _floats=tuple(floats),
    )


def ingest(path, ctx: PrecisionContext = DEFAULT_CTX) -> ZeroCatalog:
    """Parse a text table of ordinates (format in the module docstring)."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            cols = line.split()
            if len(cols) == 2:
                if not cols[0].isdigit():
                    raise ParseError(
                        f"line {lineno}: leading index column must be an "
                        f"integer, got {cols[0]!r}")
                cols = cols[1:]
            if len(cols) != 1:
                raise ParseError(f"line {lineno}: expected one ordinate")
            entries.append((lineno, cols[0]))
    return _build(entries, source=str(path))


def validate(cat: ZeroCatalog, upto: int,
             ctx: PrecisionContext = DEFAULT_CTX) -> ZeroCatalog:
    """Check |zeta(1/2 + i rho_n)| for n <= upto; returns an updated catalog.

    The residual threshold is 10^(-digits_per_entry + 2): an ordinate
    correct to its listed digits keeps |zeta| below roughly |zeta'| times
    the quantization error.
    """
    if upto > len(cat):
        raise IndexError(f"upto={upto} exceeds catalog size {len(cat)}")
    if upto == 0:
        return cat
    failures = []
    with ctx.workdps():
        thresh = mp.mpf(10) ** (-(cat.digits_per_entry or 10) + 2)
        for n in range(1, upto + 1):
            s = mp.mpc(mp.mpf(1) / 2, mp.mpf(cat.ordinates[n - 1]))
            resid = abs(engine.zeta(s, ctx).value)
            if not resid < thresh:
                failures.append((n, resid))
    if failures:
        raise ValidationError(
            "ordinates failed residual check: "
            + ", ".join(f"n={n} |zeta|={mp.nstr(r, 5)}" for n, r in failures))
    return replace(cat, validated_upto=max(cat.validated_upto, upto))


def count_below(cat: ZeroCatalog, rho_max) -> int:
    """#{n : rho_n < rho_max} by binary search."""
    if not cat.ordinates:
        raise IndexError("empty catalog")
    return bisect.bisect_left(cat.floats, float(rho_max))


def tau(cat: ZeroCatalog, m: int) -> Tau:
    """The m-th zero (1-based) as a Tau."""
    if not cat.ordinates:
        raise IndexError("empty catalog")
    if not 1 <= m <= len(cat.ordinates):
        raise IndexError(f"index {m} outside catalog of {len(cat.ordinates)}")
    return Tau(sigma="0.5", rho=cat.ordinates[m - 1], index=m)


def persist(cat: ZeroCatalog, path) -> None:
    """Write the binary cache format described in the module docstring."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack(">H", VERSION))
        fh.write(struct.pack(">Q", len(cat.ordinates)))
        for text in cat.ordinates:
            raw = text.encode("ascii")
            fh.write(struct.pack(">H", len(raw)))
            fh.write(raw)
        src = cat.source.encode("utf-8")
        fh.write(struct.pack(">I", len(src)))
        fh.write(src)


def load(path) -> ZeroCatalog:
    """Read a binary cache; FormatError on any structural problem."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != MAGIC:
        raise FormatError(f"bad magic {blob[:8]!r}, expected {MAGIC!r}")
    (version,) = struct.unpack(">H", blob[8:10])
    if version != VERSION:
        raise FormatError(f"unsupported version {version}, expected {VERSION}")
    try:
        (count,) = struct.unpack(">Q", blob[10:18])
        pos = 18
        entries = []
        for i in range(count):
            (ln,) = struct.unpack(">H", blob[pos:pos + 2])
            pos += 2
            text = blob[pos:pos + ln].decode("ascii")
            if len(text) != ln:
                raise FormatError("truncated entry")
            pos += ln
            entries.append((i + 1, text))
        (srclen,) = struct.unpack(">I", blob[pos:pos + 4])
        pos += 4
        source = blob[pos:pos + srclen].decode("utf-8")
    except (struct.error, UnicodeDecodeError) as exc:
        raise FormatError(f"truncated or corrupt catalog file: {exc}")
    cat = _build(entries, source=source)
    return cat
