"""Extended-precision sum rules over the nontrivial zeros of the Riemann
zeta function, built on a strip-to-parabola contour map.

Subpackages
-----------
core        precision contexts, compensated summation, shared errors
engine      zeta/Gamma evaluation routes with certified error estimates
catalog     zero-ordinate tables: parsing, validation, binary cache
geometry    the map z = 4 a v (v + i), preimages, enclosure counting
quadrature  contour quadrature of the kernel families over the strip
identities  the sum-rule suite: verify(), scans, traces, tail models
cli         command-line front end (`zetasum`)
"""
from .core import (DomainError, PrecisionContext, PrecisionError,
                   DEFAULT_CTX, cnum, compensated_sum)
from .engine import ZetaValue, PoleError, zeta, zeta_deriv, zeta_prime_neg_even
from .catalog import (ZeroCatalog, InsufficientCatalog, ingest, validate,
                      count_below, tau, persist, load)
from .geometry import (MapParameter, EnclosureResult, forward_map,
                       membership_expr, preimages, zeros_enclosed,
                       shifted_enclosure)
from .quadrature import KernelSpec, QuadResult, Unconverged, integrate
from .identities import (IdentityId, IdentityReport, TruncationPlan,
                         ExceptionalA, NoRoot, verify, exceptional_indices,
                         cancellation_check, eval_tau_sum, asymptotic_coeffs,
                         partial_sum_trace, half_zero_root)

__version__ = "1.0.0"

__all__ = [
    "DomainError", "PrecisionContext", "PrecisionError", "DEFAULT_CTX",
    "cnum", "compensated_sum",
    "ZetaValue", "PoleError", "zeta", "zeta_deriv", "zeta_prime_neg_even",
    "ZeroCatalog", "InsufficientCatalog", "ingest", "validate",
    "count_below", "tau", "persist", "load",
    "MapParameter", "EnclosureResult", "forward_map", "membership_expr",
    "preimages", "zeros_enclosed", "shifted_enclosure",
    "KernelSpec", "QuadResult", "Unconverged", "integrate",
    "IdentityId", "IdentityReport", "TruncationPlan", "ExceptionalA",
    "NoRoot", "verify", "exceptional_indices", "cancellation_check",
    "eval_tau_sum", "asymptotic_coeffs", "partial_sum_trace",
    "half_zero_root",
    "__version__",
]
