import mpmath
import pytest
from mpmath import mp

from zetasum.core import (DomainError, PrecisionContext, cnum,
                          compensated_sum, complex_pow, principal_sqrt,
                          log_safe_inv_sinh, Constants)


def test_workdps_restores_precision():
    ctx = PrecisionContext(35)
    before = mp.dps
    with ctx.workdps():
        assert mp.dps >= 35
    assert mp.dps == before


def test_work_digits_exceed_requested():
    ctx = PrecisionContext(40)
    assert ctx.work_digits > 40
    assert ctx.eps < mp.mpf(10) ** -39


def test_cnum_accepts_strings_floats_complex(ctx40):
    with ctx40.workdps():
        assert cnum("0.5") == mp.mpf(1) / 2
        assert cnum(3) == 3
        v = cnum(complex(1.0, -2.0))
        assert v.real == 1 and v.imag == -2
        # a 40-digit decimal string survives to full precision
        x = cnum("0.1234567890123456789012345678901234567890", ctx40)
        assert abs(x - mp.mpf("0.123456789012345678901234567890123456789")
                   ) < mp.mpf(10) ** -38


def test_compensated_sum_empty_and_zero(ctx40):
    total, cond = compensated_sum([], ctx40)
    assert total == 0 and cond == 1
    total, cond = compensated_sum([mp.mpf(1), mp.mpf(-1)], ctx40)
    assert total == 0
    assert cond == mp.inf


def test_compensated_sum_condition_tracks_cancellation(ctx40):
    with ctx40.workdps():
        big = mp.mpf(10) ** 20
        total, cond = compensated_sum([big, 1, -big], ctx40)
        assert total == 1
        assert cond > mp.mpf(10) ** 19


def test_compensated_sum_beats_float_accumulation(ctx40):
    # ill-conditioned alternating series summed in stated order
    terms = [((-1) ** k) * mp.mpf(10) ** (10 - k % 20) for k in range(200)]
    with ctx40.workdps():
        exact = mp.fsum(terms)
    total, _ = compensated_sum(terms, ctx40)
    with ctx40.workdps():
        assert abs(total - exact) <= abs(exact) * mp.mpf(10) ** -35


def test_principal_sqrt_branch(ctx40):
    with ctx40.workdps():
        v = principal_sqrt(mp.mpc(-4, 0), ctx40)
        assert mp.im(v) > 0  # principal branch: sqrt(-4) = 2i
        assert abs(v - mp.mpc(0, 2)) < mp.mpf(10) ** -35
        w = principal_sqrt(mp.mpf(9), ctx40)
        assert abs(w - 3) < mp.mpf(10) ** -35


def test_complex_pow_real_positive_base(ctx40):
    with ctx40.workdps():
        v = complex_pow(mp.mpf("0.5"), mp.mpf(1) / 4, ctx40)
        assert abs(v - mp.power(mp.mpf("0.5"), mp.mpf(1) / 4)) \
            < mp.mpf(10) ** -38


def test_log_safe_inv_sinh_matches_direct_small(ctx40):
    with ctx40.workdps():
        for x in (mp.mpf(2), mp.mpc(3, 1), mp.mpc("0.5", "0.25")):
            assert abs(log_safe_inv_sinh(x, ctx40) - 1 / mp.sinh(x)) \
                < mp.mpf(10) ** -35


def test_log_safe_inv_sinh_no_overflow_huge_argument(ctx40):
    with ctx40.workdps():
        v = log_safe_inv_sinh(mp.mpc(50000, 3), ctx40)
        assert mp.isfinite(v)
        assert abs(v) < mp.mpf(10) ** -20000


def test_constants_match_mpmath(ctx50):
    c = Constants(ctx50)
    c.self_check()
    with ctx50.workdps():
        assert abs(c.euler_gamma - mp.euler) < mp.mpf(10) ** -48
        assert abs(c.ln_2pi - mp.log(2 * mp.pi)) < mp.mpf(10) ** -48


def test_domain_error_is_value_error():
    assert issubclass(DomainError, ValueError)
