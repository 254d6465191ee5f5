import pytest
from mpmath import mp, fp

from zetasum import engine
from zetasum.core import PrecisionContext, PrecisionError, DomainError
from zetasum.engine import (PoleError, zeta, zeta_deriv, zeta_prime_neg_even,
                            gamma_value, log_gamma, arg_gamma, digamma,
                            trigamma, phase_phi, u_of_rho, appendix_bundle,
                            zeta_prime_on_line_fast)

SAMPLE_POINTS = ["2", "0.5", "-0.5", "-3.5", "0.5+14.134725j",
                 "3+25j", "-6.3+2j", "0.25-7j", "-15+11j"]


def test_zeta_matches_library_at_sample_points(ctx40):
    with ctx40.workdps():
        for s_text in SAMPLE_POINTS:
            s = mp.mpc(complex(s_text)) if "j" in s_text else mp.mpf(s_text)
            ours = zeta(s, ctx40)
            ref = mp.zeta(s)
            assert abs(ours.value - ref) <= abs(ref) * mp.mpf(10) ** -38, s
            assert ours.est_error < abs(ref) * mp.mpf(10) ** -35


def test_zeta_pole_raises():
    with pytest.raises(PoleError):
        zeta(1)


def test_zeta_trivial_zeros_exact(ctx40):
    for n in (1, 2, 5, 17):
        v = zeta(-2 * n, ctx40)
        assert v.value == 0
        assert v.est_error == 0


def test_zeta_deriv_cross_checked_against_finite_difference(ctx40):
    # zeta_deriv internally runs a central-difference oracle when check=True
    with ctx40.workdps():
        for s in (mp.mpf(3), mp.mpf("-0.75"), mp.mpc("0.5", "14.1")):
            for order in (1, 2):
                ours = zeta_deriv(s, order, ctx40, check=True)
                ref = mp.zeta(s, derivative=order)
                assert abs(ours.value - ref) <= abs(ref) * mp.mpf(10) ** -35


def test_zeta_deriv_rejects_bad_order(ctx40):
    with pytest.raises(DomainError):
        zeta_deriv(2, 3, ctx40)


def test_zeta_delegates_above_height(ctx40):
    with ctx40.workdps():
        s = mp.mpc("0.5", engine.DELEGATE_HEIGHT + 50)
        ours = zeta(s, ctx40)
        assert abs(ours.value - mp.zeta(s)) <= abs(mp.zeta(s)) * mp.mpf(10) ** -30


def test_zeta_prime_neg_even_closed_form_vs_derivative(ctx50):
    # closed form zeta'(-2n) = (-1)^n zeta(2n+1) (2n)! / (2 (2 pi)^(2n))
    # against the engine's differentiated reflection route
    with ctx50.workdps():
        for n in range(1, 11):
            closed = zeta_prime_neg_even(n, ctx50)
            direct = zeta_deriv(-2 * n, 1, ctx50).value
            assert abs(closed - direct) <= abs(direct) * mp.mpf(10) ** -45


def test_gamma_routes_match_library(ctx40):
    with ctx40.workdps():
        pts = [mp.mpf("0.25"), mp.mpc(3, 4), mp.mpc("0.5", "14.13"),
               mp.mpc(-2.5, 1)]
        for s in pts:
            assert abs(gamma_value(s, ctx40) - mp.gamma(s)) \
                <= abs(mp.gamma(s)) * mp.mpf(10) ** -36
            assert abs(log_gamma(s, ctx40) - mp.loggamma(s)) \
                <= abs(mp.loggamma(s)) * mp.mpf(10) ** -36
            assert abs(digamma(s, ctx40) - mp.digamma(s)) \
                <= abs(mp.digamma(s)) * mp.mpf(10) ** -35
            assert abs(trigamma(s, ctx40) - mp.polygamma(1, s)) \
                <= abs(mp.polygamma(1, s)) * mp.mpf(10) ** -35


def test_arg_gamma_continuous_on_vertical_line(ctx40):
    # Im lnGamma(1/2 + i t) must be continuous (no 2 pi jumps) in t
    with ctx40.workdps():
        prev = None
        for k in range(60):
            t = mp.mpf(k) / 2
            cur = arg_gamma(mp.mpc(mp.mpf(1) / 2, t), ctx40)
            if prev is not None:
                assert abs(cur - prev) < 3  # far below a 2 pi jump
            prev = cur


def test_phase_phi_gives_real_hardy_function(ctx40):
    with ctx40.workdps():
        for rho in (mp.mpf(5), mp.mpf("17.25"), mp.mpf(120)):
            ph = phase_phi(rho, ctx40)
            # the rotated zeta value is the (real) Hardy function
            assert abs(mp.im(ph.Z)) <= abs(ph.Z) * mp.mpf(10) ** -30
            # phase agrees with the library Riemann-Siegel theta mod 2 pi
            assert abs(mp.exp(mp.mpc(0, 1) * (ph.phi - mp.siegeltheta(rho)))
                       - 1) < mp.mpf(10) ** -30


def test_zeta_prime_on_line_fast_matches_extended_precision(ctx40, cat100):
    with ctx40.workdps():
        for m in (1, 2, 10, 50):
            rho = cat100.rho(m, ctx40)
            fast = zeta_prime_on_line_fast(float(rho))
            ref = mp.zeta(mp.mpc(mp.mpf(1) / 2, rho), derivative=1)
            assert abs(mp.mpc(fast) - ref) <= abs(ref) * mp.mpf(10) ** -9


def test_u_of_rho_is_minus_cot_theta_slope(ctx40, cat100):
    # at a zero, U = -Im zeta' / Re zeta' on the critical line
    with ctx40.workdps():
        for m in (1, 3, 7):
            rho = cat100.rho(m, ctx40)
            zp = mp.zeta(mp.mpc(mp.mpf(1) / 2, rho), derivative=1)
            expect = -mp.im(zp) / mp.re(zp)
            assert abs(u_of_rho(rho, ctx40) - expect) < mp.mpf(10) ** -25


def test_appendix_bundle_relates_zeta_parts(ctx40):
    # the symbol bundle satisfies zeta_R * D_R = +/- N * zeta_I and
    # N^2 = D_R * D_I on the critical line
    with ctx40.workdps():
        for rho in (mp.mpf(10), mp.mpf("33.3")):
            b = appendix_bundle(rho, ctx40)
            assert abs(b.N * b.N - b.D_R * b.D_I) < mp.mpf(10) ** -30
            z = mp.zeta(mp.mpc(mp.mpf(1) / 2, rho))
            lhs = mp.re(z) * b.D_R
            rhs = b.N * mp.im(z)
            assert abs(abs(lhs) - abs(rhs)) <= abs(z) * mp.mpf(10) ** -28
