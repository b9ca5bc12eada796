import mpmath
import pytest
from mpmath import mp, mpf

from birthcut.poly import Poly
from birthcut.potentials import (build_critical_Q, build_potential,
                                 make_quartic_spec, quartic_etilde,
                                 validate_critical)
from birthcut.kvio import spec_from_kv, spec_to_kv
from conftest import quartic, spec_nu


def quad_etilde_oracle(phi_e):
    """Independent adaptive-quadrature ratio for the quartic e_tilde."""
    e = 2 * mp.cosh(mpf(phi_e))
    f = lambda x, k: x ** k * (x - e) * mp.sqrt(x * x - 4)
    return mpmath.quad(lambda x: f(x, 1), [2, e]) / mpmath.quad(lambda x: f(x, 0), [2, e])


def test_quartic_closed_form_against_quadrature():
    for phi in ("0.5", "1.0", "1.5"):
        closed = quartic_etilde(mpf(phi))
        ratio = quad_etilde_oracle(phi)
        assert abs(closed - ratio) / ratio < mpf("1e-25")
        e = 2 * mp.cosh(mpf(phi))
        assert 2 < closed < e


def test_quartic_potential_coefficients():
    # V' = x^3 - (e+et) x^2 + (e et - 2) x + 2 (e+et),  T_c = 1 + e et
    spec = quartic("1.0")
    e, et = spec.e, spec.e_tilde
    expect = Poly([2 * (e + et), e * et - 2, -(e + et), 1])
    dv = spec.Vp() - expect
    assert all(abs(c) < mpf("1e-30") for c in dv.c)
    assert abs(spec.Tc - (1 + e * et)) < mpf("1e-30")


def test_formal_specialization_e_zero():
    # e = e_tilde = 0 collapses the coefficients to V' = x^3 - 2x, T_c = 1
    V, Tc = build_potential(1, 0, Poly([0, 1]))
    assert all(abs(c) < mpf("1e-30") for c in (V.deriv() - Poly([0, -2, 0, 1])).c)
    assert abs(Tc - 1) < mpf("1e-30")


def test_build_critical_q_matches_closed_form():
    spec = quartic("1.0")
    Q, et = build_critical_Q(1, spec.e, Poly([1]))
    assert abs(et - spec.e_tilde) / spec.e_tilde < mpf("1e-10")
    assert 2 < et < mpf("3.0862")  # e = 2 cosh 1 = 3.08616...


@pytest.mark.parametrize("phi", ["0.2", "0.7", "1.3", "2.0"])
def test_closed_form_family_agreement(phi):
    e = 2 * mp.cosh(mpf(phi))
    _, et = build_critical_Q(1, e, Poly([1]))
    assert abs(et - quartic_etilde(mpf(phi))) / et < mpf("1e-10")


def test_etilde_inside_interval_for_generic_qtilde():
    # positive-definite even Qtilde with no real zeros
    e = mpf("2.9")
    for Qt in (Poly([1]), Poly([2, 0, 1]), Poly([1, 1, 1]), Poly([5, -2, 0, 0, 3])):
        Q, et = build_critical_Q(2, e, Qt)
        assert 2 < et < e
        assert Q.degree == Qt.degree + 1


def test_build_critical_q_rejects_bad_qtilde():
    with pytest.raises(ValueError):
        build_critical_Q(1, mpf("2.5"), Poly([0, 1]))           # odd degree
    with pytest.raises(ValueError):
        build_critical_Q(1, mpf("2.5"), Poly([-1, 0, 1]))        # real zeros
    with pytest.raises(ValueError):
        build_critical_Q(1, mpf("1.5"), Poly([1]))               # e <= 2


def test_nu2_potential_degree_and_residue():
    # d = 2 nu + 1 = 5: deg V = 6, deg V' = 5 (the V' degree equals d);
    # residue cross-checked on a large circle with the principal branch
    spec = spec_nu(2, "2.6")
    assert spec.d == 5
    assert spec.V.degree == 6
    assert spec.Vp().degree == 5
    assert spec.Tc > 0
    P = spec.M_critical()
    R = mpf(50)

    def f(th):
        z = R * mpmath.exp(1j * th)
        return P(z) * z * mpmath.sqrt(1 - 4 / (z * z)) * 1j * z / (2j * mp.pi)

    c_m1 = mpmath.quad(f, [0, 2 * mp.pi]).real
    assert abs(-c_m1 / 2 - spec.Tc) / spec.Tc < mpf("1e-20")


def test_validate_critical_passes_on_valid_specs():
    for s in (quartic("1.0"), spec_nu(2, "2.6")):
        report = validate_critical(s)
        assert report.ok, "\n" + str(report)


def test_validate_flags_sign_violation():
    spec = quartic("1.0")
    # push e_tilde beyond e: Q(e) < 0 and the vanishing integral breaks
    bad = type(spec)(nu=1, e=spec.e, phi_e=spec.phi_e,
                     Q=Poly([-(spec.e + mpf("0.3")), 1]),
                     e_tilde=spec.e + mpf("0.3"), V=spec.V, Tc=spec.Tc, d=3)
    report = validate_critical(bad)
    failed = {c.name for c in report.failed()}
    assert any("Q(e) > 0" in name for name in failed)


def test_validate_flags_forced_vanishing_violation():
    spec = quartic("1.0")
    bad = type(spec)(nu=1, e=spec.e, phi_e=spec.phi_e,
                     Q=Poly([-(spec.e_tilde + mpf("0.1")), 1]),
                     e_tilde=spec.e_tilde + mpf("0.1"), V=spec.V, Tc=spec.Tc, d=3)
    report = validate_critical(bad)
    failed = {c.name for c in report.failed()}
    assert any("sqrt(x^2-4) dx = 0" in name for name in failed)


def test_spec_kv_roundtrip():
    spec = quartic("0.8")
    text = spec_to_kv(spec)
    back = spec_from_kv(text)
    assert back.nu == spec.nu
    assert abs(back.e - spec.e) < mpf("1e-28")
    assert abs(back.Tc - spec.Tc) < mpf("1e-28")
    assert all(abs(a - b) < mpf("1e-28") for a, b in zip(back.V.c, spec.V.c))
