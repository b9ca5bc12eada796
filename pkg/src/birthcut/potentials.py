"""Construction and validation of critical potentials.

A critical model of order nu places the outer well of the effective potential
exactly at the Fermi level, at x = e = 2 cosh(phi_e) > 2, with the density
vanishing like (x-e)^{2 nu - 1} at criticality. The data is encoded by a
polynomial Q with

    M(x) = (x - e)^{2 nu - 1} Q(x),
    V'(x) = polynomial part at infinity of M(x) sqrt(x^2 - 4),
    T_c   = (1/2) Res_infinity M(x) sqrt(x^2 - 4) dx,

subject to the sign and vanishing conditions checked by `validate_critical`.
`build_critical_Q` produces a valid Q = (x - e_tilde) Qtilde from any strictly
positive even Qtilde by fixing e_tilde as a ratio of two cut integrals.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from .poly import Poly, count_real_roots
from .quadrature import integrate_doubling


@dataclass(frozen=True)
class CriticalSpec:
    nu: int
    e: mpf
    phi_e: mpf
    Q: Poly
    e_tilde: mpf
    V: Poly
    Tc: mpf
    d: int          # deg V = d + 1

    def Vp(self) -> Poly:
        return self.V.deriv()

    def M_critical(self) -> Poly:
        """(x - e)^{2 nu - 1} Q(x), the critical measure polynomial."""
        return Poly([-self.e, 1]) ** (2 * self.nu - 1) * self.Q


@dataclass
class ValidationCheck:
    name: str
    passed: bool
    measured: str


@dataclass
class ValidationReport:
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self):
        return [c for c in self.checks if not c.passed]

    def __str__(self):
        lines = []
        for c in self.checks:
            lines.append("%-34s %s  (%s)" % (c.name, "PASS" if c.passed else "FAIL", c.measured))
        return "\n".join(lines)


def _cut_weight_integral(g, e, nu):
    """integral_2^e g(x) (x-e)^{2 nu - 1} sqrt(x^2-4) dx, x = 2 cosh(t).

    The substitution removes the sqrt endpoint singularity at x = 2; the
    (x-e)^{2 nu - 1} factor vanishes smoothly at the upper end.
    """
    phi_e = mp.acosh(mpf(e) / 2)

    def f(t):
        x = 2 * mp.cosh(t)
        # dx = 2 sinh t dt and sqrt(x^2-4) = 2 sinh t
        return g(x) * (x - e) ** (2 * nu - 1) * 4 * mp.sinh(t) ** 2

    return integrate_doubling(f, 0, phi_e)


def build_critical_Q(nu: int, e, Q_tilde: Poly):
    """Return (Q, e_tilde) with Q = (x - e_tilde) * Q_tilde.

    e_tilde is the weighted average of x over (2, e) against the (negative-
    definite) weight Qtilde(x) (x-e)^{2 nu -1} sqrt(x^2-4), hence lies in (2, e)
    and makes the total weight integral vanish.
    """
    e = mpf(e)
    if e <= 2:
        raise ValueError("need e > 2")
    if nu < 1:
        raise ValueError("need nu >= 1")
    if not isinstance(Q_tilde, Poly):
        Q_tilde = Poly([Q_tilde])
    if Q_tilde.degree % 2 != 0:
        raise ValueError("Q_tilde must have even degree")
    if Q_tilde[Q_tilde.degree] <= 0:
        raise ValueError("Q_tilde must have positive leading coefficient")
    if count_real_roots(Q_tilde, -mpf(10) ** 9, mpf(10) ** 9) != 0:
        raise ValueError("Q_tilde must have no real zero")

    den = _cut_weight_integral(Q_tilde, e, nu)
    num = _cut_weight_integral(lambda x: x * Q_tilde(x), e, nu)
    if den == 0:
        raise ValueError("degenerate weight: quadrature returned zero")
    e_tilde = num / den
    if not (2 < e_tilde < e):
        raise ValueError("computed e_tilde = %s not in (2, e)" % e_tilde)
    return Poly([-e_tilde, 1]) * Q_tilde, e_tilde


def build_potential(nu: int, e, Q: Poly):
    """V and T_c from Q via the expansion of M(x) sqrt(x^2-4) at infinity.

    sqrt(x^2-4) = x sum_k binom(1/2,k) (-4)^k x^{-2k}; the polynomial part of
    the product is V' and T_c = -(1/2) [x^{-1}-coefficient] (the residue at
    infinity of f dx is minus the 1/x coefficient of f).
    """
    e = mpf(e)
    P = Poly([-e, 1]) ** (2 * nu - 1) * Q
    # binomial coefficients binom(1/2, k) (-4)^k
    nterms = P.degree // 2 + 3
    b = [mpf(1)]
    for k in range(nterms):
        b.append(b[-1] * (mpf(1) / 2 - k) / (k + 1))
    Vp = [mpf(0)] * (P.degree + 2)
    c_m1 = mpf(0)
    for k in range(nterms + 1):
        coef = b[k] * (-4) ** k
        # P(x) * x^{1-2k}: power m picks P_{m - 1 + 2k}
        for m in range(P.degree + 2 - 2 * k):
            Vp[m] += coef * P[m - 1 + 2 * k]
        idx = 2 * k - 2
        if 0 <= idx <= P.degree:
            c_m1 += coef * P[idx]
    Tc = -c_m1 / 2
    if Tc <= 0:
        raise ValueError("residue gives non-positive T_c = %s" % Tc)
    V = Poly(Vp).antideriv(0)
    return V, Tc


def quartic_etilde(phi_e):
    """Closed form for e_tilde in the nu = 1, Qtilde = 1 quartic family.

    Solves integral_2^e (x-e)(x-e_tilde) sqrt(x^2-4) dx = 0 at e = 2 cosh(phi_e):

        e_tilde = [ (1/3) sinh cosh (5 - 2 cosh^2) - phi_e ]
                  / ( 2 [ phi_e cosh - (1/3) sinh (2 + cosh^2) ] ).
    """
    phi_e = mpf(phi_e)
    if phi_e <= 0:
        raise ValueError("need phi_e > 0")
    ch, sh = mp.cosh(phi_e), mp.sinh(phi_e)
    num = sh * ch * (5 - 2 * ch * ch) / 3 - phi_e
    den = 2 * (phi_e * ch - sh * (2 + ch * ch) / 3)
    if abs(den) < mpf(10) ** (-mp.dps + 4) * (1 + abs(num)):
        raise ValueError("denominator vanishes at phi_e = %s" % phi_e)
    return num / den


def make_quartic_spec(phi_e) -> CriticalSpec:
    """The nu = 1 quartic critical model at e = 2 cosh(phi_e)."""
    phi_e = mpf(phi_e)
    e = 2 * mp.cosh(phi_e)
    et = quartic_etilde(phi_e)
    Q = Poly([-et, 1])
    V, Tc = build_potential(1, e, Q)
    return CriticalSpec(nu=1, e=e, phi_e=phi_e, Q=Q, e_tilde=et, V=V, Tc=Tc, d=3)


def make_spec(nu: int, e, Q_tilde=None) -> CriticalSpec:
    """Critical model for arbitrary nu from build_critical_Q (Qtilde = 1 default)."""
    if Q_tilde is None:
        Q_tilde = Poly([1])
    e = mpf(e)
    Q, et = build_critical_Q(nu, e, Q_tilde)
    V, Tc = build_potential(nu, e, Q)
    d = Q.degree + 2 * nu
    return CriticalSpec(nu=nu, e=e, phi_e=mp.acosh(e / 2), Q=Q, e_tilde=et,
                        V=V, Tc=Tc, d=d)


def validate_critical(spec: CriticalSpec) -> ValidationReport:
    """Check every defining condition of a critical model; nothing raises."""
    checks = []
    nu, e, Q = spec.nu, spec.e, spec.Q

    def add(name, passed, measured):
        checks.append(ValidationCheck(name, bool(passed), measured))

    d = spec.d
    add("deg Q = d - 2 nu, d odd, d > 2 nu",
        Q.degree == d - 2 * nu and d % 2 == 1 and d > 2 * nu,
        "deg Q = %d, d = %d" % (Q.degree, d))
    add("leading coefficient of Q > 0", Q[Q.degree] > 0, mp.nstr(Q[Q.degree], 8))

    n_mid = count_real_roots(Q, mpf(2), e)
    add("odd number of zeros of Q in (2, e)", n_mid % 2 == 1, "count = %d" % n_mid)

    n_core = count_real_roots(Q, mpf(-2), mpf(2))
    mid_ok = Q(mpf(0)) < 0 and Q(mpf(-2)) < 0 and Q(mpf(2)) < 0
    add("Q < 0 on [-2, 2]", n_core == 0 and mid_ok,
        "roots in (-2,2] = %d, Q(0) = %s" % (n_core, mp.nstr(Q(mpf(0)), 8)))

    add("Q(e) > 0", Q(e) > 0, mp.nstr(Q(e), 8))

    scale = abs(_cut_weight_integral(lambda x: abs(Q(x)), e, nu))
    vanish = _cut_weight_integral(Q, e, nu)
    tol = mpf(10) ** (-mp.dps + 10)
    add("integral_2^e Q (x-e)^{2nu-1} sqrt(x^2-4) dx = 0",
        abs(vanish) <= tol * max(scale, mpf(1)),
        "value = %s (scale %s)" % (mp.nstr(vanish, 6), mp.nstr(scale, 4)))

    M = spec.M_critical()

    def Fplus(x):
        # integral_2^x M sqrt(s^2-4) ds via s = 2 cosh t
        t1 = mp.acosh(mpf(x) / 2)
        f = lambda t: M(2 * mp.cosh(t)) * 4 * mp.sinh(t) ** 2
        return integrate_doubling(f, 0, t1)

    def Fminus(x):
        # integral_x^{-2} M sqrt(s^2-4) ds via s = -2 cosh t
        t1 = mp.acosh(-mpf(x) / 2)
        f = lambda t: M(-2 * mp.cosh(t)) * 4 * mp.sinh(t) ** 2
        return integrate_doubling(f, 0, t1)

    floor = tol * max(scale, mpf(1))
    left_pts = [-2 - mpf(10) ** k for k in range(-3, 3)]
    left_ok = all(Fminus(x) > -floor and Fminus(x) != 0 for x in left_pts)
    left_min = min(Fminus(x) for x in left_pts)
    add("effective potential rises for x < -2", left_ok and left_min > floor,
        "min sampled integral = %s" % mp.nstr(left_min, 6))

    right_pts = []
    for k in range(-3, 3):
        step = mpf(10) ** k
        if 2 + step < e:
            right_pts.append(2 + step)
        right_pts.append(e + step)
    right_pts += [e - (e - 2) * mpf(10) ** (-k) for k in range(1, 4)]
    right_vals = [Fplus(x) for x in right_pts]
    add("effective potential > 0 on (2, inf) away from e",
        all(v > floor for v in right_vals),
        "min sampled integral = %s" % mp.nstr(min(right_vals), 6))

    V2, Tc2 = None, None
    try:
        V2, Tc2 = build_potential(nu, e, Q)
    except ValueError as exc:
        add("V' matches polynomial part of M sqrt(x^2-4)", False, str(exc))
    if V2 is not None:
        dV = spec.Vp() - V2.deriv()
        vscale = max([abs(c) for c in spec.Vp().c] or [mpf(1)])
        v_ok = all(abs(c) <= tol * vscale for c in dV.c) if dV else True
        add("V' matches polynomial part of M sqrt(x^2-4)", v_ok,
            "max coeff dev = %s" % mp.nstr(max([abs(c) for c in dV.c] or [mpf(0)]), 6))
        add("T_c matches residue and is positive",
            Tc2 > 0 and abs(spec.Tc - Tc2) <= tol * max(abs(Tc2), mpf(1)),
            "T_c = %s" % mp.nstr(Tc2, 12))

    add("deg V even with positive leading coefficient",
        spec.V.degree % 2 == 0 and spec.V[spec.V.degree] > 0,
        "deg V = %d, lead = %s" % (spec.V.degree, mp.nstr(spec.V[spec.V.degree], 8)))

    return ValidationReport(checks)
