"""One- and two-cut equilibrium measures and their derivative objects.

The resolvent is W = (V' - M sqrt(sigma))/2 with sigma one of

    s = 1:  (x-a)(x-b),          s = 2:  (x-a)(x-b)(x-c)(x-d),

and the endpoint conditions W ~ T/x + O(1/x^2) at infinity (plus, for s = 2,
equality of the effective potential across the gap). The moment conditions
are read off algebraically from the Laurent series of V'/sqrt(sigma): writing
V'/sqrt(sigma) = M + sum_j c_j x^{-j}, one needs

    s = 1:  c_1 = 0, c_2 = 2T;      s = 2:  c_1 = c_2 = 0, c_3 = 2T,

which a damped Newton iteration solves for the endpoints. The gap condition
for s = 2 is the one genuine quadrature, done under the cosine substitution.

Density: rho(x) = M(x) sqrt(-sigma(x)) / (2 pi T) on the support.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import mp, mpc, mpf

from .poly import Poly, laurent_split, sqrt_sigma_tail
from .quadrature import integrate_bracket, integrate_doubling
from .specialfn import (EllipticParams, complete_integrals, incomplete_E,
                        sn_cn_dn, theta1, theta1_prime0)


class PhaseError(RuntimeError):
    """The requested cut structure is not the right phase at this T."""


class ConvergenceError(RuntimeError):
    pass


@dataclass
class EqMeasure:
    s: int
    endpoints: tuple          # (a, b) or (a, b, c, d), increasing
    M: Poly
    T: mpf
    V: Poly
    x0: Optional[mpf] = None          # two-cut: zero of Omega in the gap
    m: Optional[mpf] = None           # two-cut: biratio of the endpoints
    u_inf: Optional[mpc] = None       # two-cut: image of x = infinity
    ell: Optional[EllipticParams] = None

    def sigma(self) -> Poly:
        p = Poly([1])
        for r in self.endpoints:
            p = p * Poly([-r, 1])
        return p

    def cut_sign(self, i):
        """Branch sign of the density on cut i (0-based): +1 on the last cut,
        alternating leftwards, from the discontinuity of sqrt(sigma)."""
        return 1 if (self.s - 1 - i) % 2 == 0 else -1

    def density(self, x):
        """rho(x) = M sqrt(-sigma) / (2 pi T) with the per-cut branch sign;
        zero off the support."""
        x = mpf(x)
        cut = self._cut_index(x)
        if cut is None:
            return mpf(0)
        neg = -self.sigma()(x)
        if neg < 0:
            neg = mpf(0)
        return self.cut_sign(cut) * self.M(x) * mp.sqrt(neg) / (2 * mp.pi * self.T)

    def _cut_index(self, x):
        eps = self.endpoints
        for i in range(self.s):
            if eps[2 * i] <= x <= eps[2 * i + 1]:
                return i
        return None

    def in_support(self, x):
        eps = self.endpoints
        if self.s == 1:
            return eps[0] <= x <= eps[1]
        return eps[0] <= x <= eps[1] or eps[2] <= x <= eps[3]

    def b_s(self):
        return self.endpoints[-1]


# ----------------------------------------------------------------------------
# moment conditions via Laurent data
# ----------------------------------------------------------------------------

def _moments(Vp: Poly, endpoints, jmax=6):
    """(M, c) for V'/sqrt(sigma) = M + sum c_j x^{-j} at these endpoints."""
    sigma = Poly([1])
    for r in endpoints:
        sigma = sigma * Poly([-r, 1])
    s = len(endpoints) // 2
    tail = sqrt_sigma_tail(sigma, jmax + Vp.degree + s, alpha=-mpf(1) / 2)
    return laurent_split(Vp, tail, s, jmax)


def _newton(F, x0, max_iter=100, tol=None, trust=None):
    """Damped Newton with forward-difference Jacobian on a tuple function.

    `trust` caps each component of the step; near a degenerate critical point
    the Jacobian is stiff and an uncapped step can jump into the basin of a
    spurious (negative-density) root of the moment system.
    """
    n = len(x0)
    x = [mpf(v) for v in x0]
    if tol is None:
        tol = mpf(10) ** (-mp.dps + 8)
    if trust is None:
        trust = mpf("0.2")
    r = F(x)
    rn = max(abs(v) for v in r)
    for _ in range(max_iter):
        if rn <= tol:
            return x
        h = mpf(2) ** (-mp.prec // 2)
        J = []
        for j in range(n):
            step = h * (1 + abs(x[j]))
            xp = list(x)
            xp[j] += step
            rp = F(xp)
            J.append([(rp[i] - r[i]) / step for i in range(n)])
        mat = mpmath.matrix([[J[j][i] for j in range(n)] for i in range(n)])
        try:
            dx = mpmath.lu_solve(mat, mpmath.matrix([-v for v in r]))
        except ZeroDivisionError as exc:
            raise ConvergenceError("singular Jacobian: %s" % exc)
        big = max(abs(dx[j]) / (trust * (1 + abs(x[j]))) for j in range(n))
        if big > 1:
            dx = [dx[j] / big for j in range(n)]
        lam = mpf(1)
        for _ in range(30):
            xt = [x[j] + lam * dx[j] for j in range(n)]
            try:
                rt = F(xt)
                rtn = max(abs(v) for v in rt)
            except (PhaseError, ValueError):
                rtn = None
            if rtn is not None and rtn < rn:
                x, r, rn = xt, rt, rtn
                break
            lam /= 2
        else:
            raise ConvergenceError("line search stalled at residual %s" % rn)
    if rn <= tol:
        return x
    raise ConvergenceError("no convergence after %d iterations (residual %s)"
                           % (max_iter, rn))


def solve_one_cut(V: Poly, T, guess=(-2, 2)) -> EqMeasure:
    """Endpoints (a, b) with c_1 = 0 and c_2 = 2T; raises PhaseError if the
    resulting density is negative somewhere on [a, b]."""
    T = mpf(T)
    Vp = V.deriv()

    def F(x):
        a, b = x
        if not a < b:
            raise PhaseError("endpoint ordering lost")
        _, c = _moments(Vp, (a, b))
        return (c[1], c[2] - 2 * T)

    # converge to working precision; this is far below the 1e-12 T contract
    a, b = _newton(F, guess, tol=mpf(10) ** (-mp.dps + 8) * max(T, mpf(1)))
    M, _ = _moments(Vp, (a, b))
    mu = EqMeasure(s=1, endpoints=(mpf(a), mpf(b)), M=M, T=T, V=V)
    _check_density(mu)
    return mu


def solve_two_cut(V: Poly, T, guess) -> EqMeasure:
    """Endpoints (a, b, c, d) with c_1 = c_2 = 0, c_3 = 2T and equal effective
    potential across the gap; populates x0, m, u_inf and the elliptic data."""
    T = mpf(T)
    Vp = V.deriv()

    def F(x):
        a, b, c, d = x
        if not (a < b < c < d):
            raise PhaseError("cut collision: need a < b < c < d")
        span = d - a
        if (d - c) < mpf("1e-10") * span or (c - b) < mpf("1e-10") * span:
            raise PhaseError("cut collision: a cut or the gap has closed")
        M, cs = _moments(Vp, (a, b, c, d))
        # integral_b^c M sqrt(sigma): integrate_bracket supplies the
        # 1/sqrt((t-b)(c-t)) weight, so feed it M sqrt((t-a)(d-t)) (t-b)(c-t)
        gap = integrate_bracket(
            lambda t: M(t) * mp.sqrt((t - a) * (d - t)) * (t - b) * (c - t),
            b, c)
        return (cs[1], cs[2], cs[3] - 2 * T, gap)

    a, b, c, d = _newton(F, guess, max_iter=40)
    M, _ = _moments(Vp, (a, b, c, d))
    mu = EqMeasure(s=2, endpoints=(mpf(a), mpf(b), mpf(c), mpf(d)), M=M, T=T, V=V)
    _check_density(mu)
    _fill_two_cut_data(mu)
    return mu


def _check_density(mu: EqMeasure, samples=200):
    eps = mu.endpoints
    mscale = max(abs(v) for v in mu.M.c) if mu.M else mpf(1)
    floor = -mscale * mpf(10) ** (-mp.dps + 8)
    for cut in range(mu.s):
        lo, hi = eps[2 * cut], eps[2 * cut + 1]
        sgn = mu.cut_sign(cut)
        for i in range(1, samples):
            x = lo + (hi - lo) * mpf(i) / samples
            if sgn * mu.M(x) < floor * (1 + abs(x)) ** mu.M.degree:
                raise PhaseError("negative density at x = %s; wrong cut count "
                                 "for this temperature" % mp.nstr(x, 10))


def _fill_two_cut_data(mu: EqMeasure):
    a, b, c, d = mu.endpoints
    m = (b - a) * (d - c) / ((c - a) * (d - b))
    ell = complete_integrals(m)
    r = mp.sqrt((d - b) / (b - a))
    u_inf = mpc(0, 1) * integrate_doubling(
        lambda y: 1 / mp.sqrt((1 + y * y) * (1 + m * y * y)), 0, r)
    Eu = incomplete_E(u_inf, m)
    x0 = d + mpc(0, 1) * mp.sqrt((c - a) * (d - b)) * (
        Eu - (1 - ell.Eprime / ell.Kprime) * u_inf)
    mu.m = m
    mu.ell = ell
    mu.u_inf = u_inf
    mu.x0 = x0.real if abs(x0.imag) < mpf(10) ** (-mp.dps + 10) * (1 + abs(x0)) \
        else x0


def normalization(mu: EqMeasure):
    """integral of the density over the support (should be 1)."""
    eps = mu.endpoints
    total = mpf(0)
    for cut in range(mu.s):
        lo, hi = eps[2 * cut], eps[2 * cut + 1]
        sgn = mu.cut_sign(cut)
        others = [r for r in eps if r < lo or r > hi]

        def rest(x):
            acc = mpf(1)
            for r in others:
                acc *= abs(x - r)
            return mp.sqrt(acc)

        total += sgn * integrate_bracket(
            lambda x: mu.M(x) * rest(x) * (x - lo) * (hi - x),
            lo, hi) / (2 * mp.pi * mu.T)
    return total


# ----------------------------------------------------------------------------
# effective potential
# ----------------------------------------------------------------------------

def _sqrt_sigma_signed(mu: EqMeasure, x):
    """sqrt(sigma) on the real axis off the support, with the branch that is
    +|.| right of the support and flips sign across each cut."""
    eps = mu.endpoints
    val = abs(mu.sigma()(x))
    root = mp.sqrt(val)
    cuts_right = 0
    if mu.s == 1:
        if x < eps[0]:
            cuts_right = 1
    else:
        if x < eps[2]:
            cuts_right += 1
        if x < eps[0]:
            cuts_right += 1
    return -root if cuts_right % 2 else root


def effective_potential(mu: EqMeasure, x):
    """V_eff(x) - V_eff(b_s) = integral_{b_s}^x M sqrt(sigma), x off the open
    support. V_eff is flat on each cut, so the integral may be taken from the
    nearest endpoint; the square-root vanishing there is absorbed by t = p + w^2.
    """
    x = mpf(x)
    eps = mu.endpoints
    for i in range(0, len(eps), 2):
        if eps[i] < x < eps[i + 1]:
            raise ValueError("x = %s lies inside the support" % x)

    def from_endpoint(p, x, sign_dir):
        # integral_p^x M sqrt(sigma) dt, with t = p + sign_dir * w^2
        w1 = mp.sqrt(abs(x - p))
        def f(w):
            t = p + sign_dir * w * w
            return 2 * w * sign_dir * mu.M(t) * _sqrt_sigma_signed(mu, t)
        return integrate_doubling(f, 0, w1, max_panels=256)

    if x >= eps[-1]:
        return mpf(0) if x == eps[-1] else from_endpoint(eps[-1], x, 1)
    if x <= eps[0]:
        # V_eff(a_1) = V_eff(b_s): flat cuts plus the equal-potential gap rule
        return mpf(0) if x == eps[0] else from_endpoint(eps[0], x, -1)
    # s = 2 gap: V_eff(c) = V_eff(d) = V_eff(b_s)
    return from_endpoint(eps[2], x, -1)


# ----------------------------------------------------------------------------
# abelian differential, Lambda, gamma, prime form
# ----------------------------------------------------------------------------

def joukowski_lambda(mu: EqMeasure, x):
    """One-cut Lambda(x) = exp(phi(x)), branch fixed by x/Lambda -> gamma at
    +infinity and continuity along the real axis."""
    a, b = mu.endpoints
    w = (2 * mpf(x) - a - b) / (b - a)
    if abs(w) < 1:
        raise ValueError("x inside the cut")
    root = mp.sqrt(w * w - 1)
    return w + root if w >= 1 else w - root


def _u_of_x_two_cut(mu: EqMeasure, x):
    """u(x) for real x > d, on the branch with u(d) = i K' and u(inf) = u_inf.

    Computed as u_inf + (i/2) sqrt((d-b)(c-a)) integral_x^inf dy/sqrt(sigma);
    the tail integral is regularized by y = 1/tau, which keeps full absolute
    accuracy at large x (where u - u_inf ~ 1/x must be resolved).
    """
    a, b, c, d = mu.endpoints
    x = mpf(x)
    if x <= d:
        raise ValueError("need x > d")
    pref = mp.sqrt((d - b) * (c - a)) / 2

    def tail_integrand(tau):
        # 1/sqrt(tau^4 sigma(1/tau)) = 1/sqrt(prod (1 - r tau))
        acc = mpf(1)
        for r in (a, b, c, d):
            acc *= 1 - r * tau
        return 1 / mp.sqrt(acc)

    if x >= 2 * d + 1:
        tail = integrate_doubling(tail_integrand, 0, 1 / x, max_panels=256)
        return mu.u_inf + mpc(0, 1) * pref * tail
    # moderate x: w^2 substitution anchored at the singular (lower) end,
    # plus the exact tau-form tail beyond xfar
    xfar = 2 * d + 1

    def sig(t):
        return (t - a) * (t - b) * (t - c) * (t - d)

    w1 = mp.sqrt(xfar - x)
    mid = integrate_doubling(
        lambda w: 2 * w / mp.sqrt(sig(x + w * w)), 0, w1, max_panels=256)
    tail = integrate_doubling(tail_integrand, 0, 1 / xfar, max_panels=256)
    return mu.u_inf + mpc(0, 1) * pref * (tail + mid)


def lambda_two_cut(mu: EqMeasure, x):
    """Lambda(x) = e^{pi u u_inf/(K K')} theta1((u+u_inf)/2K) / theta1((u-u_inf)/2K),
    real x > d."""
    ell = mu.ell
    u = _u_of_x_two_cut(mu, x)
    K, Kp, tau = ell.K, ell.Kprime, ell.tau
    num = theta1((u + mu.u_inf) / (2 * K), tau)
    den = theta1((u - mu.u_inf) / (2 * K), tau)
    val = mp.exp((mp.pi * u * mu.u_inf / (K * Kp)).real) * num / den
    return val.real if abs(mpc(val).imag) < mpf(10) ** (-mp.dps + 8) * abs(val) \
        else val


def gamma_two_cut(mu: EqMeasure):
    """gamma = (i/4K) sqrt((d-b)(c-a)) e^{-pi u_inf^2/(K K')}
               theta1'(0, tau) / theta1(u_inf/K, tau)."""
    a, b, c, d = mu.endpoints
    ell = mu.ell
    pref = mpc(0, 1) / (4 * ell.K) * mp.sqrt((d - b) * (c - a))
    expf = mp.exp((-mp.pi * mu.u_inf ** 2 / (ell.K * ell.Kprime)).real)
    val = pref * expf * theta1_prime0(ell.tau) / theta1(mu.u_inf / ell.K, ell.tau)
    return val.real


def abelian_objects(mu: EqMeasure):
    """(Omega, Lambda, gamma): the normalized third-kind differential, its
    exponentiated primitive from b_s, and gamma = lim x/Lambda(x)."""
    if mu.s == 1:
        a, b = mu.endpoints

        def Omega(x):
            return 1 / mp.sqrt((x - a) * (x - b))

        gamma = (b - a) / 4

        def Lambda(x):
            return joukowski_lambda(mu, x)

        return Omega, Lambda, gamma

    x0 = mu.x0

    def Omega(x):
        return (x - x0) / mp.sqrt(mu.sigma()(x))

    def Lambda(x):
        return lambda_two_cut(mu, x)

    return Omega, Lambda, gamma_two_cut(mu)


def gamma_from_lambda_limit(mu: EqMeasure, x=None):
    """gamma as x/Lambda(x) at large finite x (O(1/x) away from the limit)."""
    if x is None:
        x = mpf(10) ** 9 * max(abs(v) for v in mu.endpoints)
    _, Lambda, _ = abelian_objects(mu)
    return mpf(x) / Lambda(mpf(x))


def prime_form_one_cut(mu: EqMeasure, x, xi):
    """(H, E): H(x,xi) = phi'(x)/(e^{phi(x)+phi(xi)} - 1) and
    E(x,xi) = 1 - e^{-(phi(x)+phi(xi))}."""
    if mu.s != 1:
        raise ValueError("prime form implemented for the one-cut case only")
    a, b = mu.endpoints
    for v in (x, xi):
        if a <= v <= b:
            raise ValueError("argument on the cut")
    lx, lxi = joukowski_lambda(mu, x), joukowski_lambda(mu, xi)
    phip = 1 / mp.sqrt((x - a) * (x - b))
    H = phip / (lx * lxi - 1)
    E = 1 - 1 / (lx * lxi)
    return H, E


def veff_const_bs(mu: EqMeasure, tail_terms=40):
    """Absolute V_eff(b_s) = V(b_s) - 2T ln(b_s) - 2 int_inf^{b_s} (W - T/x).

    The large-x tail of W - T/x is summed from the Laurent coefficients of
    V'/sqrt(sigma); the finite part is integrated with the w^2 substitution
    at b_s. Requires b_s > 0 (true for every critical model here).
    """
    bs = mu.b_s()
    if bs <= 0:
        raise ValueError("normalization constant needs b_s > 0")
    T, Vp = mu.T, mu.V.deriv()
    eps = mu.endpoints
    s = mu.s
    jmax = tail_terms + Vp.degree + s
    M, c = _moments(Vp, eps, jmax=jmax)
    sigma = mu.sigma()
    st = sqrt_sigma_tail(sigma, tail_terms, alpha=mpf(1) / 2)

    # W - T/x = (1/2)(V' - M sqrt(sigma)) - T/x = (1/2) sqrt(sigma) * sum c_j x^-j - T/x
    # -> coefficients w_k of x^{-k}: (1/2) sum_{j} c_j st[k + s - j]... build product
    prod = [mpf(0)] * (tail_terms + 1)
    for j in range(1, len(c)):
        if c[j] == 0:
            continue
        for i, sti in enumerate(st):
            k = j + i - s
            if 0 <= k <= tail_terms:
                prod[k] += c[j] * sti / 2
    prod[1] -= T

    X = 8 * max(abs(v) for v in eps) + 8
    tail = mpf(0)
    for k in range(2, tail_terms + 1):
        tail += prod[k] * X ** (1 - k) / (k - 1)
    # integral_X^inf (W - T/x) dx = tail (prod[0] = prod[1] = 0 identically)

    def integrand(w):
        x = bs + w * w
        return 2 * w * ((Vp(x) - M(x) * _sqrt_sigma_signed(mu, x)) / 2 - T / x)

    finite = integrate_doubling(integrand, 0, mp.sqrt(X - bs), max_panels=256)
    # int_inf^{bs} = -(finite + tail)... careful: int_{bs}^inf = finite + tail
    return mu.V(bs) - 2 * T * mp.log(bs) + 2 * (finite + tail)


def thermo_derivatives(mu: EqMeasure):
    """dF/dT = V_eff(b_s), d2F/dT2 = -2 ln gamma, and the trace derivative
    dT(race)/dT ((a+b)/2 for one cut, (a+b+c+d)/2 - x0 for two)."""
    _, _, gamma = abelian_objects(mu)
    eps = mu.endpoints
    if mu.s == 1:
        trace = (eps[0] + eps[1]) / 2
    else:
        trace = sum(eps) / 2 - mu.x0
    return {
        "dF_dT": veff_const_bs(mu),
        "d2F_dT2": -2 * mp.log(gamma),
        "dT_dT_trace": trace,
        "gamma": gamma,
    }


def dtrace_dr(mu: EqMeasure, xi):
    """One-cut d(trace)/d(residue) = gamma / Lambda(xi), for a simple pole
    of V' at xi outside the cut."""
    if mu.s != 1:
        raise ValueError("implemented for the one-cut case only")
    _, Lam, gamma = abelian_objects(mu)
    return gamma / Lam(mpf(xi))


def classical_gamma_beta(mu: EqMeasure):
    """Large-n recurrence coefficients: values for s = 1, oscillation bounds
    for s = 2."""
    eps = mu.endpoints
    if mu.s == 1:
        a, b = eps
        return {"gamma_n": (b - a) / 4, "beta_n": (a + b) / 2}
    a, b, c, d = eps
    return {
        "gamma_lo": (d - a - c + b) / 4, "gamma_hi": (d - a + c - b) / 4,
        "beta_lo": (d + a - c + b) / 2, "beta_hi": (d + a + c - b) / 2,
    }
