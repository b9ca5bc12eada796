"""Near-critical expansions: endpoint drift, newborn-cut scaling, transition order.

Below T_c the single cut shrinks linearly in t = T - T_c; above T_c the
newborn cut [c, d] around e opens like (-t/ln(t/T_c))^{1/(2 nu)}. The scaling
data (zeta, C, the even monic polynomial G) is model-independent up to the
two numbers phi_e and Q(e).

Convention for logarithms: t is used dimensionfully where it multiplies a
susceptibility (the ODE in T fixes that), while every logarithm takes the
dimensionless t/T_c. All formulas below follow that reading; `t` arguments
are dimensionful (same units as T_c).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

from mpmath import mp, mpc, mpf

from .poly import Poly
from .potentials import CriticalSpec


@dataclass
class NewbornScaling:
    zeta: mpf
    C: mpf
    G: Poly           # even monic, degree 2 nu - 2, in the rescaled variable
    c: mpf            # e - 2 zeta (-t/ln(t/Tc))^{1/2nu}
    d: mpf
    delta_x0: mpf     # x0 - d ~ 4 nu phi_e sinh(phi_e)/ln(t/Tc)
    m_asym: mpf
    tau_asym: mpc     # -i ln(t/Tc) / (2 nu pi)
    epsilon: mpf      # filling fraction of the newborn cut


def scaling_constant_C(spec: CriticalSpec):
    """C = 4 nu^2 phi_e / (sinh(phi_e) Q(e)) > 0."""
    return 4 * mpf(spec.nu) ** 2 * spec.phi_e / (mp.sinh(spec.phi_e) * spec.Q(spec.e))


def scaling_zeta(spec: CriticalSpec):
    """zeta = (C/2 * nu! (nu-1)! / (2 nu)!)^{1/(2 nu)}."""
    nu = spec.nu
    C = scaling_constant_C(spec)
    val = C / 2 * mpf(factorial(nu)) * factorial(nu - 1) / factorial(2 * nu)
    return val ** (mpf(1) / (2 * nu))


def g_scaling_poly(nu: int, zeta) -> Poly:
    """G(xi) = sum_{k=0}^{nu-1} (2k)!/(k! k!) zeta^{2k} xi^{2(nu-1-k)}."""
    zeta = mpf(zeta)
    coeffs = [mpf(0)] * (2 * nu - 1)
    for k in range(nu):
        coeffs[2 * (nu - 1 - k)] = mpf(comb(2 * k, k)) * zeta ** (2 * k)
    return Poly(coeffs)


def g_scaling_hyperbolic(nu: int, zeta, psi):
    """Alternative form G(2 zeta cosh(psi)) = zeta^{2nu-2} *
    sum_j binom(2nu-1, nu+j) sinh((2j+1) psi)/sinh(psi)."""
    zeta, psi = mpf(zeta), mpf(psi)
    acc = mpf(0)
    for j in range(nu):
        acc += comb(2 * nu - 1, nu + j) * mp.sinh((2 * j + 1) * psi) / mp.sinh(psi)
    return zeta ** (2 * nu - 2) * acc


def one_cut_drift(spec: CriticalSpec, t):
    """First-order endpoint and recurrence-coefficient drift for t < 0.

    a = -2 + t/((2+e)^{2nu-1} Q(-2)),  b = 2 - t/((e-2)^{2nu-1} Q(2));
    the gamma_n/beta_n values hold at n = N(1 + t/T_c).
    """
    t = mpf(t)
    if t >= 0:
        raise ValueError("one-cut drift needs t < 0")
    nu, e, Q = spec.nu, spec.e, spec.Q
    wp = (e - 2) ** (2 * nu - 1) * Q(mpf(2))
    wm = (e + 2) ** (2 * nu - 1) * Q(mpf(-2))
    return {
        "a": -2 + t / wm,
        "b": 2 - t / wp,
        "gamma_n": 1 - t / 4 * (1 / wp + 1 / wm),
        "beta_n": -t / 2 * (1 / wp - 1 / wm),
    }


def newborn_scaling(spec: CriticalSpec, t) -> NewbornScaling:
    """Leading scaling data of the newborn cut for 0 < t << T_c."""
    t = mpf(t)
    if t <= 0:
        raise ValueError("newborn scaling needs t > 0")
    nu, phi = spec.nu, spec.phi_e
    that = t / spec.Tc
    lnt = mp.log(that)
    C = scaling_constant_C(spec)
    zeta = scaling_zeta(spec)
    tau_pow = (-t / lnt) ** (mpf(1) / (2 * nu))
    half = 2 * zeta * tau_pow
    return NewbornScaling(
        zeta=zeta,
        C=C,
        G=g_scaling_poly(nu, zeta),
        c=spec.e - half,
        d=spec.e + half,
        delta_x0=4 * nu * phi * mp.sinh(phi) / lnt,
        m_asym=4 * zeta / mp.sinh(phi) ** 2 * tau_pow,
        tau_asym=mpc(0, -1) * lnt / (2 * nu * mp.pi),
        epsilon=-2 * nu * phi * that / lnt,
    )


def expected_count(spec: CriticalSpec, N: int, n: int):
    """Mean number of eigenvalues in the newborn well at index n >= N:
    k ~ 2 nu phi_e (n - N)/ln N."""
    if n < N:
        raise ValueError("need n >= N")
    return 2 * spec.nu * spec.phi_e * (n - N) / mp.log(N)


def transition_curvature(spec: CriticalSpec, t):
    """d^2F/dt^2 near the transition: linear in t below, 4 nu phi_e^2/ln(t/T_c)
    above. Continuous (-> 0) from both sides; the third derivative jumps."""
    t = mpf(t)
    if t == 0:
        raise ValueError("t must be nonzero")
    nu, e, Q, phi = spec.nu, spec.e, spec.Q, spec.phi_e
    if t < 0:
        wp = (e - 2) ** (2 * nu - 1) * Q(mpf(2))
        wm = (e + 2) ** (2 * nu - 1) * Q(mpf(-2))
        return t / 2 * (1 / wp + 1 / wm)
    return 4 * nu * phi ** 2 / mp.log(t / spec.Tc)
