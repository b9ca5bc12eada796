"""The effective matrix model in the potential y^{2 nu}/(2 nu).

Everything reduces to the monic orthogonal polynomials P_k of the weight
w(y) = exp(-y^{2 nu}/(2 nu)) on the line. Their recurrence data is computed
with the discretized Stieltjes procedure on a composite Gauss-Legendre grid
(stable, unlike Hankel-determinant routes); the k-eigenvalue partition
functions follow as zeta_k = prod_{j<k} h_j, kept in log space, and the
amplitudes as

    A_k = A^{-k^2} (2 pi)^{-k} zeta_k

for the model constant A = (2 sinh phi_e)^2 (2 sinh(phi_e) Q(e)/T_c)^{1/2nu}.

Wavefunctions: psi_k = P_k e^{-y^{2nu}/4nu} / sqrt(h_k); the Hilbert-transform
partners start from the principal-value Cauchy transform of the weight and
climb the same three-term recurrence with the delta_{k,0} h_0 inhomogeneity.
At 256-bit precision the forward recurrence keeps the hat solution clean for
every k used here (contamination by the growing solution enters at the seed's
relative accuracy, far below any tolerance in play).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mp, mpf

from .potentials import CriticalSpec
from .quadrature import panel_nodes


@dataclass
class ModelChain:
    nu: int
    k_max: int
    prec: int
    R: mpf
    ln_zeta: list          # ln zeta_k, k = 0..k_max (zeta_0 = 1)
    ln_h: list             # ln h_k, k = 0..k_max-1
    gamma: list            # gamma_k = sqrt(h_k/h_{k-1}), k = 1..k_max-1 (index k)
    beta: list             # recurrence beta_k (all ~ 0 by parity)
    xs: list = field(repr=False, default=None)      # quadrature nodes
    gl_w: list = field(repr=False, default=None)    # bare GL weights
    wv: list = field(repr=False, default=None)      # weight values at nodes

    def h(self, k):
        return mp.exp(self.ln_h[k])

    def gamma_sq(self, k):
        return mp.exp(self.ln_h[k] - self.ln_h[k - 1])


def A_constant(spec: CriticalSpec):
    """A = (2 sinh phi_e)^2 (2 sinh(phi_e) Q(e)/T_c)^{1/(2 nu)}."""
    sh = mp.sinh(spec.phi_e)
    return (2 * sh) ** 2 * (2 * sh * spec.Q(spec.e) / spec.Tc) ** (mpf(1) / (2 * spec.nu))


def ln_A_k(chain: ModelChain, lnA, k: int):
    """ln A_k = ln zeta_k - k^2 ln A - k ln(2 pi); A_{-1} follows the
    zeta_{-1} = 1 convention used by the shifted Hilbert sums."""
    if k == -1:
        return -lnA + mp.log(2 * mp.pi)
    return chain.ln_zeta[k] - k * k * lnA - k * mp.log(2 * mp.pi)


def _model_domain(nu: int, k_max: int, prec: int):
    """R with y^{2 k_max} w(y) below the h_k scale by ~0.45*prec bits."""
    target = mpf(prec) * mp.log(2) * mpf("0.45") + 40
    R = mpf(4)
    while 2 * k_max * mp.log(R) - R ** (2 * nu) / (2 * nu) > -target:
        R += mpf(1) / 2
    return R


def stieltjes_chain(xs, ws, n_steps):
    """Recurrence data of the monic orthogonal polynomials of the discrete
    measure sum_i ws[i] delta(x - xs[i]).

    Returns (beta, ln_h) with len(beta) = len(ln_h) = n_steps; the monic
    three-term recurrence is p_{k+1} = (x - beta_k) p_k - (h_k/h_{k-1}) p_{k-1}.
    """
    m = len(xs)
    zero, one = mpf(0), mpf(1)
    p_prev = [zero] * m
    p = [one] * m
    betas, ln_hs = [], []
    h_prev = None
    for k in range(n_steps):
        s = zero
        t = zero
        for i in range(m):
            q = ws[i] * p[i] * p[i]
            s += q
            t += q * xs[i]
        if s <= 0:
            raise ArithmeticError(
                "norm collapsed at k = %d: more nodes or bits needed" % k)
        beta = t / s
        betas.append(beta)
        ln_hs.append(mp.log(s))
        g = s / h_prev if h_prev is not None else zero
        p_new = [None] * m
        for i in range(m):
            p_new[i] = (xs[i] - beta) * p[i] - g * p_prev[i]
        p_prev, p = p, p_new
        h_prev = s
    return betas, ln_hs


def build_chain(nu: int, k_max: int = 100, prec: int = 256, nodes: int = 4096,
                check_orthonormality: bool = True) -> ModelChain:
    """Chain of the y^{2 nu}/(2 nu) model up to k_max."""
    if k_max > 200:
        raise ValueError("k_max beyond 200 is not supported")
    with mp.workprec(prec):
        R = _model_domain(nu, k_max, prec)
        panels = max(1, nodes // 64)
        xs, glw = panel_nodes(-R, R, panels, 64)
        wv = [mp.exp(-x ** (2 * nu) / (2 * nu)) for x in xs]
        ws = [g * w for g, w in zip(glw, wv)]
        betas, ln_hs = stieltjes_chain(xs, ws, k_max)
        ln_zeta = [mpf(0)]
        for k in range(k_max):
            ln_zeta.append(ln_zeta[-1] + ln_hs[k])
        gammas = [mpf(0)]
        for k in range(1, k_max):
            gammas.append(mp.exp((ln_hs[k] - ln_hs[k - 1]) / 2))
        chain = ModelChain(nu=nu, k_max=k_max, prec=prec, R=R,
                           ln_zeta=[+v for v in ln_zeta],
                           ln_h=[+v for v in ln_hs],
                           gamma=[+v for v in gammas],
                           beta=[+v for v in betas],
                           xs=xs, gl_w=glw, wv=wv)
        if check_orthonormality:
            resid = _orthonormality_residual(chain)
            if resid > mpf(10) ** (-20):
                raise ArithmeticError(
                    "orthonormality residual %s > 1e-20 at k_max = %d: "
                    "increase nodes or prec" % (mp.nstr(resid, 5), k_max))
        return chain


def _orthonormality_residual(chain: ModelChain):
    """Worst re-integrated deviation of <psi_j, psi_k> from delta_jk on an
    independently panelized grid, at the highest (worst-resolved) index."""
    panels = max(1, int(len(chain.xs) * mpf("1.37") / 64))
    xs, ws = panel_nodes(-chain.R, chain.R, panels, 64)
    top = chain.k_max - 1
    wv = [w * mp.exp(-x ** (2 * chain.nu) / (2 * chain.nu))
          for x, w in zip(xs, ws)]
    p_prev = [mpf(0)] * len(xs)
    p = [mpf(1)] * len(xs)
    for j in range(top):
        g = chain.gamma_sq(j) if j >= 1 else mpf(0)
        b = chain.beta[j]
        p_prev, p = p, [(x - b) * pi - g * pp
                        for x, pi, pp in zip(xs, p, p_prev)]
    norm = mpf(0)
    cross = mpf(0)
    for w, pi in zip(wv, p):
        norm += w * pi * pi
        cross += w * pi
    norm = norm * mp.exp(-chain.ln_h[top])
    cross = cross * mp.exp(-(chain.ln_h[top] + chain.ln_h[0]) / 2)
    return max(abs(norm - 1), abs(cross))


def _p_values(chain: ModelChain, k: int, y):
    """(P_{k-1}(y), P_k(y)) by the monic recurrence."""
    y = mpf(y)
    p_prev, p = mpf(0), mpf(1)
    for j in range(k):
        g = chain.gamma_sq(j) if j >= 1 else mpf(0)
        p_prev, p = p, (y - chain.beta[j]) * p - g * p_prev
    return p_prev, p


def psi_model(chain: ModelChain, k: int, y):
    """Orthonormal psi_k(y) = P_k(y) e^{-y^{2nu}/(4nu)} / sqrt(h_k)."""
    if not 0 <= k < chain.k_max:
        raise ValueError("k out of range")
    with mp.workprec(chain.prec):
        y = mpf(y)
        _, p = _p_values(chain, k, y)
        return p * mp.exp(-y ** (2 * chain.nu) / (4 * chain.nu) - chain.ln_h[k] / 2)


def _phat_seed(chain: ModelChain, y):
    """PV integral of w(x)/(y-x) over the truncated support, by singularity
    subtraction against w(y)."""
    y = mpf(y)
    R = chain.R
    if abs(y) >= R:
        acc = mpf(0)
        for x, g, w in zip(chain.xs, chain.gl_w, chain.wv):
            acc += g * w / (y - x)
        return acc
    wy = mp.exp(-y ** (2 * chain.nu) / (2 * chain.nu))
    acc = mpf(0)
    for x, g, w in zip(chain.xs, chain.gl_w, chain.wv):
        acc += g * (w - wy) / (y - x)
    return acc + wy * mp.log((y + R) / (R - y))


def phat_values(chain: ModelChain, k: int, y):
    """(phat_{k-1}, phat_k) where phat_j(y) = int P_j(x) w(x)/(y-x) dx,
    built from the seed and the inhomogeneous three-term recurrence."""
    with mp.workprec(chain.prec):
        y = mpf(y)
        q_prev, q = mpf(0), _phat_seed(chain, y)
        for j in range(k):
            g = chain.gamma_sq(j) if j >= 1 else mpf(0)
            inhom = mp.exp(chain.ln_h[0]) if j == 0 else mpf(0)
            q_prev, q = q, (y - chain.beta[j]) * q - g * q_prev - inhom
        return q_prev, q


def psihat_model(chain: ModelChain, k: int, y):
    """psihat_k(y) = phat_k(y) e^{+y^{2nu}/(4nu)} / sqrt(h_k); k = -1 returns
    the bare e^{+y^{2nu}/(4nu)} (empty-average convention)."""
    if k == -1:
        with mp.workprec(chain.prec):
            y = mpf(y)
            return mp.exp(y ** (2 * chain.nu) / (4 * chain.nu))
    if not 0 <= k < chain.k_max:
        raise ValueError("k out of range")
    with mp.workprec(chain.prec):
        y = mpf(y)
        _, q = phat_values(chain, k, y)
        return q * mp.exp(y ** (2 * chain.nu) / (4 * chain.nu) - chain.ln_h[k] / 2)


def kernel_model(chain: ModelChain, k: int, y, y2):
    """Christoffel-Darboux kernel K_k(y, y') of the model, degenerating to the
    derivative form on the diagonal."""
    if k < 1:
        raise ValueError("k must be >= 1")
    with mp.workprec(chain.prec):
        y, y2 = mpf(y), mpf(y2)
        gam = chain.gamma[k] if k < chain.k_max else mp.exp(
            (chain.ln_h[k] - chain.ln_h[k - 1]) / 2)
        if abs(y - y2) > mpf(10) ** (-8) * (1 + abs(y)):
            pk1, pk = _p_values(chain, k, y)
            qk1, qk = _p_values(chain, k, y2)
            ex = mp.exp(-(y ** (2 * chain.nu) + y2 ** (2 * chain.nu)) / (4 * chain.nu)
                        - (chain.ln_h[k] + chain.ln_h[k - 1]) / 2)
            return gam * ex * (pk * qk1 - pk1 * qk) / (y - y2)
        # diagonal limit: gamma_k (psi_k' psi_{k-1} - psi_{k-1}' psi_k)
        pk1, pk = _p_values(chain, k, y)
        dk1, dk = _dp_values(chain, k, y)
        nu = chain.nu
        s = y ** (2 * nu - 1) / 2
        ex = mp.exp(-y ** (2 * nu) / (2 * nu) - (chain.ln_h[k] + chain.ln_h[k - 1]) / 2)
        num = (dk - s * pk) * pk1 - (dk1 - s * pk1) * pk
        return gam * ex * num


def _dp_values(chain: ModelChain, k: int, y):
    """(P'_{k-1}, P'_k) alongside the recurrence."""
    y = mpf(y)
    p_prev, p = mpf(0), mpf(1)
    d_prev, d = mpf(0), mpf(0)
    for j in range(k):
        g = chain.gamma_sq(j) if j >= 1 else mpf(0)
        d_prev, d = d, p + (y - chain.beta[j]) * d - g * d_prev
        p_prev, p = p, (y - chain.beta[j]) * p - g * p_prev
    return d_prev, d


# ----------------------------------------------------------------------------
# plain-text cache
# ----------------------------------------------------------------------------

def chain_to_table(chain: ModelChain, lnA=None) -> str:
    """Columns k, ln_zeta, gamma, ln_A (ln_A only when lnA given), 30 digits."""
    lines = ["# nu=%d k_max=%d prec=%d R=%s" % (
        chain.nu, chain.k_max, chain.prec, mp.nstr(chain.R, 10))]
    lines.append("# k ln_zeta gamma ln_A")
    for k in range(chain.k_max):
        g = chain.gamma[k] if k >= 1 else mpf(0)
        la = ln_A_k(chain, lnA, k) if lnA is not None else mpf(0)
        lines.append("%d %s %s %s" % (
            k, mp.nstr(chain.ln_zeta[k], 30), mp.nstr(g, 30), mp.nstr(la, 30)))
    return "\n".join(lines) + "\n"
