"""Plain-text key=value blocks and tables used by the CLI.

Format: one `key = value` per line, `#` comments, lists space-separated,
30 significant digits. Diff-able and locale-free by construction.
"""

from __future__ import annotations

from mpmath import mp, mpf

from .poly import Poly
from .potentials import CriticalSpec
from .equilibrium import EqMeasure

DIGITS = 30


def _fmt(x):
    return mp.nstr(mpf(x), DIGITS)


def _fmt_list(xs):
    return " ".join(_fmt(x) for x in xs)


def parse_kv(text: str) -> dict:
    out = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError("line %d: expected 'key = value', got %r" % (ln, raw))
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def spec_to_kv(spec: CriticalSpec) -> str:
    lines = [
        "# birth-of-a-cut critical model",
        "nu = %d" % spec.nu,
        "e = %s" % _fmt(spec.e),
        "phi_e = %s" % _fmt(spec.phi_e),
        "e_tilde = %s" % _fmt(spec.e_tilde),
        "Q = %s" % _fmt_list(spec.Q.c),
        "V = %s" % _fmt_list(spec.V.c),
        "Tc = %s" % _fmt(spec.Tc),
        "d = %d" % spec.d,
    ]
    return "\n".join(lines) + "\n"


def spec_from_kv(text: str) -> CriticalSpec:
    kv = parse_kv(text)
    missing = [k for k in ("nu", "e", "Q", "V", "Tc") if k not in kv]
    if missing:
        raise ValueError("spec block missing keys: %s" % ", ".join(missing))
    nu = int(kv["nu"])
    e = mpf(kv["e"])
    Q = Poly([mpf(v) for v in kv["Q"].split()])
    V = Poly([mpf(v) for v in kv["V"].split()])
    Tc = mpf(kv["Tc"])
    phi_e = mpf(kv["phi_e"]) if "phi_e" in kv else mp.acosh(e / 2)
    d = int(kv["d"]) if "d" in kv else Q.degree + 2 * nu
    return CriticalSpec(nu=nu, e=e, phi_e=phi_e, Q=Q,
                        e_tilde=mpf(kv.get("e_tilde", "0")), V=V, Tc=Tc, d=d)


def measure_to_kv(mu: EqMeasure) -> str:
    lines = [
        "# equilibrium measure",
        "s = %d" % mu.s,
        "endpoints = %s" % _fmt_list(mu.endpoints),
        "M = %s" % _fmt_list(mu.M.c),
        "T = %s" % _fmt(mu.T),
        "V = %s" % _fmt_list(mu.V.c),
    ]
    if mu.s == 2:
        lines += [
            "x0 = %s" % _fmt(mu.x0),
            "m = %s" % _fmt(mu.m),
            "u_inf_imag = %s" % _fmt(mu.u_inf.imag),
        ]
    return "\n".join(lines) + "\n"


def measure_from_kv(text: str, V: Poly = None) -> EqMeasure:
    kv = parse_kv(text)
    mu = EqMeasure(
        s=int(kv["s"]),
        endpoints=tuple(mpf(v) for v in kv["endpoints"].split()),
        M=Poly([mpf(v) for v in kv["M"].split()]),
        T=mpf(kv["T"]),
        V=V if V is not None else Poly([mpf(v) for v in kv["V"].split()]),
    )
    if mu.s == 2:
        from .equilibrium import _fill_two_cut_data
        _fill_two_cut_data(mu)
    return mu
