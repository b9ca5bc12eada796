import functools

import pytest
from mpmath import mp, mpf

mp.dps = 40

from birthcut.modelchain import build_chain
from birthcut.oracle import build_rec_chain
from birthcut.potentials import make_quartic_spec, make_spec


@functools.lru_cache(maxsize=None)
def quartic(phi_e: str):
    return make_quartic_spec(mpf(phi_e))


@functools.lru_cache(maxsize=None)
def spec_nu(nu: int, e: str):
    return make_spec(nu, mpf(e))


@functools.lru_cache(maxsize=None)
def model_chain(nu: int, k_max: int, prec: int = 256, nodes: int = 4096):
    return build_chain(nu, k_max=k_max, prec=prec, nodes=nodes)


@functools.lru_cache(maxsize=None)
def oracle_chain(phi_e: str, N: int, bits: int = 320, nodes: int = 6000,
                 n_extra: int = 0):
    spec = quartic(phi_e)
    n_max = N + int(mp.ceil(3 * mp.log(N))) + n_extra
    return build_rec_chain(spec.V, N, spec.Tc, n_max=n_max, bits=bits, nodes=nodes)


@pytest.fixture(scope="session")
def quartic_phi1():
    return quartic("1.0")
