import numpy as np
import pytest


def ginibre(rng, n, m=None):
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)


def random_psd(rng, n, rank=None):
    G = ginibre(rng, n, n if rank is None else rank)
    return G @ G.conj().T


def random_hermitian(rng, n):
    G = ginibre(rng, n)
    return (G + G.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def unit_psd(rng, n):
    P = random_psd(rng, n)
    return P / np.linalg.norm(P, 2)
