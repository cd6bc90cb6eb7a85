import pytest

from exactwkb.spectrum import iterate_spectrum


@pytest.fixture(scope="session")
def spectra_cache():
    cache = {}

    def get(N, K=256):
        key = (N, K)
        if key not in cache:
            cache[key] = tuple(iterate_spectrum(N, p, K=K) for p in ("even", "odd"))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def pair(spectra_cache):
    """(even, odd) converged spectra of degree N at the default cutoff."""

    def get(N):
        (e, _), (o, _) = spectra_cache(N)
        return e, o

    return get
