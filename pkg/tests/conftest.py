import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mixscale.fields import GridFunction


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


def random_field_1d(rng, n=256, domain=(0.0, 1.0)):
    return GridFunction(rng.standard_normal(n), (domain,), periodic=True)


def random_field_2d(rng, n=64, domain=((0.0, 1.0), (0.0, 1.0))):
    return GridFunction(rng.standard_normal((n, n)), domain, periodic=True)


def band_limited_field(rng, n=1024, band=32, domain=(0.0, 1.0)):
    """Mean-zero real field with modes up to `band` only."""
    line = np.zeros(n, dtype=complex)
    ks = np.arange(1, band + 1)
    amps = rng.standard_normal(band) + 1j * rng.standard_normal(band)
    line[ks] = amps
    line[-ks] = np.conj(amps)
    return GridFunction(np.fft.ifft(line).real * n, (domain,), periodic=True)


def scale_free_field(rng, n=4096, domain=(0.0, 1.0)):
    """Random phases with |coefficient|^2 proportional to 1/|frequency|,
    the ensemble on which mollification error scales linearly in radius."""
    line = np.zeros(n, dtype=complex)
    ks = np.arange(1, n // 2)
    amps = (rng.standard_normal(ks.size) + 1j * rng.standard_normal(ks.size)) * ks ** -0.5
    line[ks] = amps
    line[-ks] = np.conj(amps)
    return GridFunction(np.fft.ifft(line).real * n, (domain,), periodic=True)
