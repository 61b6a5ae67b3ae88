import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from photon_certify import ApparatusParams, PhotonNumberDistribution

settings.register_profile("default", max_examples=80, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def states(draw, max_n=12):
    """Random Fock mixtures (non-negative weights normalized to 1)."""
    size = draw(st.integers(1, max_n + 1))
    w = draw(st.lists(st.floats(0.0, 1.0), min_size=size, max_size=size))
    w = np.asarray(w)
    if w.sum() <= 1e-6:
        w = np.ones(size)
    return PhotonNumberDistribution(w / w.sum())


unit = st.floats(0.0, 1.0)
open_unit = st.floats(0.01, 0.99)


@st.composite
def apparatus(draw, min_eta=0.0):
    t = draw(unit)
    return ApparatusParams(t=t, eta_T=draw(st.floats(min_eta, 1.0)), eta_R=draw(st.floats(min_eta, 1.0)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
