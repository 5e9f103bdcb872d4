"""Shared fixtures: the four reference instances used across the suite.

All heavy, study-level computations live as module-scoped fixtures inside
the test modules that need them; here we only build encodings, which is
cheap enough to do once per session.
"""

import pytest

from anneal_lab import build_instance, encode


@pytest.fixture(scope="session")
def sgs_enc():
    """Strong-scaling 5-vertex instance at the quoted raw penalty."""
    return encode(build_instance((2, 3), 0.01, 5.33))


@pytest.fixture(scope="session")
def wgs_enc():
    """Weak-scaling 5-vertex instance at the quoted raw penalty."""
    return encode(build_instance((2, 3), 0.37, 37.5))


@pytest.fixture(scope="session")
def noac_enc():
    """Swapped-geometry control: larger sub-graph holds the heavier vertices."""
    return encode(build_instance((3, 2), 0.01, 5.33))


@pytest.fixture(scope="session")
def tri_enc():
    """Three-sub-graph instance with the default weight ladder."""
    return encode(build_instance((2, 4, 3), 0.01, 5.33))
