"""Shared fixtures; the expensive Sylow-subgroup objects build once."""

import pytest

from coho.groups import build_sylow_hs
from coho.resolution import minimal_resolution, resolution_for, _RES_MEMO


@pytest.fixture(scope="session")
def sylow_group():
    return build_sylow_hs()


@pytest.fixture(scope="session")
def res_s(sylow_group, tmp_path_factory):
    """Degree-6 minimal resolution of the order-512 group, built once.

    Persisted under the session tmp dir so an interrupted run can be
    inspected; registered in the process memo so cohomology and generator
    queries share the boundary factorizations.
    """
    out = tmp_path_factory.mktemp("resolution") / "sylow"
    res = minimal_resolution(sylow_group, 6, out=out)
    _RES_MEMO[id(sylow_group)] = res
    return res
