import os

import pytest
from hypothesis import HealthCheck, settings

from krpoly.rootsys import build_root_system
from krpoly.weylgrp import weyl_group

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def F4():
    return build_root_system("F4")


@pytest.fixture(scope="session")
def WF4(F4):
    return weyl_group(F4)


@pytest.fixture(scope="session")
def f4_spec():
    from krpoly.polyform import PolyhedralSpec
    return PolyhedralSpec.load()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
