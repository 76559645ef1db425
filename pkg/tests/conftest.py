import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from udime.syntax import parse_dime, parse_schema

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

E0 = "a+ || ((b || c?)+ | d[5,inf])"
E1 = "((a || b) | (c || d))+ || ((e || f)[2,5] | g[1,3]) || (h* || i[0,9])"


def load_schema(name: str, dtd: bool = False):
    return parse_schema((DATA / name).read_text(), dtd=dtd)


@pytest.fixture
def e0():
    return parse_dime(E0)


@pytest.fixture
def e1():
    return parse_dime(E1)


@pytest.fixture
def example3():
    return load_schema("example3.ims")


@pytest.fixture
def dblp():
    return load_schema("dblp.ims")


@pytest.fixture
def peers():
    return load_schema("peers.ims")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
