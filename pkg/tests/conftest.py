import hypothesis.strategies as st
from hypothesis import settings

from ana_sdof.sdof_theory import AntennaConfig

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@st.composite
def antenna_configs(draw, m_max=10, n_max=6, above=False):
    nA = draw(st.integers(1, n_max))
    nB = draw(st.integers(1, n_max))
    lo = max(nA, nB) + 1 if above else 1
    m = draw(st.integers(lo, max(lo, m_max)))
    return AntennaConfig(m, nA, nB)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
