import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from fwergodic.padic import PadicInt

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

PRIMES = [3, 5, 7, 11, 13]

primes = st.sampled_from(PRIMES)


@st.composite
def padics(draw, p=None, min_precision=1, max_precision=40):
    if p is None:
        p = draw(primes)
    n = draw(st.integers(min_precision, max_precision))
    digits = draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n))
    return PadicInt(p, digits)


@st.composite
def padic_pairs(draw, min_precision=1, max_precision=40):
    p = draw(primes)
    a = draw(padics(p=p, min_precision=min_precision, max_precision=max_precision))
    b = draw(padics(p=p, min_precision=min_precision, max_precision=max_precision))
    return a, b


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
