import os
from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from bordercollision import Matrix, PwlMap

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def fractions(cap: int = 3, denom: int = 4):
    return st.builds(
        Fraction,
        st.integers(-cap * denom, cap * denom),
        st.integers(1, denom),
    )


@st.composite
def square(draw, n=None, cap=3, denom=4):
    n = draw(st.integers(1, 4)) if n is None else n
    return [[draw(fractions(cap, denom)) for _ in range(n)] for _ in range(n)]


@st.composite
def pwl_maps(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    al = Matrix(draw(square(n)))
    xi = [draw(fractions()) for _ in range(n)]
    b = [draw(fractions()) for _ in range(n)]
    return PwlMap.from_xi(al, xi, b)


# one line per acceptance criterion, printed after the test session
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(str(k).split("-")[0]), str(k))):
        terminalreporter.write_line(ACCEPTANCE[key])
