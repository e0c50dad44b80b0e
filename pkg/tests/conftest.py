from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from faircake.cake import Cake

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


@st.composite
def cakes(draw, min_agents=1, max_agents=3, min_slices=1, max_slices=4, max_density=6):
    """Small cakes with integer densities, patched so the cake is valid."""
    n = draw(st.integers(min_agents, max_agents))
    m = draw(st.integers(min_slices, max_slices))
    dens = st.integers(0, max_density)
    rows = [draw(st.lists(dens, min_size=m, max_size=m)) for _ in range(n)]
    for j in range(m):
        if not any(r[j] for r in rows):
            rows[draw(st.integers(0, n - 1))][j] = draw(st.integers(1, max_density))
    for r in rows:
        if not any(r):
            r[draw(st.integers(0, m - 1))] = draw(st.integers(1, max_density))
    lengths = draw(st.lists(st.integers(1, 3), min_size=m, max_size=m))
    return Cake.from_table(rows, lengths)


def fractions_matrix(n, m, rng):
    """Random allocation matrix with small denominators (columns sum to 1)."""
    cols = []
    for _ in range(m):
        cuts = sorted(rng.randint(0, 12) for _ in range(n - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [12])]
        cols.append([Fraction(p, 12) for p in parts])
    return tuple(tuple(cols[j][i] for j in range(m)) for i in range(n))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
