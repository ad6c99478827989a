import random

import pytest

from modp_gl2.cind import CInd
from modp_gl2.weights import Weight


def make_ctx(p=3, f=1, r=(1,), backend="equal", rmax=8, a=0, z=1):
    return CInd(Weight(p, f, tuple(r), a, z), backend=backend, rmax=rmax)


def random_vec(ctx, rng, R=2, terms=3):
    verts = ctx.ball_vertices(R)
    out: dict = {}
    for _ in range(terms):
        ctx.from_block(rng.choice(verts), [rng.randrange(ctx.F.q) for _ in range(ctx.D)], out)
    return out


def unit_vec(ctx, j):
    w = [0] * ctx.D
    w[j] = 1
    return w


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(scope="session")
def ctx3():
    return make_ctx(3, 1, (1,))


@pytest.fixture(scope="session")
def ctx2_trivial():
    return make_ctx(2, 1, (0,))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
