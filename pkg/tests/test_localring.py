import pytest
from hypothesis import given, settings, strategies as st

from modp_gl2.errors import ConfigError, NonUnitError
from modp_gl2.localring import LocalRing, coeff_field, scalar, scalar_arith, teichmuller

RINGS = [LocalRing("equal", 2, 1, 6), LocalRing("equal", 3, 1, 6), LocalRing("equal", 3, 2, 5),
         LocalRing("mixed", 3, 1, 6), LocalRing("mixed", 5, 1, 4)]


def brute_teich_mixed(p, N, lam):
    mod = p**N
    return [x for x in range(mod) if x % p == lam and pow(x, p, mod) == x]


def elements(R):
    digit = st.integers(0, R.q - 1)
    return st.lists(digit, min_size=R.N, max_size=R.N).map(R.from_digits)


@pytest.mark.parametrize("p,N", [(5, 3), (3, 4), (7, 2)])
def test_mixed_teichmuller_matches_brute_force(p, N):
    R = LocalRing("mixed", p, 1, N)
    for lam in range(p):
        assert brute_teich_mixed(p, N, lam) == [R.teich(lam)]


def test_teichmuller_examples():
    assert LocalRing("mixed", 5, 1, 3).teich(2) == 57
    E = LocalRing("equal", 5, 1, 4)
    assert teichmuller(E, 3) == scalar(E, 3)
    for R in RINGS:
        assert R.teich(0) == R.zero() and R.teich(1) == R.one()


def test_teichmuller_rejects_non_residue():
    with pytest.raises(ConfigError):
        teichmuller(LocalRing("equal", 3, 1, 4), 3)


def test_char_two_doubling_vanishes():
    R = LocalRing("equal", 2, 1, 4)
    w = R.pi_power(1)
    assert R.add(w, w) == R.zero()


def test_inverse_example_and_valuation():
    R = LocalRing("equal", 3, 1, 3)
    inv = R.inv(R.add(R.one(), R.pi_power(1)))
    assert inv == R.from_digits([1, 2, 1])
    M = LocalRing("mixed", 5, 1, 6)
    assert M.val(M.mul(M.pi_power(2), M.from_int(7))) == 2
    assert scalar_arith(scalar(M, 50), None, "valuation") == 2


def test_non_unit_inverse_raises():
    R = LocalRing("equal", 3, 1, 4)
    with pytest.raises(NonUnitError):
        R.inv(R.pi_power(1))


def test_mixed_backend_needs_prime_field():
    with pytest.raises(ConfigError):
        LocalRing("mixed", 3, 2, 4)
    with pytest.raises(ConfigError):
        coeff_field(4)


def test_text_round_trip():
    R = LocalRing("equal", 3, 1, 4)
    x = R.from_digits([1, 2, 0, 1])
    assert R.parse(R.to_text(x)) == x


def test_scalar_context_mismatch():
    a = scalar(LocalRing("equal", 3, 1, 4), 1)
    b = scalar(LocalRing("equal", 3, 1, 5), 1)
    with pytest.raises(ConfigError):
        a + b


def test_coeff_field_is_a_field():
    for p, m in [(2, 3), (3, 2), (5, 1)]:
        F = coeff_field(p, m)
        for a in range(1, F.q):
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(a, F.q - 1) == 1
        assert F.frob(F.generator(), m) == F.generator()


@pytest.mark.parametrize("R", RINGS, ids=repr)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_ring_axioms(R, data):
    a, b, c = (data.draw(elements(R)) for _ in range(3))
    assert R.add(a, b) == R.add(b, a)
    assert R.mul(a, b) == R.mul(b, a)
    assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
    assert R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))
    assert R.add(a, R.neg(a)) == R.zero()
    if R.is_unit(a):
        assert R.mul(a, R.inv(a)) == R.one()


@pytest.mark.parametrize("R", RINGS, ids=repr)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_teichmuller_is_multiplicative(R, data):
    lam = data.draw(st.integers(0, R.q - 1))
    mu = data.draw(st.integers(0, R.q - 1))
    F = R.residue
    assert R.mul(R.teich(lam), R.teich(mu)) == R.teich(F.mul(lam, mu))
    assert R.reduce(R.teich(lam)) == lam


@pytest.mark.parametrize("R", RINGS, ids=repr)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_digits_round_trip(R, data):
    x = data.draw(elements(R))
    assert R.from_digits(R.digits(x, R.N)) == x
    v = R.val(x)
    if v < R.N:
        assert R.mulpi(R.divpi(x, v), v) == x
