import random

import pytest
from hypothesis import given, settings, strategies as st

from modp_gl2.errors import DomainError
from modp_gl2.gl2 import (MINUS, PLUS, InI, SubgroupSpec, Translated, cartan_word, diag, equal_mod_precision,
                          from_ints, g_inv, g_lambda, g_mul, identity, ip_rewrite, iwahori_factor, k_coset,
                          length, make, member, parse, pi_elem, random_element, random_i1, random_k, reassemble,
                          s_elem, to_text, upper, vertex_decompose)
from modp_gl2.localring import LocalRing

RINGS = [LocalRing("equal", 2, 1, 10), LocalRing("equal", 3, 1, 10), LocalRing("equal", 2, 2, 10),
         LocalRing("mixed", 3, 1, 10), LocalRing("mixed", 5, 1, 10)]


@pytest.fixture
def R():
    return LocalRing("equal", 3, 1, 10)


def test_pi_squared_and_pi_s(R):
    w = R.pi_power(1)
    assert g_mul(pi_elem(R), pi_elem(R)) == make(R, (w, R.zero(), R.zero(), w))
    assert g_mul(pi_elem(R), s_elem(R)) == make(R, (R.one(), R.zero(), R.zero(), w))
    for lam in range(R.q):
        assert g_mul(g_inv(g_lambda(R, lam)), g_lambda(R, lam)) == identity(R)


def test_membership_examples():
    F5 = LocalRing("equal", 5, 1, 8)
    assert member(from_ints(F5, 1, 3, 0, 1), "I1")
    assert not member(s_elem(F5), "I")
    w, w2 = F5.pi_power(1), F5.pi_power(2)
    one_w2 = F5.add(F5.one(), w2)
    assert member(make(F5, (one_w2, w, w2, one_w2)), SubgroupSpec("In", 2))
    assert not member(make(F5, (one_w2, F5.one(), w2, one_w2)), SubgroupSpec("In", 2))


def test_cartan_word_examples(R):
    w = R.pi_power(1)
    word = cartan_word(make(R, (w, R.zero(), R.zero(), R.one())))
    assert (word.side, word.digits, word.length) == (PLUS, (0,), 1)
    assert word.tail == identity(R)
    word = cartan_word(make(R, (R.one(), R.zero(), R.zero(), w)))
    assert (word.side, word.digits, word.length) == (MINUS, (), 1)
    assert word.tail == s_elem(R)
    mu, nu = 2, 1
    b = R.add(R.teich(mu), R.mulpi(R.teich(nu), 1))
    word = cartan_word(make(R, (R.pi_power(2), b, R.zero(), R.one())))
    assert (word.side, word.digits) == (PLUS, (mu, nu))
    assert word.tail == identity(R)


def test_length_examples(R):
    assert length(identity(R)) == 0
    assert length(random_k(R, random.Random(0))) == 0
    assert length(pi_elem(R)) == 1
    assert length(g_mul(g_lambda(R, 1), g_lambda(R, 2))) == 2


def test_iwahori_factor_examples(R):
    u, d, l = iwahori_factor(identity(R))
    assert u == d == l == identity(R)
    b = R.from_digits([1, 2])
    u, d, l = iwahori_factor(upper(R, b))
    assert (u, d, l) == (upper(R, b), identity(R), identity(R))
    one_w = R.add(R.one(), R.pi_power(1))
    g = make(R, (one_w, R.pi_power(1), R.pi_power(1), one_w))
    u, d, l = iwahori_factor(g)
    assert g_mul(g_mul(u, d), l) == g
    with pytest.raises(DomainError):
        iwahori_factor(s_elem(R))


def test_k_coset_examples():
    R = LocalRing("equal", 5, 1, 8)
    k = from_ints(R, 1, 2, 0, 3)
    assert k_coset(k) == InI(k)
    c = k_coset(s_elem(R))
    assert isinstance(c, Translated) and c.lam == 0 and c.i == identity(R)
    c = k_coset(from_ints(R, 2, 1, 1, 0))
    assert isinstance(c, Translated) and c.lam == 2 and c.i == identity(R)
    with pytest.raises(DomainError):
        k_coset(pi_elem(R))


def test_ip_rewrite_stays_on_sphere(R):
    rng = random.Random(5)
    for _ in range(30):
        i = random_i1(R, rng)
        n = rng.randrange(0, 4)
        x = R.from_digits([rng.randrange(R.q) for _ in range(n)])
        x2, i2 = ip_rewrite(i, n, x)
        h = make(R, (R.pi_power(n), x, R.zero(), R.one()))
        h2 = make(R, (R.pi_power(n), x2, R.zero(), R.one()))
        assert g_mul(i, h) == g_mul(h2, i2)
        assert member(i2, "IZ")


def test_text_round_trip(R):
    g = random_element(R, random.Random(2))
    assert parse(R, to_text(g)) == g


@pytest.mark.parametrize("R", RINGS, ids=repr)
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_decompositions_reassemble(R, seed):
    rng = random.Random(seed)
    g = random_element(R, rng)
    word = cartan_word(g)
    assert equal_mod_precision(reassemble(word), g)
    assert member(word.tail, "KZ")
    assert length(g) == word.length
    i = random_i1(R, rng)
    u, d, l = iwahori_factor(i)
    assert equal_mod_precision(g_mul(g_mul(u, d), l), i)
    k = random_k(R, rng)
    c = k_coset(k)
    if isinstance(c, InI):
        assert member(c.i, "I") and c.i == k
    else:
        rep = make(R, (R.teich(c.lam), R.one(), R.one(), R.zero()))
        assert member(c.i, "I") and g_mul(rep, c.i) == k


@pytest.mark.parametrize("R", RINGS[:3], ids=repr)
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_group_laws(R, seed):
    rng = random.Random(seed)
    a, b, c = (random_element(R, rng, max_len=2, digits=3) for _ in range(3))
    assert g_mul(g_mul(a, b), c) == g_mul(a, g_mul(b, c))
    assert g_mul(a, g_inv(a)) == identity(R)
    dec = vertex_decompose(a)
    assert len(dec.vertex[1]) + dec.vertex[0] == length(a)


def test_diag_scalar_in_z(R):
    w = R.pi_power(1)
    assert member(diag(R, w, w), "Z")
    assert member(diag(R, w, w), "KZ")
    assert length(diag(R, w, w)) == 0
