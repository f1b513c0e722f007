import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from bvsquares.characters import (
    CharacterGroup,
    char_table_rows,
    character_group,
    chars_with_conductor_in,
    conductor,
    divisibility_chain_check,
    eval_char,
    is_primitive,
    primitive_part,
    primitive_root,
)
from bvsquares.errors import BudgetError, ChainError, ConfigurationError, RangeError


def _value_matrix(m):
    G = character_group(m)
    return G, G.values(G.characters(), np.arange(1, m + 1))


def test_primitive_roots():
    assert primitive_root(7, 7) == 3
    assert primitive_root(9, 3) == 2
    assert primitive_root(25, 5) == 2


@pytest.mark.parametrize("m", [1, 2, 4, 8, 9, 12, 16, 45, 64, 72, 100])
def test_group_size_is_phi(m):
    assert len(character_group(m)) == oracles.phi_td(m)


@pytest.mark.parametrize("m", [3, 8, 15, 16, 24, 49, 60, 96])
def test_orthogonality(m):
    G, V = _value_matrix(m)
    phi = len(G)
    gram = V @ V.conj().T
    assert np.allclose(gram, phi * np.eye(phi), atol=1e-9 * phi)
    units = np.array([math.gcd(n, m) == 1 for n in range(1, m + 1)])
    col = V.conj().T @ V
    expect = np.zeros((m, m), dtype=complex)
    expect[np.ix_(units, units)] = phi * np.eye(units.sum())
    assert np.allclose(col, expect, atol=1e-9 * phi)


@pytest.mark.parametrize("m", [5, 8, 9, 16, 27, 32, 36, 50, 64, 120])
def test_conductor_bruteforce(m):
    G, V = _value_matrix(m)
    for chi, row in zip(G, V):
        assert conductor(chi) == oracles.conductor_bruteforce(row, m)


def test_mod9_conductors():
    G = character_group(9)
    assert sorted(chi.conductor for chi in G) == [1, 3, 9, 9, 9, 9]
    assert len(chars_with_conductor_in(9, (1, 3))) == 1


def test_primitive_count_mod_p_squared():
    for p in (3, 5, 7):
        n = sum(is_primitive(chi) for chi in character_group(p * p))
        assert n == (p - 1) ** 2


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 400), st.data())
def test_multiplicative(m, data):
    G = character_group(m)
    chi = data.draw(st.sampled_from(G.characters()))
    a, b = data.draw(st.integers(1, 3 * m)), data.draw(st.integers(1, 3 * m))
    assert abs(eval_char(chi, a * b) - chi(a) * chi(b)) < 1e-9
    assert chi(a) == chi(a + m)
    if math.gcd(a, m) > 1:
        assert chi(a) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 300), st.data())
def test_primitive_part_induces(m, data):
    chi = data.draw(st.sampled_from(character_group(m).characters()))
    psi = primitive_part(chi)
    assert psi.modulus == chi.conductor and psi.is_primitive()
    for n in range(1, m + 1):
        if math.gcd(n, m) == 1:
            assert abs(chi(n) - psi(n)) < 1e-9


@pytest.mark.parametrize("q", range(1, 16))
def test_divisibility_chain(q):
    for chi in character_group(q * q):
        g, k, t, v = divisibility_chain_check(q, chi)
        assert g * k * k == chi.conductor and q * q == v * g * k * k
        assert v == g * t * t and q == g * t * k


def test_chain_wrong_modulus():
    with pytest.raises(ConfigurationError):
        divisibility_chain_check(3, character_group(10).principal())


def test_chars_window_split():
    for chi, (g, k) in chars_with_conductor_in(72, (2, 36)):
        assert 2 < chi.conductor <= 36 and g * k * k == chi.conductor


def test_char_table_rows():
    rows = char_table_rows(9)
    assert len(rows) == 6 and rows[0]["label"] == "(0)" and rows[0]["conductor"] == 1
    assert sum(r["primitive"] for r in rows) == 4


def test_budgets():
    with pytest.raises(BudgetError):
        character_group(10**6 + 1)
    with pytest.raises(ConfigurationError):
        CharacterGroup(0)
    with pytest.raises(ConfigurationError):
        character_group(9).character((7,))


def test_range_with_table(table_small):
    with pytest.raises(RangeError):
        character_group(10**5 + 3, table_small)


def test_phase_exact():
    chi = character_group(7).character((1,))
    assert chi.phase(3) == Fraction(1, 6)
    assert chi.phase(7) is None
