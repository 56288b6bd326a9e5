"""
随机流测试
"""

import numpy as np

from smooth_em.core.rng import RngStream
from smooth_em.utils.helpers import calculate_md5, stable_key


def test_same_seed_same_draws():
    a = RngStream(42).normal(5)
    b = RngStream(42).normal(5)
    np.testing.assert_array_equal(a, b)


def test_split_is_deterministic_and_independent():
    root = RngStream(42)
    first = root.split('fig7', 1, 'cpf_bs').uniform(4)
    again = RngStream(42).split('fig7', 1, 'cpf_bs').uniform(4)
    other = root.split('fig7', 2, 'cpf_bs').uniform(4)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other)


def test_split_does_not_consume_parent():
    root = RngStream(1)
    expected = RngStream(1).uniform(3)
    root.split('child').uniform(10)
    np.testing.assert_array_equal(root.uniform(3), expected)


def test_string_keys_hash_through_md5():
    assert stable_key('cpf_as') == int(calculate_md5('cpf_as')[:8], 16)
    assert stable_key(7) == 7


def test_integers_range():
    values = RngStream(3).integers(5, size=1000)
    assert values.min() >= 0 and values.max() <= 4
