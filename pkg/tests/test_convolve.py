import pytest
from hypothesis import given
from hypothesis import strategies as st

from tricorr import convolve


def school(a, c):
    if not a or not c:
        return []
    out = [0] * (len(a) + len(c) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(c):
            out[i + j] += x * y
    return out


def via(backend_name, a, c):
    # all-zero operands are short-circuited before the packed kernels
    n_out = len(a) + len(c) - 1
    if not (any(a) and any(c)):
        return [0] * n_out
    backend = convolve.get_backend(backend_name)
    B = convolve.slot_width(a, c)
    return backend.convolve_packed(a, c, B, n_out)


def square_via(backend_name, a):
    if not any(a):
        return [0] * (2 * len(a) - 1)
    backend = convolve.get_backend(backend_name)
    B = convolve.slot_width(a, a)
    return backend.square_packed(a, B, 2 * len(a) - 1)


@pytest.mark.parametrize("name", ["gmp", "purepy"])
def test_small_known(name):
    assert via(name, [1, 2], [3, 4, 5]) == [3, 10, 13, 10]
    assert via(name, [-1, 1], [-1, 1]) == [1, -2, 1]
    assert via(name, [7], [9]) == [63]


def test_empty_and_zero_handling():
    assert convolve.convolve([], [1, 2]) == []
    assert convolve.convolve([0, 0], [0]) == [0, 0]
    assert convolve.square([]) == []
    assert convolve.square([0, 0]) == [0, 0, 0]


ints = st.integers(min_value=-(10**12), max_value=10**12)


@given(st.lists(ints, min_size=1, max_size=60), st.lists(ints, min_size=1, max_size=60))
def test_matches_schoolbook(a, c):
    expected = school(a, c)
    assert via("gmp", a, c) == expected
    assert via("purepy", a, c) == expected


@given(st.lists(ints, min_size=1, max_size=50))
def test_square_is_self_convolution(a):
    expected = school(a, a)
    assert square_via("gmp", a) == expected
    assert square_via("purepy", a) == expected


def test_backends_agree_large_magnitudes():
    # coefficient growth in the application reaches hundreds of bits
    a = [(-3) ** i * (i + 1) ** 7 for i in range(120)]
    c = [2 ** (i % 61) - 3 * i for i in range(200)]
    assert via("gmp", a, c) == via("purepy", a, c) == school(a, c)


def test_module_convolve_dispatch():
    assert convolve.convolve([1, 1], [1, 1]) == [1, 2, 1]
    assert convolve.square([1, -1]) == [1, -2, 1]
    assert convolve.backend_name() in ("gmp", "purepy")


def test_slot_width_padding_sufficient():
    # worst case all same sign, max magnitude: the packed digits must not
    # overflow into the neighbor slot
    a = [10**6] * 500
    w = convolve.slot_width(a, a)
    bound = 500 * 10**6 * 10**6
    assert 2 ** (w - 1) > bound


def test_balanced_unpack_signs():
    # alternating signs make negative balanced digits; carry propagation
    # must restore them exactly
    a = [1, -1, 1, -1, 1]
    assert via("purepy", a, a) == school(a, a)
    assert via("gmp", a, a) == school(a, a)
