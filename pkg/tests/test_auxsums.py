from fractions import Fraction

import mpmath
import pytest

from eulersums.auxsums import REGISTRY, aux_atom
from eulersums.numerics import PrecisionContext
from eulersums.reduction import eval_atom


def _alt_prefix(n: int) -> list[Fraction]:
    out = [Fraction(0)]
    for k in range(1, n + 1):
        out.append(out[-1] + Fraction(1 if k % 2 else -1, k))
    return out


def test_convolution_prefix_rewrite_exact():
    # C_n = sum_{k<n} L_k(1)/(n-k) = sum_{k<=n} (1+(-1)^k) L_{k-1}(1)/k
    n_max = 80
    L = _alt_prefix(n_max)
    for n in range(1, n_max + 1):
        direct = sum((L[k] / (n - k) for k in range(1, n)), Fraction(0))
        prefix = sum((Fraction(1 + (-1) ** k, k) * L[k - 1] for k in range(1, n + 1)), Fraction(0))
        assert direct == prefix, n


@pytest.mark.parametrize("s", [2, 3])
def test_conv_l_against_averaged_partial_sums(s):
    # oracle: partial sums to N with repeated averaging of consecutive sums
    N = 4000
    with mpmath.workdps(25):
        L = [mpmath.mpf(0)]
        for k in range(1, N + 1):
            L.append(L[-1] + mpmath.mpf((-1) ** (k - 1)) / k)
        C = [mpmath.mpf(0)]
        for k in range(1, N + 1):
            C.append(C[-1] + (1 + (-1) ** k) * L[k - 1] / k)
        partial = [mpmath.mpf(0)]
        for n in range(1, N + 1):
            partial.append(partial[-1] + (-1) ** (n - 1) * C[n] / mpmath.mpf(n) ** s)
        tail = partial[-200:]
        for _ in range(8):
            tail = [(a + b) / 2 for a, b in zip(tail, tail[1:])]
        oracle = tail[-1]
    got = eval_atom(aux_atom("convL", s), PrecisionContext(20)).value
    assert abs(got - oracle) < 1e-7


def test_shift_tail_small_n():
    # shiftH[2,n] = sum_{m>n} H_m (-1)^(m-n)/(m-n); compare first terms of an
    # averaged partial sum
    n = 2
    N = 3000
    with mpmath.workdps(25):
        partial = [mpmath.mpf(0)]
        for m in range(n + 1, n + N + 1):
            partial.append(partial[-1] + mpmath.harmonic(m) * (-1) ** (m - n) / (m - n))
        tail = partial[-200:]
        for _ in range(8):
            tail = [(a + b) / 2 for a, b in zip(tail, tail[1:])]
        oracle = tail[-1]
    got = eval_atom(aux_atom("shiftH", n), PrecisionContext(20)).value
    assert abs(got - oracle) < 1e-7


def test_registry_weights_and_arity():
    assert aux_atom("convL", 3).weight == 5
    assert aux_atom("shiftL", 7).weight == 2
    with pytest.raises(ValueError):
        aux_atom("convL", 1, 2)
    assert set(REGISTRY) == {"convL", "shiftL", "shiftH"}
