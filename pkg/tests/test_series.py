from fractions import Fraction

import mpmath
import pytest

from eulersums.errors import ToleranceUnreachable
from eulersums.model import make_sum, star
from eulersums.numerics import PrecisionContext, zeta
from eulersums.series import HarmonicState, Strategy, advance, eval_direct, eval_star, evaluate


def _close(a, b, digits):
    return abs(mpmath.mpf(a) - mpmath.mpf(b)) < mpmath.mpf(10) ** (-digits) * max(1, abs(mpmath.mpf(b)))


def test_harmonic_state_prefixes():
    s = HarmonicState.start(zeta_k=[2], l_k=[1, 2], oddh_p=[1])
    s = advance(s)
    assert (s.h, s.l_k[1], s.zeta_k[2], s.oddh_p[1]) == (1, 1, 1, 1)
    s = advance(s)
    assert s.h == Fraction(3, 2) and s.l_k[1] == Fraction(1, 2) and s.l_k[2] == Fraction(3, 4)
    s = advance(s)
    assert s.h == Fraction(11, 6) and s.zeta_k[2] == Fraction(49, 36)


def test_degenerate_sum_is_zeta():
    ctx = PrecisionContext(30)
    r = evaluate(make_sum([], power=2), ctx)
    assert _close(r.value, zeta(2, ctx).value, 30)


@pytest.mark.parametrize(
    "factors,alt,power,printed",
    [
        ([("H", 1, 1)], True, 5, "0.959151942504318157165421137321"),
        ([("L", 1, 1)], False, 5, "1.02005194570145237930331996837"),
        ([("H", 1, 2)], True, 4, "0.889343140860204925167721149031"),
        ([("L", 1, 1), ("Z", 2, 1)], False, 3, "1.15935334356951415975457027807"),
    ],
)
def test_accelerated_reaches_table_values(factors, alt, power, printed):
    r = evaluate(make_sum(factors, alternating=alt, power=power), PrecisionContext(30))
    assert _close(r.value, printed, 25)
    assert r.strategy in (Strategy.EULER_MACLAURIN, Strategy.ALTERNATING_ACCEL)


@pytest.mark.parametrize(
    "factors,power,closed",
    [
        ([("H", 1, 1)], 2, lambda: 2 * mpmath.zeta(3)),
        ([("H", 1, 1)], 3, lambda: mpmath.pi**4 / 72),
        ([("H", 1, 2)], 3, lambda: mpmath.mpf(7) / 2 * mpmath.zeta(5) - mpmath.zeta(2) * mpmath.zeta(3)),
        ([("H", 1, 2)], 2, lambda: mpmath.mpf(17) / 4 * mpmath.zeta(4)),
    ],
)
def test_accelerated_against_classical_closed_forms(factors, power, closed):
    r = evaluate(make_sum(factors, power=power), PrecisionContext(30))
    with mpmath.workdps(50):
        assert _close(r.value, closed(), 30)


def test_direct_matches_accelerated_alternating():
    e = make_sum([("H", 1, 1), ("L", 1, 1)], alternating=True, power=3)
    ctx = PrecisionContext(10)
    d = eval_direct(e, ctx)
    a = evaluate(e, ctx)
    assert d.strategy is Strategy.DIRECT
    assert abs(d.value - a.value) <= d.error_bound + a.error_bound


def test_direct_budget_exhausted():
    e = make_sum([("H", 1, 1)], power=2)
    with pytest.raises(ToleranceUnreachable) as info:
        eval_direct(e, PrecisionContext(30), max_terms=1000)
    assert info.value.terms > 0 and info.value.achieved is not None


def test_star_depth_one_and_two():
    ctx = PrecisionContext(30)
    assert _close(eval_star(star(3), ctx).value, zeta(3, ctx).value, 30)
    r = eval_star(star("b5", "b1"), ctx)
    assert _close(r.value, "0.987441426403299713771650007985", 25)
    r = eval_star(star("b4", 2), ctx)
    assert _close(r.value, "-0.934707899349253255197542851216", 25)


def test_star_depth_three_relation():
    # zs(2,1,1) = (sum H^2/n^2 + sum Z2/n^2) / 2
    ctx = PrecisionContext(20)
    s = eval_star(star(2, 1, 1), ctx).value
    h2 = evaluate(make_sum([("H", 1, 2)], power=2), ctx).value
    z2 = evaluate(make_sum([("Z", 2, 1)], power=2), ctx).value
    assert abs(s - (h2 + z2) / 2) < mpmath.mpf(10) ** -15


def test_star_depth_three_direct_vs_accel():
    ctx = PrecisionContext(10)
    s = star("b3", 1, "b1")
    d = eval_star(s, ctx, "direct")
    a = eval_star(s, ctx, "accel")
    assert abs(d.value - a.value) <= d.error_bound + a.error_bound + mpmath.mpf(10) ** -10


def test_scaled_keeps_precision():
    ctx = PrecisionContext(40)
    r = eval_star(star("b3", "b1"), ctx)
    with mpmath.workdps(50):
        assert abs(r.scaled(-3).value + 3 * r.value) < mpmath.mpf(10) ** -45
