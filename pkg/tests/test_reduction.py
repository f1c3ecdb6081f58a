import itertools

import mpmath
import pytest

from eulersums.errors import DivergentError
from eulersums.model import LinearCombo, make_sum, star
from eulersums.numerics import PrecisionContext
from eulersums.parser import parse, parse_combo, render, render_combo
from eulersums.reduction import (
    CatalogError,
    combo_weights,
    default_catalog,
    eval_combo,
    lookup_linear,
    parse_catalog,
    reduce,
    residual_check,
)
from eulersums.series import evaluate

SHAPES = [
    [("H", 1, 1)],
    [("H", 1, 2)],
    [("L", 1, 1)],
    [("L", 1, 2)],
    [("H", 1, 1), ("L", 1, 1)],
    [("Z", 2, 1)],
    [("Z", 2, 2)],
    [("L", 2, 1), ("Z", 2, 1)],
    [("L", 1, 1), ("Z", 2, 1)],
]


def _rule_instances():
    out = []
    for rule in default_catalog().rules:
        for shape, alt, odd, p in itertools.product(SHAPES, (False, True), (False, True), range(1, 7)):
            try:
                e = make_sum(shape, alternating=alt, power=p, odd=odd)
            except (DivergentError, ValueError):
                continue
            if e.weight > 7:
                continue
            env = rule.match(render(e))
            if env is not None:
                out.append((rule, e, env))
    return out


INSTANCES = _rule_instances()


def test_every_rule_has_instances():
    matched = {r.id for r, _, _ in INSTANCES}
    assert matched == {r.id for r in default_catalog().rules}


@pytest.mark.parametrize("rule,e,env", INSTANCES, ids=lambda x: getattr(x, "id", None) or (render(x) if hasattr(x, "factors") else str(x)))
def test_rule_weight_homogeneous_and_numerically_true(rule, e, env):
    combo = rule.emit(env)
    assert combo_weights(combo) == {e.weight}
    ctx = PrecisionContext(20)
    assert abs(evaluate(e, ctx).value - eval_combo(combo, ctx).value) < mpmath.mpf(10) ** -12


def test_example_h2_alt_weight4():
    red = reduce(parse("sum(H^2, alt)/n^2"))
    assert render_combo(red.result) == "41/16*z4 + 1/2*z2*ln2^2 - 1/12*ln2^4 - 7/4*z3*ln2 - 2*li4h"
    assert red.trace == ("w4.h2-alt",)
    assert red.complete


def test_example_h2_alt_weight6_keeps_star_atoms():
    text = render_combo(reduce(parse("sum(H^2, alt)/n^4")).result)
    assert "- zs(b4,2)" in text and "- 5*zs(b5,1)" in text
    assert "-175/32*z6" in text


def test_example_hl_weight4():
    red = reduce(parse("sum(H*L1)/n^2"))
    assert red.result == parse_combo("43/16*z4 + 3/4*z2*ln2^2 - 1/8*ln2^4 - 3*li4h")


def test_linear_closed_forms():
    assert lookup_linear(star("b1", "b1")) == parse_combo("1/2*z2 + 1/2*ln2^2")
    got = reduce(parse("sum(H, alt)/n^3")).result
    assert got == parse_combo("-2*li4h + 11/4*z4 + 1/2*z2*ln2^2 - 1/12*ln2^4 - 7/4*z3*ln2")
    assert lookup_linear(star("b5", 1)) is None


def test_irreducible_input_is_returned_as_residual():
    e = parse("sum(H^3)/n^2")
    red = reduce(e)
    assert not red.complete
    assert red.residual == e
    assert render_combo(red.result) == "sum(H^3)/n^2"
    lhs, rhs, diff = residual_check(red, PrecisionContext(15))
    assert diff == 0


def test_trace_deterministic():
    e = parse("sum(L1^2, alt)/n^5")
    assert reduce(e).trace == reduce(e).trace
    assert reduce(e).result == reduce(e).result


def test_external_rules_flagged_and_switchable():
    e = parse("sum(H^2)/n^2")
    on = reduce(e)
    assert any(t.endswith("[external]") for t in on.trace)
    off = reduce(e, allow_external_identities=False)
    assert not any(t.endswith("[external]") for t in off.trace)
    assert render_combo(off.result) == "zs(2,2) + 2*zs(3,1)"
    ctx = PrecisionContext(20)
    assert abs(eval_combo(on.result, ctx).value - eval_combo(off.result, ctx).value) < mpmath.mpf(10) ** -15


def test_constants_and_odd_denominators():
    assert reduce(parse("sum(1)/n^3")).result == parse_combo("z3")
    assert reduce(parse("sum(1, alt)/n^3")).result == parse_combo("zb3")
    assert reduce(parse("sum(1)/(2n+1)^2")).result == parse_combo("3/4*z2 - 1")


def test_eval_combo_basics():
    ctx = PrecisionContext(20)
    assert eval_combo(LinearCombo(), ctx).value == 0
    r = eval_combo(parse_combo("z2"), ctx)
    assert abs(r.value - mpmath.zeta(2)) < mpmath.mpf(10) ** -15


def test_catalog_errors():
    with pytest.raises(CatalogError):
        parse_catalog("catalog-version 99\n")
    with pytest.raises(CatalogError):
        parse_catalog("catalog-version 1\nrule x sum(H)/n^{q}\n [1] z{q+1}\n")
    with pytest.raises(CatalogError):
        parse_catalog("catalog-version 1\nbogus x\n")
