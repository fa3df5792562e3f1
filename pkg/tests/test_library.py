import pytest

from rectypes.checker import EMPTY, check
from rectypes.congruence import build_index
from rectypes.library import BOOL, INF_SYSTEM, NAT, church, example_system, false_, inf, true_
from rectypes.reduction import normalize
from rectypes.syntax import App, Arrow, alpha_eq

INDEX = build_index(INF_SYSTEM)


def verdict(term):
    nf = normalize(term, fuel=10000, index=INDEX).normal_form
    if alpha_eq(nf, true_()):
        return True
    assert alpha_eq(nf, false_())
    return False


@pytest.mark.parametrize("n", [1, 2, 3])
def test_inf_compares_with_at_most(n):
    assert [verdict(App(inf(n), church(m))) for m in range(6)] == [m <= n for m in range(6)]


@pytest.mark.parametrize("n", [2, 3])
def test_one_fewer_step_compares_strictly(n):
    variant = inf(n, power=n - 1)
    assert check(EMPTY, variant, Arrow(NAT, BOOL), INDEX)
    assert [verdict(App(variant, church(m))) for m in range(5)] == [m < n for m in range(5)]


def test_inf_rejects_zero():
    with pytest.raises(ValueError):
        inf(0)


def test_unknown_example_case():
    with pytest.raises(ValueError):
        example_system(7)
