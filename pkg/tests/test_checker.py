import random

import pytest

from oracles import TermGen, random_type
from rectypes.checker import (
    EMPTY,
    ArgumentTypeMismatch,
    Context,
    MuBodyNotBottom,
    NamedTermTypeMismatch,
    TypeCheckError,
    UnboundVariable,
    check,
    infer,
    subject_reduction_probe,
)
from rectypes.congruence import CongruenceIndex, NotAFunctionType, build_index
from rectypes.library import (
    BOOL,
    DELTA_SYSTEM,
    INF_SYSTEM,
    NAT,
    church,
    delta,
    delta_delta,
    example_system,
    false_,
    inf,
    true_,
)
from rectypes.parser import parse_term, parse_type
from rectypes.syntax import App, Arrow, Bottom, Lam, Mu, Name, TVar, Var, neg, subst

X, Y, T, U, V = (TVar(n) for n in "XYTUV")
A, B = TVar("A"), TVar("B")
PLAIN = CongruenceIndex()


def test_church_numeral_has_nat_type():
    assert infer(EMPTY, church(2), PLAIN) == NAT
    assert check(EMPTY, church(1), NAT, PLAIN)


def test_booleans_have_bool_type():
    assert check(EMPTY, true_(), BOOL, PLAIN)
    assert check(EMPTY, false_(), BOOL, PLAIN)


def test_identity_mismatch():
    assert not check(EMPTY, Lam("x", A, Var("x")), Arrow(B, B), PLAIN)


def test_delta_under_negative_equation():
    idx = build_index(DELTA_SYSTEM)
    assert idx.decide(infer(EMPTY, delta(), idx), Arrow(X, T))
    assert check(EMPTY, delta_delta(), T, idx)


def test_delta_needs_the_equation():
    with pytest.raises(NotAFunctionType):
        infer(EMPTY, delta(), PLAIN)


def test_mu_name_roundtrip():
    ctx = Context.of({"x": U})
    assert infer(ctx, parse_term("mu a:U. [a] x"), PLAIN) == U


@pytest.mark.parametrize("n", [1, 2, 3])
def test_inf_has_comparison_type(n):
    assert check(EMPTY, inf(n), Arrow(NAT, BOOL), build_index(INF_SYSTEM))


def test_inf_needs_the_equation():
    with pytest.raises((TypeCheckError, NotAFunctionType)):
        infer(EMPTY, inf(1), PLAIN)


def test_error_kinds():
    with pytest.raises(UnboundVariable):
        infer(EMPTY, Var("x"), PLAIN)
    with pytest.raises(UnboundVariable):
        infer(Context.of({"x": U}), Name("a", Var("x")), PLAIN)
    with pytest.raises(ArgumentTypeMismatch) as info:
        infer(Context.of({"f": Arrow(A, B), "y": B}), App(Var("f"), Var("y")), PLAIN)
    assert "A" in str(info.value) and "B" in str(info.value)
    with pytest.raises(MuBodyNotBottom):
        infer(Context.of({"x": U}), Mu("a", U, Var("x")), PLAIN)
    with pytest.raises(NamedTermTypeMismatch):
        infer(Context.of({"x": V}), Mu("a", U, Name("a", Var("x"))), PLAIN)


def test_argument_checked_modulo_congruence():
    idx = build_index(INF_SYSTEM)
    f = Var("f")
    ctx = Context.of({"f": Arrow(Arrow(Arrow(X, BOOL), BOOL), Y), "x": X})
    assert infer(ctx, App(f, Var("x")), idx) == Y


def test_context_rejects_shared_names():
    with pytest.raises(ValueError):
        Context.of({"a": U}, {"a": V})


def test_subject_reduction_single_beta():
    ctx = Context.of({"y": X})
    trace = subject_reduction_probe(ctx, App(Lam("x", X, Var("x")), Var("y")), PLAIN, steps=1)
    assert [j.type for j in trace] == [X, X]
    assert trace[1].term == Var("y")


def test_subject_reduction_mu_step_updates_annotation():
    ctx = Context.of({"f": Arrow(U, V), "n": U})
    m = App(Mu("a", Arrow(U, V), Name("a", Var("f"))), Var("n"))
    trace = subject_reduction_probe(ctx, m, PLAIN, steps=5)
    assert len(trace) == 2
    assert trace[1].term == Mu("a", V, Name("a", App(Var("f"), Var("n"))))
    assert trace[1].type == V


def test_subject_reduction_inf_on_numeral():
    idx = build_index(INF_SYSTEM)
    trace = subject_reduction_probe(EMPTY, App(inf(1), church(2)), idx, steps=50)
    assert len(trace) == 51
    assert all(idx.decide(j.type, BOOL) for j in trace)


def test_inference_independent_of_interning_order():
    rng = random.Random(3)
    system = example_system(4)
    gen = TermGen(random.Random(4), names=tuple(system.variables), mu=True, defs=dict(system.equations))
    samples = [s for s in (gen.sample() for _ in range(60)) if s]
    base = build_index(system)
    for _ in range(3):
        shuffled = build_index(system)
        extra = [random_type(rng, system.variables, rng.randint(1, 6)) for _ in range(40)]
        rng.shuffle(extra)
        for t in extra:
            shuffled.intern(t)
        for m, ty in samples:
            a, b = infer(EMPTY, m, base), infer(EMPTY, m, shuffled)
            assert base.decide(a, b) and shuffled.decide(a, ty)


@pytest.mark.parametrize("system", [None, INF_SYSTEM, example_system(1)], ids=["plain", "inf", "case1"])
def test_weakening_and_substitution(system):
    rng = random.Random(11)
    idx = build_index(system) if system else PLAIN
    names = tuple(system.variables) if system else ("A", "B")
    defs = dict(system.equations) if system else {}
    gen = TermGen(rng, names=names, mu=True, defs=defs)
    checked = 0
    for _ in range(150):
        u = random_type(rng, names, rng.randint(1, 3))
        got = gen.sample(env={"v": u}, depth=3)
        arg = gen.sample(t=u, env={}, depth=2)
        if not got or not arg:
            continue
        (m, t), (n, _) = got, arg
        ctx = Context.of({"v": u})
        # weakening: an unused extra declaration changes nothing
        wide = Context.of({"v": u, "unused": Arrow(u, u)})
        assert idx.decide(infer(wide, m, idx), infer(ctx, m, idx))
        # substitution: the closed argument can replace v
        assert idx.decide(infer(EMPTY, subst(m, "v", n), idx), t)
        checked += 1
    assert checked > 50


def test_parsed_annotations_with_negation():
    m = parse_term("\\k:~~A. mu a:A. k (\\y:A. [a] y)")
    assert infer(EMPTY, m, PLAIN) == Arrow(neg(neg(A)), A) == parse_type("~~A -> A")
    assert infer(Context.of({"z": Bottom}), Var("z"), PLAIN) is Bottom
