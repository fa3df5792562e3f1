"""Standard systems and terms: Church numerals, booleans, Inf_n, delta."""
from __future__ import annotations

from .syntax import (
    App,
    Arrow,
    EquationSystem,
    Lam,
    TVar,
    Term,
    Type,
    Var,
    apps,
    arrows,
)

X, Y, T = TVar("X"), TVar("Y"), TVar("T")

NAT: Type = Arrow(Arrow(X, X), Arrow(X, X))
BOOL: Type = arrows(Y, Y, Y)

# X = (X -> Bool) -> Bool
INF_SYSTEM = EquationSystem.build({"X": Arrow(Arrow(X, BOOL), BOOL)}, free={"Y"}, strict=True)
# X = X -> T
DELTA_SYSTEM = EquationSystem.build({"X": Arrow(X, T)}, free={"T"}, strict=True)
# X = X -> X
OMEGA_SYSTEM = EquationSystem.build({"X": Arrow(X, X)}, strict=True)


def _v(i: int) -> TVar:
    return TVar(f"X{i}")


def example_system(case: int) -> EquationSystem:
    """The four good example systems.

    Cases 3 and 4 leave F, G, H open; they are instantiated as
    F = X1 -> X2, G = X3 -> X1, H = X2 -> X3.
    """
    x1, x2, x3, x4, x5 = (_v(i) for i in range(1, 6))
    if case == 1:
        eqs = {"X1": Arrow(arrows(x1, x2, Y), Y), "X2": Arrow(arrows(x2, x1, Y), Y)}
        return EquationSystem.build(eqs, free={"Y"}, strict=True)
    eqs = {"X1": Arrow(x2, x1), "X2": Arrow(x1, x2)}
    if case >= 3:
        eqs["X3"] = Arrow(Arrow(x1, x2), x3)
    if case >= 4:
        eqs["X4"] = arrows(x5, Arrow(x3, x1), x4)
        eqs["X5"] = arrows(x4, Arrow(x2, x3), x5)
    if case not in (2, 3, 4):
        raise ValueError(f"no example case {case}")
    return EquationSystem.build(eqs, strict=True)


def church(n: int, a: Type = X) -> Term:
    body: Term = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return Lam("f", Arrow(a, a), Lam("x", a, body))


def true_(y: Type = Y) -> Term:
    return Lam("x", y, Lam("y", y, Var("x")))


def false_(y: Type = Y) -> Term:
    return Lam("x", y, Lam("y", y, Var("y")))


def swap_app(x_type: Type, y_type: Type) -> Term:
    """\\x. \\y. y x  with the given binder annotations."""
    return Lam("x", x_type, Lam("y", y_type, App(Var("y"), Var("x"))))


# M : (X -> Bool) -> (X -> Bool), used on the n-1 side
M_LOW = swap_app(Arrow(X, BOOL), X)
# M : X -> X (up to the equation), used as the step for the numeral argument
M_HIGH = swap_app(X, Arrow(X, BOOL))


def inf(n: int, power: int | None = None) -> Term:
    """Inf_n = \\x:Nat. x M (\\y. 1) (M^n (\\y. 0)), typable at Nat -> Bool.

    (Inf_n m) reduces to true iff m <= n.  ``power`` overrides the number of
    M's on the right; power = n - 1 decides m < n instead.
    """
    if n < 1:
        raise ValueError("Inf_n needs n >= 1")
    low: Term = Lam("y", X, false_())
    for _ in range(n if power is None else power):
        low = App(M_LOW, low)
    high = apps(Var("x"), M_HIGH, Lam("y", Arrow(X, BOOL), true_()))
    return Lam("x", NAT, App(high, low))


def delta(a: Type = X) -> Term:
    return Lam("x", a, App(Var("x"), Var("x")))


def delta_delta(a: Type = X) -> Term:
    return App(delta(a), delta(a))
