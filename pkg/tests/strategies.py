"""Hypothesis strategies for types and terms."""
from hypothesis import strategies as st

from rectypes.syntax import App, Arrow, Atom, Bottom, Lam, Mu, Name, TVar, Var

LAMBDA_NAMES = ["x", "y", "z", "w"]
MU_NAMES = ["a", "b", "c"]


def types(names=("X", "Y"), atoms=(), bottom=True, max_leaves=6):
    leaves = [st.sampled_from([TVar(n) for n in names])]
    if atoms:
        leaves.append(st.sampled_from([Atom(a) for a in atoms]))
    if bottom:
        leaves.append(st.just(Bottom))
    return st.recursive(st.one_of(leaves), lambda t: st.builds(Arrow, t, t), max_leaves=max_leaves)


def terms(max_leaves=12, mu=True):
    """Arbitrary (not necessarily typable) terms over disjoint name pools."""
    ann = types(max_leaves=3)
    leaf = st.builds(Var, st.sampled_from(LAMBDA_NAMES))

    def extend(t):
        opts = [
            st.builds(Lam, st.sampled_from(LAMBDA_NAMES), ann, t),
            st.builds(App, t, t),
        ]
        if mu:
            opts += [
                st.builds(Mu, st.sampled_from(MU_NAMES), ann, t),
                st.builds(Name, st.sampled_from(MU_NAMES), t),
            ]
        return st.one_of(opts)

    return st.recursive(leaf, extend, max_leaves=max_leaves)
