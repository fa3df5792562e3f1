"""Independent reference implementations used to derive expected values.

Nothing here shares code paths with the package beyond the AST classes:
substitution goes through de Bruijn terms, the congruence oracle rewrites
types breadth-first, and eta is computed by plain recursion over all
reduction sequences without memoization.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from rectypes.syntax import App, Arrow, Atom, Bottom, Lam, Mu, Name, TVar, Var

# ---------------------------------------------------------------- nameless terms
#
# ("v", k) bound lambda index, ("fv", x) free lambda var, ("lam", T, b),
# ("app", f, a), ("mu", T, b), ("nm", ("b", k) | ("f", a), m).


def to_db(m, lam=(), mus=()):
    if isinstance(m, Var):
        return ("v", lam.index(m.name)) if m.name in lam else ("fv", m.name)
    if isinstance(m, Lam):
        return ("lam", m.ann, to_db(m.body, (m.var,) + lam, mus))
    if isinstance(m, App):
        return ("app", to_db(m.fun, lam, mus), to_db(m.arg, lam, mus))
    if isinstance(m, Mu):
        return ("mu", m.ann, to_db(m.body, lam, (m.var,) + mus))
    a = ("b", mus.index(m.var)) if m.var in mus else ("f", m.var)
    return ("nm", a, to_db(m.arg, lam, mus))


def shift(t, d, lc=0, mc=0, dm=0):
    """Shift free lambda indices >= lc by d and free mu indices >= mc by dm."""
    tag = t[0]
    if tag == "v":
        return ("v", t[1] + d) if t[1] >= lc else t
    if tag == "fv":
        return t
    if tag == "lam":
        return ("lam", t[1], shift(t[2], d, lc + 1, mc, dm))
    if tag == "app":
        return ("app", shift(t[1], d, lc, mc, dm), shift(t[2], d, lc, mc, dm))
    if tag == "mu":
        return ("mu", t[1], shift(t[2], d, lc, mc + 1, dm))
    a = t[1]
    if a[0] == "b" and a[1] >= mc:
        a = ("b", a[1] + dm)
    return ("nm", a, shift(t[2], d, lc, mc, dm))


def db_subst(t, k, s, depth_mu=0):
    """Replace lambda index k by s (s already shifted for k binders)."""
    tag = t[0]
    if tag == "v":
        if t[1] == k:
            return shift(s, k, 0, 0, depth_mu) if k or depth_mu else s
        return ("v", t[1] - 1) if t[1] > k else t
    if tag == "fv":
        return t
    if tag == "lam":
        return ("lam", t[1], db_subst(t[2], k + 1, s, depth_mu))
    if tag == "app":
        return ("app", db_subst(t[1], k, s, depth_mu), db_subst(t[2], k, s, depth_mu))
    if tag == "mu":
        return ("mu", t[1], db_subst(t[2], k, s, depth_mu + 1))
    return ("nm", t[1], db_subst(t[2], k, s, depth_mu))


def db_mu_subst(t, j, s, lc=0, mc=0):
    """[j] P  ->  [j] (P s), s shifted as we go under binders."""
    tag = t[0]
    if tag in ("v", "fv"):
        return t
    if tag == "lam":
        return ("lam", t[1], db_mu_subst(t[2], j, s, lc + 1, mc))
    if tag == "app":
        return ("app", db_mu_subst(t[1], j, s, lc, mc), db_mu_subst(t[2], j, s, lc, mc))
    if tag == "mu":
        return ("mu", t[1], db_mu_subst(t[2], j + 1, s, lc, mc + 1))
    inner = db_mu_subst(t[2], j, s, lc, mc)
    if t[1] == ("b", j):
        return ("nm", t[1], ("app", inner, shift(s, lc, 0, 0, mc)))
    return ("nm", t[1], inner)


def _cod(t):
    return t.cod if isinstance(t, Arrow) else t


def db_reducts(t):
    out = []
    tag = t[0]
    if tag == "app":
        f, a = t[1], t[2]
        if f[0] == "lam":
            out.append(db_subst(f[2], 0, a))
        elif f[0] == "mu":
            out.append(("mu", _cod(f[1]), db_mu_subst(f[2], 0, shift(a, 0, 0, 0, 1))))
        out += [("app", r, a) for r in db_reducts(f)]
        out += [("app", f, r) for r in db_reducts(a)]
    elif tag in ("lam", "mu"):
        out += [(tag, t[1], r) for r in db_reducts(t[2])]
    elif tag == "nm":
        out += [("nm", t[1], r) for r in db_reducts(t[2])]
    return out


def eta_bruteforce(m, limit=200000):
    """Longest reduction length by unmemoized recursion; raises if too large."""
    budget = [limit]

    def go(t):
        budget[0] -= 1
        if budget[0] < 0:
            raise RuntimeError("oracle budget exceeded")
        rs = db_reducts(t)
        return max((1 + go(r) for r in rs), default=0)

    return go(to_db(m))


def normal_forms_bruteforce(m, limit=20000):
    seen, todo, nfs = set(), [to_db(m)], set()
    while todo:
        t = todo.pop()
        if t in seen:
            continue
        seen.add(t)
        if len(seen) > limit:
            raise RuntimeError("oracle budget exceeded")
        rs = db_reducts(t)
        if not rs:
            nfs.add(t)
        todo += rs
    return nfs


# ---------------------------------------------------------------- bounded rewriting


def _rewrites(t, defs, inv):
    """One X_i <-> F_i rewrite anywhere in t."""
    if isinstance(t, TVar) and t.name in defs:
        yield defs[t.name]
    if t in inv:
        for name in inv[t]:
            yield TVar(name)
    if isinstance(t, Arrow):
        for d in _rewrites(t.dom, defs, inv):
            yield Arrow(d, t.cod)
        for c in _rewrites(t.cod, defs, inv):
            yield Arrow(t.dom, c)


def rewrite_closure(t, system, depth):
    defs = system.defs
    inv: dict = {}
    for n, f in system.equations:
        inv.setdefault(f, []).append(n)
    seen = {t: 0}
    frontier = [t]
    for d in range(1, depth + 1):
        nxt = []
        for s in frontier:
            for r in _rewrites(s, defs, inv):
                if r not in seen:
                    seen[r] = d
                    nxt.append(r)
        frontier = nxt
    return seen


def rewrite_closure_saturated(t, system, depth):
    """(closure, saturated): saturated means the whole class of t was enumerated."""
    defs = system.defs
    inv: dict = {}
    for n, f in system.equations:
        inv.setdefault(f, []).append(n)
    seen = {t}
    frontier = [t]
    for _ in range(depth):
        nxt = []
        for s in frontier:
            for r in _rewrites(s, defs, inv):
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
        if not frontier:
            return seen, True
    return seen, False


def rewrite_verdict(u, v, system, depth):
    """Bidirectional bounded search for a conversion u <->* v of length <= depth.

    True: a conversion was found.  False: one side's class was enumerated
    completely without meeting the other.  None: inconclusive.
    """
    if u == v:
        return True
    left = (depth + 1) // 2
    cu, sat_u = rewrite_closure_saturated(u, system, left)
    if v in cu:
        return True
    if sat_u:
        return False
    cv, sat_v = rewrite_closure_saturated(v, system, depth - left)
    if cu & cv:
        return True
    if sat_v:
        return False
    return None


def rewrite_equal(u, v, system, depth):
    """True if u and v meet within depth rewrites on each side, else None."""
    if u == v:
        return True
    cu = rewrite_closure(u, system, depth)
    cv = rewrite_closure(v, system, depth)
    return True if cu.keys() & cv.keys() else None


# ---------------------------------------------------------------- generators


def random_type(rng: random.Random, names, size: int, atoms=(), bottom=False):
    leaves = [TVar(n) for n in names] + [Atom(a) for a in atoms] + ([Bottom] if bottom else [])
    if size <= 1:
        return rng.choice(leaves)
    left = rng.randint(1, size - 2) if size > 2 else 1
    return Arrow(random_type(rng, names, left, atoms, bottom), random_type(rng, names, max(1, size - 1 - left), atoms, bottom))


def random_rewrite(t, system, steps, rng):
    """Apply up to ``steps`` random X <-> F rewrites to t."""
    defs = system.defs
    inv: dict = {}
    for n, f in system.equations:
        inv.setdefault(f, []).append(n)
    for _ in range(steps):
        options = list(_rewrites(t, defs, inv))
        if not options:
            break
        t = rng.choice(options)
    return t


def all_types(names, size):
    """Every type with exactly ``size`` nodes over the given variable names."""
    if size == 1:
        return [TVar(n) if n != "bot" else Bottom for n in names]
    out = []
    for left in range(1, size - 1, 2):
        right = size - 1 - left
        for a in all_types(names, left):
            for b in all_types(names, right):
                out.append(Arrow(a, b))
    return out


@dataclass
class TermGen:
    """Type-directed generator of typable terms with beta- and mu-redexes.

    With ``defs`` (a map X -> F) the generator also folds and unfolds
    equations, so the produced terms need the congruence to type-check.
    Generation may fail and return None; callers retry.
    """

    rng: random.Random
    names: tuple = ("A", "B")
    mu: bool = True
    defs: dict = field(default_factory=dict)
    counter: int = 0

    def fresh(self, prefix):
        self.counter += 1
        return f"{prefix}{self.counter}"

    def ty(self, size=3):
        return random_type(self.rng, self.names, size)

    def _convert(self, t):
        """Replace t by a congruent type one fold/unfold away (sometimes)."""
        if not self.defs or self.rng.random() > 0.3:
            return t
        if isinstance(t, TVar) and t.name in self.defs:
            return self.defs[t.name]
        folds = [TVar(n) for n, f in self.defs.items() if f == t]
        return self.rng.choice(folds) if folds else t

    def _unfold_head(self, u):
        seen = set()
        while isinstance(u, TVar) and u.name in self.defs and u.name not in seen:
            seen.add(u.name)
            u = self.defs[u.name]
        return u

    def _heads(self, env, t):
        return [(x, u) for x, u in env.items() if self._spine_len(u, t) is not None]

    def _spine_len(self, u, t, limit=3):
        for k in range(limit + 1):
            if u == t:
                return k
            u = self._unfold_head(u)
            if not isinstance(u, Arrow):
                return None
            u = u.cod
        return None

    def term(self, t, env, menv, depth):
        rng = self.rng
        t = self._convert(t)
        usable = [x for x, u in env.items() if u == t]
        if depth <= 0:
            if usable:
                return Var(rng.choice(usable))
            if depth < -2:
                return None
            arrow = self._unfold_head(t)
            if isinstance(arrow, Arrow):
                x = self.fresh("x")
                body = self.term(arrow.cod, {**env, x: arrow.dom}, menv, depth - 1)
                return None if body is None else Lam(x, arrow.dom, body)
            heads = self._heads(env, t)
            if heads:
                return self._spine(rng.choice(heads), t, env, menv, depth - 1)
            return None
        choice = rng.random()
        if choice < 0.2 and usable:
            return Var(rng.choice(usable))
        if choice < 0.45:
            a = self.ty(rng.randint(1, 3))
            x = self.fresh("x")
            body = self.term(t, {**env, x: a}, menv, depth - 1)
            arg = self.term(a, env, menv, depth - 1)
            if body is not None and arg is not None:
                return App(Lam(x, a, body), arg)
        if self.mu and choice < 0.65:
            m = self._mu_term(t, env, menv, depth)
            if m is not None:
                return m
        arrow = self._unfold_head(t)
        if isinstance(arrow, Arrow):
            x = self.fresh("x")
            body = self.term(arrow.cod, {**env, x: arrow.dom}, menv, depth - 1)
            if body is not None:
                return Lam(x, arrow.dom, body)
        heads = self._heads(env, t)
        if heads:
            return self._spine(rng.choice(heads), t, env, menv, depth - 1)
        return self.term(t, env, menv, 0)

    def _mu_term(self, t, env, menv, depth):
        rng = self.rng
        a = self.fresh("a")
        inner_t, extra = t, None
        if rng.random() < 0.5:
            # (mu a:U->t. ...) n is a mu-redex
            extra = self.ty(rng.randint(1, 2))
            inner_t = Arrow(extra, t)
        inner_menv = {**menv, a: inner_t}
        named = self.term(inner_t, env, inner_menv, depth - 1)
        if named is None:
            return None
        body = Name(a, named)
        if rng.random() < 0.3 and menv:
            b, u = rng.choice(sorted(menv.items(), key=lambda kv: kv[0]))
            other = self.term(u, env, inner_menv, depth - 2)
            if other is not None:
                body = Name(b, other)
        m = Mu(a, inner_t, body)
        if extra is not None:
            arg = self.term(extra, env, menv, depth - 1)
            if arg is None:
                return None
            m = App(m, arg)
        return m

    def _spine(self, head, t, env, menv, depth):
        x, u = head
        m = Var(x)
        for _ in range(4):
            if u == t:
                return m
            u = self._unfold_head(u)
            if not isinstance(u, Arrow):
                return None
            arg = self.term(u.dom, env, menv, depth)
            if arg is None:
                return None
            m = App(m, arg)
            u = u.cod
        return m if u == t else None

    def sample(self, t=None, env=None, depth=4, tries=50):
        """A term of type t (random if omitted) under env, or None."""
        for _ in range(tries):
            ty = t if t is not None else self.ty(self.rng.randint(1, 4))
            m = self.term(ty, dict(env or {}), {}, depth)
            if m is not None:
                return m, ty
        return None
