"""Contract tests for the term store, run against both kernels."""

import random

import pytest


def test_kernel_selection_env(monkeypatch):
    import importlib

    import entangle_pl.kernel as K

    monkeypatch.setenv("ENTANGLE_PL_KERNEL", "py")
    mod = importlib.reload(K)
    assert mod.IMPL == "py"
    monkeypatch.setenv("ENTANGLE_PL_KERNEL", "bogus")
    with pytest.raises(ImportError):
        importlib.reload(K)
    monkeypatch.delenv("ENTANGLE_PL_KERNEL")
    mod = importlib.reload(K)
    assert mod.IMPL in ("py", "c")


def test_var_serials_increase(kernel):
    s = kernel.Store()
    a, b, c = s.new_var("A"), s.new_var(), s.new_var("C")
    assert a.serial < b.serial < c.serial
    assert a.name == "A" and b.name is None


def test_evar_interning(kernel):
    s = kernel.Store()
    x1 = s.evar("~X")
    x2 = s.evar("~X")
    y = s.evar("~Y")
    assert x1 is x2
    assert x1 is not y
    assert isinstance(x1, kernel.EVar)
    assert isinstance(x1, kernel.Var)  # EVars behave as ordinary variables
    assert x1.name == "~X"


def test_bind_trail_undo(kernel):
    s = kernel.Store()
    v1, v2, v3 = s.new_var(), s.new_var(), s.new_var()
    s.bind(v1, kernel.Atom("a"))
    mark = s.mark()
    s.bind(v2, kernel.Int(1))
    s.bind(v3, v1)
    assert s.bound_cells() and len(s.bound_cells()) == 3
    s.undo_to(mark)
    assert v1.ref is not None
    assert v2.ref is None and v3.ref is None
    s.undo_to(0)
    assert s.bound_cells() == []


def test_deref_chain(kernel):
    s = kernel.Store()
    a, b, c = s.new_var(), s.new_var(), s.new_var()
    s.bind(a, b)
    s.bind(b, c)
    assert kernel.deref(a) is c
    s.bind(c, kernel.Atom("end"))
    assert kernel.deref(a).name == "end"


def test_unify_basics(kernel):
    s = kernel.Store()
    A, I, St = kernel.Atom, kernel.Int, kernel.Struct
    assert kernel.unify(A("a"), A("a"), s, False)
    assert not kernel.unify(A("a"), A("b"), s, False)
    assert kernel.unify(I(3), I(3), s, False)
    assert not kernel.unify(I(3), I(4), s, False)
    assert not kernel.unify(I(3), A("3"), s, False)
    x, y = s.new_var(), s.new_var()
    assert kernel.unify(St("f", (x, I(2))), St("f", (A("a"), y)), s, False)
    assert kernel.deref(x).name == "a"
    assert kernel.deref(y).value == 2
    assert not kernel.unify(St("f", (x,)), St("g", (x,)), s, False)
    assert not kernel.unify(St("f", (x,)), St("f", (x, x)), s, False)


def test_var_var_binding_direction(kernel):
    # the younger variable must point at the older one, so that undoing a
    # query never leaves an older cell referencing a recycled younger cell
    s = kernel.Store()
    old = s.new_var()
    young = s.new_var()
    assert kernel.unify(young, old, s, False)
    assert young.ref is old and old.ref is None
    s2 = kernel.Store()
    old2 = s2.new_var()
    young2 = s2.new_var()
    assert kernel.unify(old2, young2, s2, False)  # argument order irrelevant
    assert young2.ref is old2 and old2.ref is None


def test_unify_failure_restores_store(kernel):
    s = kernel.Store()
    x, y = s.new_var(), s.new_var()
    St, A, I = kernel.Struct, kernel.Atom, kernel.Int
    before = s.mark()
    # x gets bound while matching the first argument, then the clash on
    # the second argument must undo it
    assert not kernel.unify(
        St("f", (x, I(1))), St("f", (A("a"), I(2))), s, False
    )
    assert s.mark() == before
    assert x.ref is None and y.ref is None


def test_occurs_check(kernel):
    s = kernel.Store()
    x = s.new_var()
    fx = kernel.Struct("f", (x,))
    assert kernel.occurs(x, fx)
    assert not kernel.occurs(x, kernel.Struct("f", (s.new_var(),)))
    assert not kernel.unify(x, fx, s, True)
    assert x.ref is None
    assert kernel.unify(x, fx, s, False)  # rational-tree bind when disabled


def test_copy_term_freshens_vars_only(kernel):
    s = kernel.Store()
    x = s.new_var("X")
    e = s.evar("~E")
    t = kernel.Struct("f", (x, x, e, kernel.Atom("k")))
    c = kernel.copy_term(t, s)
    assert c is not t
    assert c.args[0] is c.args[1]  # sharing preserved
    assert c.args[0] is not x  # ordinary variable freshened
    assert c.args[2] is e  # program-wide variable is never freshened
    assert c.args[3].name == "k"


def test_copy_term_follows_bindings(kernel):
    s = kernel.Store()
    x, y = s.new_var(), s.new_var()
    s.bind(x, kernel.Struct("g", (y,)))
    c = kernel.copy_term(kernel.Struct("f", (x,)), s)
    inner = c.args[0]
    assert inner.name == "g" and inner.args[0] is not y


def test_copy_terms_shares_across_members(kernel):
    s = kernel.Store()
    x = s.new_var()
    a, b = kernel.copy_terms((kernel.Struct("f", (x,)), x), s)
    assert a.args[0] is b


def test_standard_order(kernel):
    s = kernel.Store()
    v1, v2 = s.new_var(), s.new_var()
    A, I, St = kernel.Atom, kernel.Int, kernel.Struct
    cmp = kernel.compare_terms
    assert cmp(v1, v2) < 0 and cmp(v2, v1) > 0  # by age
    assert cmp(v1, v1) == 0
    assert cmp(v2, I(0)) < 0  # Var < Int
    assert cmp(I(99), A("a")) < 0  # Int < Atom
    assert cmp(A("z"), St("a", (I(1),))) < 0  # Atom < Compound
    assert cmp(I(-2), I(3)) < 0
    assert cmp(A("ab"), A("b")) < 0
    assert cmp(St("f", (I(1),)), St("f", (I(1), I(1)))) < 0  # arity first
    assert cmp(St("g", (I(9),)), St("f", (I(1), I(1)))) < 0
    assert cmp(St("f", (I(1), I(2))), St("f", (I(1), I(3)))) < 0  # leftmost arg
    assert cmp(St("f", (I(1), I(2))), St("f", (I(1), I(2)))) == 0


def _random_term(kernel, rng, vars_pool, depth=0):
    if depth >= 3 or rng.random() < 0.25:
        leaf = rng.random()
        if leaf < 0.4:
            return rng.choice(vars_pool)
        if leaf < 0.7:
            return kernel.Int(rng.randrange(4))
        return kernel.Atom(rng.choice("abc"))
    name = rng.choice("fgh")
    arity = rng.randrange(1, 4)
    return kernel.Struct(
        name,
        tuple(_random_term(kernel, rng, vars_pool, depth + 1) for _ in range(arity)),
    )


def test_order_totality_randomized(kernel):
    rng = random.Random(20260814)
    s = kernel.Store()
    pool = [s.new_var() for _ in range(4)]
    terms = [_random_term(kernel, rng, pool) for _ in range(60)]
    cmp = kernel.compare_terms
    for _ in range(300):
        a, b, c = rng.choice(terms), rng.choice(terms), rng.choice(terms)
        assert cmp(a, b) == -cmp(b, a)
        assert cmp(a, a) == 0
        if cmp(a, b) <= 0 and cmp(b, c) <= 0:
            assert cmp(a, c) <= 0
