"""Source-level elimination of program-wide variables."""

import pytest

from entangle_pl import Engine, TranspileError, collect_evars, transform_query, transpile
from entangle_pl.kernel import Store, Struct, deref
from entangle_pl.reader import DEFAULT_OPS, read_program
from conftest import answers


def test_layout_first_occurrence_order():
    text = "a(~B, ~A). b(~C) :- c(~A)."
    assert collect_evars(text) == ["~B", "~A", "~C"]
    r = transpile(text)
    assert r.layout == ["~B", "~A", "~C"]
    assert r.slot("~A") == 2


def test_simple_fact_transform():
    r = transpile("a(~X).")
    assert r.text == "a(_IV1,_Env) :- arg(1,_Env,_IV1).\n"
    assert r.predicates == [("a", 1)]
    assert not r.uses_helper


def test_every_predicate_gains_env_argument():
    r = transpile("f(1). g :- f(X), h(X, X). h(_, _).")
    assert "f(1,_Env)." in r.text
    assert "g(_Env) :- f(X,_Env),h(X,X,_Env)." in r.text
    assert r.layout == []


def test_builtins_keep_their_arity():
    r = transpile("p(X) :- Y is X + 1, Y < 9, \\+(Y = 3), q(Y). q(_).")
    assert "is" in r.text and "q(Y,_Env)" in r.text
    assert "is X+1,_Env" not in r.text
    assert "<" in r.text


def test_arg_reads_in_layout_order():
    r = transpile("p :- e2(~B), e1(~A). e1(_). e2(_). first(~A).")
    # layout is [~B, ~A]; the clause must read slot 1 before slot 2
    clause = next(l for l in r.text.splitlines() if l.startswith("p("))
    assert clause.index("arg(1,") < clause.index("arg(2,")


def test_repeated_evar_read_once_per_clause():
    r = transpile("p(X, Y) :- q(~E, X), q(~E, Y). q(_, _).")
    clause = next(l for l in r.text.splitlines() if l.startswith("p("))
    assert clause.count("arg(") == 1


def test_control_constructs_rewritten():
    r = transpile(
        "p :- (a ; b -> c), \\+(d), call(a), findall(X, a, _), e(X). "
        "a. b. c. d. e(_)."
    )
    text = r.text
    assert "a(_Env) ; " in text.replace(";", " ; ") or ";" in text
    assert "\\+(d(_Env))" in text
    assert "call(a(_Env))" in text
    assert "findall(X,a(_Env)," in text


def test_dynamic_call_uses_helper():
    r = transpile("p(G) :- call(G). q :- ~V. r(1).")
    assert r.uses_helper
    assert "'$call_ev'(G,_Env)" in r.text or "'$call_ev'(G" in r.text
    assert "'$call_ev'(G,_) :- var(G),!,call(G)." in r.text
    assert "'$call_ev'(r(V1),E) :- !,r(V1,E)." in r.text
    assert r.text.rstrip().endswith("'$call_ev'(G,_) :- call(G).")


def test_no_helper_when_not_needed():
    r = transpile("p :- q. q.")
    assert not r.uses_helper
    assert "$call_ev" not in r.text


def test_phrase_expanded_statically():
    r = transpile("g --> [x]. p(L) :- phrase(g, L).")
    assert "phrase" not in r.text
    assert "g(L," in r.text


def test_output_contains_no_tilde_and_reparses():
    for src in [
        "a(~X). b(~X).",
        "p(X) :- ~G, q(X). q(1).",
        "v(1,~C1). v(2,~C2). all(A,B) :- v(1,A), v(2,B).",
    ]:
        r = transpile(src)
        assert "~" not in r.text
        oracle = Engine(allow_evars=False)
        oracle.consult_text(r.text)  # must parse cleanly with ~ rejected


def test_reserved_names_in_source_are_renamed():
    r = transpile("keep(~K). p(_Env) :- q(_Env). q(7).")
    pairs = read_program(r.text, Store(), DEFAULT_OPS, False)
    p_head = next(h for h, _ in pairs if h.name == "p")
    first, env = p_head.args
    assert deref(first) is not deref(env)  # user _Env must not capture the env


def test_transform_query_examples():
    r = transpile("a(~X). b(~X).")
    assert transform_query("a(10), b(V).", r) == "_Env=evs(_),a(10,_Env),b(V,_Env)"
    r2 = transpile("color(red). color(green).")
    assert transform_query("color(C).", r2) == "color(C,_Env)"
    r3 = transpile("v(1,~A). v(2,~B). pick(X) :- v(X, _).")
    q = transform_query("pick(X).", r3)
    assert q == "_Env=evs(_,_),pick(X,_Env)"


def test_transform_query_reads_used_slots():
    r = transpile("gate(~G). run :- ~G.")
    q = transform_query("~G = true, run.", r)
    assert q == "_Env=evs(_),arg(1,_Env,_IV1),_IV1=true,run(_Env)"


def test_transform_query_unknown_evar_errors():
    r = transpile("a(~X).")
    with pytest.raises(TranspileError, match="~Zed"):
        transform_query("a(1), ~Zed = 2.", r)


def test_transpiled_runs_equivalently():
    src = "a(~X). b(~X)."
    native = Engine()
    native.consult_text(src)
    r = transpile(src)
    oracle = Engine(allow_evars=False)
    oracle.consult_text(r.text)
    assert answers(native, "a(10), b(V).") == ["V = 10"]
    assert answers(oracle, transform_query("a(10), b(V).", r)) == ["V = 10"]
    assert answers(oracle, transform_query("a(1), b(2).", r)) == []


def test_transpile_rejects_nothing_valid(tmp_path):
    # a program with every supported construct still transpiles
    src = """
    e(~A, ~B).
    g --> [t], { 1 < 2 }.
    p(X) :- (X = 1 -> true ; fail), \\+(X = 2), call(e(_, _)), r.
    r :- findall(Q, e(Q, _), _), phrase(g, [t]).
    """
    r = transpile(src)
    assert "~" not in r.text
    Engine(allow_evars=False).consult_text(r.text)
