"""Tokenizer, parser, and writer tests."""

import re

import pytest

from entangle_pl.errors import PrologSyntaxError
from entangle_pl.kernel import Atom, EVar, Int, Store, Struct, Var
from entangle_pl.reader import (
    DEFAULT_OPS,
    parse_term,
    read_program,
    read_query,
    tokenize,
    write_clause,
    write_term,
)


def parse_one(text):
    store = Store()
    tokens = tokenize(text + " .")
    term, varmap, _ = parse_term(tokens, store, DEFAULT_OPS, {}, 0)
    return term, varmap


def rendered(text):
    term, _ = parse_one(text)
    return write_term(term)


# --- tokenizer ------------------------------------------------------------


def test_token_kinds():
    toks = tokenize("foo(Bar, ~Baz, 42, 'q x') :- true.")
    kinds = [t.kind for t in toks]
    assert kinds == [
        "atom", "punct", "var", "punct", "evar", "punct", "int",
        "punct", "qatom", "punct", "atom", "atom", "end", "eof",
    ]


def test_comments_and_positions():
    toks = tokenize("% line comment\na /* block\ncomment */ b.\n")
    assert [t.text for t in toks[:2]] == ["a", "b"]
    assert toks[0].line == 2 and toks[0].col == 1
    assert toks[1].line == 3 and toks[1].col == 12


def test_quoted_atom_escapes():
    term, _ = parse_one("'it''s\\n\\t\\\\ok'")
    assert term.name == "it's\n\t\\ok"


def test_quoted_atom_raw_newline_rejected():
    with pytest.raises(PrologSyntaxError):
        tokenize("'bad\natom'.")


def test_evar_tokens():
    toks = tokenize("~X ~Foo_9 ~_Hidden.")
    assert [t.text for t in toks[:3]] == ["~X", "~Foo_9", "~_Hidden"]
    with pytest.raises(PrologSyntaxError, match="uppercase"):
        tokenize("~foo.")
    with pytest.raises(PrologSyntaxError, match="disabled"):
        tokenize("~X.", allow_evar=False)


def test_end_token_requires_whitespace():
    toks = tokenize("a. ")
    assert toks[0].kind == "atom" and toks[1].kind == "end"
    # a dot that is not followed by layout is not a clause end
    with pytest.raises(PrologSyntaxError, match="unexpected character"):
        tokenize("a.b.")
    with pytest.raises(PrologSyntaxError):
        read_program("a. b", Store(), DEFAULT_OPS, True)  # missing final end


def test_error_coordinates():
    with pytest.raises(PrologSyntaxError) as err:
        tokenize("a :-\n  'unterminated.")
    assert "line 2" in str(err.value)


# --- parser ---------------------------------------------------------------


def test_precedences():
    assert rendered("1+2*3") == "1+2*3"
    t, _ = parse_one("1+2*3")
    assert t.name == "+" and t.args[1].name == "*"
    t, _ = parse_one("1-2-3")  # yfx associates left
    assert t.args[0].name == "-"
    t, _ = parse_one("a,b;c")
    assert t.name == ";" and t.args[0].name == ","
    t, _ = parse_one("a -> b ; c")
    assert t.name == ";" and t.args[0].name == "->"
    t, _ = parse_one("X = a,b")  # '=' binds tighter than ','
    assert t.name == "," and t.args[0].name == "="
    t, _ = parse_one("\\+ a = b")  # \+ at 900 takes the whole '='
    assert t.name == "\\+" and t.args[0].name == "="


def test_xfx_is_not_associative():
    with pytest.raises(PrologSyntaxError):
        parse_one("a = b = c")


def test_negative_literals():
    t, _ = parse_one("-5")
    assert isinstance(t, Int) and t.value == -5
    t, _ = parse_one("3 - -2")
    assert t.name == "-" and t.args[1].value == -2
    with pytest.raises(PrologSyntaxError, match="integer literal"):
        parse_one("- a")


def test_functional_notation_requires_attached_paren():
    t, _ = parse_one("f(a,b)")
    assert t.name == "f" and len(t.args) == 2
    t, _ = parse_one("'+'(1,2)")
    assert t.name == "+" and len(t.args) == 2
    with pytest.raises(PrologSyntaxError):
        parse_one("f (a)")  # detached paren does not make a call


def test_quoted_atom_is_never_an_operator():
    with pytest.raises(PrologSyntaxError):
        parse_one("1 '+' 2")


def test_lists_and_braces():
    assert rendered("[1,2|T]") == "[1,2|T]"
    t, varmap = parse_one("[1,2|T]")
    from entangle_pl.reader import write_term as wt

    assert re.fullmatch(r"\[1,2\|_G\d+\]", wt(t, use_names=False))
    t, _ = parse_one("[1,2|T]")
    assert t.name == "." and t.args[1].name == "."
    t, _ = parse_one("[]")
    assert isinstance(t, Atom) and t.name == "[]"
    t, _ = parse_one("{a,b}")
    assert t.name == "{}" and t.args[0].name == ","
    t, _ = parse_one("{}")
    assert isinstance(t, Atom)


def test_varmap_sharing_and_anonymous():
    t, varmap = parse_one("f(X, X, _, _, Y)")
    assert t.args[0] is t.args[1]
    assert t.args[2] is not t.args[3]  # each _ is fresh
    assert set(varmap) == {"X", "Y"}


def test_evars_interned_across_clauses():
    store = Store()
    pairs = read_program("a(~X). b(~X). c(~Y).", store, DEFAULT_OPS, True)
    ax = pairs[0][0].args[0]
    bx = pairs[1][0].args[0]
    cy = pairs[2][0].args[0]
    assert isinstance(ax, EVar) and ax is bx and ax is not cy


def test_read_program_head_validation():
    store = Store()
    for bad in ["(a,b) :- c.", "(a ; b).", "3 :- a.", "X :- a.", "\\+(a) :- b."]:
        with pytest.raises(PrologSyntaxError):
            read_program(bad, store, DEFAULT_OPS, True)
    # '[]' is an ordinary (if odd) callable atom, so it may head a clause
    assert read_program("[] :- a.", store, DEFAULT_OPS, True)


def test_read_query_forms():
    store = Store()
    goal, varmap = read_query("a(X), b(Y)", store, DEFAULT_OPS, True)
    assert goal.name == "," and list(varmap) == ["X", "Y"]
    goal2, _ = read_query("a(1).", store, DEFAULT_OPS, True)
    assert goal2.name == "a"
    with pytest.raises(PrologSyntaxError, match="unexpected text"):
        read_query("a(1). b(2).", store, DEFAULT_OPS, True)


# --- writer ---------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    [
        "f(a,b)",
        "1+2*3",
        "(1+2)*3",
        "a:-b,c",
        "[1,2,3]",
        "[a|T]",
        "f(-1)",
        "1- -2",
        "-(a)",
        "\\+(a=b)",
        "*(p(88))",
        "{a,b}",
        "'hello world'",
        "f('[]',[])" ,
        "a;b->c",
        "f(X,Y,X)",
        "''",
        "[f(E),-3,'A b']",
    ],
)
def test_round_trip_is_fixpoint(text):
    first = rendered(text)
    second = rendered(first)
    assert first == second


def test_writer_spacing_rules():
    # clause/alphabetic operators keep spaces, symbolic ones are tight
    assert rendered("a :- b , c") == "a :- b,c"
    assert rendered("X is 1 + 2") == "X is 1+2"
    assert rendered("f(1 - -2)") == "f(1- -2)"


def test_writer_quotes_when_needed():
    assert rendered("'hello world'") == "'hello world'"
    assert rendered("'hello'") == "hello"
    assert rendered("'It''s'") == "'It\\'s'"  # both quotings reparse equally
    assert rendered("+") == "+"
    assert rendered("f(';', '[]', '{}', !)") == "f(;,[],{},!)"


def test_writer_unary_structs_functional():
    assert rendered("*(p(88))") == "*(p(88))"
    assert rendered("-(a)") == "-(a)"
    assert rendered("f(-(1))") == "f(-1)" or rendered("f(-(1))") == "f(-(1))"


def test_write_clause_forms():
    store = Store()
    pairs = read_program("g(S,S). h :- a, b.", store, DEFAULT_OPS, True)
    assert write_clause(*pairs[1]) == "h :- a,b."
    head, body = pairs[0]
    text = write_clause(head, body)
    assert text.startswith("g(") and text.endswith(").")


def test_writer_depth_cap():
    t = Atom("x")
    for _ in range(20):
        t = Struct("f", (t,))
    assert "..." not in write_term(t)
    deep = Atom("x")
    for _ in range(10_001):
        deep = Struct("f", (deep,))
    assert "..." in write_term(deep)


def test_unnamed_vars_render_by_serial():
    store = Store()
    v = store.new_var()
    assert write_term(v) == f"_G{v.serial}"
    named = store.new_var("Q")
    assert write_term(named) == "Q"
    assert write_term(named, use_names=False) == f"_G{named.serial}"
    e = store.evar("~Z")
    assert write_term(e) == "~Z"
    assert write_term(e, use_names=False) == "~Z"
