"""Depth-first SLD resolution with chronological backtracking, cut,
builtins, and the per-query reset of program-wide variables.

The machine keeps the current goal list as a persistent linked stack of
``(term, cut_barrier, rest, depth)`` tuples and the choice points in a
Python list.  A cut barrier is the choice-point stack height at entry to
the predicate the goal belongs to; ``!`` truncates the stack down to it.
Every binding is trailed, so abandoning or exhausting a query undoes all
of its work, including bindings of ``~Name`` variables; that reset is
what makes them reusable between queries.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import cmp_to_key, lru_cache
from importlib import resources

from .dcg import translate_goal
from .errors import (
    EvaluationError,
    ExistenceError,
    InstantiationError,
    ResourceLimitError,
    TypeMismatchError,
)
from .kernel import (
    NIL,
    Atom,
    Int,
    Store,
    Struct,
    Var,
    compare_terms,
    copy_term,
    copy_terms,
    deref,
    list_parts,
    make_list,
    unify,
)
from .reader import DEFAULT_OPS, read_program, read_query, write_clause, write_term

_FAIL = object()


@dataclass
class Clause:
    head: object
    body: object


class ClauseDB:
    """functor/arity -> clauses in source order; insertion order preserved."""

    def __init__(self):
        self.preds = {}
        self.order = []

    def add(self, key, clause: Clause):
        bucket = self.preds.get(key)
        if bucket is None:
            bucket = []
            self.preds[key] = bucket
            self.order.append(key)
        bucket.append(clause)


class Solution:
    """Ordered name -> rendered-term-text mapping for one answer."""

    __slots__ = ("bindings",)

    def __init__(self, bindings: dict):
        self.bindings = bindings

    def __getitem__(self, name: str) -> str:
        return self.bindings[name]

    def __contains__(self, name: str) -> bool:
        return name in self.bindings

    def items(self):
        return self.bindings.items()

    def visible_items(self):
        return [(n, v) for n, v in self.bindings.items() if not n.startswith("_")]

    def __str__(self):
        vis = self.visible_items()
        if not vis:
            return "true"
        return ", ".join(f"{n} = {v}" for n, v in vis)

    def __eq__(self, other):
        if isinstance(other, Solution):
            return self.bindings == other.bindings
        return NotImplemented

    def __repr__(self):
        return f"Solution({self.bindings!r})"


class _CutTo:
    """Goal-stack marker: commit an if-then-else by truncating choice points."""

    __slots__ = ("height",)

    def __init__(self, height: int):
        self.height = height


class _ClauseCP:
    __slots__ = ("goal", "clauses", "idx", "cont", "mark", "barrier")

    def __init__(self, goal, clauses, idx, cont, mark, barrier):
        self.goal = goal
        self.clauses = clauses
        self.idx = idx
        self.cont = cont
        self.mark = mark
        self.barrier = barrier


class _AltCP:
    __slots__ = ("alt", "alt_barrier", "cont", "mark")

    def __init__(self, alt, alt_barrier, cont, mark):
        self.alt = alt
        self.alt_barrier = alt_barrier
        self.cont = cont
        self.mark = mark


def _cons(term, barrier, rest):
    return (term, barrier, rest)


@lru_cache(maxsize=1)
def prelude_text() -> str:
    return resources.files(__package__).joinpath("assumptions.pl").read_text(
        encoding="utf-8"
    )


class Engine:
    def __init__(
        self,
        occurs_check: bool = False,
        unknown_fail: bool = False,
        allow_evars: bool = True,
        load_prelude: bool = True,
        max_frames: int = 1_000_000,
        out=None,
    ):
        self.store = Store()
        self.db = ClauseDB()
        self.ops = DEFAULT_OPS
        self.occurs_check = occurs_check
        self.unknown_fail = unknown_fail
        self.allow_evars = allow_evars
        self.max_frames = max_frames
        self.out = out
        self._steps = 0
        self._ignore_cuts = False  # regression hook: cut transparency checks
        if load_prelude:
            self.consult_text(prelude_text())

    # --- loading ---------------------------------------------------------

    def consult_text(self, text: str):
        """Parse and add clauses; a parse error adds nothing at all."""
        pairs = read_program(text, self.store, self.ops, self.allow_evars)
        for head, body in pairs:
            arity = len(head.args) if isinstance(head, Struct) else 0
            self.db.add((head.name, arity), Clause(head, body))

    def consult_file(self, path):
        with open(path, "r", encoding="utf-8") as fh:
            self.consult_text(fh.read())

    # --- queries ---------------------------------------------------------

    def query(self, text: str):
        """Parse a query and return its lazy solution sequence."""
        goal, varmap = read_query(text, self.store, self.ops, self.allow_evars)
        return self.solve(goal, varmap)

    def solve(self, goal, varmap=None):
        """Run a goal term; yields eagerly rendered Solutions.

        When the sequence is exhausted or abandoned the trail is undone to
        the query-start mark, so every variable bound by this query (the
        program-wide ones included) is unbound again.
        """
        if varmap is None:
            varmap = {}
        start = self.store.mark()
        self._steps = 0  # frame budget covers the whole solution sequence
        gen = self._run(_cons(goal, 0, None), [])
        try:
            for _ in gen:
                yield Solution(
                    {
                        # argument priority: bare control operators like ;/2
                        # would be ambiguous inside a comma-joined display
                        name: write_term(deref(v), use_names=False, priority=999)
                        for name, v in varmap.items()
                    }
                )
        finally:
            gen.close()
            self.store.undo_to(start)

    # --- machine ---------------------------------------------------------

    def _run(self, goals, cps):
        store = self.store
        occ = self.occurs_check
        failing = False
        while True:
            if failing:
                goals = self._backtrack(cps)
                if goals is _FAIL:
                    return
                failing = False
                continue
            if goals is None:
                yield None
                failing = True
                continue
            term, barrier, rest = goals
            self._steps += 1
            if self._steps > self.max_frames:
                raise ResourceLimitError(
                    f"frame budget exceeded ({self.max_frames})"
                )
            goals = rest
            if type(term) is _CutTo:
                del cps[term.height :]
                continue
            goal = deref(term)
            if goal is not term and isinstance(term, Var):
                barrier = len(cps)  # metavariable call gets a fresh barrier
            if isinstance(goal, Var):
                raise InstantiationError("unbound variable called as a goal")
            if isinstance(goal, Atom):
                name = goal.name
                args = ()
                arity = 0
            elif isinstance(goal, Struct):
                name = goal.name
                args = goal.args
                arity = len(args)
            else:
                raise TypeMismatchError(
                    f"goal is not callable: {write_term(goal)}"
                )

            if name == "," and arity == 2:
                goals = _cons(args[0], barrier, _cons(args[1], barrier, goals))
                continue
            if name == "true" and arity == 0:
                continue
            if name == "fail" and arity == 0:
                failing = True
                continue
            if name == "!" and arity == 0:
                if not self._ignore_cuts:
                    del cps[barrier:]
                continue
            if name == ";" and arity == 2:
                first = deref(args[0])
                if (
                    isinstance(first, Struct)
                    and first.name == "->"
                    and len(first.args) == 2
                ):
                    cond, then = first.args
                    h = len(cps)
                    cps.append(_AltCP(args[1], barrier, goals, store.mark()))
                    goals = _cons(
                        cond, h + 1, _cons(_CutTo(h), 0, _cons(then, barrier, goals))
                    )
                else:
                    cps.append(_AltCP(args[1], barrier, goals, store.mark()))
                    goals = _cons(args[0], barrier, goals)
                continue
            if name == "->" and arity == 2:
                h = len(cps)
                goals = _cons(
                    args[0], h, _cons(_CutTo(h), 0, _cons(args[1], barrier, goals))
                )
                continue
            if name == "\\+" and arity == 1:
                mark = store.mark()
                sub = self._run(_cons(args[0], 0, None), [])
                found = False
                try:
                    next(sub)
                    found = True
                except StopIteration:
                    pass
                finally:
                    sub.close()
                store.undo_to(mark)
                if found:
                    failing = True
                continue
            if name == "call" and arity == 1:
                g = deref(args[0])
                if isinstance(g, Var):
                    raise InstantiationError("call/1: unbound goal")
                goals = _cons(g, len(cps), goals)
                continue
            if name == "findall" and arity == 3:
                template, subgoal, result = args
                mark = store.mark()
                acc = []
                sub = self._run(_cons(subgoal, 0, None), [])
                try:
                    for _ in sub:
                        acc.append(copy_term(template, store))
                finally:
                    sub.close()
                store.undo_to(mark)
                if not unify(result, make_list(acc), store, occ):
                    failing = True
                continue
            if name == "phrase" and arity in (2, 3):
                s0 = args[1]
                s = args[2] if arity == 3 else NIL
                g = translate_goal(args[0], s0, s, store)
                goals = _cons(g, len(cps), goals)
                continue
            if name == "listing" and arity == 1:
                self._listing(args[0])
                continue
            builtin = _BUILTINS.get((name, arity))
            if builtin is not None:
                if not builtin(self, args):
                    failing = True
                continue
            clauses = self.db.preds.get((name, arity))
            if clauses is None:
                if self.unknown_fail:
                    failing = True
                    continue
                raise ExistenceError(name, arity)
            cps.append(_ClauseCP(goal, clauses, 0, goals, store.mark(), len(cps)))
            failing = True  # the backtracker drives clause selection

    def _backtrack(self, cps):
        store = self.store
        occ = self.occurs_check
        while cps:
            cp = cps[-1]
            store.undo_to(cp.mark)
            if type(cp) is _AltCP:
                cps.pop()
                return _cons(cp.alt, cp.alt_barrier, cp.cont)
            clauses = cp.clauses
            idx = cp.idx
            while idx < len(clauses):
                clause = clauses[idx]
                idx += 1
                head, body = copy_terms((clause.head, clause.body), store)
                if unify(head, cp.goal, store, occ):
                    cp.idx = idx
                    cont = cp.cont
                    if idx >= len(clauses):
                        cps.pop()
                    if isinstance(body, Atom) and body.name == "true":
                        return cont
                    return _cons(body, cp.barrier, cont)
            cps.pop()
        return _FAIL

    # --- builtin helpers ---------------------------------------------------

    def _out_stream(self):
        return self.out if self.out is not None else sys.stdout

    def _listing(self, spec):
        a = deref(spec)
        if isinstance(a, Var):
            raise InstantiationError("listing/1: unbound argument")
        if isinstance(a, Atom):
            keys = [k for k in self.db.order if k[0] == a.name]
        elif isinstance(a, Struct) and a.name == "/" and len(a.args) == 2:
            nm = deref(a.args[0])
            ar = deref(a.args[1])
            if not (isinstance(nm, Atom) and isinstance(ar, Int)):
                raise TypeMismatchError("listing/1: expected Name or Name/Arity")
            keys = [(nm.name, ar.value)] if (nm.name, ar.value) in self.db.preds else []
        else:
            raise TypeMismatchError("listing/1: expected Name or Name/Arity")
        out = self._out_stream()
        for key in keys:
            for clause in self.db.preds[key]:
                out.write(write_clause(clause.head, clause.body) + "\n")

    def _eval(self, t):
        t = deref(t)
        if isinstance(t, Int):
            return t.value
        if isinstance(t, Var):
            raise InstantiationError("arithmetic: unbound variable")
        if isinstance(t, Struct):
            name = t.name
            args = t.args
            if len(args) == 2:
                x = self._eval(args[0])
                y = self._eval(args[1])
                if name == "+":
                    return x + y
                if name == "-":
                    return x - y
                if name == "*":
                    return x * y
                if name == "/":
                    if y == 0:
                        raise EvaluationError("division by zero")
                    q = abs(x) // abs(y)
                    return q if (x < 0) == (y < 0) else -q
                if name == "mod":
                    if y == 0:
                        raise EvaluationError("division by zero")
                    return x % y
            elif len(args) == 1 and name == "-":
                return -self._eval(args[0])
        raise EvaluationError(
            f"unknown arithmetic expression: {write_term(t)}"
        )


# --- deterministic builtins ------------------------------------------------


def _bi_unify(e: Engine, args):
    return unify(args[0], args[1], e.store, e.occurs_check)


def _bi_struct_eq(e: Engine, args):
    return compare_terms(args[0], args[1]) == 0


def _bi_struct_neq(e: Engine, args):
    return compare_terms(args[0], args[1]) != 0


def _bi_var(e: Engine, args):
    return isinstance(deref(args[0]), Var)


def _bi_nonvar(e: Engine, args):
    return not isinstance(deref(args[0]), Var)


def _bi_is(e: Engine, args):
    return unify(args[0], Int(e._eval(args[1])), e.store, e.occurs_check)


def _bi_lt(e: Engine, args):
    return e._eval(args[0]) < e._eval(args[1])


def _bi_gt(e: Engine, args):
    return e._eval(args[0]) > e._eval(args[1])


def _bi_le(e: Engine, args):
    return e._eval(args[0]) <= e._eval(args[1])


def _bi_ge(e: Engine, args):
    return e._eval(args[0]) >= e._eval(args[1])


def _bi_num_eq(e: Engine, args):
    return e._eval(args[0]) == e._eval(args[1])


def _bi_num_neq(e: Engine, args):
    return e._eval(args[0]) != e._eval(args[1])


def _bi_arg(e: Engine, args):
    n = deref(args[0])
    t = deref(args[1])
    if isinstance(n, Var) or isinstance(t, Var):
        raise InstantiationError("arg/3: underinstantiated")
    if not isinstance(n, Int):
        raise TypeMismatchError("arg/3: index must be an integer")
    if not isinstance(t, Struct):
        raise TypeMismatchError("arg/3: second argument must be compound")
    i = n.value
    if 1 <= i <= len(t.args):
        return unify(args[2], t.args[i - 1], e.store, e.occurs_check)
    return False


def _bi_functor(e: Engine, args):
    t = deref(args[0])
    if isinstance(t, Struct):
        return unify(args[1], Atom(t.name), e.store, e.occurs_check) and unify(
            args[2], Int(len(t.args)), e.store, e.occurs_check
        )
    if isinstance(t, (Atom, Int)):
        return unify(args[1], t, e.store, e.occurs_check) and unify(
            args[2], Int(0), e.store, e.occurs_check
        )
    name = deref(args[1])
    arity = deref(args[2])
    if isinstance(name, Var) or isinstance(arity, Var):
        raise InstantiationError("functor/3: underinstantiated")
    if not isinstance(arity, Int) or arity.value < 0:
        raise TypeMismatchError("functor/3: arity must be a non-negative integer")
    if arity.value == 0:
        if isinstance(name, (Atom, Int)):
            return unify(t, name, e.store, e.occurs_check)
        raise TypeMismatchError("functor/3: name must be atomic")
    if not isinstance(name, Atom):
        raise TypeMismatchError("functor/3: name must be an atom")
    fresh = tuple(e.store.new_var() for _ in range(arity.value))
    return unify(t, Struct(name.name, fresh), e.store, e.occurs_check)


def _bi_copy_term(e: Engine, args):
    return unify(args[1], copy_term(args[0], e.store), e.store, e.occurs_check)


def _bi_sort(e: Engine, args):
    items, tail = list_parts(args[0])
    if isinstance(tail, Var):
        raise InstantiationError("sort/2: list is not fully instantiated")
    if not (isinstance(tail, Atom) and tail.name == "[]"):
        raise TypeMismatchError("sort/2: first argument must be a proper list")
    ordered = sorted(items, key=cmp_to_key(compare_terms))
    deduped = []
    for x in ordered:
        if not deduped or compare_terms(deduped[-1], x) != 0:
            deduped.append(x)
    return unify(args[1], make_list(deduped), e.store, e.occurs_check)


_BUILTINS = {
    ("=", 2): _bi_unify,
    ("==", 2): _bi_struct_eq,
    ("\\==", 2): _bi_struct_neq,
    ("var", 1): _bi_var,
    ("nonvar", 1): _bi_nonvar,
    ("is", 2): _bi_is,
    ("<", 2): _bi_lt,
    (">", 2): _bi_gt,
    ("=<", 2): _bi_le,
    (">=", 2): _bi_ge,
    ("=:=", 2): _bi_num_eq,
    ("=\\=", 2): _bi_num_neq,
    ("arg", 3): _bi_arg,
    ("functor", 3): _bi_functor,
    ("copy_term", 2): _bi_copy_term,
    ("sort", 2): _bi_sort,
}
