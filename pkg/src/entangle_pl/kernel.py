"""Selects the term kernel at import time.

Set ``ENTANGLE_PL_KERNEL=c`` or ``=py`` to force one implementation; by
default the compiled kernel is used when it imported successfully and the
pure-Python kernel otherwise.  Both expose the same names and semantics.
"""

from __future__ import annotations

import os

_requested = os.environ.get("ENTANGLE_PL_KERNEL", "").strip().lower()

if _requested == "py":
    from . import _core_py as _impl
elif _requested == "c":
    from . import _core_c as _impl  # type: ignore[attr-defined]
elif _requested in ("", "auto"):
    try:
        from . import _core_c as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as _impl
else:
    raise ImportError(
        f"ENTANGLE_PL_KERNEL={_requested!r} is not one of 'c', 'py', 'auto'"
    )

IMPL = _impl.IMPL
Term = _impl.Term
Atom = _impl.Atom
Int = _impl.Int
Var = _impl.Var
EVar = _impl.EVar
Struct = _impl.Struct
Store = _impl.Store
deref = _impl.deref
occurs = _impl.occurs
unify = _impl.unify
copy_term = _impl.copy_term
copy_terms = _impl.copy_terms
compare_terms = _impl.compare_terms

NIL = Atom("[]")
TRUE = Atom("true")


def make_list(items, tail=None):
    """Build a ``'.'/2`` chain from a Python sequence."""
    t = NIL if tail is None else tail
    for item in reversed(items):
        t = Struct(".", (item, t))
    return t


def list_parts(t):
    """Walk a ``'.'/2`` chain; returns (elements, tail) with tail deref'd."""
    items = []
    t = deref(t)
    while isinstance(t, Struct) and t.name == "." and len(t.args) == 2:
        items.append(t.args[0])
        t = deref(t.args[1])
    return items, t
