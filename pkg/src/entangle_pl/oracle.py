"""Cross-check: native engine vs transpiled program.

For every program/queries pair the checker runs each query twice — once
natively (``~`` syntax enabled) and once against the transpiled program
with the transformed query (``~`` syntax disabled) — and compares the two
solution multisets.  Solutions are compared after alpha-normalising
machine-generated variable names, since the two runs allocate different
serial numbers.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .engine import Engine
from .transpiler import transpile, transform_query

# Unbound cells render as _G<serial>; an unbound interclausal variable
# renders as its ~Name.  Both stand for "some unconstrained variable" and
# must compare equal across the two runs.
_VAR_TOKEN = re.compile(r"_G\d+|~[A-Z_]\w*")

_LISTING = re.compile(r"\blisting\b")


def normalize_solution(solution) -> tuple:
    mapping = {}

    def canon(match):
        tok = match.group(0)
        if tok not in mapping:
            mapping[tok] = f"_A{len(mapping)}"
        return mapping[tok]

    # Sort by variable name first: the transformed query may mention the
    # same variables in a different order, and the alpha-numbering must
    # not depend on that order.
    return tuple(
        (name, _VAR_TOKEN.sub(canon, value))
        for name, value in sorted(solution.visible_items(), key=lambda nv: nv[0])
    )


def solution_multiset(engine: Engine, query: str, limit: int | None = None) -> Counter:
    counter = Counter()
    gen = engine.query(query)
    try:
        for i, sol in enumerate(gen):
            counter[normalize_solution(sol)] += 1
            if limit is not None and i + 1 >= limit:
                break
    finally:
        gen.close()
    return counter


@dataclass
class PairResult:
    program: str
    query: str
    ok: bool
    native: int
    transpiled: int
    detail: str = ""


@dataclass
class OracleReport:
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.results) and all(r.ok for r in self.results)

    def lines(self):
        for r in self.results:
            if r.ok:
                yield f"OK        {r.program} :: {r.query}"
            else:
                yield (
                    f"MISMATCH  {r.program} :: {r.query}"
                    f" (native {r.native}, transpiled {r.transpiled})"
                    + (f" {r.detail}" if r.detail else "")
                )


def check_program(
    program_text: str,
    queries,
    label: str = "<program>",
    limit: int | None = None,
    engine_options: dict | None = None,
) -> list:
    options = dict(engine_options or {})
    options.pop("allow_evars", None)
    result = transpile(program_text)
    out = []
    for query in queries:
        if _LISTING.search(query):
            continue  # output inspection, not a solution set
        native = Engine(allow_evars=True, **options)
        native.consult_text(program_text)
        native_set = solution_multiset(native, query, limit)

        oracle = Engine(allow_evars=False, **options)
        oracle.consult_text(result.text)
        oracle_set = solution_multiset(oracle, transform_query(query, result), limit)

        ok = native_set == oracle_set
        detail = ""
        if not ok:
            missing = list((native_set - oracle_set).keys())[:1]
            extra = list((oracle_set - native_set).keys())[:1]
            bits = []
            if missing:
                bits.append(f"native-only e.g. {missing[0]}")
            if extra:
                bits.append(f"transpiled-only e.g. {extra[0]}")
            detail = "; ".join(bits)
        out.append(
            PairResult(
                label,
                query,
                ok,
                sum(native_set.values()),
                sum(oracle_set.values()),
                detail,
            )
        )
    return out


def read_queries(path: Path) -> list:
    queries = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        queries.append(line)
    return queries


_GSERIAL = re.compile(r"_G\d+")


def canonical_transcript(program_text: str, queries) -> str:
    """Replayable expected-output text for a program and its queries.

    One block per query: the query line prefixed ``?- ``, then one line per
    solution (``true.`` when variable-free), or ``false.`` if there are
    none.  Generated variable serials are renumbered per block so the text
    is stable across unrelated engine changes.
    """
    blocks = []
    for query in queries:
        engine = Engine()
        engine.consult_text(program_text)
        lines = []
        for sol in engine.query(query):
            text = str(sol)
            lines.append("true." if text == "true" else text)
        if not lines:
            lines.append("false.")
        mapping = {}

        def renumber(match):
            tok = match.group(0)
            if tok not in mapping:
                mapping[tok] = f"_G{len(mapping)}"
            return mapping[tok]

        body = _GSERIAL.sub(renumber, "\n".join(lines))
        blocks.append(f"?- {query}\n{body}\n")
    return "\n".join(blocks)


def check_directory(
    directory, limit: int | None = None, engine_options: dict | None = None
) -> OracleReport:
    directory = Path(directory)
    report = OracleReport()
    for program_path in sorted(directory.glob("*.pl")):
        queries_path = program_path.with_suffix(".queries")
        if not queries_path.exists():
            continue
        report.results.extend(
            check_program(
                program_path.read_text(),
                read_queries(queries_path),
                label=program_path.name,
                limit=limit,
                engine_options=engine_options,
            )
        )
    return report
