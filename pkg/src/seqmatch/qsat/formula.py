"""Prenex quantified 3-CNF formulas: parsing, normalizing, evaluating."""

from __future__ import annotations

from dataclasses import dataclass

EXISTS = "e"
FORALL = "a"
DEFAULT_EVAL_BOUND = 20

Literal = tuple[int, bool]  # (1-based variable, positive?)


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class QuantifiedFormula:
    """Variables are 1..n in prefix order; ``quantifiers[i-1]`` binds variable i."""

    quantifiers: tuple[str, ...]
    clauses: tuple[tuple[Literal, ...], ...]

    @property
    def n(self) -> int:
        return len(self.quantifiers)

    @property
    def m(self) -> int:
        return len(self.clauses)

    def quantifier(self, i: int) -> str:
        return self.quantifiers[i - 1]

    def exists_set(self) -> frozenset[int]:
        return frozenset(i for i in range(1, self.n + 1) if self.quantifier(i) == EXISTS)

    def forall_set(self) -> frozenset[int]:
        return frozenset(i for i in range(1, self.n + 1) if self.quantifier(i) == FORALL)

    def is_normalized(self) -> bool:
        if not self.n or self.quantifiers[0] != EXISTS:
            return False
        for c in self.clauses:
            if list(c) != sorted(c) or any(v == 1 for v, _ in c):
                return False
        return True

    def satisfied_by(self, assignment: dict[int, bool]) -> bool:
        return all(any(assignment[v] == pos for v, pos in c) for c in self.clauses)

    def __str__(self) -> str:
        q = "".join(("E" if k == EXISTS else "A") + f"v{i}" for i, k in enumerate(self.quantifiers, 1))
        body = " & ".join("(" + " | ".join(("" if pos else "~") + f"v{v}" for v, pos in c) + ")" for c in self.clauses)
        return f"{q}: {body or 'true'}"


def make_formula(quantifiers, clauses) -> QuantifiedFormula:
    qs = tuple(quantifiers)
    cs = tuple(tuple((int(v), bool(pos)) for v, pos in c) for c in clauses)
    for k in qs:
        if k not in (EXISTS, FORALL):
            raise FormulaError(f"unknown quantifier {k!r}")
    for c in cs:
        if len(c) != 3:
            raise FormulaError(f"clause {c} does not have exactly three literals")
        for v, _ in c:
            if not 1 <= v <= len(qs):
                raise FormulaError(f"variable {v} is not quantified")
    return QuantifiedFormula(qs, cs)


def normalize(f: QuantifiedFormula) -> QuantifiedFormula:
    """Sort literals; prepend an unused existential variable when needed.

    The reduction wants the first variable existential and absent from the
    matrix. If that is not already so, every variable index shifts by one.
    """
    need = not f.n or f.quantifiers[0] != EXISTS or any(v == 1 for c in f.clauses for v, _ in c)
    if need:
        qs = (EXISTS,) + f.quantifiers
        cs = tuple(tuple((v + 1, pos) for v, pos in c) for c in f.clauses)
    else:
        qs, cs = f.quantifiers, f.clauses
    return QuantifiedFormula(qs, tuple(tuple(sorted(c)) for c in cs))


def parse_qdimacs(text: str) -> QuantifiedFormula:
    """Parse QDIMACS with exactly three literals per clause, then normalize.

    Variables are renumbered in prefix order. Free variables and clauses of
    any other length are rejected.
    """
    header = None
    prefix: list[tuple[str, int]] = []
    clauses: list[list[int]] = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        toks = line.split()
        if toks[0] == "p":
            if header is not None or len(toks) != 4 or toks[1] != "cnf":
                raise FormulaError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(toks[2]), int(toks[3]))
            except ValueError:
                raise FormulaError(f"line {lineno}: malformed header {line!r}") from None
            continue
        if header is None:
            raise FormulaError(f"line {lineno}: content before the 'p cnf' header")
        if toks[0] in ("e", "a"):
            if clauses or pending:
                raise FormulaError(f"line {lineno}: quantifier block after clauses")
            try:
                nums = [int(t) for t in toks[1:]]
            except ValueError:
                raise FormulaError(f"line {lineno}: bad quantifier block") from None
            if not nums or nums[-1] != 0:
                raise FormulaError(f"line {lineno}: quantifier block must end with 0")
            for v in nums[:-1]:
                if v <= 0 or v > header[0]:
                    raise FormulaError(f"line {lineno}: variable {v} out of range")
                if any(v == u for _, u in prefix):
                    raise FormulaError(f"line {lineno}: variable {v} quantified twice")
                prefix.append((toks[0], v))
            continue
        try:
            nums = [int(t) for t in toks]
        except ValueError:
            raise FormulaError(f"line {lineno}: bad clause line {line!r}") from None
        for x in nums:
            if x == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(x)
    if header is None:
        raise FormulaError("missing 'p cnf' header")
    if pending:
        raise FormulaError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise FormulaError(f"header announces {header[1]} clauses, found {len(clauses)}")
    index = {v: i + 1 for i, (_, v) in enumerate(prefix)}
    out = []
    for c in clauses:
        if len(c) != 3:
            raise FormulaError(f"clause {c} has {len(c)} literals; exactly 3 are required")
        lits = []
        for x in c:
            if abs(x) not in index:
                raise FormulaError(f"variable {abs(x)} is free (not quantified)")
            lits.append((index[abs(x)], x > 0))
        out.append(lits)
    return normalize(make_formula([k for k, _ in prefix], out))


def to_qdimacs(f: QuantifiedFormula) -> str:
    lines = [f"p cnf {f.n} {f.m}"]
    i = 1
    while i <= f.n:
        k = f.quantifier(i)
        block = []
        while i <= f.n and f.quantifier(i) == k:
            block.append(str(i))
            i += 1
        lines.append(f"{k} {' '.join(block)} 0")
    for c in f.clauses:
        lines.append(" ".join(str(v if pos else -v) for v, pos in c) + " 0")
    return "\n".join(lines) + "\n"


def evaluate_qbf(f: QuantifiedFormula, bound: int = DEFAULT_EVAL_BOUND) -> bool:
    """Truth value by recursion over the prefix."""
    if f.n > bound:
        raise FormulaError(f"{f.n} variables exceed the evaluation bound {bound}")
    a: dict[int, bool] = {}

    def rec(i: int) -> bool:
        if i > f.n:
            return f.satisfied_by(a)
        vals = []
        for b in (False, True):
            a[i] = b
            vals.append(rec(i + 1))
        del a[i]
        return any(vals) if f.quantifier(i) == EXISTS else all(vals)

    return rec(1)
