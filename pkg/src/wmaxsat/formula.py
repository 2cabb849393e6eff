"""Weighted CNF instances, assignments, cost evaluation and file I/O.

Literals are DIMACS-style signed integers: ``v`` is variable ``v`` and ``-v``
its negation, with variables numbered from 1.  Assignments are sequences of
booleans indexed from 0, so variable ``v`` lives at position ``v - 1``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

log = logging.getLogger(__name__)

Assignment = Tuple[bool, ...]
# None marks a variable that is not fixed by the backbone.
Backbone = Tuple[Optional[bool], ...]


class ContractError(ValueError):
    """An argument violates an operation's precondition."""


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Literal:
    variable: int
    negated: bool = False

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ContractError("0 is not a literal")
        return cls(abs(lit), lit < 0)

    def __int__(self) -> int:
        return -self.variable if self.negated else self.variable

    def __neg__(self) -> "Literal":
        return Literal(self.variable, not self.negated)

    def value_under(self, assignment: Sequence[bool]) -> bool:
        return bool(assignment[self.variable - 1]) != self.negated


@dataclass(frozen=True)
class WeightedClause:
    literals: Tuple[int, ...]
    weight: int

    def __post_init__(self):
        if not self.literals:
            raise ContractError("empty clause")
        if not isinstance(self.weight, int) or self.weight < 1:
            raise ContractError(f"clause weight must be a positive integer, got {self.weight!r}")

    @property
    def is_tautology(self) -> bool:
        lits = set(self.literals)
        return any(-lit in lits for lit in lits)

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        for lit in self.literals:
            if assignment[abs(lit) - 1] == (lit > 0):
                return True
        return False

    def variables(self) -> Tuple[int, ...]:
        seen: Dict[int, None] = {}
        for lit in self.literals:
            seen.setdefault(abs(lit), None)
        return tuple(seen)


@dataclass(frozen=True)
class WeightedInstance:
    """An immutable weighted MAX-SAT instance.

    ``occurrences[lit]`` lists the indices of the clauses containing ``lit``
    and is built once at construction.
    """

    num_variables: int
    clauses: Tuple[WeightedClause, ...]
    occurrences: Dict[int, Tuple[int, ...]] = field(init=False, repr=False, compare=False)
    total_weight: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        clauses = tuple(self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.num_variables < 0:
            raise ContractError("negative variable count")
        occ: Dict[int, List[int]] = {}
        for v in range(1, self.num_variables + 1):
            occ[v] = []
            occ[-v] = []
        for idx, clause in enumerate(clauses):
            for lit in clause.literals:
                if lit not in occ:
                    raise ContractError(
                        f"clause {idx} uses variable {abs(lit)} outside [1, {self.num_variables}]"
                    )
                occ[lit].append(idx)
        object.__setattr__(self, "occurrences", {k: tuple(v) for k, v in occ.items()})
        object.__setattr__(self, "total_weight", sum(c.weight for c in clauses))

    @classmethod
    def from_lists(cls, num_variables: int, clauses: Iterable[Tuple[Sequence[int], int]]) -> "WeightedInstance":
        """Build from ``(literals, weight)`` pairs, deduplicating literals."""
        built = []
        for lits, weight in clauses:
            built.append(WeightedClause(tuple(dict.fromkeys(int(l) for l in lits)), int(weight)))
        return cls(num_variables, tuple(built))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def weights(self) -> List[int]:
        return [c.weight for c in self.clauses]


def check_assignment(instance: WeightedInstance, assignment: Sequence[bool]) -> None:
    if len(assignment) != instance.num_variables:
        raise ContractError(
            f"assignment has {len(assignment)} values, instance has {instance.num_variables} variables"
        )


def evaluate(instance: WeightedInstance, assignment: Sequence[bool]) -> int:
    """Total weight of the clauses satisfied by ``assignment``."""
    check_assignment(instance, assignment)
    return sum(c.weight for c in instance.clauses if c.satisfied_by(assignment))


def unsatisfied_clauses(instance: WeightedInstance, assignment: Sequence[bool]) -> set:
    check_assignment(instance, assignment)
    return {i for i, c in enumerate(instance.clauses) if not c.satisfied_by(assignment)}


def hamming_distance(a: Sequence[bool], b: Sequence[bool]) -> int:
    if len(a) != len(b):
        raise ContractError("assignments differ in length")
    return sum(1 for x, y in zip(a, b) if bool(x) != bool(y))


# ---------------------------------------------------------------------------
# File formats


def _int_token(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", lineno) from None


def _make_clause(lits: List[int], weight: int, n: int, lineno: int) -> WeightedClause:
    if weight <= 0:
        raise ParseError(f"clause weight must be positive, got {weight}", lineno)
    if not lits:
        raise ParseError("empty clause", lineno)
    for lit in lits:
        if lit == 0 or abs(lit) > n:
            raise ParseError(f"literal {lit} out of range [1, {n}]", lineno)
    deduped = tuple(dict.fromkeys(lits))
    clause = WeightedClause(deduped, weight)
    if clause.is_tautology:
        log.warning("line %d: tautological clause kept as always satisfied", lineno)
    return clause


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        yield lineno, line


def _parse_dimacs(text: str) -> WeightedInstance:
    n = m = None
    clauses: List[WeightedClause] = []
    for lineno, line in _content_lines(text):
        toks = line.split()
        if toks[0] == "p":
            if n is not None:
                raise ParseError("duplicate problem line", lineno)
            if len(toks) not in (4, 5) or toks[1] != "wcnf":
                raise ParseError(f"malformed header {line!r}", lineno)
            n = _int_token(toks[2], lineno, "variable count")
            m = _int_token(toks[3], lineno, "clause count")
            if n < 0 or m < 0:
                raise ParseError("negative count in header", lineno)
            if len(toks) == 5:
                log.warning("line %d: top weight ignored, all clauses treated as soft", lineno)
            continue
        if n is None:
            raise ParseError("clause before 'p wcnf' header", lineno)
        nums = [_int_token(t, lineno, "token") for t in toks]
        if nums[-1] != 0:
            raise ParseError("clause line missing terminating 0", lineno)
        if 0 in nums[:-1]:
            raise ParseError("0 inside clause", lineno)
        clauses.append(_make_clause(nums[1:-1], nums[0], n, lineno))
    if n is None:
        raise ParseError("missing 'p wcnf' header")
    if len(clauses) != m:
        raise ParseError(f"header declares {m} clauses, found {len(clauses)}")
    return WeightedInstance(n, tuple(clauses))


def _parse_jnh(text: str) -> WeightedInstance:
    lines = _content_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty input") from None
    toks = header.split()
    if len(toks) != 2:
        raise ParseError(f"malformed header {header!r}, expected '<n> <m>'", lineno)
    n = _int_token(toks[0], lineno, "variable count")
    m = _int_token(toks[1], lineno, "clause count")
    clauses: List[WeightedClause] = []
    for lineno, line in lines:
        nums = [_int_token(t, lineno, "token") for t in line.split()]
        if len(nums) < 2:
            raise ParseError("clause line needs '<weight> <k> <lits...>'", lineno)
        weight, k = nums[0], nums[1]
        if k != len(nums) - 2:
            raise ParseError(f"clause declares {k} literals, found {len(nums) - 2}", lineno)
        clauses.append(_make_clause(nums[2:], weight, n, lineno))
    if len(clauses) != m:
        raise ParseError(f"header declares {m} clauses, found {len(clauses)}")
    return WeightedInstance(n, tuple(clauses))


def parse_wcnf(text: str) -> WeightedInstance:
    """Parse DIMACS WCNF, or the jnh archive format when no ``p wcnf`` header exists."""
    for _, line in _content_lines(text):
        if line.split()[0] == "p":
            return _parse_dimacs(text)
    return _parse_jnh(text)


def serialize_wcnf(instance: WeightedInstance) -> str:
    out = [f"p wcnf {instance.num_variables} {instance.num_clauses}"]
    for c in instance.clauses:
        out.append(" ".join(str(x) for x in (c.weight, *c.literals, 0)))
    return "\n".join(out) + "\n"


def load(path) -> WeightedInstance:
    with open(path, encoding="utf-8") as f:
        return parse_wcnf(f.read())


def dump(instance: WeightedInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_wcnf(instance))
