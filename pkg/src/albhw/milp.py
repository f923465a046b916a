"""Solver-agnostic integer linear model representation.

A model holds named variables (with bounds and integrality), linear
constraints, and a linear objective. A symbol table maps variable names
back to their structural role (station-open, task-worker-station
assignment, worker-station staffing, worker counts, station-emptied
flags, savings). Models built by this package additionally carry a
:class:`StationStructure` that the embedded backend exploits; the plain
IR is what gets exported to LP format for external solvers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

BINARY = "binary"
INTEGER = "integer"
CONTINUOUS = "continuous"

LE = "<="
GE = ">="
EQ = "="

MIN = "min"
MAX = "max"

OPTIMAL = "OPTIMAL"
FEASIBLE = "FEASIBLE"
INFEASIBLE = "INFEASIBLE"
TIME_LIMIT = "TIME_LIMIT"

INT_TOL = 1e-6
INF = float("inf")


class ModelError(ValueError):
    """Inconsistent model definition or export problem."""


@dataclass(frozen=True)
class Variable:
    name: str
    lb: float
    ub: float
    kind: str  # binary | integer | continuous


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[str, float], ...]
    sense: str  # <= | >= | =
    rhs: float


@dataclass(frozen=True)
class StationStructure:
    """Station-assignment shape of a model, for the embedded backend.

    ``load_times[i-1][h-1]`` is the coefficient of the (task i, type h)
    assignment in the station capacity rows (original or lifted time, None
    when the pair is ineligible). ``allowed_stations``/``allowed_types``
    reflect exactly which assignment variables exist. ``prec`` holds
    (pred, succ, minimum index gap) triples mirroring the precedence rows.

    ``memo_mode`` states which cross-node dominance is sound: "shift" when
    every station restriction is a valid inequality of the full problem
    (assignments may be compacted toward earlier stations), "exact" when
    restrictions pin absolute indices. ``type_counts`` fixes the per-type
    worker counts; ``allow_idle`` permits open stations with no tasks
    (staffed by the cheapest type); ``savings_mode`` marks a model whose
    objective is the total cost of emptied stations.
    """

    num_tasks: int
    num_types: int
    num_stations: int
    capacity: int
    type_costs: tuple[int, ...]
    load_times: tuple[tuple[int | None, ...], ...]
    allowed_types: tuple[frozenset[int], ...]
    allowed_stations: tuple[frozenset[int], ...]
    max_tasks: tuple[int, ...]
    prec: tuple[tuple[int, int, int], ...]
    memo_mode: str = "shift"  # shift | exact
    type_counts: tuple[int, ...] | None = None
    allow_idle: bool = False
    savings_mode: bool = False


@dataclass
class MilpModel:
    name: str = field(default="model", compare=False)
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective_sense: str = MIN
    objective: tuple[tuple[str, float], ...] = ()
    symbols: dict[str, tuple] = field(default_factory=dict, compare=False)
    structure: StationStructure | None = field(default=None, compare=False, repr=False)

    def add_variable(self, name, lb, ub, kind) -> str:
        if kind == BINARY and (lb, ub) != (0, 1):
            raise ModelError(f"binary variable {name} must have bounds [0,1]")
        self.variables.append(Variable(name, lb, ub, kind))
        return name

    def add_constraint(self, name, terms, sense, rhs) -> None:
        self.constraints.append(Constraint(name, tuple(terms), sense, rhs))

    def set_objective(self, sense, terms) -> None:
        self.objective_sense = sense
        self.objective = tuple(terms)

    def variable_map(self) -> dict[str, Variable]:
        return {v.name: v for v in self.variables}

    def validate(self) -> None:
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ModelError("duplicate variable names")
        known = set(names)
        for con in self.constraints:
            for var, _ in con.terms:
                if var not in known:
                    raise ModelError(f"constraint {con.name} references unknown {var}")
            if con.sense not in (LE, GE, EQ):
                raise ModelError(f"constraint {con.name}: bad sense {con.sense}")
        for var, _ in self.objective:
            if var not in known:
                raise ModelError(f"objective references unknown variable {var}")

    def objective_value(self, values: dict[str, float]) -> float:
        return sum(coef * values.get(var, 0.0) for var, coef in self.objective)


@dataclass(frozen=True)
class SolveResult:
    """Backend contract: OPTIMAL carries a provably optimal incumbent;
    FEASIBLE/TIME_LIMIT carry the best incumbent found (possibly none)
    plus a valid dual bound."""

    status: str
    values: dict[str, float] | None
    objective: float | None
    bound: float | None
    nodes: int
    seconds: float

    def has_incumbent(self) -> bool:
        return self.values is not None


def check_assignment(
    model: MilpModel, values: dict[str, float], tol: float = INT_TOL
) -> list[str]:
    """All constraint/bound/integrality breaches of a full assignment.

    Variables missing from ``values`` are taken as 0.
    """
    issues = []
    for v in model.variables:
        x = values.get(v.name, 0.0)
        if x < v.lb - tol or x > v.ub + tol:
            issues.append(f"{v.name}={x} outside [{v.lb},{v.ub}]")
        if v.kind in (BINARY, INTEGER) and abs(x - round(x)) > tol:
            issues.append(f"{v.name}={x} not integral")
    for con in model.constraints:
        lhs = sum(coef * values.get(var, 0.0) for var, coef in con.terms)
        if con.sense == LE and lhs > con.rhs + tol:
            issues.append(f"{con.name}: {lhs} > {con.rhs}")
        elif con.sense == GE and lhs < con.rhs - tol:
            issues.append(f"{con.name}: {lhs} < {con.rhs}")
        elif con.sense == EQ and abs(lhs - con.rhs) > tol:
            issues.append(f"{con.name}: {lhs} != {con.rhs}")
    return issues


_LEGAL = re.compile(r"[^A-Za-z0-9_.!#$%&(),;?@'`{}~]")


def _lp_name(name: str) -> str:
    clean = _LEGAL.sub("_", name)
    if not clean or clean[0].isdigit() or clean[0] in ".eE":
        clean = "n_" + clean
    return clean


def _num(x: float) -> str:
    if x == int(x):
        return str(int(x))
    return repr(x)


def _terms_text(terms) -> str:
    parts = []
    for var, coef in terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        if parts:
            parts.append(f"{sign} {_num(mag)} {var}")
        else:
            lead = "- " if sign == "-" else ""
            parts.append(f"{lead}{_num(mag)} {var}")
    return " ".join(parts)


def export_lp(model: MilpModel) -> str:
    """Deterministic LP-format text (objective, constraints, bounds,
    integrality sections). Identical models produce identical bytes."""
    model.validate()
    rename = {}
    used = set()
    for v in model.variables:
        clean = _lp_name(v.name)
        if clean in used:
            raise ModelError(f"LP name collision after sanitization: {clean}")
        used.add(clean)
        rename[v.name] = clean

    out = [f"\\ {model.name}"]
    out.append("Minimize" if model.objective_sense == MIN else "Maximize")
    obj = [(rename[var], coef) for var, coef in model.objective]
    out.append(f" obj: {_terms_text(obj)}" if obj else " obj:")
    out.append("Subject To")
    cons_names = set()
    for con in model.constraints:
        cname = _lp_name(con.name)
        if cname in cons_names:
            raise ModelError(f"LP constraint name collision: {cname}")
        cons_names.add(cname)
        terms = [(rename[var], coef) for var, coef in con.terms]
        sense = {LE: "<=", GE: ">=", EQ: "="}[con.sense]
        out.append(f" {cname}: {_terms_text(terms)} {sense} {_num(con.rhs)}")
    out.append("Bounds")
    for v in model.variables:
        name = rename[v.name]
        lo = "-inf" if v.lb == -INF else _num(v.lb)
        hi = "+inf" if v.ub == INF else _num(v.ub)
        out.append(f" {lo} <= {name} <= {hi}")
    generals = [rename[v.name] for v in model.variables if v.kind == INTEGER]
    if generals:
        out.append("General")
        out.append(" " + " ".join(generals))
    binaries = [rename[v.name] for v in model.variables if v.kind == BINARY]
    if binaries:
        out.append("Binary")
        out.append(" " + " ".join(binaries))
    out.append("End")
    return "\n".join(out) + "\n"


def _parse_terms(tokens: list[str]) -> list[tuple[str, float]]:
    terms = []
    sign = 1.0
    coef: float | None = None
    for tok in tokens:
        if tok == "+":
            sign, coef = 1.0, None
        elif tok == "-":
            sign, coef = -1.0, None
        else:
            try:
                val = float(tok)
            except ValueError:
                terms.append((tok, sign * (1.0 if coef is None else coef)))
                sign, coef = 1.0, None
            else:
                coef = val if coef is None else coef * val
    return terms


def import_lp(text: str) -> MilpModel:
    """Parse LP text produced by :func:`export_lp` back into a model."""
    model = MilpModel(name="imported")
    section = None
    bounds: dict[str, tuple[float, float]] = {}
    kinds: dict[str, str] = {}
    seen: list[str] = []
    statements: list[str] = []
    # one statement per line; the exporter never wraps statements
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        if line.lower() in ("minimize", "maximize", "subject to", "st", "s.t.",
                            "bounds", "general", "generals", "binary", "binaries",
                            "end"):
            statements.append(f"@{line.lower()}")
        else:
            statements.append(line)

    def note_var(name: str):
        if name not in kinds:
            kinds[name] = CONTINUOUS
            seen.append(name)

    for stmt in statements:
        if stmt.startswith("@"):
            section = stmt[1:]
            if section in ("minimize", "maximize"):
                model.objective_sense = MIN if section == "minimize" else MAX
            continue
        if section in ("minimize", "maximize"):
            body = stmt.split(":", 1)[1] if ":" in stmt else stmt
            terms = _parse_terms(body.split())
            model.objective = tuple(terms)
            for var, _ in terms:
                note_var(var)
        elif section in ("subject to", "st", "s.t."):
            if ":" in stmt:
                name, body = stmt.split(":", 1)
                name = name.strip()
            else:
                name, body = f"c{len(model.constraints) + 1}", stmt
            m = re.search(r"(<=|>=|=)", body)
            if not m:
                raise ModelError(f"constraint without sense: {stmt}")
            sense = m.group(1)
            lhs, rhs = body[: m.start()], body[m.end():]
            terms = _parse_terms(lhs.split())
            for var, _ in terms:
                note_var(var)
            model.constraints.append(
                Constraint(name, tuple(terms), sense, float(rhs))
            )
        elif section == "bounds":
            toks = stmt.replace("<=", " <= ").replace(">=", " >= ").split()

            def as_num(tok: str) -> float:
                if tok.lstrip("+-").lower() in ("inf", "infinity"):
                    return -INF if tok.startswith("-") else INF
                return float(tok)

            if len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
                name = toks[2]
                note_var(name)
                bounds[name] = (as_num(toks[0]), as_num(toks[4]))
            elif len(toks) == 3 and toks[1] == "<=":
                note_var(toks[0])
                lo = bounds.get(toks[0], (0.0, INF))[0]
                bounds[toks[0]] = (lo, as_num(toks[2]))
            elif len(toks) == 3 and toks[1] == ">=":
                note_var(toks[0])
                hi = bounds.get(toks[0], (0.0, INF))[1]
                bounds[toks[0]] = (as_num(toks[2]), hi)
            elif len(toks) == 2 and toks[1].lower() == "free":
                note_var(toks[0])
                bounds[toks[0]] = (-INF, INF)
            else:
                raise ModelError(f"unsupported bounds line: {stmt}")
        elif section in ("general", "generals"):
            for name in stmt.split():
                note_var(name)
                kinds[name] = INTEGER
        elif section in ("binary", "binaries"):
            for name in stmt.split():
                note_var(name)
                kinds[name] = BINARY

    for name in seen:
        kind = kinds[name]
        default = (0.0, 1.0) if kind == BINARY else (0.0, INF)
        lo, hi = bounds.get(name, default)
        if kind in (BINARY, INTEGER) and lo == int(lo) and hi != INF and hi == int(hi):
            lo, hi = int(lo), int(hi)
        model.variables.append(Variable(name, lo, hi, kind))
    model.validate()
    return model
